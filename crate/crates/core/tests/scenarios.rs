//! End-to-end scenarios on the split-eigenvalue problem and the zero model.

use std::f64::consts::PI;

use num_complex::Complex64;

use pencil_core::contour::split_delta_metric;
use pencil_core::experiments::{
    compute_d_metrics, compute_split_delta_metric, double_laurent, make_split_data, reference_potentials,
    roundtrip_check,
};
use pencil_core::forward::{
    alpha_to_laurent, char_delta, find_eigenvalues, integrate, root_multiplicity, spectral_data, weight_numbers,
    ForwardOptions, PotentialPair, Shooter, DEFAULT_REFINE,
};
use pencil_core::inverse::{run_algorithm1, solve_main, InverseOptions, MainEquation};
use pencil_core::model::Background;
use pencil_core::spectral_data::{compute_diagnostics, SpectralDataSet, Tail};
use pencil_core::RecoveredPotentials;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn recovered(delta: f64) -> RecoveredPotentials {
    let data = make_split_data(delta).unwrap();
    run_algorithm1(&data, &Background::Zero, &InverseOptions::default())
        .unwrap()
        .potentials
}

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().fold(0.0, |m, z| m.max(z.norm()))
}

#[test]
fn recovered_potentials_vanish_at_the_split_eigenvalue() {
    let pot = recovered(0.01).to_potential_pair().unwrap();
    assert!(char_delta(&pot, c(0.6, 0.0)).norm() < 1e-4);
    assert!(char_delta(&pot, c(0.4, -0.04)).norm() < 1e-4);
}

#[test]
fn forward_map_of_recovered_potentials() {
    let pot = recovered(0.01).to_potential_pair().unwrap();
    let data = spectral_data(&pot, 10, c(0.0, 0.0), &ForwardOptions::default()).unwrap();
    assert!(data.is_simple());
    let (p, m) = (data.require(1).unwrap(), data.require(-1).unwrap());
    assert!((p.lambda - c(0.6, 0.0)).norm() < 1e-3);
    assert!((m.lambda - c(0.4, -0.04)).norm() < 1e-3);
    assert!((p.residue - c(-1.0 / PI, -0.796)).norm() < 1e-3);
    assert!((m.residue - c(0.0, 0.796)).norm() < 1e-3);
    // the tail is that of the zero potential
    for e in data.window().filter(|e| e.n.abs() >= 2) {
        assert!((e.lambda - e.n as f64).norm() < 1e-4, "{e:?}");
        assert!((e.residue + e.n as f64 / PI).norm() < 1e-4, "{e:?}");
    }
}

#[test]
fn double_root_potentials() {
    let rec = recovered(0.0);
    let pot = rec.to_potential_pair().unwrap();
    let half = c(0.5, 0.0);
    let sh = Shooter::new(&pot, DEFAULT_REFINE);
    assert_eq!(root_multiplicity(&sh, half, 0.05, 128).unwrap(), 2);

    // weight numbers of the double group reproduce the Laurent pair
    let eig = SpectralDataSet::normalize_ordering(
        &[(-1, half, c(0.0, 0.0)), (1, half, c(0.0, 0.0))],
        Tail::Unspecified,
        Some(c(0.0, 0.0)),
    )
    .unwrap();
    let alpha: Vec<Complex64> = weight_numbers(&pot, &eig, &ForwardOptions::default())
        .unwrap()
        .into_values()
        .collect();
    let m = alpha_to_laurent(&alpha);
    let (m0, m1) = double_laurent();
    assert!((m[0] - m0).norm() < 1e-4, "{m:?}");
    assert!((m[1] - m1).norm() < 1e-4, "{m:?}");
}

#[test]
fn eps4_only_for_multiple_eigenvalues() {
    let opts = InverseOptions::default();
    let simple = run_algorithm1(&make_split_data(0.01).unwrap(), &Background::Zero, &opts).unwrap();
    assert_eq!(max_norm(&simple.eps.eps4), 0.0);
    let double = run_algorithm1(&make_split_data(0.0).unwrap(), &Background::Zero, &opts).unwrap();
    assert!(max_norm(&double.eps.eps4) > 0.1);
    for r in [&simple, &double] {
        assert_eq!(r.eps.eps1[0], c(0.0, 0.0));
        assert_eq!(r.eps.theta[0], c(1.0, 0.0));
        for (t, l) in r.eps.theta.iter().zip(&r.eps.lambda) {
            assert!((t * t + l * l - 1.0).norm() < 1e-12);
        }
    }
}

#[test]
fn theta_departs_from_the_double_case_linearly_in_delta() {
    let opts = InverseOptions::default();
    let base = run_algorithm1(&make_split_data(0.0).unwrap(), &Background::Zero, &opts).unwrap();
    let dist = |delta: f64| {
        let r = run_algorithm1(&make_split_data(delta).unwrap(), &Background::Zero, &opts).unwrap();
        r.eps
            .theta
            .iter()
            .zip(&base.eps.theta)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).norm()))
    };
    let ratio = dist(0.01) / dist(0.001);
    assert!((8.0..12.0).contains(&ratio), "{ratio}");
}

#[test]
fn d_metrics_scale_with_delta() {
    let reference = reference_potentials(200).unwrap();
    let d = |delta: f64| compute_d_metrics(&recovered(delta), &reference).unwrap();
    let (a, b) = (d(0.01), d(0.005));
    assert!((1.8..2.2).contains(&(a.0 / b.0)));
    assert!(((a.0 - 0.0982) / 0.0982).abs() < 0.02);
    assert!(((a.1 - 0.2463) / 0.2463).abs() < 0.03);
    let small = d(0.001);
    assert!(((small.1 - 0.0248) / 0.0248).abs() < 0.03);
    assert_eq!(compute_d_metrics(&reference, &reference).unwrap(), (0.0, 0.0));
}

#[test]
fn contour_metric_is_linear_in_delta() {
    let double = make_split_data(0.0).unwrap();
    let m = |delta: f64| compute_split_delta_metric(&make_split_data(delta).unwrap(), &double, 1, 0.85).unwrap();
    let ratio = m(0.01) / m(0.001);
    assert!((9.0..11.0).contains(&ratio), "{ratio}");
    assert_eq!(m(0.0), 0.0);
}

#[test]
fn tail_perturbation_enters_the_contour_metric() {
    let model = SpectralDataSet::zero_potential(5);
    let mut raw = model.raw();
    for e in &mut raw {
        if e.0 == 3 {
            e.1 += 0.1;
        }
    }
    let data = SpectralDataSet::normalize_ordering(&raw, Tail::ZeroPotential, Some(c(0.0, 0.0))).unwrap();
    let metric = split_delta_metric(&data, &model, 1, c(0.0, 0.0), 1.5, 256).unwrap();
    assert!(metric >= 3.0 * 0.1 - 1e-12, "{metric}");
}

#[test]
fn perturbed_simple_eigenvalue_diagnostics() {
    let model = SpectralDataSet::zero_potential(3);
    let mut raw = model.raw();
    for e in &mut raw {
        if e.0 == 2 {
            e.1 = c(2.1, 0.0);
        }
    }
    let data = SpectralDataSet::normalize_ordering(&raw, Tail::ZeroPotential, Some(c(0.0, 0.0))).unwrap();
    let d = compute_diagnostics(&data, &model, 1).unwrap();
    assert!((d.xi_at(2) - 0.1).abs() < 1e-14);
    assert!((d.omega - 0.2).abs() < 1e-14);
}

#[test]
fn main_system_for_simple_split_data() {
    let data = make_split_data(0.01).unwrap();
    let eq = MainEquation::new(&data, &Background::Zero, &InverseOptions::default()).unwrap();
    assert_eq!(eq.active().dim, 4);
    let labels = eq.active().labels();
    let at_pi = eq.assemble(eq.n_grid());
    let rows: Vec<usize> = (0..4).filter(|&r| labels[r].1 == 1).collect();
    let cols: Vec<usize> = (0..4).filter(|&r| labels[r].1 == 0).collect();
    let sub = |a: usize, b: usize| at_pi.p[(rows[a], cols[b])];
    let det = sub(0, 0) * sub(1, 1) - sub(0, 1) * sub(1, 0);
    assert!(det.norm() > 1e-2, "{det}");

    let mid = solve_main(&eq.assemble(eq.n_grid() / 2), 1e10).unwrap();
    assert!(mid.v.iter().all(|z| z.is_finite()));
    assert!(mid.residual < 1e-12);
}

#[test]
fn double_data_use_the_derivative_block() {
    let data = make_split_data(0.0).unwrap();
    let eq = MainEquation::new(&data, &Background::Zero, &InverseOptions::default()).unwrap();
    assert_eq!(eq.active().max_multiplicity(), 2);
    assert_eq!(eq.active().dim, 4);
}

#[test]
fn model_data_round_trip() {
    let data = SpectralDataSet::zero_potential(5);
    let rep = roundtrip_check(
        &data,
        &Background::Zero,
        3,
        &InverseOptions::default(),
        &ForwardOptions::default(),
    )
    .unwrap();
    assert_eq!(rep.rows.len(), 6);
    assert!(rep.max_lambda_error() < 1e-6);
    assert!(rep.max_m_error() < 1e-6);
    assert_eq!(max_norm(&rep.recovered.q1), 0.0);
}

#[test]
fn numeric_background_reproduces_itself() {
    let pot = PotentialPair::from_fn(200, |x| {
        (c(0.2 * (2.0 * x).cos(), 0.1 * x.sin()), c(0.3 * x.sin(), 0.0))
    })
    .unwrap();
    let bg = Background::numeric(pot, 4, &ForwardOptions::default()).unwrap();
    let data = bg.spectral_data(4);
    let rec = run_algorithm1(&data, &bg, &InverseOptions::default())
        .unwrap()
        .potentials;
    let diff: Vec<Complex64> = rec.q1.iter().zip(&rec.q1_model).map(|(a, b)| a - b).collect();
    assert!(max_norm(&diff) < 1e-10);
    assert!(max_norm(&rec.q0_antideriv) < 1e-10);
}

#[test]
fn wronskian_for_a_complex_potential() {
    let pot = PotentialPair::from_fn(200, |x| {
        (
            c(0.5 * x.sin(), 0.3 * (3.0 * x).cos()),
            c(0.4 * (1.0 - x.cos()), 0.2 * x.sin()),
        )
    })
    .unwrap();
    assert!((integrate(&pot, c(2.0, 1.0), false).wronskian() + 1.0).norm() < 1e-10);
    let eig = find_eigenvalues(&pot, 5, pot.omega0(), &ForwardOptions::default()).unwrap();
    assert_eq!(eig.window_len(), 10);
}
