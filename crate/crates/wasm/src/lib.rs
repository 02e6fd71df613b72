//! Browser bindings. Every export returns a flat `Float64Array`.

use num_complex::Complex64;
use pencil_core::experiments::{self, make_split_data};
use pencil_core::inverse::{run_algorithm1, InverseOptions, RecoveredPotentials};
use pencil_core::{forward, Background, ForwardOptions};
use wasm_bindgen::prelude::*;

fn js_err(e: pencil_core::Error) -> JsValue {
    JsValue::from_str(&e.to_string())
}

fn flatten(r: &RecoveredPotentials) -> Vec<f64> {
    let mut out = r.x.clone();
    out.extend(r.q1.iter().map(|z| z.re));
    out.extend(r.q1.iter().map(|z| z.im));
    out.extend(r.q0_antideriv.iter().map(|z| z.re));
    out.extend(r.q0_antideriv.iter().map(|z| z.im));
    out
}

fn recover(delta: f64, n_grid: usize) -> pencil_core::Result<RecoveredPotentials> {
    let opts = InverseOptions {
        n_grid,
        ..Default::default()
    };
    Ok(run_algorithm1(&make_split_data(delta)?, &Background::Zero, &opts)?.potentials)
}

/// Recovered potentials for split parameter `delta` (`0` gives the double
/// eigenvalue). Layout: five blocks of `n_grid + 1` values:
/// `x, Re q1, Im q1, Re ∫q0, Im ∫q0`.
#[wasm_bindgen]
pub fn recovered_potentials(delta: f64, n_grid: usize) -> Result<Vec<f64>, JsValue> {
    recover(delta, n_grid).map(|r| flatten(&r)).map_err(js_err)
}

/// `[Re λ1, Im λ1, Re λ−1, Im λ−1, Re M1, Im M1, Re M−1, Im M−1, d1, d0, contour metric]`.
#[wasm_bindgen]
pub fn split_summary(delta: f64, n_grid: usize, contour_radius: f64) -> Result<Vec<f64>, JsValue> {
    let run = || -> pencil_core::Result<Vec<f64>> {
        let data = make_split_data(delta)?;
        let (p, m) = (data.require(1)?, data.require(-1)?);
        let rec = recover(delta, n_grid)?;
        let reference = recover(0.0, n_grid)?;
        let (d1, d0) = experiments::compute_d_metrics(&rec, &reference)?;
        let metric = experiments::compute_split_delta_metric(&data, &make_split_data(0.0)?, 1, contour_radius)?;
        Ok(vec![
            p.lambda.re,
            p.lambda.im,
            m.lambda.re,
            m.lambda.im,
            p.residue.re,
            p.residue.im,
            m.residue.re,
            m.residue.im,
            d1,
            d0,
            metric,
        ])
    };
    run().map_err(js_err)
}

/// Eigenvalues of the recovered potentials for `1 ≤ |n| ≤ n_max`, as
/// `[n, Re λ, Im λ]` triples.
#[wasm_bindgen]
pub fn forward_eigenvalues(delta: f64, n_grid: usize, n_max: usize) -> Result<Vec<f64>, JsValue> {
    let run = || -> pencil_core::Result<Vec<f64>> {
        let pot = recover(delta, n_grid)?.to_potential_pair()?;
        let opts = ForwardOptions {
            refine: 4,
            ..Default::default()
        };
        let eig = forward::find_eigenvalues(&pot, n_max, Complex64::new(0.0, 0.0), &opts)?;
        Ok(eig
            .window()
            .flat_map(|e| [e.n as f64, e.lambda.re, e.lambda.im])
            .collect())
    };
    run().map_err(js_err)
}
