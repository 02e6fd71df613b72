//! Contour form of the main equation around a low-index cluster, and the
//! rational difference of Weyl functions that drives it.
//!
//! Only the zero-potential background is supported here: the kernel is
//! evaluated at arbitrary contour points in closed form.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::{self, divided_difference_jet, zero_potential_jet};
use crate::quad::circle;
use crate::spectral_data::{SpectralDataSet, SpectralEntry};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Principal parts `Σ_ν M_{k+ν} / (λ − λ_k)^{ν+1}` of the groups with
/// `|k| ≤ n_star`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalPart {
    poles: Vec<(Complex64, Vec<Complex64>)>,
}

impl RationalPart {
    pub fn new(data: &SpectralDataSet, n_star: usize) -> Self {
        let poles = data
            .groups()
            .iter()
            .filter(|g| g.indices().all(|n| n.unsigned_abs() as usize <= n_star))
            .map(|&g| {
                (
                    data.require(g.start).map(|e: SpectralEntry| e.lambda).unwrap(),
                    data.laurent(g),
                )
            })
            .collect();
        Self { poles }
    }

    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        self.poles
            .iter()
            .map(|(p, coef)| {
                let w = (lambda - p).inv();
                let mut wp = w;
                let mut acc = ZERO;
                for c in coef {
                    acc += c * wp;
                    wp *= w;
                }
                acc
            })
            .sum()
    }

    pub fn poles(&self) -> impl Iterator<Item = Complex64> + '_ {
        self.poles.iter().map(|(p, _)| *p)
    }
}

/// `M̂_*(λ) = M_*(λ) − M̃_*(λ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalDifference {
    pub data: RationalPart,
    pub model: RationalPart,
}

impl RationalDifference {
    pub fn new(data: &SpectralDataSet, model: &SpectralDataSet, n_star: usize) -> Self {
        Self {
            data: RationalPart::new(data, n_star),
            model: RationalPart::new(model, n_star),
        }
    }

    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        self.data.eval(lambda) - self.model.eval(lambda)
    }

    fn check_contour(&self, center: Complex64, radius: f64) -> Result<()> {
        for pole in self.data.poles().chain(self.model.poles()) {
            if ((pole - center).norm() - radius).abs() < 1e-6 * radius.max(1.0) {
                return Err(Error::ContourTouchesPole { radius, pole });
            }
        }
        Ok(())
    }
}

/// `max(max_γ |M̂_*|, sqrt(Σ_{|n|>n_*} (n ξ_n)²))` on `|λ − center| = radius`.
pub fn split_delta_metric(
    data: &SpectralDataSet,
    model: &SpectralDataSet,
    n_star: usize,
    center: Complex64,
    radius: f64,
    nodes: usize,
) -> Result<f64> {
    let diff = RationalDifference::new(data, model, n_star);
    diff.check_contour(center, radius)?;
    let on_contour = circle(center, radius, nodes).fold(0.0f64, |m, l| m.max(diff.eval(l).norm()));
    let tail = crate::spectral_data::compute_diagnostics(data, model, n_star)?.omega_n;
    Ok(on_contour.max(tail))
}

/// Nyström discretization of
/// `v(λ) = S̃(λ) + (1/2πi)∮ D̃(λ, μ) M̂_*(μ) v(μ) dμ` at one `x`.
#[derive(Debug, Clone)]
pub struct ContourSolution {
    pub x: f64,
    pub center: Complex64,
    pub mu: Vec<Complex64>,
    /// Trapezoid weights times `M̂_*(μ_l)`.
    pub weighted: Vec<Complex64>,
    pub v: Vec<Complex64>,
}

pub fn solve_contour_main(
    diff: &RationalDifference,
    x: f64,
    center: Complex64,
    radius: f64,
    nodes: usize,
) -> Result<ContourSolution> {
    diff.check_contour(center, radius)?;
    let mu: Vec<Complex64> = circle(center, radius, nodes).collect();
    let n = mu.len();
    let weighted: Vec<Complex64> = mu.iter().map(|&m| (m - center) / n as f64 * diff.eval(m)).collect();
    let k = jet::required_jet_order(0, 0);
    let jets: Vec<_> = mu.iter().map(|&m| zero_potential_jet(x, m, k)).collect();
    let mut a = DMatrix::from_element(n, n, ZERO);
    let mut rhs = DVector::from_element(n, ZERO);
    for l in 0..n {
        rhs[l] = jets[l].s[0];
        for c in 0..n {
            let d = divided_difference_jet(mu[l], mu[c], &jets[l], &jets[c], 0, 0).get(0, 0);
            a[(l, c)] = -d * weighted[c];
        }
        a[(l, l)] += 1.0;
    }
    let v = a.lu().solve(&rhs).ok_or(Error::SingularSystem {
        x,
        condition: f64::INFINITY,
    })?;
    Ok(ContourSolution {
        x,
        center,
        mu,
        weighted,
        v: v.iter().copied().collect(),
    })
}

impl ContourSolution {
    /// Taylor coefficient `(1/ν!) ∂^ν_λ v(x, λ)` by Nyström interpolation.
    pub fn v_at(&self, lambda: Complex64, nu: usize) -> Complex64 {
        let k = jet::required_jet_order(nu, 0);
        let jl = zero_potential_jet(self.x, lambda, k);
        let mut acc = jl.s[nu];
        for (l, &m) in self.mu.iter().enumerate() {
            let jm = zero_potential_jet(self.x, m, k);
            let d = divided_difference_jet(lambda, m, &jl, &jm, nu, 0).get(nu, 0);
            acc += d * self.weighted[l] * self.v[l];
        }
        acc
    }

    /// `(E1, E2, E3)`: contour integrals of `M̂_* S̃ v`, `μ M̂_* S̃ v` and
    /// `M̂_* S̃' v`.
    pub fn e_integrals(&self) -> (Complex64, Complex64, Complex64) {
        let mut e = (ZERO, ZERO, ZERO);
        for (l, &m) in self.mu.iter().enumerate() {
            let j = zero_potential_jet(self.x, m, 0);
            let wv = self.weighted[l] * self.v[l];
            e.0 += wv * j.s[0];
            e.1 += wv * m * j.s[0];
            e.2 += wv * j.s_x[0];
        }
        e
    }
}
