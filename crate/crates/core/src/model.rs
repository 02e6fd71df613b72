//! Background problem `L̃` of the method of spectral mappings: its solutions,
//! the kernel `D̃`, its derivatives, and its spectral data.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forward::{self, ForwardOptions, PotentialPair, Shooter, Start};
use crate::jet::{self, SolutionJet};
use crate::spectral_data::SpectralDataSet;

/// Highest μ-derivative order of `D̃` offered by [`d_model_mu_deriv`].
pub const P_MAX: usize = 4;

/// `sin(λx)/λ`, with the removable singularity at `λ = 0` handled by series.
pub fn s_model(x: f64, lambda: Complex64) -> Complex64 {
    jet::sinc_jet(x, lambda, 0)[0]
}

/// `cos(λx)`.
pub fn s_model_x(x: f64, lambda: Complex64) -> Complex64 {
    (lambda * x).cos()
}

/// `D̃(x, λ, μ)` of the zero-potential problem.
pub fn d_model(x: f64, lambda: Complex64, mu: Complex64) -> Complex64 {
    let k = jet::required_jet_order(0, 0);
    let jl = jet::zero_potential_jet(x, lambda, k);
    let jm = jet::zero_potential_jet(x, mu, k);
    jet::divided_difference_jet(lambda, mu, &jl, &jm, 0, 0).get(0, 0)
}

/// `∂^p_μ D̃(x, λ, μ)` for `p ≤ P_MAX`.
pub fn d_model_mu_deriv(x: f64, lambda: Complex64, mu: Complex64, p: usize) -> Result<Complex64> {
    if p > P_MAX {
        return Err(Error::OrderTooHigh { order: p, max: P_MAX });
    }
    let k = jet::required_jet_order(0, p);
    let jl = jet::zero_potential_jet(x, lambda, k);
    let jm = jet::zero_potential_jet(x, mu, k);
    Ok(jet::divided_difference_jet(lambda, mu, &jl, &jm, 0, p).derivative(0, p))
}

/// `∂_x D̃(x, λ, μ) = (λ + μ) S̃(x, λ) S̃(x, μ)`.
pub fn d_model_x_deriv(x: f64, lambda: Complex64, mu: Complex64) -> Complex64 {
    (lambda + mu) * s_model(x, lambda) * s_model(x, mu)
}

/// Spectral data of the zero-potential problem for `1 ≤ |n| ≤ n`.
pub fn model_spectral_data(n: usize) -> SpectralDataSet {
    SpectralDataSet::zero_potential(n)
}

/// A background problem with potentials on a grid, solved numerically.
#[derive(Debug, Clone)]
pub struct NumericBackground {
    potentials: PotentialPair,
    shooter: Shooter,
    data: SpectralDataSet,
}

#[derive(Debug, Clone)]
pub enum Background {
    /// `q̃0 = q̃1 = 0`.
    Zero,
    Numeric(Box<NumericBackground>),
}

impl Background {
    /// Numeric background whose spectral data are computed for `|n| ≤ n_max`.
    pub fn numeric(potentials: PotentialPair, n_max: usize, opts: &ForwardOptions) -> Result<Self> {
        let omega0 = potentials.omega0();
        let data = forward::spectral_data(&potentials, n_max, omega0, opts)?;
        let shooter = Shooter::new(&potentials, opts.refine);
        Ok(Background::Numeric(Box::new(NumericBackground {
            potentials,
            shooter,
            data,
        })))
    }

    pub fn omega0(&self) -> Complex64 {
        match self {
            Background::Zero => Complex64::new(0.0, 0.0),
            Background::Numeric(b) => b.data.omega0(),
        }
    }

    /// Spectral data of the background for `1 ≤ |k| ≤ n` (numeric kind: the
    /// window computed at construction).
    pub fn spectral_data(&self, n: usize) -> SpectralDataSet {
        match self {
            Background::Zero => model_spectral_data(n),
            Background::Numeric(b) => b.data.clone(),
        }
    }

    pub fn potentials(&self, n_grid: usize) -> PotentialPair {
        match self {
            Background::Zero => PotentialPair::zero(n_grid),
            Background::Numeric(b) => {
                PotentialPair::from_fn(n_grid, |x| b.potentials.sample(x)).expect("resampling keeps values finite")
            }
        }
    }

    fn fine_stride(&self, n_grid: usize) -> Result<usize> {
        match self {
            Background::Zero => Ok(0),
            Background::Numeric(b) => {
                let steps = b.shooter.steps();
                if steps % n_grid != 0 {
                    return Err(Error::GridMismatch(format!(
                        "inverse grid {n_grid} does not divide the background integration grid {steps}"
                    )));
                }
                Ok(steps / n_grid)
            }
        }
    }

    /// `q̃1` at `x_k = kπ/n_grid`.
    pub fn q1_nodes(&self, n_grid: usize) -> Result<Vec<Complex64>> {
        let stride = self.fine_stride(n_grid)?;
        Ok((0..=n_grid)
            .map(|k| match self {
                Background::Zero => Complex64::new(0.0, 0.0),
                Background::Numeric(b) => b.shooter.q1_fine(k * stride),
            })
            .collect())
    }

    /// `q̃1'` at the nodes by second-order differences.
    pub fn q1_derivative_nodes(&self, n_grid: usize) -> Result<Vec<Complex64>> {
        let q = self.q1_nodes(n_grid)?;
        let h = PI / n_grid as f64;
        let n = q.len();
        Ok((0..n)
            .map(|k| {
                if k == 0 {
                    (-3.0 * q[0] + 4.0 * q[1] - q[2]) / (2.0 * h)
                } else if k == n - 1 {
                    (3.0 * q[k] - 4.0 * q[k - 1] + q[k - 2]) / (2.0 * h)
                } else {
                    (q[k + 1] - q[k - 1]) / (2.0 * h)
                }
            })
            .collect())
    }

    /// λ-jets of `(S̃, S̃')` at every node `x_k = kπ/n_grid`.
    pub fn jets_on_grid(&self, lambda: Complex64, order: usize, n_grid: usize) -> Result<Vec<SolutionJet>> {
        let stride = self.fine_stride(n_grid)?;
        Ok(match self {
            Background::Zero => (0..=n_grid)
                .map(|k| jet::zero_potential_jet(k as f64 * PI / n_grid as f64, lambda, order))
                .collect(),
            Background::Numeric(b) => {
                let sol = b.shooter.jet(lambda, order, Start::Sine, true);
                (0..=n_grid)
                    .map(|k| {
                        let f = k * stride;
                        sol.solution_jet_at(f, b.shooter.sigma_fine(f))
                    })
                    .collect()
            }
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solution_values() {
        assert!(s_model(PI, c(1.0, 0.0)).norm() < 1e-15);
        assert!((s_model(PI / 2.0, c(1.0, 0.0)) - 1.0).norm() < 1e-15);
        assert!((s_model(PI, c(1e-9, 0.0)) - PI).norm() < 1e-14 * PI);
    }

    #[test]
    fn kernel_values() {
        assert!(d_model(PI, c(1.0, 0.0), c(2.0, 0.0)).norm() < 1e-14);
        assert!((d_model(PI, c(1.0, 0.0), c(1.0, 0.0)) - PI).norm() < 1e-13);
        assert!((d_model(PI, c(0.5, 0.0), c(0.5, 0.0)) - 2.0 * PI).norm() < 1e-13);
    }

    #[test]
    fn kernel_mu_derivatives() {
        let (l, m) = (c(2.0, 0.0), c(0.5, 0.0));
        assert_eq!(d_model_mu_deriv(PI, l, m, 0).unwrap(), d_model(PI, l, m));
        let h = 1e-5;
        let fd = (d_model(PI, l, m + h) - d_model(PI, l, m - h)) / (2.0 * h);
        let d1 = d_model_mu_deriv(PI, l, m, 1).unwrap();
        assert!((d1 - fd).norm() < 1e-8 * fd.norm().max(1.0));
        assert!(matches!(
            d_model_mu_deriv(PI, l, m, 5),
            Err(Error::OrderTooHigh { order: 5, max: 4 })
        ));
    }

    #[test]
    fn kernel_mu_derivative_on_the_diagonal() {
        // D(π, λ, μ) around λ = μ = 1/2 from the closed form of sin·cos products
        let l = c(0.5, 0.0);
        let d = |mu: Complex64| {
            let (s, sp) = ((l * PI).sin() / l, (l * PI).cos());
            let (t, tp) = ((mu * PI).sin() / mu, (mu * PI).cos());
            (s * tp - sp * t) / (l - mu)
        };
        let h = 1e-3;
        let fd = (d(l + h) - d(l - h)) / (2.0 * h);
        let v = d_model_mu_deriv(PI, l, l, 1).unwrap();
        assert!((v - fd).norm() < 1e-5, "{v} {fd}");
    }

    #[test]
    fn kernel_x_derivative() {
        assert_eq!(d_model_x_deriv(0.0, c(1.0, 0.0), c(2.0, 0.0)), c(0.0, 0.0));
        assert!((d_model_x_deriv(PI / 2.0, c(1.0, 0.0), c(1.0, 0.0)) - 2.0).norm() < 1e-14);
        let (x, l, m) = (1.0, c(1.3, 0.0), c(0.7, 0.2));
        let h = 1e-5;
        let fd = (d_model(x + h, l, m) - d_model(x - h, l, m)) / (2.0 * h);
        assert!((fd - d_model_x_deriv(x, l, m)).norm() < 1e-8);
    }

    #[test]
    fn model_data_and_weights() {
        let d = model_spectral_data(1);
        assert_eq!(d.require(1).unwrap().residue, c(-1.0 / PI, 0.0));
        assert_eq!(d.require(-1).unwrap().lambda, c(-1.0, 0.0));
        for e in model_spectral_data(3).window() {
            let alpha = -1.0 / e.residue;
            assert!((alpha - PI / e.n as f64).norm() < 1e-15);
        }
    }

    #[test]
    fn numeric_zero_background_matches_closed_form() {
        let bg = Background::numeric(PotentialPair::zero(100), 3, &ForwardOptions::default()).unwrap();
        let l = c(0.7, 0.1);
        let jets = bg.jets_on_grid(l, 3, 50).unwrap();
        let exact = Background::Zero.jets_on_grid(l, 3, 50).unwrap();
        for (a, b) in jets.iter().zip(&exact) {
            for r in 0..=3 {
                assert!((a.s[r] - b.s[r]).norm() < 1e-9);
                assert!((a.s_x[r] - b.s_x[r]).norm() < 1e-9);
            }
        }
        assert!(matches!(bg.jets_on_grid(l, 1, 3), Err(Error::GridMismatch(_))));
    }
}
