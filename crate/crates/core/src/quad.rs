//! Uniform-grid quadrature and circle sampling shared by the solvers.

use num_complex::Complex64;
use std::f64::consts::PI;

/// Running integral `∫_0^{x_k} f` on a uniform grid with step `h`.
///
/// Interval pairs are integrated with Simpson's rule, so the result is exact
/// composite Simpson at even nodes; odd nodes use the matching one-interval
/// quadratic rule. A trailing single interval uses the backward rule.
pub fn cumulative_simpson(f: &[Complex64], h: f64) -> Vec<Complex64> {
    let n = f.len();
    let mut out = vec![Complex64::new(0.0, 0.0); n];
    if n < 2 {
        return out;
    }
    if n == 2 {
        out[1] = (f[0] + f[1]) * (h / 2.0);
        return out;
    }
    for k in 0..n - 1 {
        let pair_start = k % 2 == 0 && k + 2 < n;
        let piece = if pair_start {
            (f[k] * 5.0 + f[k + 1] * 8.0 - f[k + 2]) * (h / 12.0)
        } else {
            (f[k + 1] * 5.0 + f[k] * 8.0 - f[k - 1]) * (h / 12.0)
        };
        out[k + 1] = out[k] + piece;
    }
    out
}

/// Composite Simpson integral over the whole grid.
pub fn simpson(f: &[Complex64], h: f64) -> Complex64 {
    *cumulative_simpson(f, h).last().unwrap_or(&Complex64::new(0.0, 0.0))
}

/// `n` equispaced points on the circle `|λ − center| = radius`.
pub fn circle(center: Complex64, radius: f64, n: usize) -> impl Iterator<Item = Complex64> + Clone {
    (0..n).map(move |l| center + Complex64::from_polar(radius, 2.0 * PI * l as f64 / n as f64))
}

/// Trapezoid approximation of `(1/2πi) ∮ f(λ) dλ` from samples on [`circle`].
pub fn contour_average(center: Complex64, samples: &[(Complex64, Complex64)]) -> Complex64 {
    let n = samples.len() as f64;
    samples.iter().map(|&(l, f)| f * (l - center)).sum::<Complex64>() / n
}

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_exact_for_cubics_at_even_nodes() {
        let n = 11;
        let h = 0.3;
        let f: Vec<Complex64> = (0..n)
            .map(|k| {
                let x = k as f64 * h;
                Complex64::new(x * x * x - 2.0 * x, x * x)
            })
            .collect();
        let cum = cumulative_simpson(&f, h);
        for (k, v) in cum.iter().enumerate().step_by(2) {
            let x = k as f64 * h;
            let exact = Complex64::new(x.powi(4) / 4.0 - x * x, x.powi(3) / 3.0);
            assert!((v - exact).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn odd_nodes_exact_for_quadratics() {
        let h = 0.25;
        let f: Vec<Complex64> = (0..8).map(|k| Complex64::new((k as f64 * h).powi(2), 1.0)).collect();
        let cum = cumulative_simpson(&f, h);
        for (k, v) in cum.iter().enumerate() {
            let x = k as f64 * h;
            assert!((v - Complex64::new(x.powi(3) / 3.0, x)).norm() < 1e-13, "k={k}");
        }
    }

    #[test]
    fn contour_average_picks_residue() {
        let pole = Complex64::new(0.2, -0.1);
        let samples: Vec<_> = circle(Complex64::new(0.0, 0.0), 1.0, 64)
            .map(|l| (l, Complex64::new(3.0, 1.0) / (l - pole)))
            .collect();
        let r = contour_average(Complex64::new(0.0, 0.0), &samples);
        assert!((r - Complex64::new(3.0, 1.0)).norm() < 1e-13);
    }
}
