//! Truncated Taylor expansions in the spectral parameter.
//!
//! A univariate jet is the coefficient vector `f(λ0 + e) = Σ c_r e^r`.
//! [`Jet2`] is the bivariate analogue used for `D(x, λ, μ)`: entry `(a, b)`
//! holds `∂_λ^a ∂_μ^b D / (a! b!)`, which is exactly the normalisation used by
//! the main-equation coefficients.

use num_complex::Complex64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Solution of the pencil equation expanded in λ at a fixed point `x`.
///
/// `s[r]` is the r-th Taylor coefficient of `S(x, ·)` and `s_x[r]` that of the
/// x-derivative `S'(x, ·)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionJet {
    pub s: Vec<Complex64>,
    pub s_x: Vec<Complex64>,
}

impl SolutionJet {
    pub fn order(&self) -> usize {
        self.s.len() - 1
    }

    pub fn s_coef(&self, r: isize) -> Complex64 {
        if r < 0 {
            ZERO
        } else {
            self.s.get(r as usize).copied().unwrap_or(ZERO)
        }
    }

    pub fn s_x_coef(&self, r: isize) -> Complex64 {
        if r < 0 {
            ZERO
        } else {
            self.s_x.get(r as usize).copied().unwrap_or(ZERO)
        }
    }
}

/// Taylor coefficients of `sin(λx)/λ` around `lambda`, orders `0..=order`.
pub fn sinc_jet(x: f64, lambda: Complex64, order: usize) -> Vec<Complex64> {
    if x == 0.0 {
        return vec![ZERO; order + 1];
    }
    if (lambda * x).norm() <= 2.0 {
        sinc_jet_series(x, lambda, order)
    } else {
        // λ s(λ) = sin(λx)  =>  λ0 s_r + s_{r-1} = σ_r
        let sin_c = trig_jet(x, lambda, order, false);
        let mut out = Vec::with_capacity(order + 1);
        let mut prev = ZERO;
        for sigma in sin_c {
            let s = (sigma - prev) / lambda;
            out.push(s);
            prev = s;
        }
        out
    }
}

/// Power-series evaluation, valid for any λ but used only when `|λx| <= 2`.
fn sinc_jet_series(x: f64, lambda: Complex64, order: usize) -> Vec<Complex64> {
    // sin(λx)/λ = Σ_k a_k λ^{2k},  a_k = (-1)^k x^{2k+1} / (2k+1)!
    let mut out = vec![ZERO; order + 1];
    let mut a = x; // a_0
    let mut k = 0usize;
    loop {
        let p = 2 * k;
        let mut largest = 0.0f64;
        // d^r/dλ^r λ^p / r! = C(p, r) λ^{p-r}
        for (r, slot) in out.iter_mut().enumerate() {
            if r > p {
                break;
            }
            let term = a * binomial(p, r) * pow_c(lambda, p - r);
            largest = largest.max(term.norm());
            *slot += term;
        }
        k += 1;
        let denom = ((2 * k) * (2 * k + 1)) as f64;
        a *= -x * x / denom;
        if k > 6 + order && (largest < 1e-18 || k > 200) {
            break;
        }
    }
    out
}

/// Taylor coefficients of `sin(λx)` (or `cos(λx)` when `cosine`) around `lambda`.
pub fn trig_jet(x: f64, lambda: Complex64, order: usize, cosine: bool) -> Vec<Complex64> {
    let z = lambda * x;
    let (s, c) = (z.sin(), z.cos());
    let mut out = Vec::with_capacity(order + 1);
    let mut scale = 1.0;
    for r in 0..=order {
        if r > 0 {
            scale *= x / r as f64;
        }
        // r-th derivative of sin is sin(z + rπ/2)
        let phase = if cosine { r + 1 } else { r } % 4;
        let d = match phase % 4 {
            0 => s,
            1 => c,
            2 => -s,
            _ => -c,
        };
        out.push(d * scale);
    }
    out
}

/// Jet of the zero-potential solution `S(x, λ) = sin(λx)/λ`.
pub fn zero_potential_jet(x: f64, lambda: Complex64, order: usize) -> SolutionJet {
    SolutionJet {
        s: sinc_jet(x, lambda, order),
        s_x: trig_jet(x, lambda, order, true),
    }
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn pow_c(z: Complex64, p: usize) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..p {
        acc *= z;
    }
    acc
}

/// Bivariate truncated Taylor expansion, coefficients indexed `[a][b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    coef: Vec<Vec<Complex64>>,
}

impl Jet2 {
    pub fn zeros(order_l: usize, order_m: usize) -> Self {
        Self {
            coef: vec![vec![ZERO; order_m + 1]; order_l + 1],
        }
    }

    pub fn order_l(&self) -> usize {
        self.coef.len() - 1
    }

    pub fn order_m(&self) -> usize {
        self.coef[0].len() - 1
    }

    /// Taylor coefficient `∂_λ^a ∂_μ^b f / (a! b!)`.
    pub fn get(&self, a: usize, b: usize) -> Complex64 {
        self.coef[a][b]
    }

    /// Plain mixed partial derivative `∂_λ^a ∂_μ^b f`.
    pub fn derivative(&self, a: usize, b: usize) -> Complex64 {
        self.coef[a][b] * factorial(a) * factorial(b)
    }

    fn set(&mut self, a: usize, b: usize, v: Complex64) {
        self.coef[a][b] = v;
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Relative separation below which `D` itself is taken from its limit expansion.
pub const COALESCENCE_THRESHOLD: f64 = 1e-6;

/// Separation below which the coefficients up to total order `p` are taken
/// from the limit expansion. The divided difference loses about
/// `|λ − μ|^{−(p+1)}` in relative accuracy, so the radius grows with `p`.
pub fn coalescence_radius(lambda: Complex64, p: usize) -> f64 {
    COALESCENCE_THRESHOLD.powf(1.0 / (p + 1) as f64) * lambda.norm().max(1.0)
}

pub fn coalesced(lambda: Complex64, mu: Complex64, p: usize) -> bool {
    (lambda - mu).norm() < coalescence_radius(lambda, p)
}

/// Solution-jet order that keeps the limit expansion accurate across the
/// whole coalescence radius.
pub fn required_jet_order(order_l: usize, order_m: usize) -> usize {
    order_l + order_m + 24
}

/// Jet of `D(x, λ, μ) = (S(λ)S'(μ) − S'(λ)S(μ)) / (λ − μ)`.
///
/// `jl` and `jm` are the solution jets at `lambda` and `mu`. On the coalesced
/// branch only `jl` is used; it should carry [`required_jet_order`]
/// coefficients.
pub fn divided_difference_jet(
    lambda: Complex64,
    mu: Complex64,
    jl: &SolutionJet,
    jm: &SolutionJet,
    order_l: usize,
    order_m: usize,
) -> Jet2 {
    if coalesced(lambda, mu, order_l + order_m) {
        return limit_jet(mu - lambda, jl, order_l, order_m);
    }
    let u = lambda - mu;
    let mut w = Jet2::zeros(order_l, order_m);
    for i in 0..=order_l {
        for j in 0..=order_m {
            let v = jl.s_coef(i as isize) * jm.s_x_coef(j as isize) - jl.s_x_coef(i as isize) * jm.s_coef(j as isize);
            w.set(i, j, v);
        }
    }
    // 1/(u + e1 - e2): coefficient of e1^α e2^β is (-1)^α C(α+β, α) / u^{α+β+1}
    let inv_u = u.inv();
    let mut inv_pow = vec![inv_u];
    for _ in 0..(order_l + order_m) {
        let last = *inv_pow.last().unwrap();
        inv_pow.push(last * inv_u);
    }
    let inv = |a: usize, b: usize| -> Complex64 {
        let sign = if a.is_multiple_of(2) { 1.0 } else { -1.0 };
        inv_pow[a + b] * (sign * binomial(a + b, a))
    };
    let mut out = Jet2::zeros(order_l, order_m);
    for a in 0..=order_l {
        for b in 0..=order_m {
            let mut acc = ZERO;
            for i in 0..=a {
                for j in 0..=b {
                    acc += w.get(i, j) * inv(a - i, b - j);
                }
            }
            out.set(a, b, acc);
        }
    }
    out
}

/// Limit branch: expand `W(λ0 + a, λ0 + b)` at the diagonal, divide each
/// homogeneous part exactly by `(a − b)` and re-expand at `(0, h)`.
fn limit_jet(h: Complex64, jl: &SolutionJet, order_l: usize, order_m: usize) -> Jet2 {
    let k = jl.order();
    assert!(
        k >= order_l + order_m + 2,
        "solution jet too short for the coalesced branch"
    );
    let w = |i: usize, j: usize| -> Complex64 {
        jl.s_coef(i as isize) * jl.s_x_coef(j as isize) - jl.s_x_coef(i as isize) * jl.s_coef(j as isize)
    };
    // q[i][j]: coefficient of a^i b^j in W / (a - b), total degree < k
    let mut q = vec![vec![ZERO; k]; k];
    for d in 1..=k {
        // (a - b) Q_{d-1} = P_d
        let mut prev = ZERO; // q_{i-1, d-i}
        for i in 0..d {
            let cur = prev - w(i, d - i);
            q[i][d - 1 - i] = cur;
            prev = cur;
        }
    }
    let mut out = Jet2::zeros(order_l, order_m);
    for (a, row) in q.iter().enumerate().take(order_l + 1) {
        for b in 0..=order_m {
            let mut acc = ZERO;
            let mut hp = Complex64::new(1.0, 0.0);
            for (j, &coef) in row.iter().enumerate().take(k.saturating_sub(a)).skip(b) {
                acc += coef * binomial(j, b) * hp;
                hp *= h;
            }
            out.set(a, b, acc);
        }
    }
    out
}

/// Jet of `∂_x D(x, λ, μ) = (λ + μ − 2 q1(x)) S(x, λ) S(x, μ)`.
pub fn x_derivative_jet(
    lambda: Complex64,
    mu: Complex64,
    q1: Complex64,
    jl: &SolutionJet,
    jm: &SolutionJet,
    order_l: usize,
    order_m: usize,
) -> Jet2 {
    let base = lambda + mu - 2.0 * q1;
    let mut out = Jet2::zeros(order_l, order_m);
    for a in 0..=order_l {
        for b in 0..=order_m {
            let (ai, bi) = (a as isize, b as isize);
            let v = base * jl.s_coef(ai) * jm.s_coef(bi)
                + jl.s_coef(ai - 1) * jm.s_coef(bi)
                + jl.s_coef(ai) * jm.s_coef(bi - 1);
            out.set(a, b, v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sinc(x: f64, l: Complex64) -> Complex64 {
        (l * x).sin() / l
    }

    #[test]
    fn sinc_series_and_recurrence_agree() {
        // λ·x = 2 sits on the branch boundary; evaluate both sides of it
        for &l in &[c(0.63, 0.1), c(0.64, 0.0), c(3.0, -0.5)] {
            let a = sinc_jet_series(std::f64::consts::PI, l, 8);
            let b = sinc_jet(std::f64::consts::PI, l, 8);
            for r in 0..=8 {
                assert!((a[r] - b[r]).norm() < 1e-11, "r={r} {:?} {:?}", a[r], b[r]);
            }
        }
    }

    #[test]
    fn sinc_jet_matches_finite_differences() {
        let x = 1.7;
        let l = c(2.3, 0.4);
        let j = sinc_jet(x, l, 2);
        let h = 1e-4;
        let fd1 = (sinc(x, l + h) - sinc(x, l - h)) / (2.0 * h);
        let fd2 = (sinc(x, l + h) - 2.0 * sinc(x, l) + sinc(x, l - h)) / (h * h) / 2.0;
        assert!((j[0] - sinc(x, l)).norm() < 1e-14);
        assert!((j[1] - fd1).norm() < 1e-7);
        assert!((j[2] - fd2).norm() < 1e-5);
    }

    #[test]
    fn sinc_at_tiny_lambda() {
        let v = sinc_jet(std::f64::consts::PI, c(1e-9, 0.0), 0)[0];
        assert_relative_eq!(v.re, std::f64::consts::PI, max_relative = 1e-14);
    }

    #[test]
    fn limit_and_generic_branches_meet() {
        let x = 2.1;
        let l = c(1.3, 0.2);
        for (ol, om) in [(0, 0), (0, 1), (1, 1), (1, 2), (2, 2)] {
            let sep = coalescence_radius(l, ol + om);
            let mu = l + Complex64::from_polar(sep * 1.01, 0.7);
            let k = required_jet_order(ol, om);
            let jl = zero_potential_jet(x, l, k);
            let jm = zero_potential_jet(x, mu, k);
            let generic = divided_difference_jet(l, mu, &jl, &jm, ol, om);
            let limit = limit_jet(mu - l, &jl, ol, om);
            for a in 0..=ol {
                for b in 0..=om {
                    let (g, m) = (generic.get(a, b), limit.get(a, b));
                    assert!((g - m).norm() < 1e-9 * g.norm().max(1.0), "{a} {b}: {g} {m}");
                }
            }
        }
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(4, 0), 1.0);
        assert_eq!(binomial(2, 3), 0.0);
    }
}
