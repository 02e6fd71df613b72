//! Direct problem: shooting for the Cauchy solutions, eigenvalue location with
//! multiplicities, Weyl residues and generalized weight numbers.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::jet::SolutionJet;
use crate::quad::{circle, contour_average, par_map, simpson};
use crate::spectral_data::{Group, SpectralDataSet, Tail};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `q1` and `σ` (running integral of `q0`, `σ(0) = 0`) on `x_k = kπ/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialPair {
    q1: Vec<Complex64>,
    sigma: Vec<Complex64>,
}

impl PotentialPair {
    pub fn new(q1: Vec<Complex64>, sigma: Vec<Complex64>) -> Result<Self> {
        if q1.len() != sigma.len() {
            return Err(Error::GridMismatch(format!(
                "q1 has {} nodes, sigma has {}",
                q1.len(),
                sigma.len()
            )));
        }
        if q1.len() < 3 {
            return Err(Error::GridMismatch("at least three nodes are required".into()));
        }
        for (k, (a, b)) in q1.iter().zip(&sigma).enumerate() {
            if !(a.re.is_finite() && a.im.is_finite() && b.re.is_finite() && b.im.is_finite()) {
                return Err(Error::NonFiniteInput { node: k });
            }
        }
        if sigma[0].norm() > 1e-12 {
            return Err(Error::Invalid(format!("sigma(0) = {} but must vanish", sigma[0])));
        }
        Ok(Self { q1, sigma })
    }

    pub fn zero(n_grid: usize) -> Self {
        Self {
            q1: vec![ZERO; n_grid + 1],
            sigma: vec![ZERO; n_grid + 1],
        }
    }

    /// Samples `(q1(x), σ(x))` at the nodes.
    pub fn from_fn(n_grid: usize, f: impl Fn(f64) -> (Complex64, Complex64)) -> Result<Self> {
        let (q1, sigma) = (0..=n_grid).map(|k| f(k as f64 * PI / n_grid as f64)).unzip();
        Self::new(q1, sigma)
    }

    pub fn n_grid(&self) -> usize {
        self.q1.len() - 1
    }

    pub fn step(&self) -> f64 {
        PI / self.n_grid() as f64
    }

    pub fn x(&self, k: usize) -> f64 {
        k as f64 * self.step()
    }

    pub fn q1(&self) -> &[Complex64] {
        &self.q1
    }

    pub fn sigma(&self) -> &[Complex64] {
        &self.sigma
    }

    /// Piecewise cubic Lagrange interpolation of `(q1, σ)` at `x ∈ [0, π]`,
    /// on the four nodes around the cell (stencil shifted inward at the ends).
    /// Grids with fewer than four nodes fall back to linear interpolation.
    pub fn sample(&self, x: f64) -> (Complex64, Complex64) {
        let n = self.n_grid();
        if n < 3 {
            return self.sample_linear(x);
        }
        let t = (x / self.step()).clamp(0.0, n as f64);
        let k = (t.floor() as usize).min(n - 1);
        let first = k.saturating_sub(1).min(n - 3);
        let s = t - first as f64;
        let w = [
            -(s - 1.0) * (s - 2.0) * (s - 3.0) / 6.0,
            s * (s - 2.0) * (s - 3.0) / 2.0,
            -s * (s - 1.0) * (s - 3.0) / 2.0,
            s * (s - 1.0) * (s - 2.0) / 6.0,
        ];
        let combine = |v: &[Complex64]| -> Complex64 { (0..4).map(|i| v[first + i] * w[i]).sum() };
        (combine(&self.q1), combine(&self.sigma))
    }

    /// Linear interpolation of `(q1, σ)` at `x ∈ [0, π]`.
    pub fn sample_linear(&self, x: f64) -> (Complex64, Complex64) {
        let n = self.n_grid();
        let t = (x / self.step()).clamp(0.0, n as f64);
        let k = (t.floor() as usize).min(n - 1);
        let w = t - k as f64;
        (
            self.q1[k] * (1.0 - w) + self.q1[k + 1] * w,
            self.sigma[k] * (1.0 - w) + self.sigma[k + 1] * w,
        )
    }

    /// Mean shift `ω0 = (1/π) ∫ q1`.
    pub fn omega0(&self) -> Complex64 {
        simpson(&self.q1, self.step()) / PI
    }

    pub fn max_norm(&self) -> f64 {
        self.q1.iter().chain(&self.sigma).fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,re_q1,im_q1,re_sigma,im_sigma\n");
        for k in 0..=self.n_grid() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                self.x(k),
                self.q1[k].re,
                self.q1[k].im,
                self.sigma[k].re,
                self.sigma[k].im
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = crate::io::parse_csv(text, &["x", "re_q1", "im_q1", "re_sigma", "im_sigma"])?;
        let n = rows.len().saturating_sub(1);
        let mut q1 = Vec::with_capacity(rows.len());
        let mut sigma = Vec::with_capacity(rows.len());
        for (k, r) in rows.iter().enumerate() {
            let expected = k as f64 * PI / n.max(1) as f64;
            if (r[0] - expected).abs() > 1e-9 {
                return Err(Error::GridMismatch(format!(
                    "row {k}: x = {} but the uniform grid has {expected}",
                    r[0]
                )));
            }
            q1.push(Complex64::new(r[1], r[2]));
            sigma.push(Complex64::new(r[3], r[4]));
        }
        Self::new(q1, sigma)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        Self::from_csv(&std::fs::read_to_string(path)?)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv())?;
        Ok(())
    }
}

/// Initial data at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Start {
    /// `S(0) = 0, S^[1](0) = 1`.
    Sine,
    /// `C(0) = 1, C^[1](0) = 0`.
    Cosine,
}

/// Fixed-step RK4 integrator on a refinement of the potential grid.
///
/// The state is the λ-jet `(y_r, z_r)_{r ≤ K}` of a solution and its
/// quasi-derivative, obtained from the system differentiated in λ.
#[derive(Debug, Clone)]
pub struct Shooter {
    refine: usize,
    steps: usize,
    h: f64,
    // coefficients at half-steps t_j = j h / 2
    q1: Vec<Complex64>,
    sigma: Vec<Complex64>,
}

pub const DEFAULT_REFINE: usize = 10;

impl Shooter {
    pub fn new(pot: &PotentialPair, refine: usize) -> Self {
        let refine = refine.max(1);
        let steps = pot.n_grid() * refine;
        let h = PI / steps as f64;
        let (q1, sigma) = (0..=2 * steps)
            .map(|j| {
                // exact node positions avoid interpolation drift at grid nodes
                let coarse = j as f64 / (2 * refine) as f64;
                pot.sample(coarse * pot.step())
            })
            .unzip();
        Self {
            refine,
            steps,
            h,
            q1,
            sigma,
        }
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn refine(&self) -> usize {
        self.refine
    }

    pub fn q1_fine(&self, i: usize) -> Complex64 {
        self.q1[2 * i]
    }

    pub fn sigma_fine(&self, i: usize) -> Complex64 {
        self.sigma[2 * i]
    }

    fn rhs(&self, j: usize, lambda: Complex64, order: usize, u: &[Complex64], out: &mut [Complex64]) {
        let (q1, s) = (self.q1[j], self.sigma[j]);
        let a = 2.0 * lambda * q1 - lambda * lambda;
        let b = 2.0 * q1 - 2.0 * lambda;
        let k = order + 1;
        let (y, z) = u.split_at(k);
        let (dy, dz) = out.split_at_mut(k);
        for r in 0..k {
            dy[r] = z[r] + s * y[r];
            let mut v = -s * z[r] + (a - s * s) * y[r];
            if r >= 1 {
                v += b * y[r - 1];
            }
            if r >= 2 {
                v -= y[r - 2];
            }
            dz[r] = v;
        }
    }

    /// Integrates the λ-jet of order `order` at `lambda` from `x = 0` to `π`.
    pub fn jet(&self, lambda: Complex64, order: usize, start: Start, with_trace: bool) -> JetSolution {
        let k = order + 1;
        let dim = 2 * k;
        let mut u = vec![ZERO; dim];
        match start {
            Start::Sine => u[k] = ONE,
            Start::Cosine => u[0] = ONE,
        }
        let mut trace = with_trace.then(|| {
            let mut t = Vec::with_capacity((self.steps + 1) * dim);
            t.extend_from_slice(&u);
            t
        });
        let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
            vec![ZERO; dim],
            vec![ZERO; dim],
            vec![ZERO; dim],
            vec![ZERO; dim],
            vec![ZERO; dim],
        );
        let h = self.h;
        for i in 0..self.steps {
            let j = 2 * i;
            self.rhs(j, lambda, order, &u, &mut k1);
            for d in 0..dim {
                tmp[d] = u[d] + k1[d] * (h / 2.0);
            }
            self.rhs(j + 1, lambda, order, &tmp, &mut k2);
            for d in 0..dim {
                tmp[d] = u[d] + k2[d] * (h / 2.0);
            }
            self.rhs(j + 1, lambda, order, &tmp, &mut k3);
            for d in 0..dim {
                tmp[d] = u[d] + k3[d] * h;
            }
            self.rhs(j + 2, lambda, order, &tmp, &mut k4);
            for d in 0..dim {
                u[d] += (k1[d] + 2.0 * k2[d] + 2.0 * k3[d] + k4[d]) * (h / 6.0);
            }
            if let Some(t) = trace.as_mut() {
                t.extend_from_slice(&u);
            }
        }
        JetSolution {
            order,
            end: u,
            trace,
            sigma_end: *self.sigma.last().unwrap(),
        }
    }

    /// `Δ(λ)` and `Δ'(λ)`.
    pub fn delta_and_derivative(&self, lambda: Complex64) -> (Complex64, Complex64) {
        let j = self.jet(lambda, 1, Start::Sine, false);
        (j.y(0), j.y(1))
    }

    /// Taylor coefficients of `Δ` at `lambda` up to `order`.
    pub fn delta_jet(&self, lambda: Complex64, order: usize) -> Vec<Complex64> {
        let j = self.jet(lambda, order, Start::Sine, false);
        (0..=order).map(|r| j.y(r)).collect()
    }

    /// Weyl function `M(λ) = −C(π, λ)/Δ(λ)`.
    pub fn weyl(&self, lambda: Complex64) -> Complex64 {
        let s = self.jet(lambda, 0, Start::Sine, false).y(0);
        let c = self.jet(lambda, 0, Start::Cosine, false).y(0);
        -c / s
    }
}

/// Result of one jet integration.
#[derive(Debug, Clone)]
pub struct JetSolution {
    order: usize,
    end: Vec<Complex64>,
    trace: Option<Vec<Complex64>>,
    sigma_end: Complex64,
}

impl JetSolution {
    pub fn order(&self) -> usize {
        self.order
    }

    /// r-th Taylor coefficient of `y(π, ·)`.
    pub fn y(&self, r: usize) -> Complex64 {
        self.end[r]
    }

    /// r-th Taylor coefficient of `y^[1](π, ·)`.
    pub fn z(&self, r: usize) -> Complex64 {
        self.end[self.order + 1 + r]
    }

    pub fn sigma_end(&self) -> Complex64 {
        self.sigma_end
    }

    fn state(&self, fine: usize) -> &[Complex64] {
        let dim = 2 * (self.order + 1);
        let t = self.trace.as_ref().expect("jet integrated without trace");
        &t[fine * dim..(fine + 1) * dim]
    }

    /// Taylor coefficient of `y` at fine node `fine`.
    pub fn y_at(&self, fine: usize, r: usize) -> Complex64 {
        self.state(fine)[r]
    }

    pub fn z_at(&self, fine: usize, r: usize) -> Complex64 {
        self.state(fine)[self.order + 1 + r]
    }

    /// Jet of `(y, y')` at a fine node, with `y' = y^[1] + σ y`.
    pub fn solution_jet_at(&self, fine: usize, sigma: Complex64) -> SolutionJet {
        let st = self.state(fine);
        let k = self.order + 1;
        SolutionJet {
            s: st[..k].to_vec(),
            s_x: (0..k).map(|r| st[k + r] + sigma * st[r]).collect(),
        }
    }
}

/// Values of the Cauchy solutions at `π`, with optional per-node trace of
/// `(S, S^[1], C, C^[1])` on the potential grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ShootingResult {
    pub s_end: Complex64,
    pub s_quasi_end: Complex64,
    pub c_end: Complex64,
    pub c_quasi_end: Complex64,
    pub trace: Option<Vec<[Complex64; 4]>>,
}

impl ShootingResult {
    /// `S C^[1] − S^[1] C` at `π`; equals `−1` for exact solutions.
    pub fn wronskian(&self) -> Complex64 {
        self.s_end * self.c_quasi_end - self.s_quasi_end * self.c_end
    }
}

pub fn integrate(pot: &PotentialPair, lambda: Complex64, with_trace: bool) -> ShootingResult {
    integrate_refined(pot, lambda, with_trace, DEFAULT_REFINE)
}

pub fn integrate_refined(pot: &PotentialPair, lambda: Complex64, with_trace: bool, refine: usize) -> ShootingResult {
    let sh = Shooter::new(pot, refine);
    let s = sh.jet(lambda, 0, Start::Sine, with_trace);
    let c = sh.jet(lambda, 0, Start::Cosine, with_trace);
    let trace = with_trace.then(|| {
        (0..=pot.n_grid())
            .map(|k| {
                let f = k * sh.refine();
                [s.y_at(f, 0), s.z_at(f, 0), c.y_at(f, 0), c.z_at(f, 0)]
            })
            .collect()
    });
    ShootingResult {
        s_end: s.y(0),
        s_quasi_end: s.z(0),
        c_end: c.y(0),
        c_quasi_end: c.z(0),
        trace,
    }
}

/// `Δ(λ) = S(π, λ)`.
pub fn char_delta(pot: &PotentialPair, lambda: Complex64) -> Complex64 {
    Shooter::new(pot, DEFAULT_REFINE)
        .jet(lambda, 0, Start::Sine, false)
        .y(0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardOptions {
    pub refine: usize,
    /// Indices `1 ≤ |n| ≤ n_star` are located together inside a disc.
    pub n_star: usize,
    /// Disc for the low-index cluster; defaults to centre `ω0`, radius `n_star + 1/2`.
    pub disc: Option<(Complex64, f64)>,
    pub newton_tol: f64,
    pub max_newton: usize,
    pub contour_nodes: usize,
    pub winding_nodes: usize,
    /// Distance below which roots from the disc search are merged into one
    /// multiple root before polishing.
    pub cluster_merge: f64,
}

impl Default for ForwardOptions {
    fn default() -> Self {
        Self {
            refine: DEFAULT_REFINE,
            n_star: 1,
            disc: None,
            newton_tol: 1e-12,
            max_newton: 50,
            contour_nodes: 256,
            winding_nodes: 64,
            cluster_merge: 1e-4,
        }
    }
}

/// A located root of `Δ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub lambda: Complex64,
    pub multiplicity: usize,
}

fn newton(sh: &Shooter, start: Complex64, m: usize, tol: f64, max_iter: usize) -> Option<Complex64> {
    // for a root of multiplicity m, iterate on Δ^{(m−1)}, which has a simple root there
    let mut l = start;
    for _ in 0..max_iter {
        let j = sh.delta_jet(l, m);
        let f = j[m - 1];
        let df = j[m] * m as f64;
        if !(f.norm().is_finite() && df.norm() > 0.0) {
            return None;
        }
        let step = f / df;
        l -= step;
        if f.norm() < tol || step.norm() < 1e-14 * l.norm().max(1.0) {
            // one more step after the residual criterion
            let j = sh.delta_jet(l, m);
            if j[m].norm() > 0.0 {
                l -= j[m - 1] / (j[m] * m as f64);
            }
            return l.re.is_finite().then_some(l);
        }
    }
    None
}

fn muller(sh: &Shooter, start: Complex64, tol: f64, max_iter: usize) -> Option<Complex64> {
    let f = |l: Complex64| sh.jet(l, 0, Start::Sine, false).y(0);
    let (mut x0, mut x1, mut x2) = (start - 0.1, start + 0.1, start);
    let (mut f0, mut f1, mut f2) = (f(x0), f(x1), f(x2));
    for _ in 0..max_iter {
        let h1 = x1 - x0;
        let h2 = x2 - x1;
        let d1 = (f1 - f0) / h1;
        let d2 = (f2 - f1) / h2;
        let a = (d2 - d1) / (h2 + h1);
        let b = a * h2 + d2;
        let disc = (b * b - 4.0 * f2 * a).sqrt();
        let den = if (b + disc).norm() > (b - disc).norm() {
            b + disc
        } else {
            b - disc
        };
        if den.norm() == 0.0 {
            return None;
        }
        let step = -2.0 * f2 / den;
        let x3 = x2 + step;
        x0 = x1;
        x1 = x2;
        x2 = x3;
        f0 = f1;
        f1 = f2;
        f2 = f(x2);
        if f2.norm() < tol || step.norm() < 1e-14 * x2.norm().max(1.0) {
            return Some(x2);
        }
    }
    None
}

/// Number of zeros of `Δ` inside `|λ − center| = radius` by the argument principle.
pub fn winding_number(sh: &Shooter, center: Complex64, radius: f64, nodes: usize) -> f64 {
    let pts: Vec<Complex64> = circle(center, radius, nodes).collect();
    let samples: Vec<(Complex64, Complex64)> = par_map(&pts, |&l| {
        let (d, dd) = sh.delta_and_derivative(l);
        (l, dd / d)
    });
    contour_average(center, &samples).re
}

/// Multiplicity of a root from the winding count, required to be stable
/// when the number of contour nodes is doubled.
pub fn root_multiplicity(sh: &Shooter, center: Complex64, radius: f64, nodes: usize) -> Result<usize> {
    let coarse = winding_number(sh, center, radius, nodes).round() as i64;
    let fine = winding_number(sh, center, radius, 2 * nodes).round() as i64;
    if coarse != fine || fine < 0 {
        return Err(Error::WindingAmbiguous {
            center,
            radius,
            coarse,
            fine,
        });
    }
    Ok(fine as usize)
}

/// Roots of a monic polynomial `w^N + c[0] w^{N−1} + … + c[N−1]`.
fn polynomial_roots(c: &[Complex64], scale: f64) -> Vec<Complex64> {
    let n = c.len();
    let eval = |w: Complex64| c.iter().fold(ONE, |acc, &ck| acc * w + ck);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|k| seed.powu(k as u32) * scale * 0.5).collect();
    for _ in 0..2000 {
        let mut change: f64 = 0.0;
        for i in 0..n {
            let mut den = ONE;
            for j in 0..n {
                if i != j {
                    den *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / den;
            roots[i] -= step;
            change = change.max(step.norm());
        }
        if change < 1e-15 * scale.max(1.0) {
            break;
        }
    }
    roots
}

/// Zeros of `Δ` inside a disc from contour power sums, merged into multiple
/// roots where they coalesce, then polished.
pub fn roots_in_disc(
    sh: &Shooter,
    center: Complex64,
    radius: f64,
    expected: usize,
    opts: &ForwardOptions,
) -> Result<Vec<Root>> {
    let pts: Vec<Complex64> = circle(center, radius, opts.contour_nodes).collect();
    let log_der: Vec<(Complex64, Complex64)> = par_map(&pts, |&l| {
        let (d, dd) = sh.delta_and_derivative(l);
        (l, dd / d)
    });
    if log_der.iter().any(|(_, f)| !f.re.is_finite() || !f.im.is_finite()) {
        return Err(Error::ContourTouchesPole { radius, pole: center });
    }
    let count = contour_average(center, &log_der).re.round();
    if count < 0.0 || count as usize != expected {
        return Err(Error::ClusterCount {
            found: count.max(0.0) as usize,
            expected,
        });
    }
    let n = expected;
    if n == 0 {
        return Ok(Vec::new());
    }
    // power sums of w = λ − center, then Newton's identities
    let p: Vec<Complex64> = (1..=n)
        .map(|k| {
            let s: Vec<_> = log_der
                .iter()
                .map(|&(l, f)| (l, f * (l - center).powu(k as u32)))
                .collect();
            contour_average(center, &s)
        })
        .collect();
    let mut e = vec![ONE];
    for k in 1..=n {
        let mut acc = ZERO;
        for i in 1..=k {
            let sign = if i % 2 == 1 { 1.0 } else { -1.0 };
            acc += e[k - i] * p[i - 1] * sign;
        }
        e.push(acc / k as f64);
    }
    let coeffs: Vec<Complex64> = (1..=n).map(|k| if k % 2 == 1 { -e[k] } else { e[k] }).collect();
    let ws = polynomial_roots(&coeffs, radius);

    // merge coalescing roots
    let mut clusters: Vec<Vec<Complex64>> = Vec::new();
    for w in ws {
        match clusters
            .iter_mut()
            .find(|c| c.iter().any(|&v| (v - w).norm() < opts.cluster_merge))
        {
            Some(c) => c.push(w),
            None => clusters.push(vec![w]),
        }
    }
    let mut roots = Vec::new();
    for cl in clusters {
        let m = cl.len();
        let guess = center + cl.iter().sum::<Complex64>() / m as f64;
        let lambda = newton(sh, guess, m, opts.newton_tol, opts.max_newton)
            .filter(|l| (l - guess).norm() < 0.1 * radius)
            .unwrap_or(guess);
        roots.push(Root {
            lambda,
            multiplicity: m,
        });
    }
    Ok(roots)
}

fn separation_radius(roots: &[Root], i: usize) -> f64 {
    let nearest = roots
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, r)| (r.lambda - roots[i].lambda).norm())
        .fold(f64::INFINITY, f64::min);
    (0.5 * nearest).min(0.2)
}

/// Eigenvalues for `1 ≤ |n| ≤ n_max` with multiplicities, residues left at zero.
///
/// Indices `n_* < |n| ≤ n_max` are found by Newton's method from `n + ω0`;
/// the `2 n_*` eigenvalues of the low cluster come from a disc search and are
/// assigned to `−n_*, …, −1, 1, …, n_*` in order of real, then imaginary part.
pub fn find_eigenvalues(
    pot: &PotentialPair,
    n_max: usize,
    omega0: Complex64,
    opts: &ForwardOptions,
) -> Result<SpectralDataSet> {
    let sh = Shooter::new(pot, opts.refine);
    let roots = locate_roots(&sh, n_max, omega0, opts)?;
    let raw: Vec<_> = roots.iter().map(|&(n, l)| (n, l, ZERO)).collect();
    SpectralDataSet::normalize_ordering(&raw, Tail::Unspecified, Some(omega0))
}

fn locate_roots(sh: &Shooter, n_max: usize, omega0: Complex64, opts: &ForwardOptions) -> Result<Vec<(i64, Complex64)>> {
    let n_star = opts.n_star.min(n_max);
    let mut roots: Vec<(Vec<i64>, Root)> = Vec::new();
    if n_star > 0 {
        let (center, radius) = opts.disc.unwrap_or((omega0, n_star as f64 + 0.5));
        let mut cluster = roots_in_disc(sh, center, radius, 2 * n_star, opts)?;
        cluster.sort_by(|a, b| {
            a.lambda
                .re
                .total_cmp(&b.lambda.re)
                .then(a.lambda.im.total_cmp(&b.lambda.im))
        });
        let ns = n_star as i64;
        let mut idx = (-ns..=ns).filter(|&k| k != 0);
        for r in cluster {
            let ks: Vec<i64> = idx.by_ref().take(r.multiplicity).collect();
            roots.push((ks, r));
        }
    }
    let tail: Vec<i64> = (n_star as i64 + 1..=n_max as i64).flat_map(|n| [-n, n]).collect();
    let found: Vec<Result<(i64, Complex64)>> = par_map(&tail, |&n| {
        let start = omega0 + n as f64;
        let accept = |l: &Complex64| (l - start).norm() < 0.5;
        newton(sh, start, 1, opts.newton_tol, opts.max_newton)
            .filter(accept)
            .or_else(|| muller(sh, start, opts.newton_tol, opts.max_newton).filter(accept))
            .map(|l| (n, l))
            .ok_or(Error::RootNotConverged { index: n, last: start })
    });
    for f in found {
        let (n, l) = f?;
        roots.push((
            vec![n],
            Root {
                lambda: l,
                multiplicity: 1,
            },
        ));
    }
    // multiplicity confirmation by winding
    let plain: Vec<Root> = roots.iter().map(|(_, r)| *r).collect();
    let checks: Vec<usize> = (0..plain.len()).collect();
    let winding: Vec<Result<usize>> = par_map(&checks, |&i| {
        let radius = separation_radius(&plain, i);
        if radius < 1e-8 {
            return Err(Error::PoleTooClose(plain[i].lambda));
        }
        root_multiplicity(sh, plain[i].lambda, radius, opts.winding_nodes)
    });
    let mut out = Vec::new();
    for ((ks, r), w) in roots.iter().zip(winding) {
        let w = w?;
        if w != r.multiplicity {
            return Err(Error::WindingAmbiguous {
                center: r.lambda,
                radius: separation_radius(&plain, plain.iter().position(|p| p == r).unwrap()),
                coarse: r.multiplicity as i64,
                fine: w as i64,
            });
        }
        for &k in ks {
            out.push((k, r.lambda));
        }
    }
    Ok(out)
}

/// Contour radius for a group: half the distance to the nearest other
/// eigenvalue, capped at 0.2.
fn group_radius(eig: &SpectralDataSet, g: Group) -> Result<f64> {
    let center = eig.require(g.start)?.lambda;
    let nearest = eig
        .window()
        .filter(|e| !g.contains(e.n))
        .map(|e| (e.lambda - center).norm())
        .fold(f64::INFINITY, f64::min);
    let r = (0.5 * nearest).min(0.2);
    if r < 1e-8 {
        return Err(Error::PoleTooClose(center));
    }
    Ok(r)
}

/// Weyl residues / Laurent coefficients for every group of `eig`.
pub fn weyl_residues(pot: &PotentialPair, eig: &SpectralDataSet, opts: &ForwardOptions) -> Result<SpectralDataSet> {
    let sh = Shooter::new(pot, opts.refine);
    let groups: Vec<Group> = eig.groups().to_vec();
    let per_group: Vec<Result<Vec<(i64, Complex64, Complex64)>>> = par_map(&groups, |&g| {
        let lambda = eig.require(g.start)?.lambda;
        if g.multiplicity == 1 {
            let s = sh.jet(lambda, 1, Start::Sine, false);
            let c = sh.jet(lambda, 0, Start::Cosine, false);
            return Ok(vec![(g.start, lambda, -c.y(0) / s.y(1))]);
        }
        let radius = group_radius(eig, g)?;
        let samples: Vec<(Complex64, Complex64)> = circle(lambda, radius, opts.contour_nodes)
            .map(|l| (l, sh.weyl(l)))
            .collect();
        Ok(g.indices()
            .enumerate()
            .map(|(nu, n)| {
                let moments: Vec<_> = samples
                    .iter()
                    .map(|&(l, m)| (l, m * (l - lambda).powu(nu as u32)))
                    .collect();
                (n, lambda, contour_average(lambda, &moments))
            })
            .collect())
    });
    let mut raw = Vec::new();
    for g in per_group {
        raw.extend(g?);
    }
    SpectralDataSet::normalize_ordering(&raw, eig.tail(), Some(eig.omega0()))
}

/// Laurent coefficients of `M` around `center` on `|λ − center| = radius`:
/// entry `ν` is `(1/2πi)∮ (λ − center)^ν M(λ) dλ`.
pub fn laurent_coefficients(
    pot: &PotentialPair,
    center: Complex64,
    radius: f64,
    count: usize,
    nodes: usize,
) -> Vec<Complex64> {
    let sh = Shooter::new(pot, DEFAULT_REFINE);
    let pts: Vec<Complex64> = circle(center, radius, nodes).collect();
    let samples: Vec<(Complex64, Complex64)> = par_map(&pts, |&l| (l, sh.weyl(l)));
    (0..count)
        .map(|nu| {
            let s: Vec<_> = samples
                .iter()
                .map(|&(l, m)| (l, m * (l - center).powu(nu as u32)))
                .collect();
            contour_average(center, &s)
        })
        .collect()
}

/// Generalized weight numbers by grid quadrature over the fine integration grid.
///
/// For a group of multiplicity `m` at `λ`,
/// `α_{k+ν} = ∫ (2(λ − q1) S_{m−1} + S_{m−2}) S_ν + S_{m−1} S_{ν−1}`,
/// the Taylor coefficient of `∫ (λ + μ − 2q1) S(·, λ) S(·, μ)` that makes
/// [`alpha_to_laurent`] exact.
pub fn weight_numbers(
    pot: &PotentialPair,
    eig: &SpectralDataSet,
    opts: &ForwardOptions,
) -> Result<BTreeMap<i64, Complex64>> {
    let sh = Shooter::new(pot, opts.refine);
    let groups: Vec<Group> = eig.groups().to_vec();
    let per_group: Vec<Result<Vec<(i64, Complex64)>>> = par_map(&groups, |&g| {
        let lambda = eig.require(g.start)?.lambda;
        let m = g.multiplicity;
        let jet = sh.jet(lambda, m - 1, Start::Sine, true);
        let nodes = sh.steps() + 1;
        let s = |i: usize, r: isize| if r < 0 { ZERO } else { jet.y_at(i, r as usize) };
        let top = (m - 1) as isize;
        Ok(g.indices()
            .enumerate()
            .map(|(nu, n)| {
                let nu = nu as isize;
                let f: Vec<Complex64> = (0..nodes)
                    .map(|i| {
                        let q1 = sh.q1_fine(i);
                        (2.0 * (lambda - q1) * s(i, top) + s(i, top - 1)) * s(i, nu) + s(i, top) * s(i, nu - 1)
                    })
                    .collect();
                (n, simpson(&f, sh.step()))
            })
            .collect())
    });
    let mut out = BTreeMap::new();
    for g in per_group {
        out.extend(g?);
    }
    Ok(out)
}

/// Solves `Σ_{j ≤ ν} α_{k+ν−j} M_{k+m−j−1} = −δ_{ν0}` for the Laurent
/// coefficients `M_k … M_{k+m−1}` of one group.
pub fn alpha_to_laurent(alpha: &[Complex64]) -> Vec<Complex64> {
    let m = alpha.len();
    // unknowns u_j = M_{k+m−1−j}
    let mut u = vec![ZERO; m];
    for nu in 0..m {
        let rhs = if nu == 0 { -ONE } else { ZERO };
        let known: Complex64 = (0..nu).map(|j| alpha[nu - j] * u[j]).sum();
        u[nu] = (rhs - known) / alpha[0];
    }
    u.reverse();
    u
}

/// Inverse of [`alpha_to_laurent`].
pub fn laurent_to_alpha(laurent: &[Complex64]) -> Vec<Complex64> {
    let m = laurent.len();
    let top = laurent[m - 1];
    let mut alpha = vec![ZERO; m];
    for nu in 0..m {
        let rhs = if nu == 0 { -ONE } else { ZERO };
        let known: Complex64 = (1..=nu).map(|j| alpha[nu - j] * laurent[m - 1 - j]).sum();
        alpha[nu] = (rhs - known) / top;
    }
    alpha
}

/// Full forward map: eigenvalues, then Weyl residues.
pub fn spectral_data(
    pot: &PotentialPair,
    n_max: usize,
    omega0: Complex64,
    opts: &ForwardOptions,
) -> Result<SpectralDataSet> {
    let eig = find_eigenvalues(pot, n_max, omega0, opts)?;
    weyl_residues(pot, &eig, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn smooth_pair(n: usize) -> PotentialPair {
        PotentialPair::from_fn(n, |x| {
            (
                c(0.3 * x.cos(), 0.2 * (2.0 * x).sin()),
                c(0.4 * x.sin(), -0.1 * (1.0 - x.cos())),
            )
        })
        .unwrap()
    }

    #[test]
    fn zero_potential_cauchy_values() {
        let pot = PotentialPair::zero(200);
        let r = integrate(&pot, c(1.0, 0.0), false);
        assert!(r.s_end.norm() < 1e-10);
        assert!((r.c_end + 1.0).norm() < 1e-10);
        assert!((char_delta(&pot, c(0.5, 0.0)) - 2.0).norm() < 1e-10);
        for n in [-3, 2, 5] {
            assert!(char_delta(&pot, c(n as f64, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn wronskian_is_constant() {
        let pot = smooth_pair(200);
        let r = integrate(&pot, c(2.0, 1.0), true);
        for row in r.trace.as_ref().unwrap() {
            let w = row[0] * row[3] - row[1] * row[2];
            assert!((w + 1.0).norm() < 1e-10);
        }
        assert!((r.wronskian() + 1.0).norm() < 1e-10);
    }

    #[test]
    fn delta_derivative_matches_difference() {
        let pot = smooth_pair(100);
        let sh = Shooter::new(&pot, 4);
        let l = c(1.3, 0.4);
        let (_, d) = sh.delta_and_derivative(l);
        let h = 1e-5;
        let fd = (sh.delta_jet(l + h, 0)[0] - sh.delta_jet(l - h, 0)[0]) / (2.0 * h);
        assert!((d - fd).norm() < 1e-8);
    }

    #[test]
    fn zero_potential_spectrum() {
        let pot = PotentialPair::zero(200);
        let data = spectral_data(&pot, 5, ZERO, &ForwardOptions::default()).unwrap();
        for e in data.window() {
            assert!((e.lambda - e.n as f64).norm() < 1e-8, "{e:?}");
            assert!((e.residue + e.n as f64 / PI).norm() < 1e-6, "{e:?}");
        }
        assert!(data.is_simple());
        let alpha = weight_numbers(&pot, &data, &ForwardOptions::default()).unwrap();
        for (n, a) in alpha {
            assert!((a - PI / n as f64).norm() < 1e-6);
        }
    }

    #[test]
    fn laurent_alpha_round_trip() {
        let m = vec![c(-1.0 / PI, 0.0), c(0.0, -0.5 / PI)];
        let a = laurent_to_alpha(&m);
        let back = alpha_to_laurent(&a);
        for (x, y) in m.iter().zip(&back) {
            assert!((x - y).norm() < 1e-14);
        }
        assert!((a[0] * m[1] + 1.0).norm() < 1e-14);
        assert!((a[1] * m[1] + a[0] * m[0]).norm() < 1e-14);
    }

    #[test]
    fn csv_round_trip() {
        let pot = smooth_pair(20);
        let back = PotentialPair::from_csv(&pot.to_csv()).unwrap();
        assert_eq!(pot, back);
    }

    #[test]
    fn rejects_bad_input() {
        let mut q = vec![ZERO; 5];
        q[2] = c(f64::NAN, 0.0);
        assert!(matches!(
            PotentialPair::new(q, vec![ZERO; 5]),
            Err(Error::NonFiniteInput { node: 2 })
        ));
        assert!(matches!(
            PotentialPair::new(vec![ZERO; 5], vec![ZERO; 4]),
            Err(Error::GridMismatch(_))
        ));
    }
}
