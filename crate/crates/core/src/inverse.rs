//! Reconstruction of `q1` and `∫(q0 − q̃0)` from spectral data by the method
//! of spectral mappings: a finite main equation per grid node, the ε-series,
//! and the recovery formulas.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forward::PotentialPair;
use crate::jet::{self, SolutionJet};
use crate::model::Background;
use crate::quad::{cumulative_simpson, par_map};
use crate::spectral_data::{Group, SpectralDataSet, SpectralEntry};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Largest multiplicity the assembly supports (kernel derivatives up to
/// order `2(m − 1)`).
pub const MAX_MULTIPLICITY: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct InverseOptions {
    /// Grid `x_k = kπ/n_grid`, `k = 0..=n_grid`.
    pub n_grid: usize,
    /// Condition estimate above which a node is reported singular.
    pub condition_limit: f64,
    /// Relative tolerance for deciding that a data entry equals the model entry.
    pub equality_tol: f64,
    /// `|1 + ε1²|` below this is treated as degenerate.
    pub degeneracy_tol: f64,
}

impl Default for InverseOptions {
    fn default() -> Self {
        Self {
            n_grid: 200,
            condition_limit: 1e10,
            equality_tol: 1e-13,
            degeneracy_tol: 1e-12,
        }
    }
}

/// One multiplicity group of either the data (`i = 0`) or the model (`i = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveGroup {
    pub i: usize,
    pub group: Group,
    pub lambda: Complex64,
    /// `M_k, …, M_{k+m−1}`.
    pub laurent: Vec<Complex64>,
    /// Position of `v_{k,i}` in the unknown vector.
    pub offset: usize,
}

impl ActiveGroup {
    pub fn multiplicity(&self) -> usize {
        self.group.multiplicity
    }

    pub fn sign(&self) -> f64 {
        if self.i == 0 {
            1.0
        } else {
            -1.0
        }
    }
}

/// The indices where the data differ from the model, closed under both
/// groupings, with the groups they form.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveSet {
    pub indices: Vec<i64>,
    pub groups: Vec<ActiveGroup>,
    pub dim: usize,
}

impl ActiveSet {
    pub fn max_multiplicity(&self) -> usize {
        self.groups.iter().map(|g| g.multiplicity()).max().unwrap_or(1)
    }

    /// Unknown position of `v_{n,i}`.
    pub fn position(&self, n: i64, i: usize) -> Option<usize> {
        self.groups
            .iter()
            .filter(|g| g.i == i)
            .find_map(|g| g.group.indices().position(|k| k == n).map(|nu| g.offset + nu))
    }

    /// `(n, i)` label of every unknown in order.
    pub fn labels(&self) -> Vec<(i64, usize)> {
        self.groups
            .iter()
            .flat_map(|g| g.group.indices().map(move |n| (n, g.i)))
            .collect()
    }
}

fn entries_differ(a: SpectralEntry, b: SpectralEntry, tol: f64) -> bool {
    (a.lambda - b.lambda).norm() > tol * b.lambda.norm().max(1.0)
        || (a.residue - b.residue).norm() > tol * b.residue.norm().max(1.0)
}

/// Active window of `data` against `model`.
pub fn active_set(data: &SpectralDataSet, model: &SpectralDataSet, tol: f64) -> Result<ActiveSet> {
    let mut active: Vec<i64> = Vec::new();
    for n in data.union_indices(model) {
        if entries_differ(data.require(n)?, model.require(n)?, tol) {
            active.push(n);
        }
    }
    loop {
        let mut grown = active.clone();
        for &n in &active {
            for set in [data, model] {
                let g = set.group_of(n).ok_or(Error::IndexMismatch(n))?;
                grown.extend(g.indices());
            }
        }
        grown.sort_unstable();
        grown.dedup();
        if grown == active {
            break;
        }
        active = grown;
    }
    let mut groups = Vec::new();
    let mut offset = 0;
    for (i, set) in [data, model].into_iter().enumerate() {
        let mut seen: Vec<Group> = Vec::new();
        for &n in &active {
            let g = set.group_of(n).ok_or(Error::IndexMismatch(n))?;
            if seen.contains(&g) {
                continue;
            }
            if g.multiplicity > MAX_MULTIPLICITY {
                return Err(Error::OrderTooHigh {
                    order: 2 * (g.multiplicity - 1),
                    max: 2 * (MAX_MULTIPLICITY - 1),
                });
            }
            seen.push(g);
            groups.push(ActiveGroup {
                i,
                group: g,
                lambda: set.require(g.start)?.lambda,
                laurent: set.laurent(g),
                offset,
            });
            offset += g.multiplicity;
        }
    }
    Ok(ActiveSet {
        indices: active,
        groups,
        dim: offset,
    })
}

/// Linear system of the main equation at one node.
///
/// `p` already carries the signs `(−1)^j`, so the equation reads
/// `(I − p) v = rhs`, and `(I − p) v_x = rhs_x + p_x v` for the x-derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct MainEquationSystem {
    pub x: f64,
    pub labels: Vec<(i64, usize)>,
    pub p: DMatrix<Complex64>,
    pub p_x: DMatrix<Complex64>,
    pub rhs: DVector<Complex64>,
    pub rhs_x: DVector<Complex64>,
}

/// Everything needed to assemble the main equation at any grid node.
#[derive(Debug, Clone)]
pub struct MainEquation {
    active: ActiveSet,
    n_grid: usize,
    /// Solution jets per active group, per node.
    jets: Vec<Vec<SolutionJet>>,
    q1_model: Vec<Complex64>,
}

impl MainEquation {
    pub fn new(data: &SpectralDataSet, background: &Background, opts: &InverseOptions) -> Result<Self> {
        let (d0, m0) = (data.omega0(), background.omega0());
        if (d0 - m0).norm() > 1e-8 {
            return Err(Error::OmegaMismatch { data: d0, model: m0 });
        }
        let model = background.spectral_data(data.window_extent().max(1));
        let active = active_set(data, &model, opts.equality_tol)?;
        let mo = active.max_multiplicity() - 1;
        let order = jet::required_jet_order(mo, mo);
        let lambdas: Vec<Complex64> = active.groups.iter().map(|g| g.lambda).collect();
        let jets = par_map(&lambdas, |&l| background.jets_on_grid(l, order, opts.n_grid))
            .into_iter()
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            active,
            n_grid: opts.n_grid,
            jets,
            q1_model: background.q1_nodes(opts.n_grid)?,
        })
    }

    pub fn active(&self) -> &ActiveSet {
        &self.active
    }

    pub fn n_grid(&self) -> usize {
        self.n_grid
    }

    pub fn x(&self, node: usize) -> f64 {
        node as f64 * PI / self.n_grid as f64
    }

    pub fn jet(&self, group: usize, node: usize) -> &SolutionJet {
        &self.jets[group][node]
    }

    pub fn assemble(&self, node: usize) -> MainEquationSystem {
        let dim = self.active.dim;
        let mut p = DMatrix::from_element(dim, dim, ZERO);
        let mut p_x = DMatrix::from_element(dim, dim, ZERO);
        let mut rhs = DVector::from_element(dim, ZERO);
        let mut rhs_x = DVector::from_element(dim, ZERO);
        let q1 = self.q1_model[node];
        for (gr, row) in self.active.groups.iter().enumerate() {
            let jr = &self.jets[gr][node];
            let ol = row.multiplicity() - 1;
            for nu in 0..=ol {
                rhs[row.offset + nu] = jr.s[nu];
                rhs_x[row.offset + nu] = jr.s_x[nu];
            }
            for (gc, col) in self.active.groups.iter().enumerate() {
                let jc = &self.jets[gc][node];
                let om = col.multiplicity() - 1;
                let d = jet::divided_difference_jet(row.lambda, col.lambda, jr, jc, ol, om);
                let dx = jet::x_derivative_jet(row.lambda, col.lambda, q1, jr, jc, ol, om);
                for nu in 0..=ol {
                    for s in 0..=om {
                        let (mut a, mut ax) = (ZERO, ZERO);
                        for pp in s..=om {
                            a += col.laurent[pp] * d.get(nu, pp - s);
                            ax += col.laurent[pp] * dx.get(nu, pp - s);
                        }
                        p[(row.offset + nu, col.offset + s)] = a * col.sign();
                        p_x[(row.offset + nu, col.offset + s)] = ax * col.sign();
                    }
                }
            }
        }
        MainEquationSystem {
            x: self.x(node),
            labels: self.active.labels(),
            p,
            p_x,
            rhs,
            rhs_x,
        }
    }
}

/// Assembles the main equation of `data` against `background` at node `node`.
pub fn assemble_system(
    data: &SpectralDataSet,
    background: &Background,
    node: usize,
    opts: &InverseOptions,
) -> Result<MainEquationSystem> {
    Ok(MainEquation::new(data, background, opts)?.assemble(node))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MainSolution {
    pub v: DVector<Complex64>,
    pub v_x: DVector<Complex64>,
    /// `‖A‖₁ ‖A⁻¹‖₁` for `A = I − p`.
    pub condition: f64,
    /// `‖A v − rhs‖_∞`.
    pub residual: f64,
}

fn norm1(a: &DMatrix<Complex64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Solves `(I − p) v = rhs`, then `(I − p) v_x = rhs_x + p_x v` with the same
/// factorization.
pub fn solve_main(system: &MainEquationSystem, condition_limit: f64) -> Result<MainSolution> {
    let dim = system.rhs.len();
    if dim == 0 {
        return Ok(MainSolution {
            v: DVector::zeros(0),
            v_x: DVector::zeros(0),
            condition: 1.0,
            residual: 0.0,
        });
    }
    let a = DMatrix::identity(dim, dim) - &system.p;
    let lu = a.clone().lu();
    let singular = || Error::SingularSystem {
        x: system.x,
        condition: f64::INFINITY,
    };
    let inv = lu.try_inverse().ok_or_else(singular)?;
    let condition = norm1(&a) * norm1(&inv);
    if !condition.is_finite() || condition > condition_limit {
        return Err(Error::SingularSystem { x: system.x, condition });
    }
    let v = lu.solve(&system.rhs).ok_or_else(singular)?;
    let v_x = lu.solve(&(&system.rhs_x + &system.p_x * &v)).ok_or_else(singular)?;
    let residual = (&a * &v - &system.rhs).iter().fold(0.0f64, |m, z| m.max(z.norm()));
    Ok(MainSolution {
        v,
        v_x,
        condition,
        residual,
    })
}

/// Grid functions built from the main-equation solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonFields {
    pub x: Vec<f64>,
    pub eps1: Vec<Complex64>,
    pub eps1_prime: Vec<Complex64>,
    pub eps2: Vec<Complex64>,
    pub eps3: Vec<Complex64>,
    pub eps4: Vec<Complex64>,
    pub theta: Vec<Complex64>,
    pub lambda: Vec<Complex64>,
    pub b: Vec<Complex64>,
}

/// Values of the ε-series at one node.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NodeEpsilons {
    pub eps1: Complex64,
    pub eps1_prime: Complex64,
    pub eps2: Complex64,
    pub eps3: Complex64,
    pub eps4: Complex64,
}

/// ε-series at one node from the solution of the main equation there.
pub fn node_epsilons(eq: &MainEquation, node: usize, sol: &MainSolution) -> NodeEpsilons {
    let mut e = NodeEpsilons::default();
    for (gi, g) in eq.active().groups.iter().enumerate() {
        let j = eq.jet(gi, node);
        let m = g.multiplicity();
        let sign = g.sign();
        let b = |nu: usize| -> Complex64 { (nu..m).map(|p| g.laurent[p] * j.s[p - nu]).sum() };
        let b_x = |nu: usize| -> Complex64 { (nu..m).map(|p| g.laurent[p] * j.s_x[p - nu]).sum() };
        for nu in 0..m {
            let (v, v_x) = (sol.v[g.offset + nu], sol.v_x[g.offset + nu]);
            let (bt, bt_x) = (b(nu), b_x(nu));
            e.eps1 += sign * bt * v;
            e.eps2 += sign * g.lambda * bt * v;
            e.eps3 += sign * bt_x * v;
            e.eps1_prime += sign * (bt_x * v + bt * v_x);
            if nu + 1 < m {
                e.eps4 += sign * b(nu + 1) * v;
            }
        }
    }
    e
}

/// Collects per-node ε values into grid functions (Θ, Λ, b filled later).
pub fn compute_epsilons(eq: &MainEquation, solutions: &[MainSolution]) -> EpsilonFields {
    let nodes: Vec<NodeEpsilons> = solutions
        .iter()
        .enumerate()
        .map(|(k, s)| node_epsilons(eq, k, s))
        .collect();
    let n = nodes.len();
    EpsilonFields {
        x: (0..n).map(|k| eq.x(k)).collect(),
        eps1: nodes.iter().map(|e| e.eps1).collect(),
        eps1_prime: nodes.iter().map(|e| e.eps1_prime).collect(),
        eps2: nodes.iter().map(|e| e.eps2).collect(),
        eps3: nodes.iter().map(|e| e.eps3).collect(),
        eps4: nodes.iter().map(|e| e.eps4).collect(),
        theta: vec![ZERO; n],
        lambda: vec![ZERO; n],
        b: vec![ZERO; n],
    }
}

/// `Θ = ±(1 + ε1²)^{−1/2}` continued from `Θ(0) = 1`, and `Λ = ε1 Θ`.
pub fn recover_theta(eps: &EpsilonFields, degeneracy_tol: f64) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    let mut theta = Vec::with_capacity(eps.eps1.len());
    let mut prev = Complex64::new(1.0, 0.0);
    for (k, &e1) in eps.eps1.iter().enumerate() {
        let w = 1.0 + e1 * e1;
        if w.norm() < degeneracy_tol {
            return Err(Error::DegenerateEps1 { x: eps.x[k] });
        }
        let t = w.sqrt().inv();
        let t = if (t - prev).norm() <= (t + prev).norm() { t } else { -t };
        theta.push(t);
        prev = t;
    }
    let lambda = eps.eps1.iter().zip(&theta).map(|(e, t)| e * t).collect();
    Ok((theta, lambda))
}

/// `q1 = q̃1 + ε1' / (1 + ε1²)`.
pub fn recover_q1(eps: &EpsilonFields, q1_model: &[Complex64]) -> Vec<Complex64> {
    eps.eps1
        .iter()
        .zip(&eps.eps1_prime)
        .zip(q1_model)
        .map(|((e, ep), q)| q + ep / (1.0 + e * e))
        .collect()
}

/// `∫_0^x (q0 − q̃0)` with the exact-derivative terms integrated in closed
/// form and the remainder by cumulative Simpson quadrature. Also returns `b`.
pub fn recover_q0_antiderivative(
    eps: &EpsilonFields,
    q1: &[Complex64],
    q1_model: &[Complex64],
    q1_model_prime: &[Complex64],
) -> (Vec<Complex64>, Vec<Complex64>) {
    let n = eps.eps1.len();
    let b: Vec<Complex64> = (0..n).map(|k| 2.0 * (q1_model[k] - q1[k]) * eps.eps1[k]).collect();
    let f: Vec<Complex64> = (0..n)
        .map(|k| {
            let (qt, e1) = (q1_model[k], eps.eps1[k]);
            -2.0 * q1_model_prime[k] * e1 - 4.0 * qt * eps.eps1_prime[k]
                + 2.0 * (qt - q1[k]) * eps.eps3[k]
                + b[k] * (eps.eps2[k] - 2.0 * qt * e1 + eps.eps4[k])
                + b[k] * b[k] / 4.0
        })
        .collect();
    let h = if n > 1 { eps.x[1] - eps.x[0] } else { 1.0 };
    let integral = cumulative_simpson(&f, h);
    let ad = (0..n)
        .map(|k| {
            2.0 * (eps.eps2[k] - eps.eps2[0]) + 2.0 * (eps.eps4[k] - eps.eps4[0]) + (b[k] - b[0]) / 2.0 + integral[k]
        })
        .collect();
    (ad, b)
}

/// Output of the inverse pipeline on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveredPotentials {
    pub x: Vec<f64>,
    pub q1: Vec<Complex64>,
    /// `∫_0^x (q0 − q̃0) dt`.
    pub q0_antideriv: Vec<Complex64>,
    pub q1_model: Vec<Complex64>,
    /// `σ̃ = ∫ q̃0` of the background at the nodes.
    pub sigma_model: Vec<Complex64>,
}

impl RecoveredPotentials {
    pub fn n_grid(&self) -> usize {
        self.x.len() - 1
    }

    /// Potentials in forward-solver form, `σ = σ̃ + ∫(q0 − q̃0)`.
    pub fn to_potential_pair(&self) -> Result<PotentialPair> {
        let sigma = self
            .sigma_model
            .iter()
            .zip(&self.q0_antideriv)
            .map(|(a, b)| a + b)
            .collect();
        PotentialPair::new(self.q1.clone(), sigma)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,re_q1,im_q1,re_q0ad,im_q0ad\n");
        for k in 0..self.x.len() {
            out.push_str(&format!(
                "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                self.x[k], self.q1[k].re, self.q1[k].im, self.q0_antideriv[k].re, self.q0_antideriv[k].im
            ));
        }
        out
    }
}

/// Full result of one run, including intermediate fields and per-node
/// diagnostics.
#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub potentials: RecoveredPotentials,
    pub eps: EpsilonFields,
    pub conditions: Vec<f64>,
    pub residuals: Vec<f64>,
    pub active: ActiveSet,
}

/// Main equation at every node, solved in parallel.
pub fn solve_on_grid(eq: &MainEquation, opts: &InverseOptions) -> Result<Vec<MainSolution>> {
    let nodes: Vec<usize> = (0..=eq.n_grid()).collect();
    par_map(&nodes, |&k| solve_main(&eq.assemble(k), opts.condition_limit))
        .into_iter()
        .collect()
}

pub fn run_algorithm1(
    data: &SpectralDataSet,
    background: &Background,
    opts: &InverseOptions,
) -> Result<Reconstruction> {
    let eq = MainEquation::new(data, background, opts)?;
    let solutions = solve_on_grid(&eq, opts)?;
    let mut eps = compute_epsilons(&eq, &solutions);
    let (theta, lambda) = recover_theta(&eps, opts.degeneracy_tol)?;
    eps.theta = theta;
    eps.lambda = lambda;
    let q1_model = background.q1_nodes(opts.n_grid)?;
    let q1_model_prime = background.q1_derivative_nodes(opts.n_grid)?;
    let q1 = recover_q1(&eps, &q1_model);
    let (q0_antideriv, b) = recover_q0_antiderivative(&eps, &q1, &q1_model, &q1_model_prime);
    eps.b = b;
    let sigma_model = background.potentials(opts.n_grid).sigma().to_vec();
    Ok(Reconstruction {
        potentials: RecoveredPotentials {
            x: eps.x.clone(),
            q1,
            q0_antideriv,
            q1_model,
            sigma_model,
        },
        conditions: solutions.iter().map(|s| s.condition).collect(),
        residuals: solutions.iter().map(|s| s.residual).collect(),
        eps,
        active: eq.active,
    })
}
