//! Spectral data `{λ_n, M_n}`, multiplicity grouping and stability diagnostics.
//!
//! Indices run over the nonzero integers. Consecutive indices are taken in the
//! order `…, −2, −1, 1, 2, …`, so a multiplicity group may straddle `−1, 1`.
//! Within a group starting at `k` with multiplicity `m`, the entries
//! `k, k+1, …, k+m−1` share one eigenvalue and `M_{k+ν}` is the Laurent
//! coefficient of `(λ − λ_k)^{−ν−1}` in the Weyl function.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute distance below which two eigenvalues are treated as one.
pub const GROUPING_TOLERANCE: f64 = 1e-9;

/// Successor of `n` in `ℤ \ {0}`.
pub fn next_index(n: i64) -> i64 {
    if n == -1 {
        1
    } else {
        n + 1
    }
}

/// `n` advanced by `p` steps in `ℤ \ {0}`.
pub fn offset_index(n: i64, p: usize) -> i64 {
    (0..p).fold(n, |k, _| next_index(k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralEntry {
    pub n: i64,
    pub lambda: Complex64,
    pub residue: Complex64,
}

/// Where values outside the stored window come from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tail {
    /// `λ_n = n`, `M_n = −n/π`: the problem with both potentials zero.
    ZeroPotential,
    /// Nothing is known beyond the window.
    Unspecified,
}

impl Tail {
    pub fn entry(self, n: i64) -> Option<SpectralEntry> {
        match self {
            Tail::ZeroPotential => Some(SpectralEntry {
                n,
                lambda: Complex64::new(n as f64, 0.0),
                residue: Complex64::new(-(n as f64) / PI, 0.0),
            }),
            Tail::Unspecified => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub start: i64,
    pub multiplicity: usize,
}

impl Group {
    pub fn indices(self) -> impl Iterator<Item = i64> {
        (0..self.multiplicity).map(move |p| offset_index(self.start, p))
    }

    pub fn contains(self, n: i64) -> bool {
        self.indices().any(|k| k == n)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDataSet {
    entries: BTreeMap<i64, SpectralEntry>,
    groups: Vec<Group>,
    tail: Tail,
    omega0: Complex64,
}

impl SpectralDataSet {
    /// Builds a normalized data set from raw `(n, λ_n, M_n)` triples.
    ///
    /// Equal eigenvalues (within [`GROUPING_TOLERANCE`]) are gathered into
    /// consecutive indices. Members of a same-sign cluster are moved next to
    /// its first member with the displaced entries shifted behind it; a
    /// cluster mixing signs is accepted only if it already occupies a
    /// consecutive run through `−1, 1`.
    pub fn normalize_ordering(
        raw: &[(i64, Complex64, Complex64)],
        tail: Tail,
        omega0: Option<Complex64>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for &(n, lambda, residue) in raw {
            if n == 0 {
                return Err(Error::ZeroIndex);
            }
            if map.insert(n, (lambda, residue)).is_some() {
                return Err(Error::DuplicateIndex(n));
            }
        }
        let mut order: Vec<i64> = map.keys().copied().collect();
        let mut slots: Vec<(Complex64, Complex64)> = order.iter().map(|n| map[n]).collect();

        let clusters = cluster_positions(&slots);
        for cluster in &clusters {
            if cluster.len() < 2 {
                continue;
            }
            let idx: Vec<i64> = cluster.iter().map(|&p| order[p]).collect();
            let has_neg = idx.iter().any(|&n| n < 0);
            let has_pos = idx.iter().any(|&n| n > 0);
            if has_neg && has_pos {
                let contiguous = idx.windows(2).all(|w| next_index(w[0]) == w[1]);
                if !contiguous {
                    let first = *idx.iter().find(|&&n| n < 0).unwrap();
                    let second = *idx.iter().find(|&&n| n > 0).unwrap();
                    return Err(Error::SignConflict { first, second });
                }
            }
        }
        // same-sign regrouping, done on positions so entries keep their values
        for cluster in clusters.iter().filter(|c| c.len() > 1) {
            let first_pos = cluster[0];
            let last_pos = *cluster.last().unwrap();
            let start = order[first_pos];
            // the run start..=end must be fully present in the window
            let mut k = start;
            for &n in &order[first_pos..=last_pos] {
                if n != k {
                    return Err(Error::NonContiguousGroup { start, missing: k });
                }
                k = next_index(k);
            }
            let members: Vec<(Complex64, Complex64)> = cluster.iter().map(|&p| slots[p]).collect();
            let others: Vec<(Complex64, Complex64)> = (first_pos..=last_pos)
                .filter(|p| !cluster.contains(p))
                .map(|p| slots[p])
                .collect();
            let canonical = members[0].0;
            for (offset, v) in members.into_iter().chain(others).enumerate() {
                slots[first_pos + offset] = v;
            }
            for slot in slots.iter_mut().skip(first_pos).take(cluster.len()) {
                slot.0 = canonical;
            }
        }
        order.sort_unstable();

        let entries: BTreeMap<i64, SpectralEntry> = order
            .iter()
            .zip(&slots)
            .map(|(&n, &(lambda, residue))| (n, SpectralEntry { n, lambda, residue }))
            .collect();
        let groups = derive_groups(&entries);
        let mut set = Self {
            entries,
            groups,
            tail,
            omega0: Complex64::new(0.0, 0.0),
        };
        set.omega0 = omega0.unwrap_or_else(|| set.estimate_omega0());
        Ok(set)
    }

    /// Mean shift estimate: zero for a zero-potential tail, otherwise the mean
    /// of `λ_n − n` over the five largest `|n|` in the window.
    pub fn estimate_omega0(&self) -> Complex64 {
        if self.tail == Tail::ZeroPotential || self.entries.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        let mut by_size: Vec<&SpectralEntry> = self.entries.values().collect();
        by_size.sort_by_key(|e| std::cmp::Reverse(e.n.abs()));
        let take = by_size.len().min(5);
        by_size[..take].iter().map(|e| e.lambda - e.n as f64).sum::<Complex64>() / take as f64
    }

    /// Spectral data of the zero-potential problem for `1 ≤ |n| ≤ n_max`.
    pub fn zero_potential(n_max: usize) -> Self {
        let raw: Vec<_> = window(n_max)
            .map(|n| {
                let e = Tail::ZeroPotential.entry(n).unwrap();
                (n, e.lambda, e.residue)
            })
            .collect();
        Self::normalize_ordering(&raw, Tail::ZeroPotential, Some(Complex64::new(0.0, 0.0)))
            .expect("zero-potential data is always well ordered")
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    pub fn omega0(&self) -> Complex64 {
        self.omega0
    }

    pub fn with_omega0(mut self, omega0: Complex64) -> Self {
        self.omega0 = omega0;
        self
    }

    pub fn with_tail(mut self, tail: Tail) -> Self {
        self.tail = tail;
        self
    }

    /// Entries stored in the window, in index order.
    pub fn window(&self) -> impl Iterator<Item = &SpectralEntry> {
        self.entries.values()
    }

    pub fn window_len(&self) -> usize {
        self.entries.len()
    }

    /// Largest `|n|` stored in the window.
    pub fn window_extent(&self) -> usize {
        self.entries
            .keys()
            .map(|n| n.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    pub fn entry(&self, n: i64) -> Option<SpectralEntry> {
        self.entries.get(&n).copied().or_else(|| self.tail.entry(n))
    }

    pub fn require(&self, n: i64) -> Result<SpectralEntry> {
        self.entry(n).ok_or(Error::IndexMismatch(n))
    }

    /// Multiplicity groups of the window (tail entries are simple).
    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    /// The group containing `n`, including singleton tail groups.
    pub fn group_of(&self, n: i64) -> Option<Group> {
        if self.entries.contains_key(&n) {
            self.groups.iter().copied().find(|g| g.contains(n))
        } else {
            self.tail.entry(n).map(|_| Group {
                start: n,
                multiplicity: 1,
            })
        }
    }

    /// Laurent coefficients `M_{k}, …, M_{k+m−1}` of a group.
    pub fn laurent(&self, group: Group) -> Vec<Complex64> {
        group
            .indices()
            .map(|n| self.entry(n).map(|e| e.residue).unwrap_or_default())
            .collect()
    }

    pub fn is_simple(&self) -> bool {
        self.groups.iter().all(|g| g.multiplicity == 1)
    }

    /// Raw triples of the window, suitable for [`Self::normalize_ordering`].
    pub fn raw(&self) -> Vec<(i64, Complex64, Complex64)> {
        self.entries.values().map(|e| (e.n, e.lambda, e.residue)).collect()
    }

    /// Union of the index windows of two data sets.
    pub fn union_indices(&self, other: &Self) -> Vec<i64> {
        let mut idx: Vec<i64> = self.entries.keys().chain(other.entries.keys()).copied().collect();
        idx.sort_unstable();
        idx.dedup();
        idx
    }
}

/// Indices `−n_max..=−1, 1..=n_max`.
pub fn window(n_max: usize) -> impl Iterator<Item = i64> {
    let n = n_max as i64;
    (-n..=n).filter(|&k| k != 0)
}

/// Connected components of the "eigenvalues within tolerance" relation, as
/// ascending position lists ordered by first position.
fn cluster_positions(slots: &[(Complex64, Complex64)]) -> Vec<Vec<usize>> {
    let mut label: Vec<usize> = (0..slots.len()).collect();
    fn find(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..slots.len() {
        for j in i + 1..slots.len() {
            if (slots[i].0 - slots[j].0).norm() <= GROUPING_TOLERANCE {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                if a != b {
                    label[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut clusters: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..slots.len() {
        let root = find(&mut label, i);
        clusters.entry(root).or_default().push(i);
    }
    clusters.into_values().collect()
}

fn derive_groups(entries: &BTreeMap<i64, SpectralEntry>) -> Vec<Group> {
    let mut groups: Vec<Group> = Vec::new();
    let mut prev: Option<&SpectralEntry> = None;
    for e in entries.values() {
        match (prev, groups.last_mut()) {
            (Some(p), Some(g)) if next_index(p.n) == e.n && p.lambda == e.lambda => {
                g.multiplicity += 1;
            }
            _ => groups.push(Group {
                start: e.n,
                multiplicity: 1,
            }),
        }
        prev = Some(e);
    }
    groups
}

/// Per-index stability quantities comparing a data set with a model.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub theta: BTreeMap<i64, f64>,
    pub chi: BTreeMap<i64, f64>,
    pub xi: BTreeMap<i64, f64>,
    pub omega: f64,
    /// Truncation level used for `omega_n`.
    pub truncation: usize,
    pub omega_n: f64,
}

impl Diagnostics {
    /// `Ω_N = sqrt(Σ_{|k|>N} (k ξ_k)²)`.
    pub fn omega_tail(&self, n: usize) -> f64 {
        self.xi
            .iter()
            .filter(|(k, _)| k.unsigned_abs() as usize > n)
            .map(|(&k, &x)| (k as f64 * x).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn xi_at(&self, n: i64) -> f64 {
        self.xi.get(&n).copied().unwrap_or(0.0)
    }
}

/// θ, χ, ξ, Ω and Ω_N of `data` against `model`.
///
/// Indices outside both windows are assumed to coincide (both tails are
/// generated from the same closed form), so the sums are finite and exact.
pub fn compute_diagnostics(data: &SpectralDataSet, model: &SpectralDataSet, truncation: usize) -> Result<Diagnostics> {
    let mut theta = BTreeMap::new();
    let mut chi = BTreeMap::new();
    let mut xi = BTreeMap::new();
    let indices = data.union_indices(model);
    for &n in &indices {
        let d = data.require(n)?;
        let t = model.require(n)?;
        let th = (d.lambda - t.lambda).norm();
        theta.insert(n, th);
        chi.insert(n, if th != 0.0 { 1.0 / th } else { 0.0 });
    }
    for &n in &indices {
        if xi.contains_key(&n) {
            continue;
        }
        let gd = data.group_of(n).ok_or(Error::IndexMismatch(n))?;
        let gm = model.group_of(n).ok_or(Error::IndexMismatch(n))?;
        if gd != gm {
            for k in gd.indices().chain(gm.indices()) {
                xi.insert(k, 1.0);
            }
            continue;
        }
        let k = gd.start;
        let base = (data.require(k)?.lambda - model.require(k)?.lambda).norm();
        let diffs: Vec<f64> = gd
            .indices()
            .map(|i| Ok((data.require(i)?.residue - model.require(i)?.residue).norm()))
            .collect::<Result<_>>()?;
        for (nu, i) in gd.indices().enumerate() {
            let tail_sum: f64 = diffs[nu..].iter().sum();
            xi.insert(i, base + tail_sum / k.unsigned_abs() as f64);
        }
    }
    // groups that spill outside the union still carry their ξ = 1 entries
    for &k in xi.keys() {
        theta.entry(k).or_insert(0.0);
        chi.entry(k).or_insert(0.0);
    }
    let mut diag = Diagnostics {
        theta,
        chi,
        xi,
        omega: 0.0,
        truncation,
        omega_n: 0.0,
    };
    diag.omega = diag.omega_tail(0);
    diag.omega_n = diag.omega_tail(truncation);
    Ok(diag)
}

/// Hybrid data: `data` for `|n| ≤ n`, `model` beyond.
pub fn truncate_hybrid(data: &SpectralDataSet, model: &SpectralDataSet, n: usize) -> Result<SpectralDataSet> {
    let limit = n as i64;
    for g in data.groups() {
        let inside = g.indices().filter(|k| k.abs() <= limit).count();
        if inside != 0 && inside != g.multiplicity {
            return Err(Error::Invalid(format!(
                "truncation level {n} splits the multiplicity group at {}",
                g.start
            )));
        }
    }
    let mut raw: Vec<(i64, Complex64, Complex64)> = Vec::new();
    for k in data.union_indices(model) {
        let e = if k.abs() <= limit {
            data.require(k)?
        } else {
            model.require(k)?
        };
        raw.push((k, e.lambda, e.residue));
    }
    SpectralDataSet::normalize_ordering(&raw, model.tail(), Some(model.omega0()))
}

/// One inequality of the discrete local-solvability conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionCheck {
    pub name: String,
    pub measured: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplittingReport {
    pub checks: Vec<ConditionCheck>,
}

impl SplittingReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn violations(&self) -> impl Iterator<Item = &ConditionCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Checks the discrete conditions under which a multiple model eigenvalue
/// may split into simple data eigenvalues. Every bound is multiplied by
/// `slack`, which stands in for the unspecified constants.
pub fn validate_splitting_conditions(
    data: &SpectralDataSet,
    model: &SpectralDataSet,
    n_star: usize,
    delta: f64,
    slack: f64,
) -> Result<SplittingReport> {
    let mut checks = Vec::new();
    let push = |checks: &mut Vec<ConditionCheck>, name: String, measured: f64, bound: f64| {
        let bound = bound * slack;
        checks.push(ConditionCheck {
            name,
            measured,
            passed: measured <= bound * (1.0 + 1e-12) + 1e-15,
            bound,
        });
    };

    let diag = compute_diagnostics(data, model, n_star)?;
    push(
        &mut checks,
        "tail: sqrt(sum_{|n|>n*} (n xi_n)^2)".into(),
        diag.omega_n,
        delta,
    );

    let window: Vec<&SpectralEntry> = data.window().collect();
    let mut min_gap = f64::INFINITY;
    for (i, a) in window.iter().enumerate() {
        for b in &window[i + 1..] {
            min_gap = min_gap.min((a.lambda - b.lambda).norm());
        }
    }
    checks.push(ConditionCheck {
        name: "distinct eigenvalues: min |lambda_n - lambda_k|".into(),
        measured: min_gap,
        bound: 0.0,
        passed: min_gap > GROUPING_TOLERANCE,
    });

    let star = n_star as i64;
    for g in model.groups().iter().filter(|g| g.start.abs() <= star) {
        let m = g.multiplicity;
        let center = model.require(g.start)?.lambda;
        let model_laurent = model.laurent(*g);
        let members: Vec<SpectralEntry> = g.indices().map(|k| data.require(k)).collect::<Result<_>>()?;
        let moment = |s: usize| -> Complex64 {
            members
                .iter()
                .map(|e| (e.lambda - center).powu(s as u32) * e.residue)
                .sum()
        };
        for (s, model_coef) in model_laurent.iter().enumerate() {
            push(
                &mut checks,
                format!("group {}: moment s={s} vs model", g.start),
                (moment(s) - model_coef).norm(),
                delta,
            );
        }
        for s in m..=2 * (m - 1) {
            push(
                &mut checks,
                format!("group {}: higher moment s={s}", g.start),
                moment(s).norm(),
                delta,
            );
        }
        let mf = m as f64;
        for e in &members {
            push(
                &mut checks,
                format!("index {}: |lambda - model lambda|", e.n),
                (e.lambda - center).norm(),
                delta.powf(1.0 / mf),
            );
            push(
                &mut checks,
                format!("index {}: |M|", e.n),
                e.residue.norm(),
                delta.powf((1.0 - mf) / mf),
            );
        }
    }
    Ok(SplittingReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn straddling_group() {
        let raw = [
            (1, c(0.5, 0.0), c(0.0, -1.0 / (2.0 * PI))),
            (-1, c(0.5, 0.0), c(-1.0 / PI, 0.0)),
        ];
        let set = SpectralDataSet::normalize_ordering(&raw, Tail::ZeroPotential, None).unwrap();
        assert_eq!(
            set.groups(),
            &[Group {
                start: -1,
                multiplicity: 2
            }]
        );
        assert_eq!(
            set.laurent(set.groups()[0]),
            vec![c(-1.0 / PI, 0.0), c(0.0, -1.0 / (2.0 * PI))]
        );
    }

    #[test]
    fn zero_model_is_all_simple() {
        let set = SpectralDataSet::zero_potential(3);
        assert_eq!(set.groups().len(), 6);
        assert!(set.is_simple());
        assert_eq!(set.require(-2).unwrap().residue, c(2.0 / PI, 0.0));
    }

    #[test]
    fn near_equal_eigenvalues_group() {
        let raw = [(1, c(1.0 + 1e-15, 0.0), c(1.0, 0.0)), (2, c(1.0, 0.0), c(2.0, 0.0))];
        let set = SpectralDataSet::normalize_ordering(&raw, Tail::Unspecified, None).unwrap();
        assert_eq!(
            set.groups(),
            &[Group {
                start: 1,
                multiplicity: 2
            }]
        );
        assert_eq!(set.require(2).unwrap().lambda, set.require(1).unwrap().lambda);
    }

    #[test]
    fn errors() {
        let dup = [(1, c(1.0, 0.0), c(0.0, 0.0)), (1, c(2.0, 0.0), c(0.0, 0.0))];
        assert!(matches!(
            SpectralDataSet::normalize_ordering(&dup, Tail::Unspecified, None),
            Err(Error::DuplicateIndex(1))
        ));
        let conflict = [
            (-2, c(3.0, 0.0), c(0.0, 0.0)),
            (-1, c(1.0, 0.0), c(0.0, 0.0)),
            (1, c(2.0, 0.0), c(0.0, 0.0)),
            (2, c(3.0, 0.0), c(0.0, 0.0)),
        ];
        assert!(matches!(
            SpectralDataSet::normalize_ordering(&conflict, Tail::Unspecified, None),
            Err(Error::SignConflict { first: -2, second: 2 })
        ));
        let zero = [(0, c(1.0, 0.0), c(0.0, 0.0))];
        assert!(matches!(
            SpectralDataSet::normalize_ordering(&zero, Tail::Unspecified, None),
            Err(Error::ZeroIndex)
        ));
    }

    #[test]
    fn same_sign_regrouping_moves_members_together() {
        let raw = [
            (1, c(1.0, 0.0), c(10.0, 0.0)),
            (2, c(2.0, 0.0), c(20.0, 0.0)),
            (3, c(1.0, 0.0), c(30.0, 0.0)),
        ];
        let set = SpectralDataSet::normalize_ordering(&raw, Tail::Unspecified, None).unwrap();
        assert_eq!(set.require(2).unwrap().residue, c(30.0, 0.0));
        assert_eq!(set.require(3).unwrap().lambda, c(2.0, 0.0));
        assert_eq!(
            set.groups()[0],
            Group {
                start: 1,
                multiplicity: 2
            }
        );
        let again = SpectralDataSet::normalize_ordering(&set.raw(), Tail::Unspecified, None).unwrap();
        assert_eq!(again, set);
    }

    #[test]
    fn perturbed_simple_eigenvalue_xi() {
        let model = SpectralDataSet::zero_potential(3);
        let mut raw = model.raw();
        for r in raw.iter_mut() {
            if r.0 == 2 {
                r.1 = c(2.1, 0.0);
            }
        }
        let data = SpectralDataSet::normalize_ordering(&raw, Tail::ZeroPotential, None).unwrap();
        let d = compute_diagnostics(&data, &model, 1).unwrap();
        assert!((d.xi_at(2) - 0.1).abs() < 1e-14);
        assert!((d.omega - 0.2).abs() < 1e-13);
        assert!((d.chi[&2] * d.theta[&2] - 1.0).abs() < 1e-15);
        assert_eq!(d.chi[&3] * d.theta[&3], 0.0);
        assert!((d.omega_tail(2) - 0.0).abs() < 1e-15);
    }

    #[test]
    fn group_mismatch_sets_xi_to_one() {
        let model = SpectralDataSet::zero_potential(2);
        let raw = [
            (-1, c(0.5, 0.0), c(-1.0 / PI, 0.0)),
            (1, c(0.5, 0.0), c(0.0, -0.5 / PI)),
        ];
        let data = SpectralDataSet::normalize_ordering(&raw, Tail::ZeroPotential, None).unwrap();
        let d = compute_diagnostics(&data, &model, 1).unwrap();
        assert_eq!(d.xi_at(-1), 1.0);
        assert_eq!(d.xi_at(1), 1.0);
        assert_eq!(d.xi_at(2), 0.0);
        assert!((d.omega - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn truncation_edges() {
        let model = SpectralDataSet::zero_potential(3);
        let raw: Vec<_> = model
            .raw()
            .into_iter()
            .map(|(n, l, m)| (n, l + c(0.01 * n as f64, 0.0), m))
            .collect();
        let data = SpectralDataSet::normalize_ordering(&raw, Tail::ZeroPotential, None).unwrap();
        let t0 = truncate_hybrid(&data, &model, 0).unwrap();
        assert_eq!(t0.raw(), model.raw());
        let t3 = truncate_hybrid(&data, &model, 3).unwrap();
        assert_eq!(t3.raw(), data.raw());
        let t1 = truncate_hybrid(&data, &model, 1).unwrap();
        assert_eq!(t1.require(2).unwrap(), model.require(2).unwrap());
        assert_eq!(t1.require(-1).unwrap(), data.require(-1).unwrap());
    }

    #[test]
    fn splitting_detects_repeated_data_eigenvalue() {
        let model = SpectralDataSet::zero_potential(2);
        let raw = [(1, c(1.0, 0.0), c(-1.0 / PI, 0.0)), (2, c(1.0, 0.0), c(-2.0 / PI, 0.0))];
        let data = SpectralDataSet::normalize_ordering(&raw, Tail::ZeroPotential, None).unwrap();
        let report = validate_splitting_conditions(&data, &model, 1, 0.1, 1.0).unwrap();
        assert!(report.violations().any(|c| c.name.starts_with("distinct")));
    }

    #[test]
    fn splitting_identity_passes() {
        let model = SpectralDataSet::zero_potential(3);
        let report = validate_splitting_conditions(&model, &model, 1, 1e-3, 1.0).unwrap();
        assert!(report.all_passed(), "{:?}", report);
        let moments: Vec<_> = report.checks.iter().filter(|c| c.name.contains("moment")).collect();
        assert!(moments.iter().all(|c| c.measured == 0.0));
    }
}
