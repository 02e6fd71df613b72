//! Eigenvalue-splitting experiment: split data around a double eigenvalue,
//! reconstruction distances, the contour metric and round-trip checks.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;

use crate::contour;
use crate::error::{Error, Result};
use crate::forward::{self, ForwardOptions};
use crate::inverse::{run_algorithm1, InverseOptions, RecoveredPotentials};
use crate::model::Background;
use crate::quad::par_map;
use crate::spectral_data::{SpectralDataSet, Tail};

/// Laurent pair of the double eigenvalue at 1/2: `(M̃_{−1}, M̃_1)`.
pub fn double_laurent() -> (Complex64, Complex64) {
    (Complex64::new(-1.0 / PI, 0.0), Complex64::new(0.0, -0.5 / PI))
}

pub const DOUBLE_EIGENVALUE: f64 = 0.5;

/// Split data: the double eigenvalue at 1/2 replaced by two simple ones at
/// distance about `√δ`, all other data those of the zero potential.
/// `δ = 0` returns the double-eigenvalue data.
pub fn make_split_data(delta: f64) -> Result<SpectralDataSet> {
    if delta < 0.0 || delta.is_nan() {
        return Err(Error::NegativeDelta(delta));
    }
    let (m_minus, m_plus) = double_laurent();
    let half = Complex64::new(DOUBLE_EIGENVALUE, 0.0);
    let raw = if delta == 0.0 {
        vec![(-1, half, m_minus), (1, half, m_plus)]
    } else {
        let a = m_plus / 2.0;
        let c = m_minus / a;
        let r = delta.sqrt();
        vec![(1, half + r, a / r + m_minus), (-1, half - r + c * delta, -a / r)]
    };
    SpectralDataSet::normalize_ordering(&raw, Tail::ZeroPotential, Some(Complex64::new(0.0, 0.0)))
}

/// `(d1, d0)`: maximal distances of `q1` and of `∫q0` from the reference.
pub fn compute_d_metrics(recovered: &RecoveredPotentials, reference: &RecoveredPotentials) -> Result<(f64, f64)> {
    if recovered.x.len() != reference.x.len() {
        return Err(Error::GridMismatch(format!(
            "{} nodes against a reference with {}",
            recovered.x.len(),
            reference.x.len()
        )));
    }
    let max_diff = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).norm()));
    let sigma = |r: &RecoveredPotentials| -> Vec<Complex64> {
        r.sigma_model.iter().zip(&r.q0_antideriv).map(|(a, b)| a + b).collect()
    };
    Ok((
        max_diff(&recovered.q1, &reference.q1),
        max_diff(&sigma(recovered), &sigma(reference)),
    ))
}

/// Contour metric of split data against the double-eigenvalue data on
/// `|λ| = radius`.
pub fn compute_split_delta_metric(
    data: &SpectralDataSet,
    model: &SpectralDataSet,
    n_star: usize,
    contour_radius: f64,
) -> Result<f64> {
    contour::split_delta_metric(data, model, n_star, Complex64::new(0.0, 0.0), contour_radius, 512)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitExperimentConfig {
    pub deltas: Vec<f64>,
    pub n_grid: usize,
    pub contour_radius: f64,
    pub n_star: usize,
}

/// The δ values of the published table.
pub const TABLE_DELTAS: [f64; 9] = [0.05, 0.02, 0.01, 0.005, 0.002, 0.001, 0.0005, 0.0002, 0.0001];

impl Default for SplitExperimentConfig {
    fn default() -> Self {
        Self {
            deltas: TABLE_DELTAS.to_vec(),
            n_grid: 200,
            contour_radius: 0.85,
            n_star: 1,
        }
    }
}

impl SplitExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if let Some(&d) = self.deltas.iter().find(|d| d.is_nan() || **d < 0.0) {
            return Err(Error::NegativeDelta(d));
        }
        if self.n_grid < 2 || !self.n_grid.is_multiple_of(2) {
            return Err(Error::Invalid(format!(
                "grid size {} must be even and at least 2",
                self.n_grid
            )));
        }
        let max_delta = self.deltas.iter().copied().fold(0.0, f64::max);
        if !(self.contour_radius > 0.5 + max_delta.sqrt() && self.contour_radius < 1.0) {
            return Err(Error::Invalid(format!(
                "contour radius {} must lie in ({}, 1)",
                self.contour_radius,
                0.5 + max_delta.sqrt()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub delta: f64,
    pub d1: f64,
    pub d0: f64,
    pub lambda_plus: Complex64,
    pub lambda_minus: Complex64,
    pub m_plus: Complex64,
    pub m_minus: Complex64,
    pub contour_metric: f64,
    /// For `δ = 0`: winding number of the recovered `Δ` around 1/2.
    pub winding: Option<usize>,
    pub error: Option<String>,
}

pub const TABLE_HEADER: &str = "delta,d1,d0,re_l1,im_l1,re_lm1,im_lm1,re_M1,im_M1,re_Mm1,im_Mm1";

impl ExperimentRow {
    fn failed(delta: f64, err: &Error) -> Self {
        let nan = Complex64::new(f64::NAN, f64::NAN);
        Self {
            delta,
            d1: f64::NAN,
            d0: f64::NAN,
            lambda_plus: nan,
            lambda_minus: nan,
            m_plus: nan,
            m_minus: nan,
            contour_metric: f64::NAN,
            winding: None,
            error: Some(err.to_string()),
        }
    }

    pub fn to_csv_line(&self) -> String {
        let v = [
            self.delta,
            self.d1,
            self.d0,
            self.lambda_plus.re,
            self.lambda_plus.im,
            self.lambda_minus.re,
            self.lambda_minus.im,
            self.m_plus.re,
            self.m_plus.im,
            self.m_minus.re,
            self.m_minus.im,
        ];
        v.iter().map(|x| format!("{x:.16e}")).collect::<Vec<_>>().join(",")
    }
}

pub fn table_to_csv(rows: &[ExperimentRow]) -> String {
    let mut out = format!("{TABLE_HEADER}\n");
    for r in rows {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}

/// Parses a table CSV back into rows (contour metric and winding are not
/// part of the file).
pub fn table_from_csv(text: &str) -> Result<Vec<ExperimentRow>> {
    let header: Vec<&str> = TABLE_HEADER.split(',').collect();
    let c = |a: f64, b: f64| Complex64::new(a, b);
    Ok(crate::io::parse_csv(text, &header)?
        .into_iter()
        .map(|r| ExperimentRow {
            delta: r[0],
            d1: r[1],
            d0: r[2],
            lambda_plus: c(r[3], r[4]),
            lambda_minus: c(r[5], r[6]),
            m_plus: c(r[7], r[8]),
            m_minus: c(r[9], r[10]),
            contour_metric: f64::NAN,
            winding: None,
            error: None,
        })
        .collect())
}

/// Result of a δ-sweep: the rows and the recovered potentials per δ.
#[derive(Debug, Clone)]
pub struct TableRun {
    pub rows: Vec<ExperimentRow>,
    pub potentials: Vec<(f64, Option<RecoveredPotentials>)>,
    pub reference: RecoveredPotentials,
}

/// Reconstruction of the double-eigenvalue problem, the reference for `d1, d0`.
pub fn reference_potentials(n_grid: usize) -> Result<RecoveredPotentials> {
    let opts = InverseOptions {
        n_grid,
        ..Default::default()
    };
    Ok(run_algorithm1(&make_split_data(0.0)?, &Background::Zero, &opts)?.potentials)
}

/// Winding number of `Δ` of the recovered potentials on `|λ − 1/2| = 0.05`.
pub fn double_root_winding(recovered: &RecoveredPotentials) -> Result<usize> {
    let pot = recovered.to_potential_pair()?;
    let sh = forward::Shooter::new(&pot, forward::DEFAULT_REFINE);
    forward::root_multiplicity(&sh, Complex64::new(DOUBLE_EIGENVALUE, 0.0), 0.05, 128)
}

pub fn run_table(config: &SplitExperimentConfig) -> Result<TableRun> {
    config.validate()?;
    let opts = InverseOptions {
        n_grid: config.n_grid,
        ..Default::default()
    };
    let reference = reference_potentials(config.n_grid)?;
    let double = make_split_data(0.0)?;
    let results: Vec<(ExperimentRow, Option<RecoveredPotentials>)> = par_map(&config.deltas, |&delta| {
        let attempt = || -> Result<(ExperimentRow, RecoveredPotentials)> {
            let data = make_split_data(delta)?;
            let rec = run_algorithm1(&data, &Background::Zero, &opts)?.potentials;
            let (d1, d0) = compute_d_metrics(&rec, &reference)?;
            let e = |n: i64| data.require(n);
            let winding = if delta == 0.0 {
                Some(double_root_winding(&rec)?)
            } else {
                None
            };
            let row = ExperimentRow {
                delta,
                d1,
                d0,
                lambda_plus: e(1)?.lambda,
                lambda_minus: e(-1)?.lambda,
                m_plus: e(1)?.residue,
                m_minus: e(-1)?.residue,
                contour_metric: compute_split_delta_metric(&data, &double, config.n_star, config.contour_radius)?,
                winding,
                error: None,
            };
            Ok((row, rec))
        };
        match attempt() {
            Ok((row, rec)) => (row, Some(rec)),
            Err(e) => (ExperimentRow::failed(delta, &e), None),
        }
    });
    let mut rows = Vec::new();
    let mut potentials = Vec::new();
    for ((row, rec), &delta) in results.into_iter().zip(&config.deltas) {
        rows.push(row);
        potentials.push((delta, rec));
    }
    Ok(TableRun {
        rows,
        potentials,
        reference,
    })
}

/// File name of the per-δ plot data.
pub fn plot_file_name(delta: f64) -> String {
    format!("potentials_delta={delta}.csv")
}

/// Writes `table.csv` and one plot CSV per successful δ into `dir`.
pub fn write_table_outputs(run: &TableRun, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("table.csv"), table_to_csv(&run.rows))?;
    for (delta, rec) in &run.potentials {
        if let Some(rec) = rec {
            std::fs::write(dir.join(plot_file_name(*delta)), rec.to_csv())?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundtripRow {
    pub n: i64,
    pub lambda_in: Complex64,
    pub lambda_out: Complex64,
    pub m_in: Complex64,
    pub m_out: Complex64,
}

impl RoundtripRow {
    pub fn lambda_error(&self) -> f64 {
        (self.lambda_in - self.lambda_out).norm()
    }

    pub fn m_error(&self) -> f64 {
        (self.m_in - self.m_out).norm()
    }

    pub fn m_relative_error(&self) -> f64 {
        self.m_error() / self.m_in.norm().max(f64::MIN_POSITIVE)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundtripReport {
    pub rows: Vec<RoundtripRow>,
    pub recovered: RecoveredPotentials,
}

impl RoundtripReport {
    pub fn max_lambda_error(&self) -> f64 {
        self.rows.iter().map(RoundtripRow::lambda_error).fold(0.0, f64::max)
    }

    pub fn max_m_error(&self) -> f64 {
        self.rows.iter().map(RoundtripRow::m_error).fold(0.0, f64::max)
    }

    pub fn row(&self, n: i64) -> Option<&RoundtripRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("n,re_lambda_in,im_lambda_in,re_lambda_out,im_lambda_out,re_M_in,im_M_in,re_M_out,im_M_out\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                r.n,
                r.lambda_in.re,
                r.lambda_in.im,
                r.lambda_out.re,
                r.lambda_out.im,
                r.m_in.re,
                r.m_in.im,
                r.m_out.re,
                r.m_out.im
            ));
        }
        out
    }
}

/// Reconstructs, then recomputes the spectral data of the result for
/// `|n| ≤ n_check`.
pub fn roundtrip_check(
    data: &SpectralDataSet,
    background: &Background,
    n_check: usize,
    inverse: &InverseOptions,
    forward_opts: &ForwardOptions,
) -> Result<RoundtripReport> {
    let rec = run_algorithm1(data, background, inverse)?.potentials;
    let pot = rec.to_potential_pair()?;
    let out = forward::spectral_data(&pot, n_check, data.omega0(), forward_opts)?;
    let mut rows = Vec::new();
    for e in out.window() {
        let input = data.require(e.n)?;
        rows.push(RoundtripRow {
            n: e.n,
            lambda_in: input.lambda,
            lambda_out: e.lambda,
            m_in: input.residue,
            m_out: e.residue,
        });
    }
    Ok(RoundtripReport { rows, recovered: rec })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn split_data_at_one_percent() {
        let d = make_split_data(0.01).unwrap();
        let l1 = d.require(1).unwrap();
        let lm1 = d.require(-1).unwrap();
        assert!((l1.lambda - c(0.6, 0.0)).norm() < 1e-15);
        assert!((lm1.lambda - c(0.4, -0.04)).norm() < 1e-15);
        assert!((l1.residue - c(-1.0 / PI, -0.25 / PI / 0.1)).norm() < 1e-15);
        assert!((lm1.residue - c(0.0, 0.25 / PI / 0.1)).norm() < 1e-15);
        assert!(d.is_simple());
    }

    #[test]
    fn split_identities() {
        let (m_minus, _) = double_laurent();
        for delta in TABLE_DELTAS {
            let d = make_split_data(delta).unwrap();
            let (p, m) = (d.require(1).unwrap(), d.require(-1).unwrap());
            assert!((p.lambda + m.lambda - (1.0 + c(0.0, -4.0) * delta)).norm() < 1e-15);
            assert!((p.residue + m.residue - m_minus).norm() < 1e-12);
        }
    }

    #[test]
    fn double_data() {
        let d = make_split_data(0.0).unwrap();
        assert_eq!(d.groups().len(), 1);
        assert_eq!(d.groups()[0].multiplicity, 2);
        assert_eq!(d.groups()[0].start, -1);
        assert!(matches!(make_split_data(-1e-3), Err(Error::NegativeDelta(_))));
    }

    #[test]
    fn table_csv_round_trip() {
        let rows = vec![ExperimentRow {
            delta: 0.01,
            d1: 0.0982123456789,
            d0: 1.0 / 3.0,
            lambda_plus: c(0.6, 0.0),
            lambda_minus: c(0.4, -0.04),
            m_plus: c(-1.0 / PI, -0.79),
            m_minus: c(0.0, 0.79),
            contour_metric: f64::NAN,
            winding: None,
            error: None,
        }];
        let back = table_from_csv(&table_to_csv(&rows)).unwrap();
        assert_eq!(back[0].to_csv_line(), rows[0].to_csv_line());
        assert_eq!(back[0].d0.to_bits(), rows[0].d0.to_bits());
    }

    #[test]
    fn config_validation() {
        let mut cfg = SplitExperimentConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.contour_radius = 0.7;
        assert!(cfg.validate().is_err());
        cfg.contour_radius = 0.85;
        cfg.deltas.push(-0.1);
        assert!(matches!(cfg.validate(), Err(Error::NegativeDelta(_))));
    }
}
