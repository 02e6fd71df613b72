//! Spectral-data JSON and numeric CSV helpers.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral_data::{SpectralDataSet, Tail};

#[derive(Debug, Serialize, Deserialize)]
struct EntryJson {
    n: i64,
    lambda: [f64; 2],
    #[serde(rename = "M")]
    m: [f64; 2],
}

#[derive(Debug, Serialize, Deserialize)]
struct DataJson {
    #[serde(default)]
    omega0: Option<[f64; 2]>,
    #[serde(default = "default_model")]
    model: String,
    entries: Vec<EntryJson>,
}

fn default_model() -> String {
    "dirichlet-zero".into()
}

fn pair(z: Complex64) -> [f64; 2] {
    [z.re, z.im]
}

fn cx(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

/// Parses `{"omega0": [re, im], "model": "dirichlet-zero", "entries": [...]}`.
///
/// `"model": "none"` marks data with nothing known outside the window.
pub fn spectral_from_json(text: &str) -> Result<SpectralDataSet> {
    let doc: DataJson = serde_json::from_str(text)?;
    let tail = match doc.model.as_str() {
        "dirichlet-zero" => Tail::ZeroPotential,
        "none" => Tail::Unspecified,
        other => return Err(Error::Parse(format!("unknown model {other:?}"))),
    };
    let raw: Vec<_> = doc.entries.iter().map(|e| (e.n, cx(e.lambda), cx(e.m))).collect();
    SpectralDataSet::normalize_ordering(&raw, tail, doc.omega0.map(cx))
}

pub fn spectral_to_json(data: &SpectralDataSet) -> Result<String> {
    let doc = DataJson {
        omega0: Some(pair(data.omega0())),
        model: match data.tail() {
            Tail::ZeroPotential => "dirichlet-zero".into(),
            Tail::Unspecified => "none".into(),
        },
        entries: data
            .window()
            .map(|e| EntryJson {
                n: e.n,
                lambda: pair(e.lambda),
                m: pair(e.residue),
            })
            .collect(),
    };
    Ok(serde_json::to_string_pretty(&doc)?)
}

pub fn read_spectral(path: &Path) -> Result<SpectralDataSet> {
    spectral_from_json(&std::fs::read_to_string(path)?)
}

pub fn write_spectral(data: &SpectralDataSet, path: &Path) -> Result<()> {
    std::fs::write(path, spectral_to_json(data)?)?;
    Ok(())
}

/// Parses a numeric CSV whose header must equal `header`.
pub fn parse_csv(text: &str, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let head: Vec<&str> = lines
        .next()
        .ok_or_else(|| Error::Parse("empty CSV".into()))?
        .split(',')
        .map(str::trim)
        .collect();
    if head != header {
        return Err(Error::Parse(format!(
            "expected header {:?}, found {:?}",
            header.join(","),
            head.join(",")
        )));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let row: Vec<f64> = line
                .split(',')
                .map(|f| {
                    f.trim()
                        .parse::<f64>()
                        .map_err(|e| Error::Parse(format!("line {}: {e}", i + 2)))
                })
                .collect::<Result<_>>()?;
            if row.len() != header.len() {
                return Err(Error::Parse(format!(
                    "line {}: {} fields, expected {}",
                    i + 2,
                    row.len(),
                    header.len()
                )));
            }
            Ok(row)
        })
        .collect()
}
