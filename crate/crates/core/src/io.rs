//! On-disk formats: gate-parameter CSVs, JSON manifests and assignment tables.
//!
//! Indices in every file are 1-based.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifier::ClassAssignment;
use crate::numerics::Matrix;
use crate::params::GateParamMatrix;
use crate::stabilizer::StabilizerSolution;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

impl IoError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn csv(path: &Path, source: csv::Error) -> Self {
        Self::Csv {
            path: path.to_path_buf(),
            source,
        }
    }

    fn format(path: &Path, message: impl Into<String>) -> Self {
        Self::Format {
            path: path.to_path_buf(),
            message: message.into(),
        }
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| IoError::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes serializable rows with a header taken from the field names.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| IoError::csv(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| IoError::csv(path, e))?;
    }
    w.flush().map_err(|e| IoError::io(path, e))
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, IoError> {
    let mut r = csv::Reader::from_path(path).map_err(|e| IoError::csv(path, e))?;
    r.deserialize().collect::<Result<_, _>>().map_err(|e| IoError::csv(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct ParamEntry {
    l: usize,
    r: usize,
    value: f64,
}

/// `l,r,value` rows, run-major.
pub fn write_param_csv(path: &Path, m: &GateParamMatrix) -> Result<(), IoError> {
    let rows: Vec<ParamEntry> = (0..m.runs())
        .flat_map(|r| {
            (0..m.gates()).map(move |l| ParamEntry {
                l: l + 1,
                r: r + 1,
                value: m.get(l, r),
            })
        })
        .collect();
    write_csv(path, &rows)
}

/// Reads an `l,r,value` table; every entry must appear exactly once.
pub fn read_param_csv(path: &Path) -> Result<GateParamMatrix, IoError> {
    let rows: Vec<ParamEntry> = read_csv(path)?;
    if rows.is_empty() {
        return Err(IoError::format(path, "no entries"));
    }
    if rows.iter().any(|e| e.l == 0 || e.r == 0) {
        return Err(IoError::format(path, "indices are 1-based"));
    }
    let gates = rows.iter().map(|e| e.l).max().unwrap_or(0);
    let runs = rows.iter().map(|e| e.r).max().unwrap_or(0);
    if rows.len() != gates * runs {
        return Err(IoError::format(
            path,
            format!("{} entries for a {gates}x{runs} matrix", rows.len()),
        ));
    }
    let mut data = vec![None; gates * runs];
    for e in &rows {
        let slot = &mut data[(e.l - 1) * runs + (e.r - 1)];
        if slot.replace(e.value).is_some() {
            return Err(IoError::format(path, format!("duplicate entry l={}, r={}", e.l, e.r)));
        }
    }
    let data: Vec<f64> = data.into_iter().map(|v| v.expect("count checked")).collect();
    Matrix::from_row_major(gates, runs, data)
        .map(GateParamMatrix::new)
        .map_err(|e| IoError::format(path, e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssignmentRow {
    pub r: usize,
    pub p: usize,
    pub q: usize,
    pub xi: f64,
    pub ell: f64,
}

impl From<&ClassAssignment> for AssignmentRow {
    fn from(a: &ClassAssignment) -> Self {
        Self {
            r: a.r + 1,
            p: a.p + 1,
            q: a.q + 1,
            xi: a.xi,
            ell: a.ell,
        }
    }
}

pub fn write_assignments_csv(path: &Path, assignments: &[ClassAssignment]) -> Result<(), IoError> {
    let rows: Vec<AssignmentRow> = assignments.iter().map(AssignmentRow::from).collect();
    write_csv(path, &rows)
}

pub fn read_assignments_csv(path: &Path) -> Result<Vec<AssignmentRow>, IoError> {
    read_csv(path)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionFlags {
    pub orthogonalized: bool,
    pub reduced: bool,
    pub degenerate_input: bool,
}

/// JSON manifest of a stabilizer solution. `S` is stored row by row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilizerManifest {
    #[serde(rename = "L")]
    pub gates: usize,
    #[serde(rename = "R")]
    pub runs: usize,
    pub m: usize,
    #[serde(rename = "S")]
    pub s: Vec<Vec<f64>>,
    pub eigenvalues: Vec<f64>,
    #[serde(rename = "F_star")]
    pub f_star: f64,
    pub chi: f64,
    pub tau: f64,
    #[serde(rename = "Omega")]
    pub omega: f64,
    pub flags: SolutionFlags,
    pub epsilon: f64,
    pub kappa: usize,
    pub zeta: f64,
    pub c: f64,
    pub max_residual: f64,
    pub pencil_norm: f64,
}

impl StabilizerManifest {
    pub fn new(sol: &StabilizerSolution, runs: usize) -> Self {
        Self {
            gates: sol.s.rows(),
            runs,
            m: sol.s.cols(),
            s: (0..sol.s.rows()).map(|i| sol.s.row(i).to_vec()).collect(),
            eigenvalues: sol.eigenvalues.clone(),
            f_star: sol.f_star,
            chi: sol.chi,
            tau: sol.tau,
            omega: sol.omega,
            flags: SolutionFlags {
                orthogonalized: sol.orthogonalized,
                reduced: sol.reduced,
                degenerate_input: sol.degenerate_input,
            },
            epsilon: sol.epsilon,
            kappa: sol.kappa,
            zeta: sol.zeta,
            c: sol.c,
            max_residual: sol.max_residual,
            pencil_norm: sol.pencil_norm,
        }
    }

    pub fn stabilizer(&self) -> Result<Matrix, String> {
        let s = Matrix::from_rows(&self.s).map_err(|e| e.to_string())?;
        if s.shape() != (self.gates, self.m) {
            return Err(format!("S is {}x{}, manifest says {}x{}", s.rows(), s.cols(), self.gates, self.m));
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn param_csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a.csv");
        let m = GateParamMatrix::from_runs(&[vec![0.1, 0.2, 0.3], vec![1.0 / 3.0, 2.5, 3.0]]).unwrap();
        write_param_csv(&path, &m).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("l,r,value\n1,1,0.1\n2,1,0.2\n"));
        assert_eq!(read_param_csv(&path).unwrap(), m);
    }

    #[test]
    fn param_csv_rejects_gaps_and_duplicates() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        fs::write(&path, "l,r,value\n1,1,0.5\n2,2,0.5\n").unwrap();
        assert!(matches!(read_param_csv(&path), Err(IoError::Format { .. })));
        fs::write(&path, "l,r,value\n1,1,0.5\n1,1,0.5\n").unwrap();
        assert!(read_param_csv(&path).is_err());
        fs::write(&path, "l,r,value\n0,1,0.5\n").unwrap();
        assert!(read_param_csv(&path).is_err());
        fs::write(&path, "l,r,value\n1,1,abc\n").unwrap();
        assert!(matches!(read_param_csv(&path), Err(IoError::Csv { .. })));
    }

    #[test]
    fn assignments_are_one_based() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.csv");
        let a = ClassAssignment {
            r: 0,
            p: 1,
            q: 0,
            xi: 2.5,
            ell: 0.75,
            scores: vec![1.0, 2.5],
        };
        write_assignments_csv(&path, &[a]).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "r,p,q,xi,ell\n1,2,1,2.5,0.75\n");
        assert_eq!(read_assignments_csv(&path).unwrap()[0].p, 2);
    }
}
