use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::numerics::Matrix;

/// L×R matrix of gate parameters in radians. Entry `(l, r)` is the
/// parameter of unitary `l` in run `r`; column `r` is one run's vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateParamMatrix(Matrix);

impl GateParamMatrix {
    pub fn new(m: Matrix) -> Self {
        Self(m)
    }

    pub fn from_runs(runs: &[Vec<f64>]) -> Result<Self, crate::numerics::NumericsError> {
        Matrix::from_columns(runs).map(Self)
    }

    /// Number of gates `L`.
    pub fn gates(&self) -> usize {
        self.0.rows()
    }

    /// Number of runs `R`.
    pub fn runs(&self) -> usize {
        self.0.cols()
    }

    pub fn get(&self, gate: usize, run: usize) -> f64 {
        self.0[(gate, run)]
    }

    pub fn run(&self, r: usize) -> Vec<f64> {
        self.0.column(r)
    }

    pub fn run_vectors(&self) -> Vec<Vec<f64>> {
        self.0.columns()
    }

    pub fn matrix(&self) -> &Matrix {
        &self.0
    }

    pub fn into_matrix(self) -> Matrix {
        self.0
    }

    pub fn clamped(&self, lo: f64, hi: f64) -> Self {
        Self(self.0.map(|v| v.clamp(lo, hi)))
    }

    /// Clamps into the gate-parameter range `[0, π]`.
    pub fn clamped_to_range(&self) -> Self {
        self.clamped(0.0, PI)
    }

    pub fn within_range(&self) -> bool {
        self.0.as_slice().iter().all(|v| (0.0..=PI).contains(v))
    }

    pub fn entries(&self) -> &[f64] {
        self.0.as_slice()
    }
}
