//! Unsupervised learning pass over a random training set of gate parameters.
//!
//! The projection is typed so every step composes: with `K = L` and the
//! stabilizer `S` (L×m),
//!
//! ```text
//! z_j = Sᵀ X_j                       (length m)
//! b_j = −z_jᵀ (Sᵀ X̄)                 (scalar, X̄ the training mean)
//! y_ij = θ*_{r,i} · z_j + b_j · 1    (length m)
//! ỹ_i  = (1/q) Σ_j ‖y_ij‖₂
//! Δỹ_i = |ỹ_i − ỹ_{i+1}|
//! ```

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{dot, Matrix};
use crate::params::GateParamMatrix;
use crate::rng::substream;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LearnerError {
    #[error("training set needs at least 2 samples, got {0}")]
    TooFewSamples(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("run index {index} out of range for {runs} runs")]
    IndexOutOfRange { index: usize, runs: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingSet {
    /// `q` samples of length `L`, entries in `[0, π]`.
    pub samples: Vec<Vec<f64>>,
    pub seed: u64,
}

impl TrainingSet {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn gates(&self) -> usize {
        self.samples.first().map_or(0, Vec::len)
    }

    pub fn mean(&self) -> Vec<f64> {
        let q = self.samples.len() as f64;
        let mut mean = vec![0.0; self.gates()];
        for x in &self.samples {
            for (m, v) in mean.iter_mut().zip(x) {
                *m += v;
            }
        }
        mean.iter_mut().for_each(|m| *m /= q);
        mean
    }
}

/// `q` i.i.d. uniform samples in `[0, π]^L`.
pub fn build_training_set(gates: usize, q: usize, seed: u64) -> Result<TrainingSet, LearnerError> {
    if q < 2 {
        return Err(LearnerError::TooFewSamples(q));
    }
    if gates == 0 {
        return Err(LearnerError::DimensionMismatch("gate count must be positive".into()));
    }
    let mut rng = substream(seed, "learner.training", 0);
    let samples = (0..q)
        .map(|_| (0..gates).map(|_| rng.random_range(0.0..=PI)).collect())
        .collect();
    Ok(TrainingSet { samples, seed })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection {
    /// `z_j`, one per sample, each of length `m`.
    pub z: Vec<Vec<f64>>,
    /// `b_j`, one per sample.
    pub b: Vec<f64>,
}

pub fn project_training(ts: &TrainingSet, s: &Matrix) -> Result<Projection, LearnerError> {
    if s.rows() != ts.gates() {
        return Err(LearnerError::DimensionMismatch(format!(
            "stabilizer has {} rows, samples have length {}",
            s.rows(),
            ts.gates()
        )));
    }
    let st = s.transpose();
    let projected_mean = st.mul_vec(&ts.mean());
    let z: Vec<Vec<f64>> = ts.samples.iter().map(|x| st.mul_vec(x)).collect();
    let b = z.iter().map(|zj| -dot(zj, &projected_mean)).collect();
    Ok(Projection { z, b })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutputs {
    /// `ỹ`, length `L`.
    pub y_tilde: Vec<f64>,
    /// `Δỹ`, length `L − 1`.
    pub delta_y: Vec<f64>,
}

/// Outputs for run `r` (0-based).
pub fn learn_outputs(proj: &Projection, alpha: &GateParamMatrix, r: usize) -> Result<RunOutputs, LearnerError> {
    if r >= alpha.runs() {
        return Err(LearnerError::IndexOutOfRange {
            index: r,
            runs: alpha.runs(),
        });
    }
    let q = proj.z.len() as f64;
    let y_tilde: Vec<f64> = alpha
        .run(r)
        .iter()
        .map(|&theta| {
            proj.z
                .iter()
                .zip(&proj.b)
                .map(|(zj, &bj)| zj.iter().map(|&z| (theta * z + bj).powi(2)).sum::<f64>().sqrt())
                .sum::<f64>()
                / q
        })
        .collect();
    let delta_y = y_tilde.windows(2).map(|w| (w[0] - w[1]).abs()).collect();
    Ok(RunOutputs { y_tilde, delta_y })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerOutput {
    pub z: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    /// One `ỹ` vector per run.
    pub y_tilde: Vec<Vec<f64>>,
    /// One `Δỹ` vector per run.
    pub delta_y: Vec<Vec<f64>>,
}

/// Projects the training set and learns the outputs of every run.
pub fn learn(ts: &TrainingSet, s: &Matrix, alpha: &GateParamMatrix) -> Result<LearnerOutput, LearnerError> {
    if alpha.gates() != ts.gates() {
        return Err(LearnerError::DimensionMismatch(format!(
            "alpha has {} gates, training samples {}",
            alpha.gates(),
            ts.gates()
        )));
    }
    let proj = project_training(ts, s)?;
    let (y_tilde, delta_y) = (0..alpha.runs())
        .map(|r| learn_outputs(&proj, alpha, r).map(|o| (o.y_tilde, o.delta_y)))
        .collect::<Result<Vec<_>, _>>()?
        .into_iter()
        .unzip();
    Ok(LearnerOutput {
        z: proj.z,
        b: proj.b,
        y_tilde,
        delta_y,
    })
}
