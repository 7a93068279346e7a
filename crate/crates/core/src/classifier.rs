//! Stability classes of stabilized sequences by Gaussian-kernel correlation.
//!
//! Per-gate class probabilities are normalized Gaussian bumps around
//! k-means centroids. A sequence `φ` is mapped per class `k` to
//! `φ_k(φ)_i = ν(φ_i)·f_k(φ_i)` with `ν = φ/π`; its class score is the
//! component sum, and the secondary class comes from the kernel
//! correlation `ρ(k, l) = Σ_i exp(−(φ_k,i − φ_l,i)²/c)`.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::GateParamMatrix;
use crate::rng::substream;

/// `2σ²` with `σ = 0.1`.
pub const DEFAULT_KERNEL_C: f64 = 0.02;

const KMEANS_RESTARTS: u64 = 4;
const KMEANS_MAX_ITERS: usize = 300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifierError {
    #[error("need at least 2 classes, got {0}")]
    TooFewClasses(usize),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("gate parameter {0} outside [0, π]")]
    OutOfRange(f64),
    #[error("class index {index} out of range for {classes} classes")]
    ClassOutOfRange { index: usize, classes: usize },
    #[error("no runs to classify")]
    NoRuns,
    #[error("invalid model: {0}")]
    InvalidModel(String),
}

/// How `ν` weights a sequence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NuMode {
    /// `ν(φ_i) = φ_i/π`.
    #[default]
    Plain,
    /// `ν(φ_i) = φ_i/Σ_j φ_j`, so the weights of a sequence sum to one.
    Renormalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassModel {
    #[serde(rename = "K")]
    pub k: usize,
    /// Strictly increasing, in `[0, π]`.
    pub centroids: Vec<f64>,
    /// Bandwidth of the class probability bumps.
    pub h: f64,
    /// Kernel scale `c = 2σ²`.
    pub kernel_c: f64,
    #[serde(default)]
    pub nu_mode: NuMode,
}

impl ClassModel {
    pub fn new(centroids: Vec<f64>, h: f64, kernel_c: f64) -> Result<Self, ClassifierError> {
        let model = Self {
            k: centroids.len(),
            centroids,
            h,
            kernel_c,
            nu_mode: NuMode::Plain,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<(), ClassifierError> {
        if self.k < 2 || self.centroids.len() != self.k {
            return Err(ClassifierError::InvalidModel(format!(
                "K = {} with {} centroids",
                self.k,
                self.centroids.len()
            )));
        }
        if self.centroids.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(ClassifierError::InvalidModel("centroids must be strictly increasing".into()));
        }
        if !(self.h > 0.0 && self.kernel_c > 0.0) {
            return Err(ClassifierError::InvalidModel("h and kernel_c must be positive".into()));
        }
        Ok(())
    }

    pub fn with_kernel_c(mut self, kernel_c: f64) -> Self {
        self.kernel_c = kernel_c;
        self
    }

    pub fn with_nu_mode(mut self, nu_mode: NuMode) -> Self {
        self.nu_mode = nu_mode;
        self
    }

    fn check_class(&self, k: usize) -> Result<(), ClassifierError> {
        if k >= self.k {
            return Err(ClassifierError::ClassOutOfRange {
                index: k,
                classes: self.k,
            });
        }
        Ok(())
    }
}

fn check_range(values: &[f64]) -> Result<(), ClassifierError> {
    match values.iter().find(|v| !(0.0..=PI).contains(*v)) {
        Some(&v) => Err(ClassifierError::OutOfRange(v)),
        None => Ok(()),
    }
}

fn lloyd(data: &[f64], mut centroids: Vec<f64>) -> (Vec<f64>, f64) {
    let nearest = |x: f64, cs: &[f64]| {
        cs.iter()
            .enumerate()
            .map(|(i, c)| (i, (x - c).abs()))
            .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
            .0
    };
    for _ in 0..KMEANS_MAX_ITERS {
        let mut sums = vec![0.0; centroids.len()];
        let mut counts = vec![0usize; centroids.len()];
        for &x in data {
            let i = nearest(x, &centroids);
            sums[i] += x;
            counts[i] += 1;
        }
        let mut next = centroids.clone();
        for i in 0..next.len() {
            if counts[i] > 0 {
                next[i] = sums[i] / counts[i] as f64;
            } else {
                // empty cluster: move it to the worst-served point
                let far = data
                    .iter()
                    .copied()
                    .max_by(|a, b| {
                        let da = (a - centroids[nearest(*a, &centroids)]).abs();
                        let db = (b - centroids[nearest(*b, &centroids)]).abs();
                        da.total_cmp(&db)
                    })
                    .expect("data is non-empty");
                next[i] = far;
            }
        }
        let moved = next.iter().zip(&centroids).any(|(a, b)| a != b);
        centroids = next;
        if !moved {
            break;
        }
    }
    let inertia = data
        .iter()
        .map(|&x| (x - centroids[nearest(x, &centroids)]).powi(2))
        .sum();
    (centroids, inertia)
}

fn kmeans_pp_init(data: &[f64], k: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut centroids = vec![data[rng.random_range(0..data.len())]];
    while centroids.len() < k {
        let d2: Vec<f64> = data
            .iter()
            .map(|x| centroids.iter().map(|c| (x - c).powi(2)).fold(f64::INFINITY, f64::min))
            .collect();
        let total: f64 = d2.iter().sum();
        let mut target = rng.random_range(0.0..total);
        let mut pick = data.len() - 1;
        for (i, w) in d2.iter().enumerate() {
            if *w > 0.0 && target < *w {
                pick = i;
                break;
            }
            target -= w;
        }
        if d2[pick] == 0.0 {
            pick = d2.iter().position(|w| *w > 0.0).expect("enough distinct values");
        }
        centroids.push(data[pick]);
    }
    centroids
}

/// 1-D k-means over all gate parameters of `beta`.
pub fn fit_classes(beta: &GateParamMatrix, k: usize, seed: u64) -> Result<ClassModel, ClassifierError> {
    if k < 2 {
        return Err(ClassifierError::TooFewClasses(k));
    }
    let data = beta.entries();
    check_range(data)?;
    let mut distinct = data.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < k {
        return Err(ClassifierError::DegenerateData(format!(
            "{} distinct parameter values for {k} classes",
            distinct.len()
        )));
    }

    let (mut centroids, _) = (0..KMEANS_RESTARTS)
        .map(|attempt| {
            let mut rng = substream(seed, "classifier.kmeans", attempt);
            lloyd(data, kmeans_pp_init(data, k, &mut rng))
        })
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least one restart");
    centroids.sort_by(f64::total_cmp);
    if centroids.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(ClassifierError::DegenerateData("centroids collapsed".into()));
    }
    let h = centroids.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max) / 2.0;
    ClassModel::new(centroids, h, DEFAULT_KERNEL_C)
}

/// `f_k(φ)` for every class; sums to one.
pub fn class_probabilities(model: &ClassModel, phi: f64) -> Result<Vec<f64>, ClassifierError> {
    check_range(&[phi])?;
    let logits: Vec<f64> = model
        .centroids
        .iter()
        .map(|c| -(phi - c).powi(2) / (2.0 * model.h * model.h))
        .collect();
    let peak = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = logits.iter().map(|l| (l - peak).exp()).collect();
    let total: f64 = weights.iter().sum();
    Ok(weights.into_iter().map(|w| w / total).collect())
}

fn nu_weights(model: &ClassModel, phi_vec: &[f64]) -> Vec<f64> {
    match model.nu_mode {
        NuMode::Plain => phi_vec.iter().map(|p| p / PI).collect(),
        NuMode::Renormalized => {
            let total: f64 = phi_vec.iter().sum();
            if total == 0.0 {
                vec![0.0; phi_vec.len()]
            } else {
                phi_vec.iter().map(|p| p / total).collect()
            }
        }
    }
}

/// Per-gate probabilities, `probs[i][k] = f_k(φ_i)`.
fn probability_table(model: &ClassModel, phi_vec: &[f64]) -> Result<Vec<Vec<f64>>, ClassifierError> {
    phi_vec.iter().map(|&p| class_probabilities(model, p)).collect()
}

/// `φ_k(φ)_i = ν(φ_i)·f_k(φ_i)`.
pub fn phi_map(model: &ClassModel, phi_vec: &[f64], k: usize) -> Result<Vec<f64>, ClassifierError> {
    model.check_class(k)?;
    check_range(phi_vec)?;
    let nu = nu_weights(model, phi_vec);
    let probs = probability_table(model, phi_vec)?;
    Ok(nu.iter().zip(&probs).map(|(n, p)| n * p[k]).collect())
}

fn kernel_sum(a: &[f64], b: &[f64], kernel_c: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (-(x - y).powi(2) / kernel_c).exp()).sum()
}

/// Correlation identifier `ρ(φ_k, φ_l)`.
pub fn rho(model: &ClassModel, phi_vec: &[f64], k: usize, l: usize) -> Result<f64, ClassifierError> {
    let a = phi_map(model, phi_vec, k)?;
    let b = phi_map(model, phi_vec, l)?;
    Ok(kernel_sum(&a, &b, model.kernel_c))
}

/// `(Σ_i φ_k,i², Σ_i φ_k,i φ_l,i)`.
pub fn inner_products(model: &ClassModel, phi_vec: &[f64], k: usize, l: usize) -> Result<(f64, f64), ClassifierError> {
    let a = phi_map(model, phi_vec, k)?;
    let b = phi_map(model, phi_vec, l)?;
    let sigma_avg: f64 = a.iter().map(|x| x * x).sum();
    let iota = a.iter().zip(&b).map(|(x, y)| x * y).sum();
    let bound: f64 = a.iter().sum();
    debug_assert!(sigma_avg <= bound + 1e-12, "Σν²f² = {sigma_avg} > Σνf = {bound}");
    Ok((sigma_avg, iota))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassAssignment {
    /// Run index, 0-based.
    pub r: usize,
    /// Primary class, 0-based.
    pub p: usize,
    /// Secondary class, 0-based.
    pub q: usize,
    /// Score of the primary class.
    pub xi: f64,
    /// `max_{l≠p} ρ(p, l)`.
    pub ell: f64,
    pub scores: Vec<f64>,
}

fn argmax_first(values: impl Iterator<Item = (usize, f64)>) -> (usize, f64) {
    values.fold((usize::MAX, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
}

pub fn classify_sequence(model: &ClassModel, phi_vec: &[f64], run: usize) -> Result<ClassAssignment, ClassifierError> {
    check_range(phi_vec)?;
    let maps = (0..model.k)
        .map(|k| phi_map(model, phi_vec, k))
        .collect::<Result<Vec<_>, _>>()?;
    let scores: Vec<f64> = maps.iter().map(|m| m.iter().sum()).collect();
    let (p, xi) = argmax_first(scores.iter().copied().enumerate());
    let (q, ell) = argmax_first(
        (0..model.k)
            .filter(|&l| l != p)
            .map(|l| (l, kernel_sum(&maps[p], &maps[l], model.kernel_c))),
    );
    Ok(ClassAssignment {
        r: run,
        p,
        q,
        xi,
        ell,
        scores,
    })
}

pub fn classify_all(model: &ClassModel, beta: &GateParamMatrix) -> Result<Vec<ClassAssignment>, ClassifierError> {
    if beta.runs() == 0 {
        return Err(ClassifierError::NoRuns);
    }
    (0..beta.runs())
        .map(|r| classify_sequence(model, &beta.run(r), r))
        .collect()
}
