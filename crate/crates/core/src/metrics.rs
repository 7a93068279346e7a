//! Stability metrics: generalized relative entropy, the oscillation
//! stability parameter δ, and the gate-parameter correlation μ, together
//! with the analytic sinusoid and cos² models used to check them.
//!
//! Run-indexed functions live on a [`RunWindow`]; the functional
//! `F(g) = (1/R)∫ g dr` always divides by the run count `R`, whatever the
//! window length.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::{differentiate, integrate, integrate_samples, linspace, NumericsError};
use crate::params::GateParamMatrix;

/// Default quadrature panel count.
pub const DEFAULT_PANELS: usize = 10_000;

/// Below this centered second moment the correlation is undefined.
pub const ZERO_VARIANCE: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("entry {value} at (gate {gate}, run {run}) must be positive")]
    NonPositiveEntry { gate: usize, run: usize, value: f64 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("run index {index} out of range for {runs} runs")]
    IndexOutOfRange { index: usize, runs: usize },
    #[error("degenerate grid: {0}")]
    DegenerateGrid(String),
    #[error("correlation undefined: centered second moment {0:e} is zero")]
    ZeroVariance(f64),
    #[error("closed form is singular for C = {c}, C* = {c_star}")]
    SingularParameters { c: f64, c_star: f64 },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Pair of stabilized and target parameter matrices with positive entries.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetPair {
    beta: GateParamMatrix,
    beta_star: GateParamMatrix,
}

impl TargetPair {
    pub fn new(beta: GateParamMatrix, beta_star: GateParamMatrix) -> Result<Self, MetricsError> {
        if (beta.gates(), beta.runs()) != (beta_star.gates(), beta_star.runs()) {
            return Err(MetricsError::ShapeMismatch(format!(
                "beta {}x{} vs target {}x{}",
                beta.gates(),
                beta.runs(),
                beta_star.gates(),
                beta_star.runs()
            )));
        }
        for m in [&beta, &beta_star] {
            for run in 0..m.runs() {
                for gate in 0..m.gates() {
                    let value = m.get(gate, run);
                    if !(value > 0.0 && value.is_finite()) {
                        return Err(MetricsError::NonPositiveEntry { gate, run, value });
                    }
                }
            }
        }
        Ok(Self { beta, beta_star })
    }

    pub fn beta(&self) -> &GateParamMatrix {
        &self.beta
    }

    pub fn beta_star(&self) -> &GateParamMatrix {
        &self.beta_star
    }

    pub fn runs(&self) -> usize {
        self.beta.runs()
    }
}

fn entropy_term(x: f64, y: f64) -> f64 {
    x * (x / y).ln() + y - x
}

/// `D(β‖β*) = Σ_{r,l} (β log(β/β*) + β* − β)`.
pub fn relative_entropy(pair: &TargetPair) -> f64 {
    (0..pair.runs()).map(|r| run_entropy_unchecked(pair, r)).sum()
}

fn run_entropy_unchecked(pair: &TargetPair, r: usize) -> f64 {
    (0..pair.beta.gates())
        .map(|l| entropy_term(pair.beta.get(l, r), pair.beta_star.get(l, r)))
        .sum()
}

/// `f_D(r)`: the gate sum of the relative entropy at run `r` (0-based).
pub fn per_run_entropy(pair: &TargetPair, r: usize) -> Result<f64, MetricsError> {
    if r >= pair.runs() {
        return Err(MetricsError::IndexOutOfRange {
            index: r,
            runs: pair.runs(),
        });
    }
    Ok(run_entropy_unchecked(pair, r))
}

/// Integration domain for run-indexed functions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunWindow {
    pub start: f64,
    pub end: f64,
    /// Run count `R`, the prefactor of `F` and of δ.
    pub runs: usize,
}

impl RunWindow {
    /// `[1, R]`.
    pub fn literal(runs: usize) -> Self {
        Self {
            start: 1.0,
            end: runs as f64,
            runs,
        }
    }

    /// `[1, R + 1]`, one full window of length `R` starting at the first run.
    pub fn full(runs: usize) -> Self {
        Self {
            start: 1.0,
            end: runs as f64 + 1.0,
            runs,
        }
    }

    /// `[0, R]`.
    pub fn from_origin(runs: usize) -> Self {
        Self {
            start: 0.0,
            end: runs as f64,
            runs,
        }
    }

    fn validate(&self) -> Result<(), MetricsError> {
        if self.runs == 0 || !(self.start < self.end) {
            return Err(MetricsError::DegenerateGrid(format!(
                "window [{}, {}] with R = {}",
                self.start, self.end, self.runs
            )));
        }
        Ok(())
    }

    /// Evenly spaced sample points over the window.
    pub fn grid(&self, points: usize) -> Vec<f64> {
        linspace(self.start, self.end, points)
    }

    /// `F(g) = (1/R) ∫_window g dr`.
    pub fn functional<G: Fn(f64) -> f64>(&self, g: G, panels: usize) -> Result<f64, MetricsError> {
        self.validate()?;
        Ok(integrate(g, self.start, self.end, panels)? / self.runs as f64)
    }

    /// Window average `∫ g / (end − start)`, which equals `F(g)` only when the
    /// window length is `R`.
    pub fn average<G: Fn(f64) -> f64>(&self, g: G, panels: usize) -> Result<f64, MetricsError> {
        self.validate()?;
        Ok(integrate(g, self.start, self.end, panels)? / (self.end - self.start))
    }
}

/// Result of the δ computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeltaStability {
    /// `Δ = (1/R) ∫ (∂f_D)² dr`.
    pub mean_sq_derivative: f64,
    /// `((R/2π)·√Δ)⁻¹`; `None` when `Δ = 0`.
    pub delta: Option<f64>,
    /// Set when `f_D` does not vary, so δ is unbounded.
    pub unbounded: bool,
}

/// δ from samples of `f_D` on a uniform grid spanning `window`.
pub fn delta_stability(samples: &[f64], window: &RunWindow) -> Result<DeltaStability, MetricsError> {
    window.validate()?;
    if samples.len() < 8 {
        return Err(MetricsError::DegenerateGrid(format!(
            "need at least 8 samples, got {}",
            samples.len()
        )));
    }
    let step = (window.end - window.start) / (samples.len() - 1) as f64;
    let (lo, hi) = samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()).max(1.0) {
        return Ok(DeltaStability {
            mean_sq_derivative: 0.0,
            delta: None,
            unbounded: true,
        });
    }
    let derivative = differentiate(samples, step)?;
    let squared: Vec<f64> = derivative.iter().map(|d| d * d).collect();
    let r = window.runs as f64;
    let mean_sq_derivative = integrate_samples(&squared, step)? / r;
    if mean_sq_derivative <= 0.0 {
        return Ok(DeltaStability {
            mean_sq_derivative: 0.0,
            delta: None,
            unbounded: true,
        });
    }
    Ok(DeltaStability {
        mean_sq_derivative,
        delta: Some(1.0 / (r / (2.0 * PI) * mean_sq_derivative.sqrt())),
        unbounded: false,
    })
}

/// `f_D(r) = amp·sin(2πN r/R) + mean`, oscillating between `gamma` and `lambda_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SinusoidModel {
    pub runs: usize,
    pub oscillations: u32,
    pub gamma: f64,
    pub lambda_max: f64,
    pub amp: f64,
    pub mean: f64,
}

impl SinusoidModel {
    /// Oscillation between `0 ≤ gamma ≤ lambda_max ≤ 1`.
    pub fn from_bounds(runs: usize, oscillations: u32, gamma: f64, lambda_max: f64) -> Result<Self, MetricsError> {
        if !(0.0 <= gamma && gamma <= lambda_max && lambda_max <= 1.0) {
            return Err(MetricsError::InvalidModel(format!(
                "need 0 <= gamma <= lambda_max <= 1, got {gamma}, {lambda_max}"
            )));
        }
        let amp = (lambda_max - gamma) / 2.0;
        Ok(Self {
            runs,
            oscillations,
            gamma,
            lambda_max,
            amp,
            mean: amp + gamma,
        })
    }

    /// Arbitrary amplitude around `mean`. `gamma`/`lambda_max` are derived and
    /// may leave `[0, 1]`.
    pub fn with_amplitude(runs: usize, oscillations: u32, amp: f64, mean: f64) -> Self {
        Self {
            runs,
            oscillations,
            gamma: mean - amp,
            lambda_max: mean + amp,
            amp,
            mean,
        }
    }

    /// Amplitude `√2`, for which `δ = 1/N` exactly.
    pub fn unit_delta(runs: usize, oscillations: u32, mean: f64) -> Self {
        Self::with_amplitude(runs, oscillations, SQRT_2, mean)
    }

    /// `√2/(amp·N)`, the exact δ over a full window.
    pub fn analytic_delta(&self) -> f64 {
        SQRT_2 / (self.amp * self.oscillations as f64)
    }
}

pub fn sinusoid_f(model: &SinusoidModel, r: f64) -> f64 {
    model.amp * (2.0 * PI * model.oscillations as f64 * r / model.runs as f64).sin() + model.mean
}

/// `f(r) = X cos²(2πCN r/R)` with `X = 2C²N²4π²/R²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosSqModel {
    pub runs: usize,
    pub oscillations: u32,
    pub c: f64,
    pub x: f64,
}

impl CosSqModel {
    pub fn new(runs: usize, oscillations: u32, c: f64) -> Result<Self, MetricsError> {
        if !(c > 0.0) || runs == 0 {
            return Err(MetricsError::InvalidModel(format!("need C > 0 and R > 0, got C = {c}, R = {runs}")));
        }
        let n = oscillations as f64;
        let r = runs as f64;
        Ok(Self {
            runs,
            oscillations,
            c,
            x: 2.0 * c * c * n * n * 4.0 * PI * PI / (r * r),
        })
    }

    /// `C²N²4π²/R²`, the full-period mean of the curve.
    pub fn full_period_mean(&self) -> f64 {
        self.x / 2.0
    }
}

pub fn cos_sq_f(model: &CosSqModel, r: f64) -> f64 {
    let arg = 2.0 * PI * model.c * model.oscillations as f64 * r / model.runs as f64;
    model.x * arg.cos().powi(2)
}

/// Absolute correlation of two run-indexed functions under `F`.
///
/// Functions are centered on their window average so that `μ(f, af + b) = 1`
/// on any window; the `1/R` prefactor cancels in the ratio.
pub fn correlation_mu<F, G>(f: F, f_star: G, window: &RunWindow, panels: usize) -> Result<f64, MetricsError>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    if panels < 100 || !panels.is_multiple_of(2) {
        return Err(MetricsError::Numerics(NumericsError::InvalidPanels(panels)));
    }
    window.validate()?;
    let nodes = window.grid(panels + 1);
    let fs: Vec<f64> = nodes.iter().map(|&r| f(r)).collect();
    let gs: Vec<f64> = nodes.iter().map(|&r| f_star(r)).collect();
    correlation_mu_sampled(&fs, &gs, window)
}

/// [`correlation_mu`] on samples at `panels + 1` uniform nodes of `window`.
pub fn correlation_mu_sampled(f: &[f64], f_star: &[f64], window: &RunWindow) -> Result<f64, MetricsError> {
    window.validate()?;
    if f.len() != f_star.len() {
        return Err(MetricsError::ShapeMismatch(format!("{} vs {} samples", f.len(), f_star.len())));
    }
    if f.len() < 3 {
        return Err(MetricsError::DegenerateGrid(format!("{} samples", f.len())));
    }
    let width = window.end - window.start;
    let step = width / (f.len() - 1) as f64;
    let runs = window.runs as f64;
    let functional = |values: &[f64]| integrate_samples(values, step).map(|v| v / runs);
    let mean_f = integrate_samples(f, step)? / width;
    let mean_g = integrate_samples(f_star, step)? / width;
    let cf: Vec<f64> = f.iter().map(|v| v - mean_f).collect();
    let cg: Vec<f64> = f_star.iter().map(|v| v - mean_g).collect();
    let var_f = functional(&cf.iter().map(|v| v * v).collect::<Vec<_>>())?;
    let var_g = functional(&cg.iter().map(|v| v * v).collect::<Vec<_>>())?;
    for v in [var_f, var_g] {
        if v < ZERO_VARIANCE {
            return Err(MetricsError::ZeroVariance(v));
        }
    }
    let cov = functional(&cf.iter().zip(&cg).map(|(a, b)| a * b).collect::<Vec<_>>())?;
    Ok((cov / (var_f * var_g).sqrt()).abs())
}

/// Closed-form μ for the cos² pair `(C, C*)`. Not clamped to `[0, 1]`.
pub fn mu_closed_form(c: f64, c_star: f64, oscillations: u32, runs: usize) -> Result<f64, MetricsError> {
    if (c - c_star).abs() < 1e-9 {
        return Err(MetricsError::SingularParameters { c, c_star });
    }
    if !(c > 0.0 && c_star > 0.0) {
        return Err(MetricsError::InvalidModel(format!("C and C* must be positive, got {c}, {c_star}")));
    }
    let n = oscillations as f64;
    let r = runs as f64;
    let pi3 = PI.powi(3);
    let pi4 = PI.powi(4);
    let numerator = 2.0
        * pi3
        * c * c
        * c_star * c_star
        * n.powi(3)
        * ((c_star - c) * (n * 4.0 * PI * (c_star + c)).sin() + (c_star + c) * (n * 4.0 * PI * (c_star - c)).sin());
    let var = |k: f64| k.powi(4) * n.powi(4) * 8.0 * pi4 / r.powi(4);
    let denominator = (c_star * c_star - c * c) * r.powi(4) * (var(c) * var(c_star)).sqrt();
    Ok((numerator / denominator).abs())
}

/// μ by quadrature and by the closed form for one cos² pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuAudit {
    pub oscillations: u32,
    pub c: f64,
    pub c_star: f64,
    pub runs: usize,
    /// Quadrature over `[1, R]`.
    pub mu_numeric: f64,
    /// Quadrature over `[0, R]`.
    pub mu_numeric_from_origin: f64,
    pub mu_closed_form: Option<f64>,
    /// `|mu_closed_form − mu_numeric|`.
    pub discrepancy: Option<f64>,
}

pub fn audit_mu(c: f64, c_star: f64, oscillations: u32, runs: usize, panels: usize) -> Result<MuAudit, MetricsError> {
    let f = CosSqModel::new(runs, oscillations, c)?;
    let g = CosSqModel::new(runs, oscillations, c_star)?;
    let quad = |w: RunWindow| correlation_mu(|r| cos_sq_f(&f, r), |r| cos_sq_f(&g, r), &w, panels);
    let mu_numeric = quad(RunWindow::literal(runs))?;
    let mu_numeric_from_origin = quad(RunWindow::from_origin(runs))?;
    let mu_closed_form = match mu_closed_form(c, c_star, oscillations, runs) {
        Ok(v) => Some(v),
        Err(MetricsError::SingularParameters { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(MuAudit {
        oscillations,
        c,
        c_star,
        runs,
        mu_numeric,
        mu_numeric_from_origin,
        mu_closed_form,
        discrepancy: mu_closed_form.map(|v| (v - mu_numeric).abs()),
    })
}

/// Piecewise-linear interpolation of per-run values at `r = 1, …, R`.
pub fn run_curve(values: &[f64]) -> impl Fn(f64) -> f64 + '_ {
    move |r: f64| {
        let last = values.len() - 1;
        let x = (r - 1.0).clamp(0.0, last as f64);
        let i = (x.floor() as usize).min(last.saturating_sub(1));
        if last == 0 {
            return values[0];
        }
        let t = x - i as f64;
        values[i] * (1.0 - t) + values[i + 1] * t
    }
}

/// Mean gate parameter of each run.
pub fn run_means(m: &GateParamMatrix) -> Vec<f64> {
    (0..m.runs())
        .map(|r| m.run(r).iter().sum::<f64>() / m.gates() as f64)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunStability {
    /// 1-based run index.
    pub r: usize,
    #[serde(rename = "f_D")]
    pub f_d: f64,
    pub delta: Option<f64>,
    pub delta_unbounded: bool,
}

/// Per-run and aggregate stability metrics of a stabilized sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub per_run: Vec<RunStability>,
    #[serde(rename = "D_total")]
    pub d_total: f64,
    /// `Δ` of the sampled `f_D` curve; `None` with fewer than 8 runs.
    pub mean_sq_derivative: Option<f64>,
    /// μ between the run-mean curves of `β` and `β*`; `None` when undefined.
    pub mu_numeric: Option<f64>,
    pub mu_note: Option<String>,
    /// Closed form at the configured cos² audit parameters.
    pub mu_closed_form: Option<f64>,
    /// Quadrature μ at the same cos² audit parameters.
    pub mu_model_numeric: Option<f64>,
    /// `|mu_closed_form − mu_model_numeric|`.
    pub discrepancy: Option<f64>,
}

/// Parameters of the cos² pair whose closed-form μ is audited in a report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MuAuditParams {
    pub oscillations: u32,
    pub c: f64,
    pub c_star: f64,
}

pub fn stability_report(
    pair: &TargetPair,
    audit: Option<MuAuditParams>,
    panels: usize,
) -> Result<StabilityReport, MetricsError> {
    let runs = pair.runs();
    let f_d: Vec<f64> = (0..runs).map(|r| run_entropy_unchecked(pair, r)).collect();
    let delta = if runs >= 8 {
        Some(delta_stability(&f_d, &RunWindow::literal(runs))?)
    } else {
        None
    };
    let per_run = f_d
        .iter()
        .enumerate()
        .map(|(r, &v)| RunStability {
            r: r + 1,
            f_d: v,
            delta: delta.and_then(|d| d.delta),
            delta_unbounded: delta.is_some_and(|d| d.unbounded),
        })
        .collect();

    let (mu_numeric, mu_note) = if runs < 2 {
        (None, Some("fewer than two runs".to_string()))
    } else {
        let f = run_means(pair.beta());
        let g = run_means(pair.beta_star());
        match correlation_mu(run_curve(&f), run_curve(&g), &RunWindow::literal(runs), panels) {
            Ok(v) => (Some(v), None),
            Err(MetricsError::ZeroVariance(v)) => (None, Some(format!("zero variance ({v:e})"))),
            Err(e) => return Err(e),
        }
    };

    let (mu_closed_form, mu_model_numeric, discrepancy) = match audit {
        Some(p) => {
            let a = audit_mu(p.c, p.c_star, p.oscillations, runs, panels)?;
            (a.mu_closed_form, Some(a.mu_numeric), a.discrepancy)
        }
        None => (None, None, None),
    };

    Ok(StabilityReport {
        per_run,
        d_total: f_d.iter().sum(),
        mean_sq_derivative: delta.map(|d| d.mean_sq_derivative),
        mu_numeric,
        mu_note,
        mu_closed_form,
        mu_model_numeric,
        discrepancy,
    })
}
