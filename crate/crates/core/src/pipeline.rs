//! File-based pipeline: simulate → stabilize → learn → classify → metrics,
//! plus the figure data bundles.
//!
//! Every stage reads its inputs from the output directory of the previous
//! stages unless an explicit input path is given, and writes deterministic
//! CSV/JSON files for a fixed configuration and seed.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{evaluate_objective, generate_alpha, CircuitFile, PauliCircuit, RunConfig, StateVector};
use crate::classifier::{classify_all, fit_classes, NuMode, DEFAULT_KERNEL_C};
use crate::io::{self, IoError, StabilizerManifest};
use crate::learner::{build_training_set, learn};
use crate::metrics::{
    audit_mu, correlation_mu_sampled, cos_sq_f, delta_stability, mu_closed_form, sinusoid_f,
    stability_report, CosSqModel, MetricsError, MuAudit, MuAuditParams, RunWindow, SinusoidModel, TargetPair,
    DEFAULT_PANELS,
};
use crate::params::GateParamMatrix;
use crate::stabilizer::{solve_stabilizer, StabilizerParams};

pub const ALPHA_FILE: &str = "alpha.csv";
pub const OBJECTIVE_FILE: &str = "objective.csv";
pub const SIMULATE_MANIFEST: &str = "simulate.json";
pub const STABILIZER_FILE: &str = "stabilizer.json";
pub const BETA_FILE: &str = "beta.csv";
pub const BETA_CLAMPED_FILE: &str = "beta_clamped.csv";
pub const LEARNER_FILE: &str = "learner.json";
pub const CLASS_MODEL_FILE: &str = "class_model.json";
pub const ASSIGNMENTS_FILE: &str = "assignments.csv";
pub const REPORT_FILE: &str = "stability_report.json";
pub const FIGURES_DIR: &str = "figures";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl PipelineError {
    /// 1 for configuration and file errors, 2 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io(_) => 1,
            Self::Numeric(_) => 2,
        }
    }
}

fn numeric(e: impl std::fmt::Display) -> PipelineError {
    PipelineError::Numeric(e.to_string())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputState {
    #[default]
    Plus,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub runs: usize,
    pub noise_scale: f64,
    pub ascent_steps: usize,
    pub learning_rate: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        let base = RunConfig::new(10, 0);
        Self {
            runs: base.runs,
            noise_scale: 0.05,
            ascent_steps: base.ascent_steps,
            learning_rate: base.learning_rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerSection {
    pub q: usize,
    /// Overrides the pipeline seed for the training set.
    pub seed: Option<u64>,
}

impl Default for LearnerSection {
    fn default() -> Self {
        Self { q: 64, seed: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierSection {
    #[serde(rename = "K")]
    pub k: usize,
    pub kernel_c: f64,
    pub nu_mode: NuMode,
}

impl Default for ClassifierSection {
    fn default() -> Self {
        Self {
            k: 3,
            kernel_c: DEFAULT_KERNEL_C,
            nu_mode: NuMode::Plain,
        }
    }
}

/// Where `β*` comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetSource {
    /// `β* = α`; needs `m = L`.
    Alpha,
    /// Every column of `β*` is the run average of `β`.
    RunMean,
    /// An `l,r,value` CSV, relative to the config file.
    File(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetricsSection {
    pub panels: usize,
    pub target: TargetSource,
    /// Entries of `β` and `β*` below this are raised to it before taking logs.
    pub positive_floor: f64,
    pub mu_audit: Option<MuAuditParams>,
}

impl Default for MetricsSection {
    fn default() -> Self {
        Self {
            panels: DEFAULT_PANELS,
            target: TargetSource::Alpha,
            positive_floor: 1e-9,
            mu_audit: Some(MuAuditParams {
                oscillations: 1,
                c: 0.3,
                c_star: 0.2,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosSqTriple {
    #[serde(rename = "N")]
    pub oscillations: u32,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "C_star")]
    pub c_star: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FiguresSection {
    pub runs: usize,
    /// `𝔼(D)` of the sinusoid curves.
    pub mean: f64,
    /// Sinusoid amplitude; `√2` makes `δ = 1/N`.
    pub amp: f64,
    pub oscillations: Vec<u32>,
    /// Samples of `f_D` used for δ.
    pub delta_grid_points: usize,
    pub curve_points: usize,
    pub cos_sq_triples: Vec<CosSqTriple>,
    pub mu_panels: usize,
    /// `C, C*` grid resolution is `1/mu_grid_divisions`.
    pub mu_grid_divisions: usize,
    pub mu_grid_panels: usize,
}

impl Default for FiguresSection {
    fn default() -> Self {
        Self {
            runs: 10,
            mean: 0.1,
            amp: std::f64::consts::SQRT_2,
            oscillations: vec![1, 2, 3],
            delta_grid_points: 10_000,
            curve_points: 901,
            cos_sq_triples: vec![
                CosSqTriple {
                    oscillations: 1,
                    c: 0.125,
                    c_star: 0.1,
                },
                CosSqTriple {
                    oscillations: 1,
                    c: 0.3,
                    c_star: 0.2,
                },
                CosSqTriple {
                    oscillations: 2,
                    c: 0.5,
                    c_star: 0.3,
                },
            ],
            mu_panels: DEFAULT_PANELS,
            mu_grid_divisions: 100,
            mu_grid_panels: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    /// Circuit description, relative to the config file.
    pub circuit: Option<PathBuf>,
    pub input_state: InputState,
    pub run: RunSection,
    pub stabilizer: StabilizerParams,
    pub learner: LearnerSection,
    pub classifier: ClassifierSection,
    pub metrics: MetricsSection,
    pub figures: FiguresSection,
    /// Output directory, relative to the config file.
    pub out: Option<PathBuf>,
    #[serde(skip)]
    base_dir: PathBuf,
}

impl PipelineConfig {
    pub fn from_file(path: &Path) -> Result<Self, PipelineError> {
        let text = fs::read_to_string(path).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let mut config = Self::from_json_str(&text).map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        config.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(config)
    }

    /// Parses a config whose relative paths resolve against the working directory.
    pub fn from_json_str(text: &str) -> Result<Self, PipelineError> {
        serde_json::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.base_dir.join(path)
        }
    }

    pub fn out_dir(&self) -> PathBuf {
        self.resolve(self.out.as_deref().unwrap_or(Path::new("out")))
    }

    pub fn run_config(&self) -> RunConfig {
        RunConfig {
            runs: self.run.runs,
            noise_scale: self.run.noise_scale,
            ascent_steps: self.run.ascent_steps,
            learning_rate: self.run.learning_rate,
            seed: self.seed,
        }
    }

    pub fn load_circuit(&self) -> Result<PauliCircuit, PipelineError> {
        let rel = self
            .circuit
            .as_ref()
            .ok_or_else(|| PipelineError::Config("no circuit file configured".into()))?;
        let file: CircuitFile = io::read_json(&self.resolve(rel))?;
        file.into_circuit().map_err(|e| PipelineError::Config(e.to_string()))
    }

    fn ensure_out(&self) -> Result<PathBuf, PipelineError> {
        let out = self.out_dir();
        fs::create_dir_all(&out).map_err(|source| IoError::Io {
            path: out.clone(),
            source,
        })?;
        Ok(out)
    }
}

fn input_or(explicit: Option<&Path>, out: &Path, name: &str) -> PathBuf {
    explicit.map_or_else(|| out.join(name), Path::to_path_buf)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ObjectiveRow {
    r: usize,
    objective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SimulateManifest {
    n: usize,
    #[serde(rename = "L")]
    gates: usize,
    #[serde(rename = "R")]
    runs: usize,
    seed: u64,
    input_state: InputState,
    noise_scale: f64,
    ascent_steps: usize,
    learning_rate: f64,
    objective_mean: f64,
}

/// Writes `alpha.csv`, `objective.csv` and `simulate.json`.
pub fn cmd_simulate(config: &PipelineConfig) -> Result<Vec<PathBuf>, PipelineError> {
    let circuit = config.load_circuit()?;
    let run = config.run_config();
    run.validate().map_err(|e| PipelineError::Config(e.to_string()))?;
    let input = match config.input_state {
        InputState::Plus => StateVector::plus(circuit.qubits()),
        InputState::Zero => StateVector::zero(circuit.qubits()),
    }
    .map_err(numeric)?;
    let alpha = generate_alpha(&circuit, &input, &run).map_err(numeric)?;
    let objective = (0..alpha.runs())
        .map(|r| {
            evaluate_objective(&circuit, &alpha.run(r), &input).map(|objective| ObjectiveRow { r: r + 1, objective })
        })
        .collect::<Result<Vec<_>, _>>()
        .map_err(numeric)?;

    let out = config.ensure_out()?;
    let files = [out.join(ALPHA_FILE), out.join(OBJECTIVE_FILE), out.join(SIMULATE_MANIFEST)];
    io::write_param_csv(&files[0], &alpha)?;
    io::write_csv(&files[1], &objective)?;
    io::write_json(
        &files[2],
        &SimulateManifest {
            n: circuit.qubits(),
            gates: alpha.gates(),
            runs: alpha.runs(),
            seed: run.seed,
            input_state: config.input_state,
            noise_scale: run.noise_scale,
            ascent_steps: run.ascent_steps,
            learning_rate: run.learning_rate,
            objective_mean: objective.iter().map(|o| o.objective).sum::<f64>() / objective.len() as f64,
        },
    )?;
    Ok(files.to_vec())
}

/// Writes `stabilizer.json`, `beta.csv` and `beta_clamped.csv`.
pub fn cmd_stabilize(config: &PipelineConfig, alpha_path: Option<&Path>) -> Result<Vec<PathBuf>, PipelineError> {
    let out = config.ensure_out()?;
    let alpha = io::read_param_csv(&input_or(alpha_path, &out, ALPHA_FILE))?;
    let sol = solve_stabilizer(&alpha, &config.stabilizer).map_err(|e| match e {
        crate::stabilizer::StabilizerError::InvalidParameter(msg) => PipelineError::Config(msg),
        other => numeric(other),
    })?;
    let files = [out.join(STABILIZER_FILE), out.join(BETA_FILE), out.join(BETA_CLAMPED_FILE)];
    io::write_json(&files[0], &StabilizerManifest::new(&sol, alpha.runs()))?;
    io::write_param_csv(&files[1], &sol.beta)?;
    io::write_param_csv(&files[2], &sol.beta_clamped)?;
    Ok(files.to_vec())
}

/// Writes `learner.json` from `S` and `α`.
pub fn cmd_learn(
    config: &PipelineConfig,
    alpha_path: Option<&Path>,
    stabilizer_path: Option<&Path>,
) -> Result<Vec<PathBuf>, PipelineError> {
    let out = config.ensure_out()?;
    let alpha = io::read_param_csv(&input_or(alpha_path, &out, ALPHA_FILE))?;
    let manifest_path = input_or(stabilizer_path, &out, STABILIZER_FILE);
    let manifest: StabilizerManifest = io::read_json(&manifest_path)?;
    let s = manifest.stabilizer().map_err(|message| IoError::Format {
        path: manifest_path,
        message,
    })?;
    let seed = config.learner.seed.unwrap_or(config.seed);
    let ts = build_training_set(alpha.gates(), config.learner.q, seed).map_err(|e| PipelineError::Config(e.to_string()))?;
    let output = learn(&ts, &s, &alpha).map_err(|e| PipelineError::Config(e.to_string()))?;
    let path = out.join(LEARNER_FILE);
    io::write_json(&path, &output)?;
    Ok(vec![path])
}

/// Writes `class_model.json` and `assignments.csv`. The input `β` is
/// clamped into `[0, π]` first.
pub fn cmd_classify(config: &PipelineConfig, beta_path: Option<&Path>) -> Result<Vec<PathBuf>, PipelineError> {
    let out = config.ensure_out()?;
    let beta = io::read_param_csv(&input_or(beta_path, &out, BETA_CLAMPED_FILE))?.clamped_to_range();
    let c = &config.classifier;
    if !(c.kernel_c > 0.0) {
        return Err(PipelineError::Config(format!("kernel_c must be positive, got {}", c.kernel_c)));
    }
    let model = fit_classes(&beta, c.k, config.seed)
        .map_err(numeric)?
        .with_kernel_c(c.kernel_c)
        .with_nu_mode(c.nu_mode);
    let assignments = classify_all(&model, &beta).map_err(numeric)?;
    let files = [out.join(CLASS_MODEL_FILE), out.join(ASSIGNMENTS_FILE)];
    io::write_json(&files[0], &model)?;
    io::write_assignments_csv(&files[1], &assignments)?;
    Ok(files.to_vec())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct MetricsManifest {
    #[serde(flatten)]
    report: crate::metrics::StabilityReport,
    target: TargetSource,
    positive_floor: f64,
    /// Entries raised to `positive_floor` across `β` and `β*`.
    floored_entries: usize,
    panels: usize,
}

fn floor_entries(m: &GateParamMatrix, floor: f64) -> (GateParamMatrix, usize) {
    let count = m.entries().iter().filter(|&&v| v < floor).count();
    (GateParamMatrix::new(m.matrix().map(|v| v.max(floor))), count)
}

/// Writes `stability_report.json` comparing `β` with the configured target.
pub fn cmd_metrics(
    config: &PipelineConfig,
    beta_path: Option<&Path>,
    alpha_path: Option<&Path>,
) -> Result<Vec<PathBuf>, PipelineError> {
    let out = config.ensure_out()?;
    let m = &config.metrics;
    if !(m.positive_floor > 0.0) {
        return Err(PipelineError::Config("positive_floor must be positive".into()));
    }
    if m.panels < 100 || !m.panels.is_multiple_of(2) {
        return Err(PipelineError::Config(format!("panels must be even and >= 100, got {}", m.panels)));
    }
    let beta = io::read_param_csv(&input_or(beta_path, &out, BETA_CLAMPED_FILE))?;
    let target = match &m.target {
        TargetSource::Alpha => io::read_param_csv(&input_or(alpha_path, &out, ALPHA_FILE))?,
        TargetSource::File(p) => io::read_param_csv(&config.resolve(p))?,
        TargetSource::RunMean => {
            let mean: Vec<f64> = (0..beta.gates())
                .map(|l| (0..beta.runs()).map(|r| beta.get(l, r)).sum::<f64>() / beta.runs() as f64)
                .collect();
            GateParamMatrix::from_runs(&vec![mean; beta.runs()]).map_err(numeric)?
        }
    };
    if (beta.gates(), beta.runs()) != (target.gates(), target.runs()) {
        return Err(PipelineError::Config(format!(
            "beta is {}x{} but the target is {}x{}",
            beta.gates(),
            beta.runs(),
            target.gates(),
            target.runs()
        )));
    }
    let (beta, n_beta) = floor_entries(&beta, m.positive_floor);
    let (target, n_target) = floor_entries(&target, m.positive_floor);
    let pair = TargetPair::new(beta, target).map_err(numeric)?;
    let report = stability_report(&pair, m.mu_audit, m.panels).map_err(numeric)?;
    let path = out.join(REPORT_FILE);
    io::write_json(
        &path,
        &MetricsManifest {
            report,
            target: m.target.clone(),
            positive_floor: m.positive_floor,
            floored_entries: n_beta + n_target,
            panels: m.panels,
        },
    )?;
    Ok(vec![path])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    #[serde(rename = "N")]
    pub oscillations: u32,
    pub amp: f64,
    pub delta_numeric: f64,
    pub delta_analytic: f64,
    pub inverse_n: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiguresManifest {
    pub seed: u64,
    #[serde(rename = "R")]
    pub runs: usize,
    /// Window used for δ.
    pub delta_window: RunWindow,
    /// Window used for μ.
    pub mu_window: RunWindow,
    pub delta: Vec<DeltaRow>,
    pub mu: Vec<MuAudit>,
    /// Largest closed-form vs quadrature discrepancy over the configured cos² triples.
    pub max_discrepancy: Option<f64>,
    /// Largest closed-form value over the (C, C*) grids, for comparison with `1`.
    pub max_closed_form_on_grid: Option<f64>,
    pub files: Vec<String>,
}

fn fmt_index(prefix: &str, n: u32, ext: &str) -> String {
    format!("{prefix}_N{n}.{ext}")
}

/// Writes the data behind the sinusoid, cos² and μ-grid figures to
/// `<out>/figures/`.
pub fn cmd_figures(config: &PipelineConfig) -> Result<Vec<PathBuf>, PipelineError> {
    let fig = &config.figures;
    if fig.runs < 2 || fig.oscillations.is_empty() || fig.curve_points < 2 || fig.mu_grid_divisions < 2 {
        return Err(PipelineError::Config("figures: runs >= 2, curve_points >= 2, mu_grid_divisions >= 2 and at least one N required".into()));
    }
    let dir = config.ensure_out()?.join(FIGURES_DIR);
    fs::create_dir_all(&dir).map_err(|source| IoError::Io {
        path: dir.clone(),
        source,
    })?;
    let mut files = Vec::new();
    let mut write = |name: String, rows: &dyn Fn(&Path) -> Result<(), IoError>| -> Result<(), PipelineError> {
        let path = dir.join(&name);
        rows(&path)?;
        files.push(path);
        Ok(())
    };

    // Sinusoid curves and δ.
    let r = fig.runs;
    let models: Vec<SinusoidModel> = fig
        .oscillations
        .iter()
        .map(|&n| SinusoidModel::with_amplitude(r, n, fig.amp, fig.mean))
        .collect();
    let curve_r = RunWindow::literal(r).grid(fig.curve_points);
    let mut header = vec!["r".to_string()];
    header.extend(fig.oscillations.iter().map(|n| format!("f_N{n}")));
    let rows: Vec<Vec<String>> = curve_r
        .iter()
        .map(|&x| {
            std::iter::once(x.to_string())
                .chain(models.iter().map(|m| sinusoid_f(m, x).to_string()))
                .collect()
        })
        .collect();
    write("sinusoid_curves.csv".into(), &|p| write_table(p, &header, &rows))?;

    let delta_window = RunWindow::full(r);
    let delta = models
        .iter()
        .map(|m| {
            let samples: Vec<f64> = delta_window.grid(fig.delta_grid_points).iter().map(|&x| sinusoid_f(m, x)).collect();
            let d = delta_stability(&samples, &delta_window)?;
            Ok(DeltaRow {
                oscillations: m.oscillations,
                amp: m.amp,
                delta_numeric: d.delta.unwrap_or(f64::INFINITY),
                delta_analytic: m.analytic_delta(),
                inverse_n: 1.0 / m.oscillations as f64,
            })
        })
        .collect::<Result<Vec<_>, MetricsError>>()
        .map_err(numeric)?;
    write("delta_vs_oscillations.csv".into(), &|p| io::write_csv(p, &delta))?;

    // cos² curves and μ.
    let mut audits = Vec::new();
    for (i, t) in fig.cos_sq_triples.iter().enumerate() {
        let f = CosSqModel::new(r, t.oscillations, t.c).map_err(|e| PipelineError::Config(e.to_string()))?;
        let g = CosSqModel::new(r, t.oscillations, t.c_star).map_err(|e| PipelineError::Config(e.to_string()))?;
        let rows: Vec<Vec<String>> = RunWindow::from_origin(r)
            .grid(fig.curve_points)
            .iter()
            .map(|&x| vec![x.to_string(), cos_sq_f(&f, x).to_string(), cos_sq_f(&g, x).to_string()])
            .collect();
        let header = ["r", "f", "f_star"].map(String::from);
        write(format!("cos_sq_curve_{}.csv", i + 1), &|p| write_table(p, &header, &rows))?;
        audits.push(audit_mu(t.c, t.c_star, t.oscillations, r, fig.mu_panels).map_err(numeric)?);
    }
    write("mu_triples.csv".into(), &|p| {
        let header = ["N", "C", "C_star", "mu_numeric", "mu_numeric_from_origin", "mu_closed_form", "discrepancy"]
            .map(String::from);
        let rows: Vec<Vec<String>> = audits
            .iter()
            .map(|a| {
                vec![
                    a.oscillations.to_string(),
                    a.c.to_string(),
                    a.c_star.to_string(),
                    a.mu_numeric.to_string(),
                    a.mu_numeric_from_origin.to_string(),
                    opt(a.mu_closed_form),
                    opt(a.discrepancy),
                ]
            })
            .collect();
        write_table(p, &header, &rows)
    })?;

    // μ over the (C, C*) grid.
    let mut max_closed = None::<f64>;
    for &n in &fig.oscillations {
        let grid = mu_grid(r, n, fig.mu_grid_divisions, fig.mu_grid_panels)?;
        for row in &grid {
            if let Some(v) = row.3 {
                max_closed = Some(max_closed.map_or(v, |m| m.max(v)));
            }
        }
        let header = ["C", "C_star", "mu_numeric", "mu_closed_form"].map(String::from);
        let rows: Vec<Vec<String>> = grid
            .iter()
            .map(|(c, cs, mu, cf)| vec![c.to_string(), cs.to_string(), opt(*mu), opt(*cf)])
            .collect();
        write(fmt_index("mu_grid", n, "csv"), &|p| write_table(p, &header, &rows))?;
    }

    let manifest_path = dir.join("figures.json");
    let mut names: Vec<String> = files
        .iter()
        .filter_map(|p| p.file_name().map(|s| s.to_string_lossy().into_owned()))
        .collect();
    names.sort();
    let manifest = FiguresManifest {
        seed: config.seed,
        runs: r,
        delta_window,
        mu_window: RunWindow::literal(r),
        delta,
        max_discrepancy: audits.iter().filter_map(|a| a.discrepancy).reduce(f64::max),
        mu: audits,
        max_closed_form_on_grid: max_closed,
        files: names,
    };
    io::write_json(&manifest_path, &manifest)?;
    files.push(manifest_path);
    Ok(files)
}

/// `(C, C*, μ quadrature, μ closed form)` over `C, C* ∈ {0, 1/d, …, 1}`.
/// Entries are `None` where undefined: `C = 0`, `C* = 0` or `C = C*` for the
/// closed form, zero variance for the quadrature.
#[allow(clippy::type_complexity)]
pub fn mu_grid(
    runs: usize,
    oscillations: u32,
    divisions: usize,
    panels: usize,
) -> Result<Vec<(f64, f64, Option<f64>, Option<f64>)>, PipelineError> {
    let window = RunWindow::literal(runs);
    let nodes = window.grid(panels + 1);
    let values: Vec<f64> = (0..=divisions).map(|i| i as f64 / divisions as f64).collect();
    let curves: Vec<Option<Vec<f64>>> = values
        .iter()
        .map(|&c| {
            CosSqModel::new(runs, oscillations, c)
                .ok()
                .map(|m| nodes.iter().map(|&x| cos_sq_f(&m, x)).collect())
        })
        .collect();
    let mut rows = Vec::with_capacity(values.len() * values.len());
    for (i, &c) in values.iter().enumerate() {
        for (j, &cs) in values.iter().enumerate() {
            let mu = match (&curves[i], &curves[j]) {
                (Some(f), Some(g)) => match correlation_mu_sampled(f, g, &window) {
                    Ok(v) => Some(v),
                    Err(MetricsError::ZeroVariance(_)) => None,
                    Err(e) => return Err(numeric(e)),
                },
                _ => None,
            };
            let closed = if c > 0.0 && cs > 0.0 {
                mu_closed_form(c, cs, oscillations, runs).ok()
            } else {
                None
            };
            rows.push((c, cs, mu, closed));
        }
    }
    Ok(rows)
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn write_table(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_path(path).map_err(|source| IoError::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    let csv_err = |source| IoError::Csv {
        path: path.to_path_buf(),
        source,
    };
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs every stage in order.
pub fn run_all(config: &PipelineConfig) -> Result<Vec<PathBuf>, PipelineError> {
    let mut files = cmd_simulate(config)?;
    files.extend(cmd_stabilize(config, None)?);
    files.extend(cmd_learn(config, None, None)?);
    files.extend(cmd_classify(config, None)?);
    files.extend(cmd_metrics(config, None, None)?);
    Ok(files)
}
