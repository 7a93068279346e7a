//! State-vector simulation of a sequence of Pauli rotations `exp(−iθP)`
//! and generation of the per-run optimal parameter matrix.
//!
//! Basis index bit `j` is the state of qubit `j`, and letter `j` of a Pauli
//! string acts on qubit `j`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::params::GateParamMatrix;
use crate::rng::substream;

/// Largest supported register.
pub const MAX_QUBITS: usize = 16;

/// Central-difference step used by the gradient ascent.
pub const ASCENT_FD_STEP: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid Pauli letter {0:?} (expected I, X, Y or Z)")]
    InvalidPauli(char),
    #[error("invalid circuit: {0}")]
    Invalid(String),
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Result<Self, CircuitError> {
        if letters.is_empty() || letters.len() > MAX_QUBITS {
            return Err(CircuitError::Invalid(format!(
                "Pauli string length {} outside 1..={MAX_QUBITS}",
                letters.len()
            )));
        }
        Ok(Self { letters })
    }

    pub fn qubits(&self) -> usize {
        self.letters.len()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    /// `P|ψ⟩`.
    pub fn apply(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut flip = 0usize;
        for (q, p) in self.letters.iter().enumerate() {
            if matches!(p, Pauli::X | Pauli::Y) {
                flip |= 1 << q;
            }
        }
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for (k, &a) in amps.iter().enumerate() {
            let mut phase = Complex64::new(1.0, 0.0);
            for (q, p) in self.letters.iter().enumerate() {
                let bit = (k >> q) & 1;
                match (p, bit) {
                    (Pauli::Y, 0) => phase *= Complex64::i(),
                    (Pauli::Y, _) => phase *= -Complex64::i(),
                    (Pauli::Z, 1) => phase = -phase,
                    _ => {}
                }
            }
            out[k ^ flip] += phase * a;
        }
        out
    }
}

impl FromStr for PauliString {
    type Err = CircuitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let letters = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(CircuitError::InvalidPauli(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(letters)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.letters.iter().try_for_each(|p| write!(f, "{}", p.letter()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, CircuitError> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() || len > 1 << MAX_QUBITS {
            return Err(CircuitError::DimensionMismatch(format!(
                "{len} amplitudes is not 2^n for 1 <= n <= {MAX_QUBITS}"
            )));
        }
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > 1e-12 {
            return Err(CircuitError::NotNormalized(norm_sqr));
        }
        Ok(Self {
            n: len.trailing_zeros() as usize,
            amps,
        })
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n: usize, index: usize) -> Result<Self, CircuitError> {
        if n == 0 || n > MAX_QUBITS || index >= 1 << n {
            return Err(CircuitError::DimensionMismatch(format!(
                "basis index {index} for {n} qubits"
            )));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn zero(n: usize) -> Result<Self, CircuitError> {
        Self::basis(n, 0)
    }

    /// `|+⟩^{⊗n}`.
    pub fn plus(n: usize) -> Result<Self, CircuitError> {
        let mut s = Self::zero(n)?;
        let a = 1.0 / ((1usize << n) as f64).sqrt();
        s.amps.iter_mut().for_each(|x| *x = Complex64::new(a, 0.0));
        Ok(s)
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `⟨ψ|C|ψ⟩` for a diagonal `C`.
    pub fn expectation_diagonal(&self, diag: &[f64]) -> f64 {
        self.amps.iter().zip(diag).map(|(a, c)| a.norm_sqr() * c).sum()
    }
}

/// Ordered Pauli generators plus the diagonal objective operator `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliCircuit {
    n: usize,
    paulis: Vec<PauliString>,
    objective: Vec<f64>,
}

impl PauliCircuit {
    pub fn new(n: usize, paulis: Vec<PauliString>, objective: Vec<f64>) -> Result<Self, CircuitError> {
        if n == 0 || n > MAX_QUBITS {
            return Err(CircuitError::Invalid(format!("qubit count {n} outside 1..={MAX_QUBITS}")));
        }
        if paulis.is_empty() {
            return Err(CircuitError::Invalid("circuit needs at least one gate".into()));
        }
        if let Some(p) = paulis.iter().find(|p| p.qubits() != n) {
            return Err(CircuitError::DimensionMismatch(format!(
                "Pauli string {p} acts on {} qubits, circuit has {n}",
                p.qubits()
            )));
        }
        if objective.len() != 1 << n {
            return Err(CircuitError::DimensionMismatch(format!(
                "objective has {} entries, expected {}",
                objective.len(),
                1usize << n
            )));
        }
        if objective.iter().any(|c| !c.is_finite()) {
            return Err(CircuitError::Invalid("objective entries must be finite".into()));
        }
        Ok(Self { n, paulis, objective })
    }

    pub fn qubits(&self) -> usize {
        self.n
    }

    /// Gate count `L`.
    pub fn gates(&self) -> usize {
        self.paulis.len()
    }

    pub fn paulis(&self) -> &[PauliString] {
        &self.paulis
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn from_json_str(s: &str) -> Result<Self, CircuitError> {
        let file: CircuitFile =
            serde_json::from_str(s).map_err(|e| CircuitError::Invalid(e.to_string()))?;
        file.into_circuit()
    }

    pub fn to_file(&self) -> CircuitFile {
        CircuitFile {
            n: self.n,
            paulis: self.paulis.iter().map(ToString::to_string).collect(),
            objective: ObjectiveSpec::Values(self.objective.clone()),
        }
    }
}

/// Diagonal MaxCut objective: the number of edges cut by each basis state.
pub fn maxcut_objective(n: usize, edges: &[(usize, usize)]) -> Result<Vec<f64>, CircuitError> {
    if n == 0 || n > MAX_QUBITS {
        return Err(CircuitError::Invalid(format!("qubit count {n} outside 1..={MAX_QUBITS}")));
    }
    if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= n || b >= n || a == b) {
        return Err(CircuitError::Invalid(format!("bad edge ({a}, {b}) for {n} qubits")));
    }
    Ok((0..1usize << n)
        .map(|z| {
            edges
                .iter()
                .filter(|&&(a, b)| ((z >> a) & 1) != ((z >> b) & 1))
                .count() as f64
        })
        .collect())
}

/// On-disk circuit description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitFile {
    pub n: usize,
    pub paulis: Vec<String>,
    pub objective: ObjectiveSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ObjectiveSpec {
    Values(Vec<f64>),
    MaxCut { maxcut: Vec<(usize, usize)> },
}

impl CircuitFile {
    pub fn into_circuit(self) -> Result<PauliCircuit, CircuitError> {
        let paulis = self
            .paulis
            .iter()
            .map(|s| s.parse())
            .collect::<Result<Vec<PauliString>, _>>()?;
        let objective = match self.objective {
            ObjectiveSpec::Values(v) => v,
            ObjectiveSpec::MaxCut { maxcut } => maxcut_objective(self.n, &maxcut)?,
        };
        PauliCircuit::new(self.n, paulis, objective)
    }
}

/// `exp(−iθP)|ψ⟩ = cos θ |ψ⟩ − i sin θ P|ψ⟩`, exact because `P² = I`.
pub fn apply_unitary(state: &StateVector, p: &PauliString, theta: f64) -> Result<StateVector, CircuitError> {
    if state.n != p.qubits() {
        return Err(CircuitError::DimensionMismatch(format!(
            "state has {} qubits, Pauli string {}",
            state.n,
            p.qubits()
        )));
    }
    if !theta.is_finite() {
        return Err(CircuitError::Invalid(format!("non-finite angle {theta}")));
    }
    let (s, c) = theta.sin_cos();
    let minus_i_sin = Complex64::new(0.0, -s);
    let pa = p.apply(&state.amps);
    let amps = state
        .amps
        .iter()
        .zip(&pa)
        .map(|(&a, &b)| a * c + b * minus_i_sin)
        .collect();
    Ok(StateVector { n: state.n, amps })
}

/// Prepares `U_L(θ_L)…U_1(θ_1)|input⟩`.
pub fn prepare_state(circuit: &PauliCircuit, theta: &[f64], input: &StateVector) -> Result<StateVector, CircuitError> {
    if theta.len() != circuit.gates() {
        return Err(CircuitError::DimensionMismatch(format!(
            "{} parameters for {} gates",
            theta.len(),
            circuit.gates()
        )));
    }
    if input.n != circuit.n {
        return Err(CircuitError::DimensionMismatch(format!(
            "input has {} qubits, circuit {}",
            input.n, circuit.n
        )));
    }
    circuit
        .paulis
        .iter()
        .zip(theta)
        .try_fold(input.clone(), |st, (p, &t)| apply_unitary(&st, p, t))
}

/// `f(θ) = ⟨θ|C|θ⟩`.
pub fn evaluate_objective(circuit: &PauliCircuit, theta: &[f64], input: &StateVector) -> Result<f64, CircuitError> {
    let state = prepare_state(circuit, theta, input)?;
    Ok(state.expectation_diagonal(&circuit.objective))
}

/// Central finite-difference gradient of the objective.
pub fn objective_gradient(
    circuit: &PauliCircuit,
    theta: &[f64],
    input: &StateVector,
    step: f64,
) -> Result<Vec<f64>, CircuitError> {
    let mut probe = theta.to_vec();
    (0..theta.len())
        .map(|i| {
            probe[i] = theta[i] + step;
            let up = evaluate_objective(circuit, &probe, input)?;
            probe[i] = theta[i] - step;
            let down = evaluate_objective(circuit, &probe, input)?;
            probe[i] = theta[i];
            Ok((up - down) / (2.0 * step))
        })
        .collect()
}

/// Exact gradient by the parameter-shift rule for `exp(−iθP)` generators.
pub fn parameter_shift_gradient(
    circuit: &PauliCircuit,
    theta: &[f64],
    input: &StateVector,
) -> Result<Vec<f64>, CircuitError> {
    let mut probe = theta.to_vec();
    (0..theta.len())
        .map(|i| {
            probe[i] = theta[i] + PI / 4.0;
            let up = evaluate_objective(circuit, &probe, input)?;
            probe[i] = theta[i] - PI / 4.0;
            let down = evaluate_objective(circuit, &probe, input)?;
            probe[i] = theta[i];
            Ok(up - down)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Number of runs `R`.
    pub runs: usize,
    /// Std-dev of the per-run Gaussian parameter perturbation, radians.
    #[serde(default)]
    pub noise_scale: f64,
    #[serde(default = "RunConfig::default_ascent_steps")]
    pub ascent_steps: usize,
    #[serde(default = "RunConfig::default_learning_rate")]
    pub learning_rate: f64,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    fn default_ascent_steps() -> usize {
        100
    }

    fn default_learning_rate() -> f64 {
        0.1
    }

    pub fn new(runs: usize, seed: u64) -> Self {
        Self {
            runs,
            noise_scale: 0.0,
            ascent_steps: Self::default_ascent_steps(),
            learning_rate: Self::default_learning_rate(),
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        if self.runs < 2 {
            return Err(CircuitError::Invalid(format!("need at least 2 runs, got {}", self.runs)));
        }
        if !(self.noise_scale >= 0.0 && self.noise_scale.is_finite()) {
            return Err(CircuitError::Invalid(format!("noise_scale {} must be >= 0", self.noise_scale)));
        }
        if !self.learning_rate.is_finite() {
            return Err(CircuitError::Invalid("learning_rate must be finite".into()));
        }
        Ok(())
    }
}

/// Optimal parameters of `R` runs, one column per run.
///
/// All runs start from one shared seeded point in `[0, π]^L`, climb the
/// objective by finite-difference gradient ascent, then receive independent
/// Gaussian noise; every iterate is clamped to `[0, π]`.
pub fn generate_alpha(
    circuit: &PauliCircuit,
    input: &StateVector,
    config: &RunConfig,
) -> Result<GateParamMatrix, CircuitError> {
    config.validate()?;
    let l = circuit.gates();
    let mut init_rng = substream(config.seed, "circuit.init", 0);
    let start: Vec<f64> = (0..l).map(|_| init_rng.random_range(0.0..=PI)).collect();

    let mut theta = start;
    for _ in 0..config.ascent_steps {
        let grad = objective_gradient(circuit, &theta, input, ASCENT_FD_STEP)?;
        for (t, g) in theta.iter_mut().zip(&grad) {
            *t = (*t + config.learning_rate * g).clamp(0.0, PI);
        }
    }

    let runs: Vec<Vec<f64>> = (0..config.runs)
        .map(|r| {
            if config.noise_scale == 0.0 {
                return theta.clone();
            }
            let mut rng = substream(config.seed, "circuit.noise", r as u64);
            let normal = Normal::new(0.0, config.noise_scale).expect("validated scale");
            theta
                .iter()
                .map(|&t| (t + normal.sample(&mut rng)).clamp(0.0, PI))
                .collect()
        })
        .collect();
    Ok(GateParamMatrix::from_runs(&runs).expect("runs share length L"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single_x_circuit() -> PauliCircuit {
        PauliCircuit::new(1, vec!["X".parse().unwrap()], vec![1.0, -1.0]).unwrap()
    }

    #[test]
    fn zero_angle_is_identity() {
        let s = StateVector::plus(2).unwrap();
        let out = apply_unitary(&s, &"XY".parse().unwrap(), 0.0).unwrap();
        assert_eq!(out, s);
    }

    #[test]
    fn x_rotation_by_half_pi() {
        let s = StateVector::zero(1).unwrap();
        let out = apply_unitary(&s, &"X".parse().unwrap(), PI / 2.0).unwrap();
        assert!((out.amplitudes()[0] - c(0.0, 0.0)).norm() < 1e-15);
        assert!((out.amplitudes()[1] - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn pauli_y_phases() {
        let y: PauliString = "Y".parse().unwrap();
        let out = y.apply(&[c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(out, vec![c(0.0, 0.0), c(0.0, 1.0)]);
        let out = y.apply(&[c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(out, vec![c(0.0, -1.0), c(0.0, 0.0)]);
    }

    #[test]
    fn pauli_string_squares_to_identity() {
        let s = StateVector::from_amplitudes(vec![c(0.5, 0.0), c(0.0, 0.5), c(-0.5, 0.0), c(0.0, -0.5)]).unwrap();
        for p in ["XY", "ZZ", "YI", "IX", "YZ"] {
            let p: PauliString = p.parse().unwrap();
            let twice = p.apply(&p.apply(s.amplitudes()));
            for (a, b) in twice.iter().zip(s.amplitudes()) {
                assert!((a - b).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn forward_then_backward_restores_state() {
        let s = StateVector::plus(3).unwrap();
        let p: PauliString = "XYZ".parse().unwrap();
        let fwd = apply_unitary(&s, &p, 0.7).unwrap();
        let back = apply_unitary(&fwd, &p, -0.7).unwrap();
        for (a, b) in back.amplitudes().iter().zip(s.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let s = StateVector::zero(2).unwrap();
        assert!(matches!(
            apply_unitary(&s, &"X".parse().unwrap(), 0.1),
            Err(CircuitError::DimensionMismatch(_))
        ));
        let circ = single_x_circuit();
        assert!(evaluate_objective(&circ, &[0.1, 0.2], &StateVector::zero(1).unwrap()).is_err());
        assert!(evaluate_objective(&circ, &[0.1], &s).is_err());
    }

    #[test]
    fn objective_single_qubit_cos_two_theta() {
        // U = cos θ·I − i sin θ·X on |0⟩ gives ⟨Z⟩ = cos²θ − sin²θ
        let circ = single_x_circuit();
        let zero = StateVector::zero(1).unwrap();
        for &t in &[0.0, 0.3, 1.1, PI / 2.0, 2.9] {
            let f = evaluate_objective(&circ, &[t], &zero).unwrap();
            assert!((f - (2.0 * t).cos()).abs() < 1e-14);
        }
    }

    #[test]
    fn objective_all_ones_is_one() {
        let circ = PauliCircuit::new(
            2,
            vec!["XY".parse().unwrap(), "ZX".parse().unwrap()],
            vec![1.0; 4],
        )
        .unwrap();
        let f = evaluate_objective(&circ, &[0.4, 2.2], &StateVector::plus(2).unwrap()).unwrap();
        assert!((f - 1.0).abs() < 1e-14);
    }

    #[test]
    fn objective_zero_angles_is_raw_expectation() {
        let obj = vec![0.5, -1.0, 2.0, 3.0];
        let circ = PauliCircuit::new(2, vec!["XX".parse().unwrap()], obj.clone()).unwrap();
        let plus = StateVector::plus(2).unwrap();
        let f = evaluate_objective(&circ, &[0.0], &plus).unwrap();
        assert!((f - obj.iter().sum::<f64>() / 4.0).abs() < 1e-15);
    }

    #[test]
    fn maxcut_values() {
        // triangle: every non-trivial bipartition cuts two edges
        let v = maxcut_objective(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(v, vec![0.0, 2.0, 2.0, 2.0, 2.0, 2.0, 2.0, 0.0]);
        assert!(maxcut_objective(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn circuit_json_forms() {
        let a = PauliCircuit::from_json_str(r#"{"n": 2, "paulis": ["XZ", "yi"], "objective": [0, 1, 1, 0]}"#).unwrap();
        let b = PauliCircuit::from_json_str(r#"{"n": 2, "paulis": ["XZ", "YI"], "objective": {"maxcut": [[0, 1]]}}"#).unwrap();
        assert_eq!(a, b);
        assert!(PauliCircuit::from_json_str(r#"{"n": 2, "paulis": ["XQ"], "objective": [0,0,0,0]}"#).is_err());
        assert!(PauliCircuit::from_json_str(r#"{"n": 2, "paulis": ["X"], "objective": [0,0,0,0]}"#).is_err());
    }

    #[test]
    fn alpha_without_ascent_or_noise_repeats_initial_point() {
        let circ = PauliCircuit::new(2, vec!["XI".parse().unwrap(), "IY".parse().unwrap(), "ZZ".parse().unwrap()], vec![0.0, 1.0, 1.0, 0.0]).unwrap();
        let cfg = RunConfig {
            ascent_steps: 0,
            ..RunConfig::new(5, 42)
        };
        let alpha = generate_alpha(&circ, &StateVector::zero(2).unwrap(), &cfg).unwrap();
        assert_eq!((alpha.gates(), alpha.runs()), (3, 5));
        let first = alpha.run(0);
        assert!(first.iter().all(|v| (0.0..=PI).contains(v)));
        for r in 1..5 {
            assert_eq!(alpha.run(r), first);
        }
    }

    #[test]
    fn alpha_is_deterministic() {
        let circ = single_x_circuit();
        let input = StateVector::zero(1).unwrap();
        let cfg = RunConfig {
            noise_scale: 0.2,
            ..RunConfig::new(4, 9)
        };
        let a = generate_alpha(&circ, &input, &cfg).unwrap();
        let b = generate_alpha(&circ, &input, &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.within_range());
    }

    #[test]
    fn ascent_reaches_boundary_maximizers() {
        // f = cos 2θ on [0, π] peaks at 0 and π
        let circ = single_x_circuit();
        let input = StateVector::zero(1).unwrap();
        for seed in 0..10 {
            let cfg = RunConfig {
                ascent_steps: 200,
                ..RunConfig::new(3, seed)
            };
            let alpha = generate_alpha(&circ, &input, &cfg).unwrap();
            for &v in alpha.entries() {
                assert!(!(0.05..=PI - 0.05).contains(&v), "seed {seed}: {v}");
            }
        }
    }

    #[test]
    fn run_config_validation() {
        assert!(RunConfig::new(1, 0).validate().is_err());
        let bad = RunConfig {
            noise_scale: -1.0,
            ..RunConfig::new(3, 0)
        };
        assert!(bad.validate().is_err());
    }
}
