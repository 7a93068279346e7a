//! Stabilizer matrix from the weighted difference graph of consecutive runs.
//!
//! With `Δα` the L×(R−1) matrix of consecutive run differences and a
//! windowed Gaussian weight graph `W` over its columns, the stabilizer `S`
//! minimizes
//!
//! ```text
//! Tr(Sᵀ Δα σ Δαᵀ S) / Tr(Sᵀ Δα η Δαᵀ S),   σ = I + c(η − W),  η = diag(row sums of W)
//! ```
//!
//! which is the symmetric-definite pencil `A s = λ B s` with
//! `A = Δα σ Δαᵀ` and `B = Δα η Δαᵀ`. `B` is rank-deficient whenever
//! `L > R − 1`, so the solve uses `B + εI` with
//! `ε = 1e-10·trace(B)/L`. The stabilized parameters are `β = Sᵀα`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::{evaluate_objective, CircuitError, PauliCircuit, StateVector};
use crate::numerics::{
    gen_sym_eig_gram, norm2, pair_residual, regularization_shift, sym_eig, Matrix, NumericsError,
};
use crate::params::GateParamMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilizerError {
    #[error("need at least {needed} runs, got {found}")]
    TooFewRuns { needed: usize, found: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// `Δα`: column `r` is `θ*_r − θ*_{r+1}`.
pub fn build_differences(alpha: &GateParamMatrix) -> Result<Matrix, StabilizerError> {
    let runs = alpha.runs();
    if runs < 2 {
        return Err(StabilizerError::TooFewRuns { needed: 2, found: runs });
    }
    let m = alpha.matrix();
    let mut d = Matrix::zeros(alpha.gates(), runs - 1);
    for l in 0..alpha.gates() {
        for r in 0..runs - 1 {
            d[(l, r)] = m[(l, r)] - m[(l, r + 1)];
        }
    }
    Ok(d)
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Mean of the nonzero pairwise squared distances between difference
/// vectors, or `1.0` when every pair coincides.
pub fn auto_zeta(delta_alpha: &Matrix) -> f64 {
    let cols = delta_alpha.columns();
    let mut sum = 0.0;
    let mut count = 0usize;
    for r in 0..cols.len() {
        for s in (r + 1)..cols.len() {
            let d = squared_distance(&cols[r], &cols[s]);
            if d > 0.0 {
                sum += d;
                count += 1;
            }
        }
    }
    if count == 0 {
        1.0
    } else {
        sum / count as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightGraph {
    /// Symmetric windowed Gaussian weights `ω_rs`.
    pub w: Matrix,
    /// Diagonal degree matrix.
    pub eta: Matrix,
    /// `I + c(η − W)`.
    pub sigma: Matrix,
    pub kappa: usize,
    pub zeta: f64,
    pub c: f64,
}

impl WeightGraph {
    /// `η − W`.
    pub fn laplacian(&self) -> Matrix {
        self.eta.sub(&self.w)
    }
}

/// `ω_rs = exp(−‖Δ_r − Δ_s‖²/ζ)` for `|r − s| ≤ κ`, zero outside the window.
pub fn build_weights(delta_alpha: &Matrix, kappa: usize, zeta: f64, c: f64) -> Result<WeightGraph, StabilizerError> {
    if kappa < 1 {
        return Err(StabilizerError::InvalidParameter("kappa must be >= 1".into()));
    }
    if !(zeta > 0.0 && zeta.is_finite()) {
        return Err(StabilizerError::InvalidParameter(format!("zeta must be positive, got {zeta}")));
    }
    if !(c >= 0.0 && c.is_finite()) {
        return Err(StabilizerError::InvalidParameter(format!("c must be >= 0, got {c}")));
    }
    let cols = delta_alpha.columns();
    let n = cols.len();
    let mut w = Matrix::zeros(n, n);
    for r in 0..n {
        for s in r..n {
            if s - r <= kappa {
                let v = (-squared_distance(&cols[r], &cols[s]) / zeta).exp();
                w[(r, s)] = v;
                w[(s, r)] = v;
            }
        }
    }
    let degrees: Vec<f64> = (0..n).map(|r| w.row(r).iter().sum()).collect();
    let eta = Matrix::from_diag(&degrees);
    let sigma = Matrix::identity(n).add(&eta.sub(&w).scale(c));
    Ok(WeightGraph {
        w,
        eta,
        sigma,
        kappa,
        zeta,
        c,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Zeta {
    /// Self-tuning scale, see [`auto_zeta`].
    Auto,
    Value(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StabilizerParams {
    pub kappa: usize,
    pub zeta: Zeta,
    pub c: f64,
    /// Retained eigenvector count; `None` keeps all `L`.
    pub m: Option<usize>,
    /// Replace the B-orthonormal eigenvectors by their orthonormal polar factor.
    pub orthogonalize: bool,
}

impl Default for StabilizerParams {
    fn default() -> Self {
        Self {
            kappa: 2,
            zeta: Zeta::Auto,
            c: 1.0,
            m: None,
            orthogonalize: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilizerSolution {
    /// L×m stabilizer.
    pub s: Matrix,
    /// All `L` generalized eigenvalues, ascending; the first `m` were kept.
    pub eigenvalues: Vec<f64>,
    /// `Sᵀα`, m×R, unclamped.
    pub beta: GateParamMatrix,
    /// `beta` clamped into `[0, π]`.
    pub beta_clamped: GateParamMatrix,
    /// `Tr(SᵀAS) / Tr(SᵀBS)` with the regularized `B`.
    pub f_star: f64,
    /// `Σ_r ‖Δφ_r‖²`.
    pub chi: f64,
    /// `Σ_{r,s} ω_rs ‖Δφ_r − Δφ_s‖²` over all ordered pairs.
    pub tau: f64,
    /// `Tr(Sᵀ Δα η Δαᵀ S)`, unregularized.
    pub omega: f64,
    pub orthogonalized: bool,
    /// `m < L`: `beta` has fewer rows than `α`.
    pub reduced: bool,
    /// `Δα = 0`; `S` is then taken from the eigenvectors of `B` and `F* = 0`.
    pub degenerate_input: bool,
    pub epsilon: f64,
    pub kappa: usize,
    pub zeta: f64,
    pub c: f64,
    /// Largest `‖As − λBs‖₂` over all eigenpairs of the solved pencil.
    pub max_residual: f64,
    /// `‖A‖_F + ‖B‖_F` of the solved pencil, the residual scale.
    pub pencil_norm: f64,
}

/// Everything `solve_stabilizer` builds before choosing `S`.
#[derive(Debug, Clone)]
pub struct Pencil {
    pub delta_alpha: Matrix,
    pub graph: WeightGraph,
    /// `Δα σ Δαᵀ`.
    pub a: Matrix,
    /// `M` with `M Mᵀ = a`: the columns of `Δα` followed by
    /// `√(c ω_rs)(Δα_r − Δα_s)` for every pair `r < s`.
    pub a_factor: Matrix,
    /// `Δα η Δαᵀ`.
    pub b_raw: Matrix,
    /// `b_raw + εI`.
    pub b: Matrix,
    pub epsilon: f64,
}

pub fn build_pencil(alpha: &GateParamMatrix, params: &StabilizerParams) -> Result<Pencil, StabilizerError> {
    let delta_alpha = build_differences(alpha)?;
    let zeta = match params.zeta {
        Zeta::Auto => auto_zeta(&delta_alpha),
        Zeta::Value(z) => z,
    };
    let graph = build_weights(&delta_alpha, params.kappa, zeta, params.c)?;
    let dt = delta_alpha.transpose();
    let a = delta_alpha.mul(&graph.sigma).mul(&dt).symmetrize();
    let b_raw = delta_alpha.mul(&graph.eta).mul(&dt).symmetrize();
    let epsilon = regularization_shift(&b_raw);
    let b = b_raw.add(&Matrix::identity(b_raw.rows()).scale(epsilon));
    let a_factor = sigma_factor(&delta_alpha, &graph);
    Ok(Pencil {
        delta_alpha,
        graph,
        a,
        a_factor,
        b_raw,
        b,
        epsilon,
    })
}

/// `Δα σ Δαᵀ = Δα Δαᵀ + c Σ_{r<s} ω_rs (Δα_r − Δα_s)(Δα_r − Δα_s)ᵀ`.
fn sigma_factor(delta_alpha: &Matrix, graph: &WeightGraph) -> Matrix {
    let cols = delta_alpha.columns();
    let mut factor = cols.clone();
    for r in 0..cols.len() {
        for s in (r + 1)..cols.len() {
            let w = graph.c * graph.w[(r, s)];
            if w > 0.0 {
                let scale = w.sqrt();
                factor.push(cols[r].iter().zip(&cols[s]).map(|(x, y)| scale * (x - y)).collect());
            }
        }
    }
    Matrix::from_columns(&factor).expect("columns share length L")
}

/// Orthonormal polar factor `S (SᵀS)^{-1/2}` of a full-column-rank `S`.
pub fn polar_factor(s: &Matrix) -> Result<Matrix, StabilizerError> {
    let gram = s.transpose().mul(s).symmetrize();
    let eig = sym_eig(&gram)?;
    if eig.eigenvalues[0] <= 0.0 {
        return Err(StabilizerError::InvalidParameter("stabilizer columns are linearly dependent".into()));
    }
    let inv_sqrt: Vec<f64> = eig.eigenvalues.iter().map(|l| 1.0 / l.sqrt()).collect();
    let v = &eig.eigenvectors;
    let inv_root = v.mul(&Matrix::from_diag(&inv_sqrt)).mul(&v.transpose());
    let mut x = s.mul(&inv_root);
    // Newton–Schulz polishing; keeps the same polar factor and converges quadratically
    let m = x.cols();
    for _ in 0..8 {
        let xtx = x.transpose().mul(&x);
        if xtx.max_abs_diff(&Matrix::identity(m)) < 1e-15 {
            break;
        }
        let correction = Matrix::identity(m).scale(1.5).sub(&xtx.scale(0.5));
        x = x.mul(&correction);
    }
    Ok(x)
}

fn trace_quadratic(s: &Matrix, a: &Matrix) -> f64 {
    s.transpose().mul(a).mul(s).trace()
}

/// `Σ_{r,s} ω_rs ‖Δφ_r − Δφ_s‖²` over all ordered pairs.
pub fn pairwise_tau(graph: &WeightGraph, delta_beta: &Matrix) -> f64 {
    let cols = delta_beta.columns();
    let n = cols.len();
    let mut tau = 0.0;
    for r in 0..n {
        for s in 0..n {
            let w = graph.w[(r, s)];
            if w != 0.0 {
                tau += w * squared_distance(&cols[r], &cols[s]);
            }
        }
    }
    tau
}

/// Solves for the stabilizer and derives `β = Sᵀα` plus diagnostics.
pub fn solve_stabilizer(alpha: &GateParamMatrix, params: &StabilizerParams) -> Result<StabilizerSolution, StabilizerError> {
    let l = alpha.gates();
    if alpha.runs() < 3 {
        return Err(StabilizerError::TooFewRuns {
            needed: 3,
            found: alpha.runs(),
        });
    }
    let m = params.m.unwrap_or(l);
    if m < 1 || m > l {
        return Err(StabilizerError::InvalidParameter(format!("m = {m} outside 1..={l}")));
    }
    let pencil = build_pencil(alpha, params)?;
    let degenerate_input = pencil.b_raw.trace() == 0.0;

    let (eigenvalues, vectors, max_residual) = if degenerate_input {
        let eig = sym_eig(&pencil.b_raw)?;
        (vec![0.0; l], eig.eigenvectors, 0.0)
    } else {
        let eig = gen_sym_eig_gram(&pencil.a_factor, &pencil.b)?;
        let max_residual = (0..eig.len())
            .map(|j| pair_residual(&pencil.a, &pencil.b, eig.eigenvalues[j], &eig.vector(j)))
            .fold(0.0, f64::max);
        (eig.eigenvalues, eig.eigenvectors, max_residual)
    };

    let raw_s = vectors.leading_columns(m);
    let s = if params.orthogonalize {
        polar_factor(&raw_s)?
    } else {
        raw_s
    };

    let beta = GateParamMatrix::new(s.transpose().mul(alpha.matrix()));
    let delta_beta = s.transpose().mul(&pencil.delta_alpha);
    let gram = pencil.delta_alpha.mul(&pencil.delta_alpha.transpose());
    let chi = trace_quadratic(&s, &gram);
    let tau = pairwise_tau(&pencil.graph, &delta_beta);
    let omega = trace_quadratic(&s, &pencil.b_raw);
    let denom = trace_quadratic(&s, &pencil.b);
    let f_star = if degenerate_input || denom == 0.0 {
        0.0
    } else {
        trace_quadratic(&s, &pencil.a) / denom
    };

    Ok(StabilizerSolution {
        beta_clamped: beta.clamped_to_range(),
        beta,
        s,
        eigenvalues,
        f_star,
        chi,
        tau,
        omega,
        orthogonalized: params.orthogonalize,
        reduced: m < l,
        degenerate_input,
        epsilon: pencil.epsilon,
        kappa: pencil.graph.kappa,
        zeta: pencil.graph.zeta,
        c: pencil.graph.c,
        max_residual,
        pencil_norm: pencil.a.frobenius_norm() + pencil.b.frobenius_norm(),
    })
}

/// `|f(φ_r) − f(θ*_r)|` per run.
pub fn stabilized_objective_gap(
    circuit: &PauliCircuit,
    input: &StateVector,
    beta: &GateParamMatrix,
    alpha: &GateParamMatrix,
) -> Result<Vec<f64>, StabilizerError> {
    if beta.gates() != circuit.gates() || alpha.gates() != circuit.gates() || beta.runs() != alpha.runs() {
        return Err(StabilizerError::DimensionMismatch(format!(
            "beta {}x{}, alpha {}x{}, circuit has {} gates",
            beta.gates(),
            beta.runs(),
            alpha.gates(),
            alpha.runs(),
            circuit.gates()
        )));
    }
    (0..alpha.runs())
        .map(|r| {
            let fb = evaluate_objective(circuit, &beta.run(r), input)?;
            let fa = evaluate_objective(circuit, &alpha.run(r), input)?;
            Ok((fb - fa).abs())
        })
        .collect()
}

/// `Σ_r ‖Δφ_r‖²` computed column by column.
pub fn chi_direct(delta_beta: &Matrix) -> f64 {
    delta_beta.columns().iter().map(|c| norm2(c).powi(2)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn alpha_from_runs(runs: &[&[f64]]) -> GateParamMatrix {
        GateParamMatrix::from_runs(&runs.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn random_alpha(rng: &mut ChaCha8Rng, l: usize, r: usize) -> GateParamMatrix {
        let runs: Vec<Vec<f64>> = (0..r)
            .map(|_| (0..l).map(|_| rng.random_range(0.0..std::f64::consts::PI)).collect())
            .collect();
        GateParamMatrix::from_runs(&runs).unwrap()
    }

    #[test]
    fn differences_of_constant_runs_vanish() {
        let a = alpha_from_runs(&[&[0.3, 1.0], &[0.3, 1.0], &[0.3, 1.0]]);
        let d = build_differences(&a).unwrap();
        assert_eq!(d.shape(), (2, 2));
        assert!(d.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn differences_definition() {
        let a = alpha_from_runs(&[&[1.0, 2.0], &[0.5, 3.0], &[2.0, 0.0]]);
        let d = build_differences(&a).unwrap();
        assert_eq!(d.column(0), vec![0.5, -1.0]);
        assert_eq!(d.column(1), vec![-1.5, 3.0]);
    }

    #[test]
    fn differences_telescope() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_alpha(&mut rng, 4, 7);
        let d = build_differences(&a).unwrap();
        for l in 0..4 {
            let total: f64 = d.row(l).iter().sum();
            assert!((total - (a.get(l, 0) - a.get(l, 6))).abs() < 1e-12);
        }
    }

    #[test]
    fn differences_need_two_runs() {
        let a = alpha_from_runs(&[&[1.0]]);
        assert!(matches!(build_differences(&a), Err(StabilizerError::TooFewRuns { .. })));
    }

    #[test]
    fn weights_window_and_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = random_alpha(&mut rng, 3, 8);
        let d = build_differences(&a).unwrap();
        let g = build_weights(&d, 2, 0.7, 0.5).unwrap();
        let n = d.cols();
        for r in 0..n {
            assert_eq!(g.w[(r, r)], 1.0);
            let row_sum: f64 = g.w.row(r).iter().sum();
            assert!((g.eta[(r, r)] - row_sum).abs() < 1e-12);
            for s in 0..n {
                let w = g.w[(r, s)];
                assert!((0.0..=1.0).contains(&w));
                assert_eq!(w, g.w[(s, r)]);
                if r.abs_diff(s) > 2 {
                    assert_eq!(w, 0.0);
                } else {
                    let expected = (-squared_distance(&d.column(r), &d.column(s)) / 0.7).exp();
                    assert!((w - expected).abs() < 1e-15);
                }
            }
        }
        let expected_sigma = Matrix::identity(n).add(&g.eta.sub(&g.w).scale(0.5));
        assert!(g.sigma.max_abs_diff(&expected_sigma) < 1e-12);
    }

    #[test]
    fn weights_without_regularization_give_identity_sigma() {
        let d = Matrix::from_rows(&[vec![1.0, -2.0, 0.5]]).unwrap();
        let g = build_weights(&d, 1, 1.0, 0.0).unwrap();
        assert_eq!(g.sigma, Matrix::identity(3));
    }

    #[test]
    fn weights_reject_bad_parameters() {
        let d = Matrix::identity(2);
        assert!(build_weights(&d, 0, 1.0, 1.0).is_err());
        assert!(build_weights(&d, 1, 0.0, 1.0).is_err());
        assert!(build_weights(&d, 1, 1.0, -1.0).is_err());
    }

    #[test]
    fn identical_runs_are_degenerate() {
        let a = alpha_from_runs(&[&[0.4, 1.2], &[0.4, 1.2], &[0.4, 1.2], &[0.4, 1.2]]);
        let sol = solve_stabilizer(&a, &StabilizerParams::default()).unwrap();
        assert!(sol.degenerate_input);
        assert_eq!(sol.f_star, 0.0);
        assert_eq!(sol.s, Matrix::identity(2));
        assert_eq!(sol.beta, a);
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn two_gate_case_matches_characteristic_polynomial() {
        let a = alpha_from_runs(&[&[0.3, 1.4], &[0.9, 1.1], &[0.5, 2.0], &[1.3, 1.6]]);
        let params = StabilizerParams {
            zeta: Zeta::Value(0.8),
            orthogonalize: false,
            ..StabilizerParams::default()
        };
        let sol = solve_stabilizer(&a, &params).unwrap();

        // independent assembly of A and B from the definitions
        let d: [[f64; 3]; 2] = [[-0.6, 0.4, -0.8], [0.3, -0.9, 0.4]];
        let col = |r: usize| [d[0][r], d[1][r]];
        let dist = |r: usize, s: usize| (col(r)[0] - col(s)[0]).powi(2) + (col(r)[1] - col(s)[1]).powi(2);
        let mut w = [[0.0; 3]; 3];
        for r in 0..3 {
            for s in 0..3 {
                w[r][s] = (-dist(r, s) / 0.8).exp();
            }
        }
        let eta: Vec<f64> = (0..3).map(|r| w[r].iter().sum()).collect();
        let mut sigma = [[0.0; 3]; 3];
        for r in 0..3 {
            for s in 0..3 {
                let lap = if r == s { eta[r] - w[r][s] } else { -w[r][s] };
                sigma[r][s] = if r == s { 1.0 } else { 0.0 } + lap;
            }
        }
        let mut am = [[0.0; 2]; 2];
        let mut bm = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                for r in 0..3 {
                    bm[i][j] += d[i][r] * eta[r] * d[j][r];
                    for s in 0..3 {
                        am[i][j] += d[i][r] * sigma[r][s] * d[j][s];
                    }
                }
            }
        }
        let eps = 1e-10 * (bm[0][0] + bm[1][1]) / 2.0;
        bm[0][0] += eps;
        bm[1][1] += eps;
        // det(A − λB) = pλ² + qλ + r
        let p = bm[0][0] * bm[1][1] - bm[0][1] * bm[0][1];
        let q = -(am[0][0] * bm[1][1] + am[1][1] * bm[0][0]) + 2.0 * am[0][1] * bm[0][1];
        let r = am[0][0] * am[1][1] - am[0][1] * am[0][1];
        let disc = (q * q - 4.0 * p * r).sqrt();
        let roots = [(-q - disc) / (2.0 * p), (-q + disc) / (2.0 * p)];
        for (got, want) in sol.eigenvalues.iter().zip(roots) {
            assert!((got - want).abs() < 1e-10 * want.abs().max(1.0), "{got} vs {want}");
        }
        // with m = L the ratio is the mean eigenvalue
        let mean = (roots[0] + roots[1]) / 2.0;
        assert!((sol.f_star - mean).abs() < 1e-10);
    }

    #[test]
    fn orthogonalized_solution_is_orthonormal() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (l, r) in [(3, 10), (6, 4), (8, 12), (5, 3)] {
            let a = random_alpha(&mut rng, l, r);
            let sol = solve_stabilizer(&a, &StabilizerParams::default()).unwrap();
            let sts = sol.s.transpose().mul(&sol.s);
            assert!(sts.max_abs_diff(&Matrix::identity(l)) < 1e-10, "L={l} R={r}");
            assert!(sol.max_residual <= 1e-8 * sol.pencil_norm);
            assert!(sol.beta_clamped.within_range());
        }
    }

    #[test]
    fn reduced_dimension() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = random_alpha(&mut rng, 5, 9);
        let params = StabilizerParams {
            m: Some(2),
            ..StabilizerParams::default()
        };
        let sol = solve_stabilizer(&a, &params).unwrap();
        assert!(sol.reduced);
        assert_eq!(sol.s.shape(), (5, 2));
        assert_eq!((sol.beta.gates(), sol.beta.runs()), (2, 9));
        assert!(solve_stabilizer(&a, &StabilizerParams { m: Some(6), ..params.clone() }).is_err());
        assert!(solve_stabilizer(&a, &StabilizerParams { m: Some(0), ..params }).is_err());
    }

    #[test]
    fn solve_needs_three_runs() {
        let a = alpha_from_runs(&[&[0.1], &[0.2]]);
        assert!(matches!(
            solve_stabilizer(&a, &StabilizerParams::default()),
            Err(StabilizerError::TooFewRuns { needed: 3, found: 2 })
        ));
    }

    #[test]
    fn chi_trace_matches_column_norms() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_alpha(&mut rng, 4, 9);
        for orthogonalize in [true, false] {
            let params = StabilizerParams {
                orthogonalize,
                ..StabilizerParams::default()
            };
            let sol = solve_stabilizer(&a, &params).unwrap();
            let db = build_differences(&sol.beta).unwrap();
            let direct = chi_direct(&db);
            assert!((sol.chi - direct).abs() <= 1e-10 * direct.max(1.0), "{} vs {direct}", sol.chi);
        }
    }

    #[test]
    fn objective_gap_is_zero_for_identity_stabilizer() {
        let circ = PauliCircuit::new(1, vec!["X".parse().unwrap()], vec![1.0, -1.0]).unwrap();
        let a = alpha_from_runs(&[&[0.2], &[0.4], &[1.0]]);
        let gaps = stabilized_objective_gap(&circ, &StateVector::zero(1).unwrap(), &a, &a).unwrap();
        assert_eq!(gaps, vec![0.0; 3]);
    }

    #[test]
    fn objective_gap_vanishes_on_flat_objective() {
        let circ = PauliCircuit::new(
            2,
            vec!["XI".parse().unwrap(), "ZY".parse().unwrap(), "YY".parse().unwrap()],
            vec![1.0; 4],
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = random_alpha(&mut rng, 3, 6);
        let sol = solve_stabilizer(&a, &StabilizerParams::default()).unwrap();
        let gaps = stabilized_objective_gap(&circ, &StateVector::plus(2).unwrap(), &sol.beta, &a).unwrap();
        assert!(gaps.iter().all(|g| *g <= 1e-6));
    }

    #[test]
    fn objective_gap_shape_checks() {
        let circ = PauliCircuit::new(1, vec!["X".parse().unwrap()], vec![1.0, -1.0]).unwrap();
        let a = alpha_from_runs(&[&[0.2, 0.1], &[0.4, 0.1], &[1.0, 0.1]]);
        assert!(stabilized_objective_gap(&circ, &StateVector::zero(1).unwrap(), &a, &a).is_err());
    }
}
