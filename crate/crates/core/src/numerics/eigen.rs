//! Symmetric and symmetric-definite eigensolvers.
//!
//! The standard problem is solved with cyclic Jacobi rotations. The pencil
//! `A s = λ B s` is reduced to standard form through the Cholesky factor of
//! `B`, solved, and mapped back by triangular back-substitution, which makes
//! the returned columns B-orthonormal.

use serde::{Deserialize, Serialize};

use super::{Matrix, NumericsError};

/// Sweep budget for the cyclic Jacobi iteration.
pub const JACOBI_SWEEPS: usize = 100;

/// Symmetry tolerance, relative to the largest entry.
pub const SYMMETRY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenEigResult {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `j` pairs with `eigenvalues[j]`.
    pub eigenvectors: Matrix,
    /// Columns satisfy `vᵀ B v = 1` for the pencil's `B`.
    pub b_normalized: bool,
}

impl GenEigResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn vector(&self, j: usize) -> Vec<f64> {
        self.eigenvectors.column(j)
    }
}

fn require_symmetric(a: &Matrix) -> Result<(), NumericsError> {
    if !a.is_square() {
        return Err(NumericsError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.is_symmetric(SYMMETRY_TOL) {
        return Err(NumericsError::NotSymmetric);
    }
    Ok(())
}

/// Lower-triangular `G` with `G Gᵀ = B`.
pub fn cholesky(b: &Matrix) -> Result<Matrix, NumericsError> {
    require_symmetric(b)?;
    let n = b.rows();
    let mut g = Matrix::zeros(n, n);
    for j in 0..n {
        let mut diag = b[(j, j)];
        for k in 0..j {
            diag -= g[(j, k)] * g[(j, k)];
        }
        if diag <= 0.0 || !diag.is_finite() {
            return Err(NumericsError::NotPositiveDefinite { pivot: j, value: diag });
        }
        let gjj = diag.sqrt();
        g[(j, j)] = gjj;
        for i in (j + 1)..n {
            let mut s = b[(i, j)];
            for k in 0..j {
                s -= g[(i, k)] * g[(j, k)];
            }
            g[(i, j)] = s / gjj;
        }
    }
    Ok(g)
}

/// Solves `G X = M` for lower-triangular `G`.
fn forward_substitute(g: &Matrix, m: &Matrix) -> Matrix {
    let n = g.rows();
    let mut x = m.clone();
    for c in 0..m.cols() {
        for i in 0..n {
            let mut s = x[(i, c)];
            for k in 0..i {
                s -= g[(i, k)] * x[(k, c)];
            }
            x[(i, c)] = s / g[(i, i)];
        }
    }
    x
}

/// Solves `Gᵀ X = M` for lower-triangular `G`.
fn back_substitute_transposed(g: &Matrix, m: &Matrix) -> Matrix {
    let n = g.rows();
    let mut x = m.clone();
    for c in 0..m.cols() {
        for i in (0..n).rev() {
            let mut s = x[(i, c)];
            for k in (i + 1)..n {
                s -= g[(k, i)] * x[(k, c)];
            }
            x[(i, c)] = s / g[(i, i)];
        }
    }
    x
}

fn off_diagonal_norm(a: &Matrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Flips each column so that its first largest-magnitude component is positive.
fn canonical_signs(v: &mut Matrix) {
    for j in 0..v.cols() {
        let col = v.column(j);
        let peak = col.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let lead = col.iter().find(|x| x.abs() >= peak * (1.0 - 1e-12)).copied();
        if matches!(lead, Some(x) if x < 0.0) {
            let flipped: Vec<f64> = col.iter().map(|x| -x).collect();
            v.set_column(j, &flipped);
        }
    }
}

fn sort_ascending(values: Vec<f64>, vectors: &Matrix) -> (Vec<f64>, Matrix) {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let mut sorted_vectors = Matrix::zeros(vectors.rows(), vectors.cols());
    for (dst, &src) in order.iter().enumerate() {
        sorted_vectors.set_column(dst, &vectors.column(src));
    }
    (sorted_values, sorted_vectors)
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
pub fn sym_eig(a: &Matrix) -> Result<GenEigResult, NumericsError> {
    require_symmetric(a)?;
    let n = a.rows();
    let mut m = a.symmetrize();
    let mut v = Matrix::identity(n);
    let scale = a.frobenius_norm();

    if n > 1 && scale > 0.0 {
        let target = f64::EPSILON * scale;
        let mut converged = false;
        for _ in 0..JACOBI_SWEEPS {
            if off_diagonal_norm(&m) <= target {
                converged = true;
                break;
            }
            for p in 0..n - 1 {
                for q in (p + 1)..n {
                    let apq = m[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let app = m[(p, p)];
                    let aqq = m[(q, q)];
                    // tan of the rotation angle, smaller root for stability
                    let theta = (aqq - app) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;

                    for k in 0..n {
                        let mkp = m[(k, p)];
                        let mkq = m[(k, q)];
                        m[(k, p)] = c * mkp - s * mkq;
                        m[(k, q)] = s * mkp + c * mkq;
                    }
                    for k in 0..n {
                        let mpk = m[(p, k)];
                        let mqk = m[(q, k)];
                        m[(p, k)] = c * mpk - s * mqk;
                        m[(q, k)] = s * mpk + c * mqk;
                    }
                    m[(p, q)] = 0.0;
                    m[(q, p)] = 0.0;
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
        if !converged && off_diagonal_norm(&m) > target {
            return Err(NumericsError::NoConvergence { sweeps: JACOBI_SWEEPS });
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    let (eigenvalues, mut eigenvectors) = sort_ascending(diag, &v);
    canonical_signs(&mut eigenvectors);
    Ok(GenEigResult {
        eigenvalues,
        eigenvectors,
        b_normalized: true,
    })
}

/// Solves the symmetric-definite pencil `A s = λ B s`.
///
/// `B` must be positive definite; callers with rank-deficient `B` should add
/// [`regularization_shift`] to its diagonal first.
pub fn gen_sym_eig(a: &Matrix, b: &Matrix) -> Result<GenEigResult, NumericsError> {
    require_symmetric(a)?;
    require_same_rows(a, b)?;
    let g = cholesky(b)?;
    // C = G⁻¹ A G⁻ᵀ
    let left = forward_substitute(&g, a);
    let c = forward_substitute(&g, &left.transpose()).symmetrize();
    reduced_solve(&g, &c)
}

/// Solves `(M Mᵀ) s = λ B s` given the factor `M` (n×k).
///
/// The reduced matrix is formed as the Gram product `(G⁻¹M)(G⁻¹M)ᵀ`, so it
/// stays positive semidefinite in floating point even when `B` is nearly
/// singular and `M Mᵀ` shares its null space.
pub fn gen_sym_eig_gram(m: &Matrix, b: &Matrix) -> Result<GenEigResult, NumericsError> {
    require_same_rows(m, b)?;
    let g = cholesky(b)?;
    let k = forward_substitute(&g, m);
    let c = k.mul(&k.transpose()).symmetrize();
    reduced_solve(&g, &c)
}

fn require_same_rows(a: &Matrix, b: &Matrix) -> Result<(), NumericsError> {
    if a.rows() != b.rows() {
        return Err(NumericsError::DimensionMismatch {
            expected: format!("{} rows", b.rows()),
            found: format!("{} rows", a.rows()),
        });
    }
    Ok(())
}

fn reduced_solve(g: &Matrix, c: &Matrix) -> Result<GenEigResult, NumericsError> {
    let std = sym_eig(c)?;
    let mut s = back_substitute_transposed(g, &std.eigenvectors);
    canonical_signs(&mut s);
    Ok(GenEigResult {
        eigenvalues: std.eigenvalues,
        eigenvectors: s,
        b_normalized: true,
    })
}

/// `ε = 1e-10 · trace(B) / dim`, the diagonal shift applied to a possibly
/// rank-deficient `B` before [`gen_sym_eig`].
pub fn regularization_shift(b: &Matrix) -> f64 {
    1e-10 * b.trace() / b.rows() as f64
}

/// `‖A s − λ B s‖₂` for one eigenpair.
pub fn pair_residual(a: &Matrix, b: &Matrix, lambda: f64, s: &[f64]) -> f64 {
    let as_ = a.mul_vec(s);
    let bs = b.mul_vec(s);
    as_.iter()
        .zip(&bs)
        .map(|(x, y)| (x - lambda * y).powi(2))
        .sum::<f64>()
        .sqrt()
}
