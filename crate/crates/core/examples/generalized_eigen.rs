//! Solves a small symmetric-definite pencil `A s = λ B s`.
//!
//! cargo run --example generalized_eigen

use gatestab::numerics::{gen_sym_eig, pair_residual, Matrix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = Matrix::from_rows(&[vec![4.0, 1.0, 0.0], vec![1.0, 3.0, 0.5], vec![0.0, 0.5, 2.0]])?;
    let b = Matrix::from_rows(&[vec![2.0, 0.2, 0.0], vec![0.2, 1.0, 0.1], vec![0.0, 0.1, 1.5]])?;
    let eig = gen_sym_eig(&a, &b)?;
    for j in 0..eig.len() {
        let s = eig.vector(j);
        println!(
            "lambda = {:.10}  s = {:?}  residual = {:.1e}",
            eig.eigenvalues[j],
            s.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>(),
            pair_residual(&a, &b, eig.eigenvalues[j], &s)
        );
    }
    let gram = eig.eigenvectors.transpose().matmul(&b)?.matmul(&eig.eigenvectors)?;
    println!("max |S^T B S - I| = {:.1e}", gram.max_abs_diff(&Matrix::identity(3)));
    Ok(())
}
