//! Fits stability classes on a parameter matrix and assigns each run a
//! primary and secondary class.
//!
//! cargo run --example classify_runs

use gatestab::classifier::{class_probabilities, classify_all, fit_classes, rho};
use gatestab::params::GateParamMatrix;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Three regimes of runs: low, middle and high parameters.
    let runs: Vec<Vec<f64>> = (0..9)
        .map(|r| {
            let base = [0.4, 1.5, 2.7][r / 3];
            (0..5).map(|l| base + 0.03 * ((r * 5 + l) % 4) as f64).collect()
        })
        .collect();
    let beta = GateParamMatrix::from_runs(&runs)?;

    let model = fit_classes(&beta, 3, 0)?;
    println!("centroids {:?}, h = {:.4}", model.centroids, model.h);
    println!("f_k(1.5) = {:?}", class_probabilities(&model, 1.5)?);

    for a in classify_all(&model, &beta)? {
        println!(
            "run {}: class {} (score {:.3}), nearest other class {} (rho {:.3})",
            a.r + 1,
            a.p + 1,
            a.xi,
            a.q + 1,
            a.ell
        );
    }
    println!("rho(1, 1) on run 1 = {}", rho(&model, &beta.run(0), 0, 0)?);
    Ok(())
}
