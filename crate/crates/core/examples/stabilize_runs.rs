//! Stabilizes a set of noisy runs and reports the solver diagnostics.
//!
//! cargo run --example stabilize_runs

use gatestab::circuit::{generate_alpha, PauliCircuit, RunConfig, StateVector};
use gatestab::stabilizer::{chi_direct, solve_stabilizer, StabilizerParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let circuit = PauliCircuit::from_json_str(include_str!("data/ring4.json"))?;
    let input = StateVector::plus(circuit.qubits())?;
    let mut config = RunConfig::new(12, 3);
    config.noise_scale = 0.1;
    let alpha = generate_alpha(&circuit, &input, &config)?;

    for m in [None, Some(3)] {
        let params = StabilizerParams {
            m,
            ..StabilizerParams::default()
        };
        let sol = solve_stabilizer(&alpha, &params)?;
        println!("m = {}", sol.s.cols());
        println!("  eigenvalues  {:?}", sol.eigenvalues.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>());
        println!("  F*           {:.6}", sol.f_star);
        println!("  chi, tau     {:.6}, {:.6}", sol.chi, sol.tau);
        println!("  Omega        {:.6}", sol.omega);
        println!("  residual     {:.2e} (scale {:.2e})", sol.max_residual, sol.pencil_norm);

        let delta_beta = gatestab::stabilizer::build_differences(&sol.beta)?;
        println!("  chi recheck  {:.6}", chi_direct(&delta_beta));
    }
    Ok(())
}
