//! Simulates repeated runs of a small QAOA-style circuit and prints the
//! per-run optimal parameters and objective values.
//!
//! cargo run --example simulate_runs

use gatestab::circuit::{
    evaluate_objective, generate_alpha, objective_gradient, parameter_shift_gradient, PauliCircuit, RunConfig,
    StateVector,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let circuit = PauliCircuit::from_json_str(include_str!("data/ring4.json"))?;
    let input = StateVector::plus(circuit.qubits())?;

    let mut config = RunConfig::new(10, 7);
    config.noise_scale = 0.05;
    let alpha = generate_alpha(&circuit, &input, &config)?;

    println!("{} gates, {} runs", alpha.gates(), alpha.runs());
    for r in 0..alpha.runs() {
        let theta = alpha.run(r);
        let f = evaluate_objective(&circuit, &theta, &input)?;
        let shown: Vec<String> = theta.iter().map(|t| format!("{t:.3}")).collect();
        println!("run {:>2}  f = {f:.5}  theta = [{}]", r + 1, shown.join(", "));
    }

    let theta = alpha.run(0);
    let fd = objective_gradient(&circuit, &theta, &input, 1e-5)?;
    let shift = parameter_shift_gradient(&circuit, &theta, &input)?;
    let worst = fd.iter().zip(&shift).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    println!("finite difference vs parameter shift: max |diff| = {worst:.2e}");
    Ok(())
}
