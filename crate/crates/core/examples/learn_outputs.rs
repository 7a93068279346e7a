//! Projects a random training set through a stabilizer and computes the
//! per-gate learned outputs of each run.
//!
//! cargo run --example learn_outputs

use gatestab::circuit::{generate_alpha, PauliCircuit, RunConfig, StateVector};
use gatestab::learner::{build_training_set, learn};
use gatestab::stabilizer::{solve_stabilizer, StabilizerParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let circuit = PauliCircuit::from_json_str(include_str!("data/ring4.json"))?;
    let input = StateVector::plus(circuit.qubits())?;
    let mut config = RunConfig::new(6, 11);
    config.noise_scale = 0.05;
    let alpha = generate_alpha(&circuit, &input, &config)?;
    let sol = solve_stabilizer(&alpha, &StabilizerParams::default())?;

    let training = build_training_set(alpha.gates(), 32, 11)?;
    let out = learn(&training, &sol.s, &alpha)?;
    println!("training samples: {}, offsets b[0..3] = {:?}", training.len(), &out.b[..3]);
    for (r, (y, dy)) in out.y_tilde.iter().zip(&out.delta_y).enumerate() {
        let y: Vec<String> = y.iter().map(|v| format!("{v:.3}")).collect();
        let dy: Vec<String> = dy.iter().map(|v| format!("{v:.3}")).collect();
        println!("run {}: y~ = [{}]  dy~ = [{}]", r + 1, y.join(", "), dy.join(", "));
    }
    Ok(())
}
