//! The stability parameter of a sinusoidal entropy curve falls as the
//! inverse of its number of oscillations.
//!
//! cargo run --example delta_oscillations

use gatestab::metrics::{delta_stability, sinusoid_f, RunWindow, SinusoidModel};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let runs = 10;
    let window = RunWindow::full(runs);
    println!(" N   delta      1/N");
    for n in 1..=3 {
        let model = SinusoidModel::unit_delta(runs, n, 0.1);
        let samples: Vec<f64> = window.grid(10_000).iter().map(|&r| sinusoid_f(&model, r)).collect();
        let d = delta_stability(&samples, &window)?;
        println!("{n:>2}   {:.6}   {:.6}", d.delta.unwrap_or(f64::INFINITY), 1.0 / n as f64);
    }

    let flat = delta_stability(&[0.1; 100], &window)?;
    println!("constant curve: unbounded = {}", flat.unbounded);
    Ok(())
}
