//! Correlation of two cos² parameter curves by quadrature, next to the
//! closed form.
//!
//! cargo run --example mu_correlation

use gatestab::metrics::{audit_mu, correlation_mu, RunWindow};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!(" N      C     C*   quadrature   closed form   |diff|");
    for (n, c, cs) in [(1, 0.125, 0.1), (1, 0.3, 0.2), (2, 0.5, 0.3)] {
        let a = audit_mu(c, cs, n, 10, 10_000)?;
        println!(
            "{n:>2}  {c:>5}  {cs:>5}   {:.6}     {:.6}      {:.4}",
            a.mu_numeric,
            a.mu_closed_form.unwrap_or(f64::NAN),
            a.discrepancy.unwrap_or(f64::NAN)
        );
    }

    let w = RunWindow::literal(10);
    let f = |r: f64| (0.9 * r).sin() + 0.05 * r * r;
    let g = |r: f64| 4.0 * f(r) - 1.0;
    println!("mu(f, 4f - 1) = {:.12}", correlation_mu(f, g, &w, 1000)?);
    Ok(())
}
