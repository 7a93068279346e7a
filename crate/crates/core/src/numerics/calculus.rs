//! One-dimensional quadrature and finite differences.

use super::NumericsError;

/// Composite Simpson rule for `∫_a^b f(x) dx` over an even number of panels.
pub fn integrate<F>(f: F, a: f64, b: f64, panels: usize) -> Result<f64, NumericsError>
where
    F: Fn(f64) -> f64,
{
    if !(a < b) {
        return Err(NumericsError::InvalidInterval { a, b });
    }
    if panels < 2 || !panels.is_multiple_of(2) {
        return Err(NumericsError::InvalidPanels(panels));
    }
    let h = (b - a) / panels as f64;
    let mut odd = 0.0;
    let mut even = 0.0;
    for i in 1..panels {
        let x = a + i as f64 * h;
        if i % 2 == 1 {
            odd += f(x);
        } else {
            even += f(x);
        }
    }
    Ok(h / 3.0 * (f(a) + 4.0 * odd + 2.0 * even + f(b)))
}

/// Integrates uniformly spaced samples.
///
/// Composite Simpson when the panel count is even. For an odd panel count
/// the last three panels use Simpson's 3/8 rule, and a single panel falls
/// back to the trapezoid.
pub fn integrate_samples(samples: &[f64], step: f64) -> Result<f64, NumericsError> {
    if samples.len() < 2 {
        return Err(NumericsError::TooFewSamples {
            needed: 2,
            found: samples.len(),
        });
    }
    if !(step > 0.0) {
        return Err(NumericsError::InvalidStep(step));
    }
    let panels = samples.len() - 1;
    if panels == 1 {
        return Ok(0.5 * step * (samples[0] + samples[1]));
    }
    let simpson = |s: &[f64]| {
        let n = s.len() - 1;
        let mut acc = s[0] + s[n];
        for (i, v) in s.iter().enumerate().take(n).skip(1) {
            acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
        }
        acc * step / 3.0
    };
    if panels.is_multiple_of(2) {
        return Ok(simpson(samples));
    }
    let split = panels - 3;
    let tail = &samples[split..];
    let three_eighths = 3.0 * step / 8.0 * (tail[0] + 3.0 * tail[1] + 3.0 * tail[2] + tail[3]);
    let head = if split > 0 { simpson(&samples[..=split]) } else { 0.0 };
    Ok(head + three_eighths)
}

/// Second-order finite-difference derivative of uniformly spaced samples.
///
/// Central differences in the interior; one-sided three-point stencils at both ends.
pub fn differentiate(samples: &[f64], step: f64) -> Result<Vec<f64>, NumericsError> {
    let n = samples.len();
    if n < 3 {
        return Err(NumericsError::TooFewSamples { needed: 3, found: n });
    }
    if !(step > 0.0) {
        return Err(NumericsError::InvalidStep(step));
    }
    let h2 = 2.0 * step;
    let mut d = Vec::with_capacity(n);
    d.push((-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / h2);
    for i in 1..n - 1 {
        d.push((samples[i + 1] - samples[i - 1]) / h2);
    }
    d.push((3.0 * samples[n - 1] - 4.0 * samples[n - 2] + samples[n - 3]) / h2);
    Ok(d)
}

/// `count` points evenly spaced over `[a, b]`, endpoints included.
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2);
    let h = (b - a) / (count - 1) as f64;
    (0..count)
        .map(|i| if i == count - 1 { b } else { a + i as f64 * h })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_integrand() {
        assert!((integrate(|_| 1.0, 0.0, 1.0, 10).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sine_half_period() {
        let v = integrate(f64::sin, 0.0, PI, 1000).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn cos_squared_against_antiderivative() {
        let r = 10.0;
        let f = |x: f64| (2.0 * PI * x / r).cos().powi(2);
        let anti = |x: f64| x / 2.0 + r * (4.0 * PI * x / r).sin() / (8.0 * PI);
        let exact = anti(10.0) - anti(1.0);
        let v = integrate(f, 1.0, 10.0, 10_000).unwrap();
        assert!((v - exact).abs() < 1e-12, "{v} vs {exact}");
    }

    #[test]
    fn bad_quadrature_arguments() {
        assert!(matches!(integrate(|x| x, 1.0, 0.0, 4), Err(NumericsError::InvalidInterval { .. })));
        assert!(matches!(integrate(|x| x, 0.0, 1.0, 3), Err(NumericsError::InvalidPanels(3))));
        assert!(matches!(integrate(|x| x, 0.0, 1.0, 0), Err(NumericsError::InvalidPanels(0))));
    }

    #[test]
    fn sampled_quadrature_exact_for_cubics() {
        let f = |x: f64| x * x * x - 2.0 * x + 1.0;
        let exact = |a: f64, b: f64| {
            let g = |x: f64| x.powi(4) / 4.0 - x * x + x;
            g(b) - g(a)
        };
        for count in [3usize, 4, 5, 6, 9, 10] {
            let xs = linspace(0.0, 2.0, count);
            let ys: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
            let v = integrate_samples(&ys, xs[1] - xs[0]).unwrap();
            assert!((v - exact(0.0, 2.0)).abs() < 1e-12, "count {count}: {v}");
        }
    }

    #[test]
    fn derivative_of_constant_and_linear() {
        let d = differentiate(&[4.0; 6], 0.1).unwrap();
        assert!(d.iter().all(|&v| v == 0.0));
        let k = 2.5;
        let s: Vec<f64> = (0..8).map(|i| k * i as f64 * 0.3).collect();
        let d = differentiate(&s, 0.3).unwrap();
        assert!(d.iter().all(|v| (v - k).abs() < 1e-12));
    }

    #[test]
    fn derivative_of_quadratic_exact() {
        let h = 0.25;
        let s: Vec<f64> = (0..7).map(|i| (i as f64 * h).powi(2)).collect();
        let d = differentiate(&s, h).unwrap();
        for (i, v) in d.iter().enumerate() {
            assert!((v - 2.0 * i as f64 * h).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_of_sine_second_order() {
        for &n in &[101usize, 201] {
            let xs = linspace(0.0, PI, n);
            let h = xs[1] - xs[0];
            let s: Vec<f64> = xs.iter().map(|x| x.sin()).collect();
            let d = differentiate(&s, h).unwrap();
            let err = xs
                .iter()
                .zip(&d)
                .map(|(x, v)| (v - x.cos()).abs())
                .fold(0.0, f64::max);
            // one-sided ends carry h²/3·|f'''|
            assert!(err < h * h, "n={n}: err {err}");
        }
    }

    #[test]
    fn derivative_needs_three_samples() {
        assert!(differentiate(&[1.0, 2.0], 1.0).is_err());
        assert!(differentiate(&[1.0, 2.0, 3.0], 0.0).is_err());
    }
}
