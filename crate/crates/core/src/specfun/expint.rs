use crate::error::{domain, Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const MAX_ITER: usize = 10_000;

/// Exponential integral `Ei(x)` for negative `x`, i.e. `−E₁(−x)`.
pub fn exp_integral_ei(x: f64) -> Result<f64> {
    if !(x < 0.0) {
        return Err(domain("exp_integral_ei", format!("x = {x} (must be negative)")));
    }
    if x == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let y = -x;
    Ok(-(-y).exp() * exp_scaled_e1(y)?)
}

/// `e^y E₁(y)` for `y > 0`, finite even where `e^y` alone overflows.
pub fn exp_scaled_e1(y: f64) -> Result<f64> {
    if !(y > 0.0) {
        return Err(domain("exp_scaled_e1", format!("y = {y}")));
    }
    if y.is_infinite() {
        return Ok(0.0);
    }
    if y <= 1.0 {
        e1_series(y).map(|e1| y.exp() * e1)
    } else {
        scaled_e1_fraction(y)
    }
}

// E₁(y) = −γ − ln y − Σ_{n≥1} (−y)^n / (n·n!)
fn e1_series(y: f64) -> Result<f64> {
    let mut sum = 0.0;
    let mut fact_term = 1.0;
    for n in 1..MAX_ITER {
        fact_term *= -y / n as f64;
        let term = fact_term / n as f64;
        sum += term;
        if term.abs() <= f64::EPSILON * sum.abs() {
            return Ok(-EULER_GAMMA - y.ln() - sum);
        }
    }
    Err(Error::NonConvergence {
        what: "E1 series",
        iterations: MAX_ITER,
    })
}

// Lentz evaluation of e^y E₁(y) = 1/(y+1− 1/(y+3− 4/(y+5− ...)))
fn scaled_e1_fraction(y: f64) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let mut b = y + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() <= f64::EPSILON {
            return Ok(h);
        }
    }
    Err(Error::NonConvergence {
        what: "E1 continued fraction",
        iterations: MAX_ITER,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn reference_values() {
        // E₁(1) = 0.21938393439552027
        assert_relative_eq!(exp_integral_ei(-1.0).unwrap(), -0.219_383_934_395_520_27, max_relative = 1e-13);
        // E₁(0.1) = 1.8229239584193906, E₁(5) = 1.1482955912753257e-3
        assert_relative_eq!(exp_integral_ei(-0.1).unwrap(), -1.822_923_958_419_390_6, max_relative = 1e-13);
        assert_relative_eq!(exp_integral_ei(-5.0).unwrap(), -1.148_295_591_275_325_7e-3, max_relative = 1e-12);
    }

    #[test]
    fn continued_fraction_bound_and_decay() {
        // e^{-y}/(y+1) < E₁(y) < e^{-y}/y
        let v = -exp_integral_ei(-10.0).unwrap();
        assert!(v > 0.0 && v < (-10.0f64).exp() / 10.0);
        assert!(v > (-10.0f64).exp() / 11.0);
        assert_eq!(exp_integral_ei(-1e6).unwrap(), 0.0);
        assert_eq!(exp_integral_ei(f64::NEG_INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn branches_agree_at_switch_point() {
        let below = e1_series(1.0).unwrap() * 1.0f64.exp();
        let above = scaled_e1_fraction(1.0).unwrap();
        assert_relative_eq!(below, above, max_relative = 1e-13);
    }

    #[test]
    fn scaled_form_survives_large_arguments() {
        // e^y E₁(y) ~ 1/y (1 - 1/y + 2/y² ...)
        let y = 1e4;
        let v = exp_scaled_e1(y).unwrap();
        assert_relative_eq!(v, (1.0 - 1.0 / y + 2.0 / (y * y)) / y, max_relative = 1e-10);
    }

    #[test]
    fn rejects_nonnegative() {
        assert!(exp_integral_ei(0.0).is_err());
        assert!(exp_integral_ei(1.0).is_err());
    }
}
