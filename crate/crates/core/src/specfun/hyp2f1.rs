use super::series::SeriesControl;
use crate::error::{domain, Error, Result};

/// Gauss hypergeometric `₂F₁(a, b; c; −1)`.
///
/// The defining series at −1 converges only conditionally (or not at all for
/// the shifted parameter sets), so it is evaluated through the Pfaff
/// transformation `₂F₁(a,b;c;−1) = 2^{−a} ₂F₁(a, c−b; c; ½)`.
pub fn hyp2f1_at_minus1(a: f64, b: f64, c: f64, ctrl: SeriesControl) -> Result<f64> {
    if !(c > 0.0) || !a.is_finite() || !b.is_finite() || !c.is_finite() {
        return Err(domain("hyp2f1_at_minus1", format!("a = {a}, b = {b}, c = {c}")));
    }
    let s = hyp2f1_series(a, c - b, c, 0.5, ctrl)?;
    Ok(2f64.powf(-a) * s)
}

/// Plain hypergeometric series for |z| < 1.
pub(crate) fn hyp2f1_series(a: f64, b: f64, c: f64, z: f64, ctrl: SeriesControl) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 0..ctrl.max_terms {
        let nf = n as f64;
        let ratio = (a + nf) * (b + nf) / ((c + nf) * (nf + 1.0)) * z;
        term *= ratio;
        sum += term;
        if term == 0.0 || (ratio.abs() < 1.0 && term.abs() <= ctrl.rel_tol * sum.abs()) {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        what: "hypergeometric series",
        iterations: ctrl.max_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn terminating_series() {
        let v = hyp2f1_at_minus1(2.3, 0.0, 1.7, SeriesControl::default()).unwrap();
        assert_relative_eq!(v, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn log_identity() {
        // ₂F₁(1,1;2;z) = −ln(1−z)/z
        let v = hyp2f1_at_minus1(1.0, 1.0, 2.0, SeriesControl::default()).unwrap();
        assert_relative_eq!(v, std::f64::consts::LN_2, max_relative = 1e-12);
    }

    #[test]
    fn power_identity() {
        // ₂F₁(a,b;b;z) = (1−z)^{−a}
        let v = hyp2f1_at_minus1(1.5, 2.0, 2.0, SeriesControl::default()).unwrap();
        assert_relative_eq!(v, 2f64.powf(-1.5), max_relative = 1e-12);
    }

    #[test]
    fn rejects_nonpositive_c() {
        assert!(hyp2f1_at_minus1(1.0, 1.0, 0.0, SeriesControl::default()).is_err());
        assert!(hyp2f1_at_minus1(1.0, 1.0, -2.0, SeriesControl::default()).is_err());
    }

    #[test]
    fn non_convergence_is_reported() {
        let ctrl = SeriesControl::new(1e-15, 2).unwrap();
        assert!(hyp2f1_at_minus1(6.0, -3.0, 7.0, ctrl).is_err());
    }
}
