use super::gamma::ln_gamma;
use crate::error::{Error, Result};

/// Truncation rule for the infinite sums in the closed-form expressions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesControl {
    fn default() -> Self {
        Self {
            rel_tol: 1e-12,
            max_terms: 500,
        }
    }
}

impl SeriesControl {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || max_terms == 0 {
            return Err(Error::InvalidConfig(format!(
                "series control needs rel_tol > 0 and max_terms >= 1 (got {rel_tol}, {max_terms})"
            )));
        }
        Ok(Self { rel_tol, max_terms })
    }

    /// Same tolerance, with enough room to pass the mode of a Poisson(λ/2)
    /// weight sequence and walk well into its tail.
    pub fn for_mixture(self, lambda: f64) -> Self {
        let mean = 0.5 * lambda.max(0.0);
        let need = (mean + 40.0 * mean.sqrt() + 200.0).ceil() as usize;
        Self {
            max_terms: self.max_terms.max(need),
            ..self
        }
    }
}

/// `e^{−λ/2} Σ_k λ^k / (k! 2^k Γ(k+½)) · term(k)`.
///
/// This is the noncentral-χ²(1) mixture kernel; with `term(k) = γ(k+½, x/2)`
/// it gives the CDF at `x`.
pub fn poisson_half_mixture_sum<F>(lambda: f64, term: F, ctrl: SeriesControl) -> Result<f64>
where
    F: FnMut(u32) -> f64,
{
    weighted_sum(lambda, |k| -ln_gamma(k as f64 + 0.5), term, ctrl)
}

/// `Σ_k Pois(k; λ/2) · term(k)`, the same kernel with `Γ(k+½)` folded into
/// the term. Terms stay O(1) here, so this is the form used internally.
pub fn poisson_mixture_sum<F>(lambda: f64, term: F, ctrl: SeriesControl) -> Result<f64>
where
    F: FnMut(u32) -> f64,
{
    weighted_sum(lambda, |_| 0.0, term, ctrl)
}

fn weighted_sum<G, F>(lambda: f64, ln_extra: G, mut term: F, ctrl: SeriesControl) -> Result<f64>
where
    G: Fn(u32) -> f64,
    F: FnMut(u32) -> f64,
{
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(crate::error::domain("mixture sum", format!("lambda = {lambda}")));
    }
    let half = 0.5 * lambda;
    if half == 0.0 {
        return Ok(ln_extra(0).exp() * term(0));
    }
    let ln_half = half.ln();
    let mut sum = 0.0;
    for k in 0..ctrl.max_terms as u32 {
        let kf = k as f64;
        let ln_w = -half + kf * ln_half - ln_gamma(kf + 1.0) + ln_extra(k);
        let contrib = ln_w.exp() * term(k);
        sum += contrib;
        if kf > half && contrib.abs() <= ctrl.rel_tol * sum.abs() {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        what: "Poisson mixture series",
        iterations: ctrl.max_terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::gamma::{lower_incomplete_gamma, regularized_gamma_p};
    use std::f64::consts::PI;

    #[test]
    fn zero_lambda_keeps_only_first_term() {
        let v = poisson_half_mixture_sum(0.0, |_| 1.0, SeriesControl::default()).unwrap();
        assert!((v - 1.0 / PI.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_lambda_reduces_to_central_chi_square() {
        let x = 1.7;
        let v = poisson_half_mixture_sum(
            0.0,
            |k| lower_incomplete_gamma(k as f64 + 0.5, x / 2.0).unwrap().0,
            SeriesControl::default(),
        )
        .unwrap();
        let p = regularized_gamma_p(0.5, x / 2.0).unwrap();
        assert!((v - p).abs() < 1e-14);
    }

    #[test]
    fn total_probability_is_one() {
        for lambda in [0.0, 1.0, 10.0, 78.25, 100.0] {
            let ctrl = SeriesControl::default().for_mixture(lambda);
            let v = poisson_half_mixture_sum(lambda, |k| ln_gamma(k as f64 + 0.5).exp(), ctrl).unwrap();
            assert!((v - 1.0).abs() < 1e-9, "lambda = {lambda}: {v}");
            let w = poisson_mixture_sum(lambda, |_| 1.0, ctrl).unwrap();
            assert!((w - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn large_lambda_stays_finite() {
        let ctrl = SeriesControl::default().for_mixture(5000.0);
        let v = poisson_mixture_sum(5000.0, |_| 1.0, ctrl).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn reports_non_convergence() {
        let ctrl = SeriesControl::new(1e-12, 3).unwrap();
        assert!(matches!(
            poisson_mixture_sum(100.0, |_| 1.0, ctrl),
            Err(Error::NonConvergence { .. })
        ));
    }

    #[test]
    fn control_validation() {
        assert!(SeriesControl::new(0.0, 10).is_err());
        assert!(SeriesControl::new(1e-9, 0).is_err());
    }
}
