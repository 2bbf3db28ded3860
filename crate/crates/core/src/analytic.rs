//! Closed-form CDFs, outage probabilities, ergodic rates, secrecy
//! capacities and their high-SNR behaviour.

use crate::channel::{expected_gain_squared, FormulaVariant, PairStats, Sop2Regime, SystemConfig};
use crate::error::{domain, Error, Result};
use crate::specfun::{
    chebyshev_gauss_rule, exp_scaled_e1, gauss_laguerre_rule, ln_gamma, marcum_q_half,
    poisson_mixture_sum, regularized_gamma_p, regularized_gamma_q, QuadratureRule, SeriesControl,
    EULER_GAMMA,
};
use std::f64::consts::LN_2;

/// `ρ` at or below which [`Sop2Regime::Auto`] picks the low-SNR form.
pub const SOP2_REGIME_SWITCH_DB: f64 = 30.0;

/// How a reported value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ClosedForm,
    LowSnr,
    HighSnr,
    Asymptotic,
    Jensen,
    Quadrature,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::ClosedForm => "closed_form",
            Method::LowSnr => "low_snr",
            Method::HighSnr => "high_snr",
            Method::Asymptotic => "asymptotic",
            Method::Jensen => "jensen",
            Method::Quadrature => "quadrature",
        }
    }
}

/// Evaluation route for user 2's secrecy capacity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AscMethod {
    Quadrature,
    Jensen,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    User1,
    User2,
    Network,
}

/// A value together with the route that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tagged {
    pub value: f64,
    pub method: Method,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecrecyMetrics {
    pub sop1: Tagged,
    pub sop2: Tagged,
    pub sop_network: Tagged,
    pub asc1: Tagged,
    pub asc2: Tagged,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticSummary {
    pub diversity_user1: f64,
    pub diversity_user2: f64,
    pub diversity_network: f64,
    pub slope_user1: f64,
    pub slope_user2: f64,
    pub sop1_floor: f64,
}

/// High-SNR outage expansion. `tie` is set when the network expansion sits
/// on the `m_sN = 1` boundary and the larger branch was returned.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticSop {
    pub value: f64,
    pub tie: bool,
}

/// `F_{γ_B1}(x)`.
pub fn cdf_gamma_b1(x: f64, cfg: &SystemConfig) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    -(-x / (cfg.a1 * cfg.rho() * cfg.direct_gain())).exp_m1()
}

/// Low-SNR (CLT) CDF of `γ_B2`.
pub fn cdf_gamma_b2_low(x: f64, cfg: &SystemConfig) -> Result<f64> {
    let pair = cfg.pair_b2()?;
    cdf_b2_low(x, cfg, &pair)
}

/// High-SNR CDF of `γ_B2`; needs `m₁ ≠ m₂`.
pub fn cdf_gamma_b2_high(x: f64, cfg: &SystemConfig) -> Result<f64> {
    let pair = cfg.pair_b2()?;
    cdf_b2_high(x, cfg, &pair)
}

fn ceiling_b2(cfg: &SystemConfig) -> f64 {
    cfg.a2 / cfg.a1
}

fn cdf_b2_low(x: f64, cfg: &SystemConfig, pair: &PairStats) -> Result<f64> {
    if x.is_nan() {
        return Err(domain("cdf_gamma_b2_low", "x is NaN"));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x >= ceiling_b2(cfg) {
        return Ok(1.0);
    }
    let n = cfg.n as f64;
    let arg = x / (n * (1.0 - pair.eps) * cfg.rho() * (cfg.a2 - cfg.a1 * x) * cfg.reflect_gain_b2());
    let q = marcum_q_half(pair.lam(cfg.n).sqrt(), arg.sqrt())?;
    Ok((1.0 - q).clamp(0.0, 1.0))
}

fn cdf_b2_high(x: f64, cfg: &SystemConfig, pair: &PairStats) -> Result<f64> {
    let ln_mt = pair
        .ln_m_tilde
        .ok_or_else(|| domain("cdf_gamma_b2_high", "requires m1 != m2"))?;
    if x.is_nan() {
        return Err(domain("cdf_gamma_b2_high", "x is NaN"));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x >= ceiling_b2(cfg) {
        return Ok(1.0);
    }
    let y_h = (x / (cfg.rho() * (cfg.a2 - cfg.a1 * x) * cfg.reflect_gain_b2())).sqrt();
    high_snr_cdf(cfg.n, pair, ln_mt, y_h)
}

// m̃^N (4m_sm_l)^{−m_sN} γ(2m_sN, 2√(m_sm_l)·y) / Γ(2m_sN)
fn high_snr_cdf(n: usize, pair: &PairStats, ln_mt: f64, y: f64) -> Result<f64> {
    let nf = n as f64;
    let (ms, ml) = (pair.m_c, pair.m_d);
    let shape = 2.0 * ms * nf;
    let ln_pre = nf * ln_mt - ms * nf * (4.0 * ms * ml).ln();
    let p = regularized_gamma_p(shape, 2.0 * (ms * ml).sqrt() * y)?;
    Ok((ln_pre.exp() * p).clamp(0.0, 1.0))
}

// Poisson mixture with a fallible term; the first error wins.
fn mixture<F>(lambda: f64, ctrl: SeriesControl, mut term: F) -> Result<f64>
where
    F: FnMut(u32) -> Result<f64>,
{
    let mut err = None;
    let v = poisson_mixture_sum(
        lambda,
        |k| match term(k) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        ctrl.for_mixture(lambda),
    )?;
    match err {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// Evaluator for one configuration with its derived constants and
/// quadrature rules computed once.
#[derive(Debug, Clone)]
pub struct Analyzer {
    cfg: SystemConfig,
    pair_b2: PairStats,
    pair_e: PairStats,
    mu: f64,
    mu2: f64,
    laguerre: QuadratureRule,
    chebyshev: QuadratureRule,
    ctrl: SeriesControl,
}

impl Analyzer {
    pub fn new(cfg: &SystemConfig) -> Result<Self> {
        cfg.validate()?;
        let pair_b2 = cfg.pair_b2()?;
        let pair_e = cfg.pair_e()?;
        let mu = expected_gain_squared(&pair_e, cfg.n)?;
        let mu2 = expected_gain_squared(&pair_b2, cfg.n)?;
        Ok(Self {
            cfg: cfg.clone(),
            pair_b2,
            pair_e,
            mu,
            mu2,
            laguerre: gauss_laguerre_rule(cfg.u1)?,
            chebyshev: chebyshev_gauss_rule(cfg.u2)?,
            ctrl: SeriesControl::default(),
        })
    }

    pub fn config(&self) -> &SystemConfig {
        &self.cfg
    }

    pub fn pair_b2(&self) -> &PairStats {
        &self.pair_b2
    }

    pub fn pair_e(&self) -> &PairStats {
        &self.pair_e
    }

    /// `E[Z²]` of Eve's cascaded sum, before the β² reflection loss.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `E[Z²]` of user 2's cascaded sum, before the β² reflection loss.
    pub fn mu2(&self) -> f64 {
        self.mu2
    }

    /// Mean of Eve's per-unit SNR term `μ·β²d₁^{−α₁}d_E^{−α_E}`.
    fn eve_mean_gain(&self) -> f64 {
        self.mu * self.cfg.reflect_gain_e()
    }

    /// Outage threshold of user 1 with Eve's gain at its mean.
    pub fn y1(&self) -> f64 {
        let c = &self.cfg;
        2f64.powf(c.r1) * (1.0 + c.a1 * c.rho_e() * self.eve_mean_gain()) - 1.0
    }

    /// Outage threshold of user 2 with Eve's gain at its mean.
    pub fn y2(&self) -> f64 {
        let c = &self.cfg;
        2f64.powf(c.r2) * (1.0 + c.a2 * c.rho_e() * self.eve_mean_gain()) - 1.0
    }

    pub fn cdf_gamma_b1(&self, x: f64) -> f64 {
        cdf_gamma_b1(x, &self.cfg)
    }

    pub fn cdf_gamma_b2_low(&self, x: f64) -> Result<f64> {
        cdf_b2_low(x, &self.cfg, &self.pair_b2)
    }

    pub fn cdf_gamma_b2_high(&self, x: f64) -> Result<f64> {
        cdf_b2_high(x, &self.cfg, &self.pair_b2)
    }

    pub fn sop_user1(&self) -> f64 {
        cdf_gamma_b1(self.y1(), &self.cfg)
    }

    /// Regime actually used for `requested`.
    pub fn resolve_regime(&self, requested: Sop2Regime) -> Sop2Regime {
        match requested {
            Sop2Regime::Auto => {
                if self.cfg.rho_db <= SOP2_REGIME_SWITCH_DB || self.pair_b2.m_tilde.is_none() {
                    Sop2Regime::Low
                } else {
                    Sop2Regime::High
                }
            }
            r => r,
        }
    }

    pub fn sop_user2(&self, regime: Sop2Regime) -> Result<Tagged> {
        let regime = self.resolve_regime(regime);
        let method = match regime {
            Sop2Regime::High => Method::HighSnr,
            _ => Method::LowSnr,
        };
        if regime == Sop2Regime::High && self.pair_b2.ln_m_tilde.is_none() {
            return Err(domain("sop_user2", "high-SNR form requires m1 != m2"));
        }
        let y2 = self.y2();
        if y2 >= ceiling_b2(&self.cfg) {
            return Ok(Tagged { value: 1.0, method });
        }
        let c = &self.cfg;
        let value = match regime {
            Sop2Regime::High => {
                let y_h = (y2 / (c.rho() * (c.a2 - c.a1 * y2) * c.reflect_gain_b2())).sqrt();
                high_snr_cdf(c.n, &self.pair_b2, self.pair_b2.ln_m_tilde.unwrap(), y_h)?
            }
            _ => {
                let n = c.n as f64;
                let y_l = y2
                    / (n * (1.0 - self.pair_b2.eps)
                        * c.rho()
                        * (c.a2 - c.a1 * y2)
                        * c.reflect_gain_b2());
                let lam = self.pair_b2.lam(c.n);
                mixture(lam, self.ctrl, |k| {
                    regularized_gamma_p(k as f64 + 0.5, 0.5 * y_l)
                })?
                .clamp(0.0, 1.0)
            }
        };
        Ok(Tagged { value, method })
    }

    pub fn sop_network(&self) -> Result<Tagged> {
        let p1 = self.sop_user1();
        let p2 = self.sop_user2(self.cfg.sop2_regime)?;
        Ok(Tagged {
            value: (1.0 - (1.0 - p1) * (1.0 - p2.value)).clamp(0.0, 1.0),
            method: p2.method,
        })
    }

    fn asym_user1(&self) -> f64 {
        self.y1() / (self.cfg.a1 * self.cfg.rho() * self.cfg.direct_gain())
    }

    fn asym_user2(&self) -> Result<f64> {
        let ln_mt = self
            .pair_b2
            .ln_m_tilde
            .ok_or_else(|| domain("asymptotic_sop", "user-2 expansion requires m1 != m2"))?;
        let c = &self.cfg;
        let y2 = self.y2();
        if y2 >= ceiling_b2(c) {
            return Ok(1.0);
        }
        let order = self.pair_b2.m_c * c.n as f64;
        // m̃^N y_h^{2m_sN} / Γ(2m_sN+1) with y_h² = y₂/(ρ(a₂−a₁y₂)L)
        let ln_yh2 = (y2 / (c.rho() * (c.a2 - c.a1 * y2) * c.reflect_gain_b2())).ln();
        Ok((c.n as f64 * ln_mt + order * ln_yh2 - ln_gamma(2.0 * order + 1.0)).exp())
    }

    pub fn asymptotic_sop(&self, which: Which) -> Result<AsymptoticSop> {
        let plain = |value| AsymptoticSop { value, tie: false };
        match which {
            Which::User1 => Ok(plain(self.asym_user1())),
            Which::User2 => self.asym_user2().map(plain),
            Which::Network => {
                let order = self.pair_b2.m_c * self.cfg.n as f64;
                if order > 1.0 {
                    Ok(plain(self.asym_user1()))
                } else if order < 1.0 {
                    self.asym_user2().map(plain)
                } else {
                    Ok(AsymptoticSop {
                        value: self.asym_user1().max(self.asym_user2()?),
                        tie: true,
                    })
                }
            }
        }
    }

    /// Outage floor of user 1 when Eve's SNR tracks the legitimate SNR.
    pub fn sop1_floor(&self) -> f64 {
        let c = &self.cfg;
        (2f64.powf(c.r1) * self.eve_mean_gain() / c.direct_gain()).clamp(0.0, 1.0)
    }

    pub fn diversity_and_slopes(&self) -> AsymptoticSummary {
        let d2 = self.pair_b2.m_c * self.cfg.n as f64;
        AsymptoticSummary {
            diversity_user1: 1.0,
            diversity_user2: d2,
            diversity_network: d2.min(1.0),
            slope_user1: 1.0,
            slope_user2: 0.0,
            sop1_floor: self.sop1_floor(),
        }
    }

    /// `E[log₂(1+γ_Ei)]` from the noncentral-χ² model of Eve's gain,
    /// integrated with Gauss–Laguerre.
    ///
    /// The integration variable is rescaled by `min(1, E[γ_Ei])` so that a
    /// weak eavesdropper's distribution is still resolved by the nodes.
    pub fn ergodic_rate_eve(&self, user: usize) -> Result<f64> {
        let c = &self.cfg;
        let a = c.power_fraction(user);
        let n = c.n as f64;
        let denom = 2.0 * a * c.rho_e() * n * (1.0 - self.pair_e.eps) * c.reflect_gain_e();
        let mean = a * c.rho_e() * self.eve_mean_gain();
        if !(mean > 0.0) || !(denom > 0.0) {
            return Ok(0.0);
        }
        let s = mean.min(1.0);
        let nodes = self.laguerre.nodes();
        let lnw = self.laguerre.ln_weights();
        let lam = self.pair_e.lam(c.n);
        let v = mixture(lam, self.ctrl, |k| {
            let shape = k as f64 + 0.5;
            let mut acc = 0.0;
            for (&y, &lw) in nodes.iter().zip(lnw) {
                let x = s * y;
                let q = regularized_gamma_q(shape, x / denom)?;
                if q > 0.0 {
                    acc += (lw + y).exp() * s * q / (1.0 + x);
                }
            }
            Ok(acc)
        })?;
        Ok(v / LN_2)
    }

    /// `E[log₂(1+γ_Bi)]`.
    pub fn ergodic_rate_user(&self, user: usize) -> Result<f64> {
        let c = &self.cfg;
        if user == 1 {
            let s = c.a1 * c.rho() * c.direct_gain();
            return Ok(exp_scaled_e1(1.0 / s)? / LN_2);
        }
        let n = c.n as f64;
        let base = n * (1.0 - self.pair_b2.eps) * c.rho() * c.a1 * c.reflect_gain_b2();
        let scale = match c.variant {
            FormulaVariant::Corrected => 2.0 * base,
            FormulaVariant::AsPrinted => base,
        };
        let shift = 2.0 * c.a1 / c.a2;
        let nodes = self.chebyshev.nodes();
        let w = self.chebyshev.weights();
        let lam = self.pair_b2.lam(c.n);
        let v = mixture(lam, self.ctrl, |i| {
            let shape = i as f64 + 0.5;
            let mut acc = 0.0;
            for (&t, &wp) in nodes.iter().zip(w) {
                let arg = (1.0 + t) / (scale * (1.0 - t));
                let p = regularized_gamma_p(shape, arg)?;
                acc += wp * p * (1.0 - t * t).sqrt() / (1.0 + t + shift);
            }
            Ok(acc)
        })?;
        Ok((1.0 + c.a2 / c.a1).log2() - v / LN_2)
    }

    /// High-SNR expansion of user 1's ergodic rate.
    pub fn ergodic_rate_user1_asymptotic(&self) -> f64 {
        let c = &self.cfg;
        let s = c.a1 * c.rho() * c.direct_gain();
        let lead = match c.variant {
            FormulaVariant::Corrected => s.log2(),
            FormulaVariant::AsPrinted => (1.0 / s).log2(),
        };
        lead - EULER_GAMMA / LN_2
    }

    /// Average secrecy capacity of `user`, clamped at zero.
    pub fn asc(&self, user: usize, method: AscMethod) -> Result<Tagged> {
        match (user, method) {
            (1, AscMethod::Quadrature) => {
                let v = self.ergodic_rate_user(1)? - self.ergodic_rate_eve(1)?;
                Ok(Tagged {
                    value: v.max(0.0),
                    method: Method::ClosedForm,
                })
            }
            (1, AscMethod::Jensen) => Err(Error::MethodMismatch(
                "the Jensen approximation is defined for user 2 only".into(),
            )),
            (2, AscMethod::Quadrature) => {
                let v = self.ergodic_rate_user(2)? - self.ergodic_rate_eve(2)?;
                Ok(Tagged {
                    value: v.max(0.0),
                    method: Method::Quadrature,
                })
            }
            (2, AscMethod::Jensen) => Ok(Tagged {
                value: self.asc2_jensen().max(0.0),
                method: Method::Jensen,
            }),
            _ => Err(domain("asc", format!("user must be 1 or 2, got {user}"))),
        }
    }

    fn asc2_jensen(&self) -> f64 {
        let c = &self.cfg;
        let link = match c.variant {
            FormulaVariant::Corrected => c.reflect_gain_b2(),
            FormulaVariant::AsPrinted => {
                c.beta * c.beta * crate::channel::path_gain(c.d_1, c.alpha_1) * c.direct_gain()
            }
        };
        let g = self.mu2 * c.rho() * link;
        let eve = 1.0 + c.a2 * c.rho_e() * self.eve_mean_gain();
        ((g + 1.0) / ((c.a1 * g + 1.0) * eve)).log2()
    }

    /// High-SNR expansion (user 1) or ceiling (user 2); not clamped.
    pub fn asc_asymptotic(&self, user: usize, method: AscMethod) -> Result<f64> {
        let c = &self.cfg;
        match (user, method) {
            (1, AscMethod::Quadrature) => {
                Ok(self.ergodic_rate_user1_asymptotic() - self.ergodic_rate_eve(1)?)
            }
            (1, AscMethod::Jensen) => Err(Error::MethodMismatch(
                "the Jensen ceiling is defined for user 2 only".into(),
            )),
            (2, AscMethod::Quadrature) => {
                Ok((1.0 + c.a2 / c.a1).log2() - self.ergodic_rate_eve(2)?)
            }
            (2, AscMethod::Jensen) => {
                let eve = 1.0 + c.a2 * c.rho_e() * self.eve_mean_gain();
                Ok((1.0 / (c.a1 * eve)).log2())
            }
            _ => Err(domain("asc_asymptotic", format!("user must be 1 or 2, got {user}"))),
        }
    }

    pub fn metrics(&self, asc2_method: AscMethod) -> Result<SecrecyMetrics> {
        let sop1 = Tagged {
            value: self.sop_user1(),
            method: Method::ClosedForm,
        };
        let sop2 = self.sop_user2(self.cfg.sop2_regime)?;
        let sop_network = Tagged {
            value: (1.0 - (1.0 - sop1.value) * (1.0 - sop2.value)).clamp(0.0, 1.0),
            method: sop2.method,
        };
        Ok(SecrecyMetrics {
            sop1,
            sop2,
            sop_network,
            asc1: self.asc(1, AscMethod::Quadrature)?,
            asc2: self.asc(2, asc2_method)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cfg() -> SystemConfig {
        SystemConfig::default()
    }

    fn with(f: impl FnOnce(&mut SystemConfig)) -> SystemConfig {
        let mut c = cfg();
        f(&mut c);
        c
    }

    #[test]
    fn b1_cdf_edges() {
        let c = cfg();
        assert_eq!(cdf_gamma_b1(0.0, &c), 0.0);
        assert_eq!(cdf_gamma_b1(f64::INFINITY, &c), 1.0);
        let unit = c.a1 * c.rho() * c.direct_gain();
        assert_relative_eq!(cdf_gamma_b1(unit, &c), 1.0 - (-1.0f64).exp(), max_relative = 1e-14);
    }

    #[test]
    fn b2_cdf_edges() {
        let c = with(|c| c.n = 30);
        assert_eq!(cdf_gamma_b2_low(0.0, &c).unwrap(), 0.0);
        assert_eq!(cdf_gamma_b2_low(-1.0, &c).unwrap(), 0.0);
        assert_eq!(cdf_gamma_b2_low(4.0, &c).unwrap(), 1.0);
        assert_eq!(cdf_gamma_b2_high(0.0, &c).unwrap(), 0.0);
        let same = with(|c| c.m2 = 3.0);
        assert!(cdf_gamma_b2_high(0.5, &same).is_err());
    }

    #[test]
    fn cdfs_are_monotone() {
        for n in [1, 3, 30] {
            for rho_db in [60.0, 90.0, 120.0] {
                let c = with(|c| {
                    c.n = n;
                    c.rho_db = rho_db
                });
                let mut prev_l = 0.0;
                let mut prev_h = 0.0;
                for i in 0..=1000 {
                    let x = 4.2 * i as f64 / 1000.0;
                    let l = cdf_gamma_b2_low(x, &c).unwrap();
                    let h = cdf_gamma_b2_high(x, &c).unwrap();
                    assert!((0.0..=1.0).contains(&l) && l >= prev_l - 1e-15);
                    assert!((0.0..=1.0).contains(&h) && h >= prev_h - 1e-15);
                    prev_l = l;
                    prev_h = h;
                }
            }
        }
    }

    #[test]
    fn high_snr_cdf_single_element_reduces() {
        // m̃ = 3, (4·3)^{-1}: F = γ(2, 2√3·y)/4 with y = √(x/(ρ(a₂−a₁x)L))
        let c = with(|c| c.rho_db = 100.0);
        let x = 0.3;
        let y = (x / (c.rho() * (c.a2 - c.a1 * x) * c.reflect_gain_b2())).sqrt();
        let z = 2.0 * 3f64.sqrt() * y;
        let expect = 0.25 * (1.0 - (-z).exp() * (1.0 + z));
        assert_relative_eq!(cdf_gamma_b2_high(x, &c).unwrap(), expect, max_relative = 1e-10);
    }

    #[test]
    fn sop1_trivial_limits() {
        let a = Analyzer::new(&with(|c| {
            c.r1 = 0.0;
            c.rho_e_db = -400.0
        }))
        .unwrap();
        assert!(a.sop_user1() < 1e-30);
        let lo = Analyzer::new(&with(|c| c.rho_db = 200.0)).unwrap();
        assert!(lo.sop_user1() < 1e-10);
    }

    #[test]
    fn sop2_certain_outage_above_ceiling() {
        let a = Analyzer::new(&with(|c| c.rho_e_db = 120.0)).unwrap();
        assert!(a.y2() >= 4.0);
        assert_eq!(a.sop_user2(Sop2Regime::Low).unwrap().value, 1.0);
        assert_eq!(a.sop_user2(Sop2Regime::High).unwrap().value, 1.0);
    }

    #[test]
    fn sop2_high_needs_distinct_shapes() {
        let a = Analyzer::new(&with(|c| c.m2 = 3.0)).unwrap();
        assert!(a.sop_user2(Sop2Regime::High).is_err());
        let auto = Analyzer::new(&with(|c| {
            c.m2 = 3.0;
            c.rho_db = 80.0
        }))
        .unwrap();
        assert_eq!(auto.sop_user2(Sop2Regime::Auto).unwrap().method, Method::LowSnr);
    }

    #[test]
    fn regime_switch() {
        let lo = Analyzer::new(&with(|c| c.rho_db = 30.0)).unwrap();
        assert_eq!(lo.resolve_regime(Sop2Regime::Auto), Sop2Regime::Low);
        let hi = Analyzer::new(&with(|c| c.rho_db = 30.5)).unwrap();
        assert_eq!(hi.resolve_regime(Sop2Regime::Auto), Sop2Regime::High);
    }

    #[test]
    fn network_composition() {
        for rho_db in [20.0, 40.0, 80.0] {
            let a = Analyzer::new(&with(|c| {
                c.n = 3;
                c.rho_db = rho_db
            }))
            .unwrap();
            let p1 = a.sop_user1();
            let p2 = a.sop_user2(Sop2Regime::Auto).unwrap().value;
            let net = a.sop_network().unwrap().value;
            assert_relative_eq!(net, 1.0 - (1.0 - p1) * (1.0 - p2), max_relative = 1e-14);
            assert!(net >= p1.max(p2));
        }
    }

    #[test]
    fn sop1_nondecreasing_in_n() {
        let mut prev = 0.0;
        for n in 1..=64 {
            let p = Analyzer::new(&with(|c| c.n = n)).unwrap().sop_user1();
            assert!(p >= prev, "N = {n}");
            prev = p;
        }
    }

    #[test]
    fn sop2_low_nonincreasing_in_rho() {
        let mut prev = 1.0;
        for i in 0..40 {
            let a = Analyzer::new(&with(|c| {
                c.n = 30;
                c.rho_db = 20.0 + 2.0 * i as f64
            }))
            .unwrap();
            let p = a.sop_user2(Sop2Regime::Low).unwrap().value;
            assert!(p <= prev + 1e-12);
            prev = p;
        }
    }

    #[test]
    fn asymptotic_user1_scales_inversely() {
        let a = Analyzer::new(&with(|c| c.rho_db = 50.0)).unwrap();
        let b = Analyzer::new(&with(|c| c.rho_db = 50.0 + 10.0 * 2f64.log10())).unwrap();
        let va = a.asymptotic_sop(Which::User1).unwrap().value;
        let vb = b.asymptotic_sop(Which::User1).unwrap().value;
        assert_relative_eq!(va / vb, 2.0, max_relative = 1e-12);
    }

    #[test]
    fn asymptotic_log_slopes() {
        for (n, order) in [(1usize, 1.0), (3, 3.0)] {
            let at = |db: f64| {
                Analyzer::new(&with(|c| {
                    c.n = n;
                    c.rho_db = db
                }))
                .unwrap()
            };
            let (r0, r1) = (90.0, 100.0);
            let s1 = (at(r1).asymptotic_sop(Which::User1).unwrap().value.log10()
                - at(r0).asymptotic_sop(Which::User1).unwrap().value.log10())
                / ((r1 - r0) / 10.0);
            let s2 = (at(r1).asymptotic_sop(Which::User2).unwrap().value.log10()
                - at(r0).asymptotic_sop(Which::User2).unwrap().value.log10())
                / ((r1 - r0) / 10.0);
            assert!((s1 + 1.0).abs() < 1e-6, "{s1}");
            assert!((s2 + order).abs() < 1e-6, "{s2}");
        }
    }

    #[test]
    fn network_asymptote_branches() {
        let a = Analyzer::new(&with(|c| c.n = 3)).unwrap();
        let net = a.asymptotic_sop(Which::Network).unwrap();
        assert!(!net.tie);
        assert_eq!(net.value, a.asymptotic_sop(Which::User1).unwrap().value);

        let tie = Analyzer::new(&cfg()).unwrap().asymptotic_sop(Which::Network).unwrap();
        assert!(tie.tie);

        let half = Analyzer::new(&with(|c| {
            c.m1 = 0.5;
            c.m2 = 1.0
        }))
        .unwrap();
        let v = half.asymptotic_sop(Which::Network).unwrap();
        assert_eq!(v.value, half.asymptotic_sop(Which::User2).unwrap().value);
    }

    #[test]
    fn floor_value_and_clamp() {
        let c = cfg();
        let a = Analyzer::new(&c).unwrap();
        let expect = 2f64.powf(0.1) * 100f64.powf(-2.5) * 50f64.powf(-2.5) / 20f64.powf(-3.5);
        assert_relative_eq!(a.sop1_floor(), expect, max_relative = 1e-12);
        let big = Analyzer::new(&with(|c| {
            c.n = 64;
            c.d_e = 1.0;
            c.d_1 = 1.0
        }))
        .unwrap();
        assert_eq!(big.sop1_floor(), 1.0);
    }

    #[test]
    fn sop1_approaches_floor_when_snrs_tie() {
        // The fixed 2^{R₁}−1 term decays like 1/ρ; at 140 dB it is negligible.
        let a = Analyzer::new(&with(|c| {
            c.rho_db = 140.0;
            c.rho_e_db = 140.0
        }))
        .unwrap();
        let floor = a.sop1_floor();
        assert!((a.sop_user1() / floor - 1.0).abs() < 0.01);
    }

    #[test]
    fn diversity_summary() {
        let s = Analyzer::new(&with(|c| c.n = 3)).unwrap().diversity_and_slopes();
        assert_eq!((s.diversity_user2, s.diversity_network), (3.0, 1.0));
        assert_eq!((s.slope_user1, s.slope_user2), (1.0, 0.0));
        let h = Analyzer::new(&with(|c| {
            c.m1 = 0.5;
            c.m2 = 0.5
        }))
        .unwrap()
        .diversity_and_slopes();
        assert_eq!((h.diversity_user2, h.diversity_network), (0.5, 0.5));
    }

    #[test]
    fn eve_rate_properties() {
        let tiny = Analyzer::new(&with(|c| c.rho_e_db = -100.0)).unwrap();
        assert!(tiny.ergodic_rate_eve(2).unwrap() < 1e-9);
        let a = Analyzer::new(&with(|c| {
            c.n = 30;
            c.rho_e_db = 60.0
        }))
        .unwrap();
        assert!(a.ergodic_rate_eve(2).unwrap() > a.ergodic_rate_eve(1).unwrap());
        let mut prev_n = 0.0;
        for n in [1, 4, 8, 16, 32] {
            let mut prev_r = 0.0;
            for re in [30.0, 45.0, 60.0, 75.0, 90.0] {
                let r = Analyzer::new(&with(|c| {
                    c.n = n;
                    c.rho_e_db = re
                }))
                .unwrap()
                .ergodic_rate_eve(1)
                .unwrap();
                assert!(r >= prev_r, "N = {n}, rho_e = {re}");
                prev_r = r;
                if re == 60.0 {
                    assert!(r >= prev_n);
                    prev_n = r;
                }
            }
        }
    }

    #[test]
    fn eve_rate_weak_limit_is_mean_snr() {
        // log₂(1+γ) ≈ γ/ln 2 for tiny γ.
        let a = Analyzer::new(&with(|c| {
            c.n = 30;
            c.rho_e_db = 30.0
        }))
        .unwrap();
        let mean = a.config().a2 * a.config().rho_e() * a.mu() * a.config().reflect_gain_e();
        let r = a.ergodic_rate_eve(2).unwrap();
        assert_relative_eq!(r, mean / LN_2, max_relative = 1e-3);
    }

    #[test]
    fn user_rates_limits() {
        let a = Analyzer::new(&with(|c| c.rho_db = 110.0)).unwrap();
        let asym = a.ergodic_rate_user1_asymptotic();
        assert!((a.ergodic_rate_user(1).unwrap() - asym).abs() < 0.01);
        let b = Analyzer::new(&with(|c| {
            c.n = 30;
            c.rho_db = 160.0
        }))
        .unwrap();
        assert!((b.ergodic_rate_user(2).unwrap() - 5f64.log2()).abs() < 1e-3);
    }

    #[test]
    fn jensen_without_eve() {
        let c = with(|c| {
            c.n = 30;
            c.rho_e_db = -300.0
        });
        let a = Analyzer::new(&c).unwrap();
        let g = a.mu2() * c.rho() * c.reflect_gain_b2();
        let expect = ((g + 1.0) / (c.a1 * g + 1.0)).log2();
        assert_relative_eq!(
            a.asc(2, AscMethod::Jensen).unwrap().value,
            expect,
            max_relative = 1e-12
        );
        assert!(matches!(a.asc(1, AscMethod::Jensen), Err(Error::MethodMismatch(_))));
        assert_relative_eq!(
            a.asc_asymptotic(2, AscMethod::Jensen).unwrap(),
            5f64.log2(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn user1_asymptote_gains_two_bits_per_quadrupling() {
        let at = |db| {
            Analyzer::new(&with(|c| c.rho_db = db))
                .unwrap()
                .asc_asymptotic(1, AscMethod::Quadrature)
                .unwrap()
        };
        let d = at(60.0 + 10.0 * 4f64.log10()) - at(60.0);
        assert_relative_eq!(d, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn asc_slopes_where_high_snr_holds() {
        let at = |db| {
            let a = Analyzer::new(&with(|c| {
                c.n = 30;
                c.rho_db = db;
                c.rho_e_db = 30.0
            }))
            .unwrap();
            (
                a.asc(1, AscMethod::Quadrature).unwrap().value,
                a.asc(2, AscMethod::Quadrature).unwrap().value,
            )
        };
        let r = 100.0;
        let (u1a, u2a) = at(r);
        let (u1b, u2b) = at(r + 10.0 * 2f64.log10());
        assert!((u1b - u1a - 1.0).abs() < 0.02);
        assert!((u2b - u2a).abs() < 0.02);
    }

    #[test]
    fn as_printed_variants_differ() {
        let c = with(|c| {
            c.n = 30;
            c.rho_db = 60.0
        });
        let p = with(|c| {
            c.n = 30;
            c.rho_db = 60.0;
            c.variant = FormulaVariant::AsPrinted
        });
        let a = Analyzer::new(&c).unwrap();
        let b = Analyzer::new(&p).unwrap();
        assert!(a.ergodic_rate_user1_asymptotic() > b.ergodic_rate_user1_asymptotic());
        assert!(a.ergodic_rate_user(2).unwrap() != b.ergodic_rate_user(2).unwrap());
        assert!(
            a.asc(2, AscMethod::Jensen).unwrap().value != b.asc(2, AscMethod::Jensen).unwrap().value
        );
    }
}
