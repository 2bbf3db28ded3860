//! Scenario configuration, cascaded-fading statistics and channel sampling.

use crate::error::{domain, Error, Result};
use crate::specfun::{hyp2f1_at_minus1, ln_gamma, SeriesControl};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use rand::SeedableRng;
use std::f64::consts::PI;

/// Which form of a formula to evaluate where the printed expression and the
/// physically consistent one disagree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FormulaVariant {
    #[default]
    Corrected,
    AsPrinted,
}

/// Closed form used for the user-2 outage probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Sop2Regime {
    /// Low-SNR form up to 30 dB, high-SNR form above.
    #[default]
    Auto,
    Low,
    High,
}

/// Full scenario parameterization. SNRs are in dB, rate targets in
/// bits/s/Hz, distances in meters.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub a1: f64,
    pub a2: f64,
    pub n: usize,
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    pub d_b1: f64,
    pub d_1: f64,
    pub d_b2: f64,
    pub d_e: f64,
    pub alpha_b1: f64,
    pub alpha_1: f64,
    pub alpha_b2: f64,
    pub alpha_e: f64,
    pub rho_db: f64,
    pub rho_e_db: f64,
    pub r1: f64,
    pub r2: f64,
    pub bandwidth_hz: f64,
    pub beta: f64,
    /// Gauss–Laguerre order for Eve's ergodic rate.
    pub u1: usize,
    /// Chebyshev–Gauss order for user 2's ergodic rate.
    pub u2: usize,
    pub sop2_regime: Sop2Regime,
    pub variant: FormulaVariant,
}

impl Default for SystemConfig {
    fn default() -> Self {
        Self {
            a1: 0.2,
            a2: 0.8,
            n: 1,
            m1: 3.0,
            m2: 1.0,
            m3: 1.0,
            d_b1: 20.0,
            d_1: 100.0,
            d_b2: 10.0,
            d_e: 50.0,
            alpha_b1: 3.5,
            alpha_1: 2.5,
            alpha_b2: 2.5,
            alpha_e: 2.5,
            rho_db: 30.0,
            rho_e_db: 10.0,
            r1: 0.1,
            r2: 0.1,
            bandwidth_hz: 1e6,
            beta: 1.0,
            u1: 100,
            u2: 100,
            sop2_regime: Sop2Regime::Auto,
            variant: FormulaVariant::Corrected,
        }
    }
}

impl SystemConfig {
    /// Checks every structural invariant and reports the first violation.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        let finite = [
            ("a1", self.a1),
            ("a2", self.a2),
            ("m1", self.m1),
            ("m2", self.m2),
            ("m3", self.m3),
            ("d_b1", self.d_b1),
            ("d_1", self.d_1),
            ("d_b2", self.d_b2),
            ("d_e", self.d_e),
            ("alpha_b1", self.alpha_b1),
            ("alpha_1", self.alpha_1),
            ("alpha_b2", self.alpha_b2),
            ("alpha_e", self.alpha_e),
            ("rho_db", self.rho_db),
            ("rho_e_db", self.rho_e_db),
            ("r1", self.r1),
            ("r2", self.r2),
            ("bandwidth_hz", self.bandwidth_hz),
            ("beta", self.beta),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return bad(format!("{name} must be finite, got {v}"));
            }
        }
        if (self.a1 + self.a2 - 1.0).abs() > 1e-12 {
            return bad(format!(
                "a1 + a2 must equal 1, got {} + {} = {}",
                self.a1,
                self.a2,
                self.a1 + self.a2
            ));
        }
        if !(self.a1 > 0.0 && self.a1 < self.a2) {
            return bad(format!(
                "power allocation must satisfy 0 < a1 < a2, got a1 = {}, a2 = {}",
                self.a1, self.a2
            ));
        }
        if self.n == 0 {
            return bad("N must be at least 1".into());
        }
        for (name, m) in [("m1", self.m1), ("m2", self.m2), ("m3", self.m3)] {
            if m < 0.5 {
                return bad(format!("{name} must be at least 0.5, got {m}"));
            }
        }
        for (name, d) in [
            ("d_b1", self.d_b1),
            ("d_1", self.d_1),
            ("d_b2", self.d_b2),
            ("d_e", self.d_e),
        ] {
            if d <= 0.0 {
                return bad(format!("distance {name} must be positive, got {d}"));
            }
        }
        for (name, a) in [
            ("alpha_b1", self.alpha_b1),
            ("alpha_1", self.alpha_1),
            ("alpha_b2", self.alpha_b2),
            ("alpha_e", self.alpha_e),
        ] {
            if a < 2.0 {
                return bad(format!("path-loss exponent {name} must be at least 2, got {a}"));
            }
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return bad(format!("beta must lie in (0, 1], got {}", self.beta));
        }
        if self.r1 < 0.0 || self.r2 < 0.0 {
            return bad("rate targets must be nonnegative".into());
        }
        if self.bandwidth_hz <= 0.0 {
            return bad("bandwidth_hz must be positive".into());
        }
        if self.u1 == 0 || self.u1 > crate::specfun::MAX_LAGUERRE_ORDER || self.u2 == 0 {
            return bad(format!(
                "quadrature orders must satisfy 1 <= u1 <= {} and u2 >= 1",
                crate::specfun::MAX_LAGUERRE_ORDER
            ));
        }
        Ok(())
    }

    /// Legitimate transmit SNR ρ, linear.
    pub fn rho(&self) -> f64 {
        db_to_linear(self.rho_db)
    }

    /// Eve's transmit SNR ρ_e, linear.
    pub fn rho_e(&self) -> f64 {
        db_to_linear(self.rho_e_db)
    }

    /// Power fraction of user `i` (1 or 2).
    pub fn power_fraction(&self, user: usize) -> f64 {
        if user == 1 {
            self.a1
        } else {
            self.a2
        }
    }

    /// Direct-link path gain d_B1^{−α_B1}.
    pub fn direct_gain(&self) -> f64 {
        path_gain(self.d_b1, self.alpha_b1)
    }

    /// Reflected path gain towards user 2, β²·d₁^{−α₁}·d_B2^{−α_B2}.
    pub fn reflect_gain_b2(&self) -> f64 {
        self.beta * self.beta * path_gain(self.d_1, self.alpha_1) * path_gain(self.d_b2, self.alpha_b2)
    }

    /// Reflected path gain towards Eve, β²·d₁^{−α₁}·d_E^{−α_E}.
    pub fn reflect_gain_e(&self) -> f64 {
        self.beta * self.beta * path_gain(self.d_1, self.alpha_1) * path_gain(self.d_e, self.alpha_e)
    }

    /// Cascaded pair (m₁, m₂) behind user 2's equivalent channel.
    pub fn pair_b2(&self) -> Result<PairStats> {
        PairStats::new(self.m1, self.m2)
    }

    /// Cascaded pair (m₁, m₃) behind Eve's equivalent channel.
    pub fn pair_e(&self) -> Result<PairStats> {
        PairStats::new(self.m1, self.m3)
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// `d^{−α}`.
pub fn path_gain(d: f64, alpha: f64) -> f64 {
    d.powf(-alpha)
}

/// Constants of one cascaded pair `z = |g||h|` with shapes `(m_a, m_b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairStats {
    pub m_c: f64,
    pub m_d: f64,
    /// `E[z]²` for unit-power factors.
    pub eps: f64,
    /// Small-argument tail constant; absent when `m_c == m_d`.
    pub m_tilde: Option<f64>,
    pub ln_m_tilde: Option<f64>,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub ln_omega: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
}

/// The four components of ℧ and their signed total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mho {
    pub mho1: f64,
    pub mho2: f64,
    pub mho3: f64,
    pub mho4: f64,
    /// ℧₄ without the 1/k₁ factor, as it is usually printed.
    pub mho4_uncorrected: f64,
    pub total: f64,
}

impl PairStats {
    pub fn new(m_a: f64, m_b: f64) -> Result<Self> {
        if !(m_a >= 0.5) || !(m_b >= 0.5) || !m_a.is_finite() || !m_b.is_finite() {
            return Err(domain(
                "pair_stats",
                format!("shapes must be >= 0.5, got ({m_a}, {m_b})"),
            ));
        }
        let (m_c, m_d) = if m_a <= m_b { (m_a, m_b) } else { (m_b, m_a) };
        let ratio = |m: f64| ln_gamma(m + 0.5) - ln_gamma(m) - 0.5 * m.ln();
        let eps = (2.0 * (ratio(m_a) + ratio(m_b))).exp();

        let ln_m_tilde = (m_c != m_d).then(|| {
            0.5 * PI.ln() + (m_c - m_d + 1.0) * 4f64.ln() + m_c * (m_c * m_d).ln()
                + ln_gamma(2.0 * m_c)
                + ln_gamma(2.0 * m_d - 2.0 * m_c)
                - ln_gamma(m_c)
                - ln_gamma(m_d)
                - ln_gamma(m_d - m_c + 0.5)
        });

        let a = 2.0 * m_c;
        let b = m_c - m_d + 0.5;
        let c = m_c + m_d + 0.5;
        let d = 2.0 * (m_c * m_d).sqrt();
        let ln_omega = 0.5 * PI.ln() + (m_c - m_d + 1.0) * 4f64.ln() + m_c * (m_c * m_d).ln()
            + ln_gamma(2.0 * m_c)
            + ln_gamma(2.0 * m_d)
            - ln_gamma(m_c)
            - ln_gamma(m_d)
            - ln_gamma(c);
        let ctrl = SeriesControl::default();
        let k1 = hyp2f1_at_minus1(a, b, c, ctrl)?;
        let k2 = hyp2f1_at_minus1(a + 1.0, b + 1.0, c + 1.0, ctrl)?;
        let k3 = hyp2f1_at_minus1(a + 2.0, b + 2.0, c + 2.0, ctrl)?;
        Ok(Self {
            m_c,
            m_d,
            eps,
            m_tilde: ln_m_tilde.map(f64::exp),
            ln_m_tilde,
            a,
            b,
            c,
            d,
            ln_omega,
            k1,
            k2,
            k3,
        })
    }

    /// Noncentrality `λ = Nε/(1−ε)` of the normalized sum of `N` pairs.
    pub fn lam(&self, n: usize) -> f64 {
        n as f64 * self.eps / (1.0 - self.eps)
    }

    pub fn omega(&self) -> f64 {
        self.ln_omega.exp()
    }

    /// ℧ for an `N`-element sum.
    pub fn mho(&self, n: usize) -> Mho {
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let (k1, k2, k3) = (self.k1, self.k2, self.k3);
        let nf = n as f64;
        let d2 = d * d;
        let mho1 = (a * nf + 1.0) / d2;
        let mho2 = 4.0 * a * b * b * k2 * k2 / (c * c * d2 * k1 * k1) * (nf - 1.0);
        let mho3 = 4.0 * a * b * nf * k2 / (c * d2 * k1);
        let mho4_uncorrected =
            4.0 * (a + 1.0) * (b * b + b) / ((c * c + c) * d2) * k3 - 4.0 * b / (c * d2) * k2;
        let mho4 = mho4_uncorrected / k1;
        Mho {
            mho1,
            mho2,
            mho3,
            mho4,
            mho4_uncorrected,
            total: mho1 + mho2 - mho3 + mho4,
        }
    }
}

/// `E[Z²]` for `Z = Σ_{n≤N} |g_n||h_n|`, from the Laplace-transform
/// expansion `aNω^N d^{−aN} k₁^N ℧`, evaluated in log space.
pub fn expected_gain_squared(pair: &PairStats, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(domain("expected_gain_squared", "N must be at least 1"));
    }
    let mho = pair.mho(n).total;
    if !(mho > 0.0) {
        return Err(Error::Degenerate(format!(
            "mho = {mho} for pair ({}, {}) and N = {n}",
            pair.m_c, pair.m_d
        )));
    }
    let nf = n as f64;
    let ln_unit = pair.ln_omega - pair.a * pair.d.ln() + pair.k1.ln();
    let ln_val = (pair.a * nf).ln() + nf * ln_unit + mho.ln();
    if ln_val > f64::MAX.ln() {
        return Err(Error::Overflow {
            what: "expected_gain_squared",
            log_magnitude: ln_val,
        });
    }
    Ok(ln_val.exp())
}

/// `N + N(N−1)ε`, from `E[z²] = 1` and `E[z]² = ε`.
pub fn gain_squared_oracle(pair: &PairStats, n: usize) -> f64 {
    let nf = n as f64;
    nf + nf * (nf - 1.0) * pair.eps
}

/// `μ₁ = 2^{2m_c−1}(m_cm_d)^{m_c−½}Γ(m_c)Γ(m_d)`, the per-element growth
/// factor of the large-N second moment.
pub fn mu1_growth_factor(pair: &PairStats) -> f64 {
    let (mc, md) = (pair.m_c, pair.m_d);
    ((2.0 * mc - 1.0) * 2f64.ln() + (mc - 0.5) * (mc * md).ln() + ln_gamma(mc) + ln_gamma(md))
        .exp()
}

/// Nakagami-m magnitude with unit mean power.
pub fn sample_nakagami<R: Rng + ?Sized>(m: f64, rng: &mut R) -> Result<f64> {
    if !(m >= 0.5) {
        return Err(domain("sample_nakagami", format!("m = {m}")));
    }
    let g = Gamma::new(m, 1.0 / m).map_err(|e| domain("sample_nakagami", e.to_string()))?;
    Ok(g.sample(rng).sqrt())
}

/// Independent random stream `index` under master `seed`.
pub fn substream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One realization of every fading coefficient and the equivalent gains.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDraw {
    pub h: Vec<f64>,
    pub g_b2: Vec<f64>,
    pub g_e: Vec<f64>,
    pub h_b1_sq: f64,
    /// `β·Σ g_B2[n]·h[n]`.
    pub h_hat_b2: f64,
    /// `β·Σ g_E[n]·h[n]`, all reflections co-phased at Eve.
    pub h_hat_e: f64,
}

/// Equivalent gains only, without the per-element vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalentGains {
    pub h_hat_b2: f64,
    /// `None` when Eve's channel was not sampled.
    pub h_hat_e: Option<f64>,
    pub h_b1_sq: f64,
}

/// Precomputed fading distributions for a configuration.
///
/// Per element the draw order is `h`, `g_B2`, `g_E`; `|h_B1|²` follows the
/// last element.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    h: Gamma<f64>,
    g_b2: Gamma<f64>,
    g_e: Gamma<f64>,
    n: usize,
    beta: f64,
}

impl ChannelSampler {
    pub fn new(cfg: &SystemConfig) -> Result<Self> {
        let mk = |m: f64| {
            if !(m >= 0.5) {
                return Err(domain("sample_nakagami", format!("m = {m}")));
            }
            Gamma::new(m, 1.0 / m).map_err(|e| domain("sample_nakagami", e.to_string()))
        };
        Ok(Self {
            h: mk(cfg.m1)?,
            g_b2: mk(cfg.m2)?,
            g_e: mk(cfg.m3)?,
            n: cfg.n,
            beta: cfg.beta,
        })
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> ChannelDraw {
        let mut h = Vec::with_capacity(self.n);
        let mut g_b2 = Vec::with_capacity(self.n);
        let mut g_e = Vec::with_capacity(self.n);
        for _ in 0..self.n {
            h.push(self.h.sample(rng).sqrt());
            g_b2.push(self.g_b2.sample(rng).sqrt());
            g_e.push(self.g_e.sample(rng).sqrt());
        }
        let h_b1_sq: f64 = Exp1.sample(rng);
        let dot = |g: &[f64]| g.iter().zip(&h).map(|(x, y)| x * y).sum::<f64>();
        let h_hat_b2 = self.beta * dot(&g_b2);
        let h_hat_e = self.beta * dot(&g_e);
        ChannelDraw {
            h,
            g_b2,
            g_e,
            h_b1_sq,
            h_hat_b2,
            h_hat_e,
        }
    }

    /// Same stream consumption as [`draw`](Self::draw) when `with_eve` is
    /// set, without allocating.
    pub fn draw_gains<R: Rng + ?Sized>(&self, rng: &mut R, with_eve: bool) -> EquivalentGains {
        let mut s_b2 = 0.0;
        let mut s_e = 0.0;
        for _ in 0..self.n {
            let h = self.h.sample(rng).sqrt();
            s_b2 += h * self.g_b2.sample(rng).sqrt();
            if with_eve {
                s_e += h * self.g_e.sample(rng).sqrt();
            }
        }
        let h_b1_sq: f64 = Exp1.sample(rng);
        EquivalentGains {
            h_hat_b2: self.beta * s_b2,
            h_hat_e: with_eve.then_some(self.beta * s_e),
            h_b1_sq,
        }
    }
}

pub fn draw_channels<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Result<ChannelDraw> {
    Ok(ChannelSampler::new(cfg)?.draw(rng))
}

/// Instantaneous SINRs of one draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sinrs {
    pub gamma_b1: f64,
    pub gamma_b2: f64,
    pub gamma_e1: f64,
    pub gamma_e2: f64,
}

/// Precomputed linear SNRs and path gains for SINR evaluation.
#[derive(Debug, Clone, Copy)]
pub struct SinrModel {
    a1: f64,
    a2: f64,
    rho: f64,
    rho_e: f64,
    direct: f64,
    cascade_b2: f64,
    cascade_e: f64,
}

impl SinrModel {
    pub fn new(cfg: &SystemConfig) -> Self {
        Self {
            a1: cfg.a1,
            a2: cfg.a2,
            rho: cfg.rho(),
            rho_e: cfg.rho_e(),
            direct: cfg.direct_gain(),
            cascade_b2: path_gain(cfg.d_1, cfg.alpha_1) * path_gain(cfg.d_b2, cfg.alpha_b2),
            cascade_e: path_gain(cfg.d_1, cfg.alpha_1) * path_gain(cfg.d_e, cfg.alpha_e),
        }
    }

    pub fn gamma_b1(&self, h_b1_sq: f64) -> f64 {
        self.rho * self.a1 * h_b1_sq * self.direct
    }

    /// User 2 decodes its own signal treating user 1's as interference.
    pub fn gamma_b2(&self, h_hat_b2: f64) -> f64 {
        let x = h_hat_b2 * h_hat_b2 * self.cascade_b2;
        self.a2 * x / (self.a1 * x + 1.0 / self.rho)
    }

    /// Eve's SNR for user `i`'s signal given `ĥ_E²`.
    pub fn gamma_e(&self, user: usize, h_hat_e_sq: f64) -> f64 {
        let a = if user == 1 { self.a1 } else { self.a2 };
        self.rho_e * a * h_hat_e_sq * self.cascade_e
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn rho_e(&self) -> f64 {
        self.rho_e
    }

    pub fn direct(&self) -> f64 {
        self.direct
    }

    pub fn cascade_b2(&self) -> f64 {
        self.cascade_b2
    }

    pub fn cascade_e(&self) -> f64 {
        self.cascade_e
    }
}

pub fn instantaneous_sinrs(draw: &ChannelDraw, cfg: &SystemConfig) -> Sinrs {
    let m = SinrModel::new(cfg);
    let e_sq = draw.h_hat_e * draw.h_hat_e;
    Sinrs {
        gamma_b1: m.gamma_b1(draw.h_b1_sq),
        gamma_b2: m.gamma_b2(draw.h_hat_b2),
        gamma_e1: m.gamma_e(1, e_sq),
        gamma_e2: m.gamma_e(2, e_sq),
    }
}
