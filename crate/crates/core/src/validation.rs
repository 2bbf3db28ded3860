//! Cross-checks of the closed forms against simulation and independent
//! numerics. Each criterion reports its measured values and a verdict.

use crate::analytic::{Analyzer, AscMethod};
use crate::channel::{expected_gain_squared, gain_squared_oracle, PairStats, SystemConfig};
use crate::error::Result;
use crate::montecarlo::{
    empirical_cdf_gamma_b2, estimate_asc, estimate_gain_second_moment, estimate_sop,
    fit_loglog_slope, EveMode, GainLink,
};
use crate::oracles::{hyp2f1_minus1_direct, marcum_half_by_integration};
use crate::specfun::{gauss_laguerre_rule, hyp2f1_at_minus1, marcum_q_half, SeriesControl};
use crate::sweep::{figure_preset, ConfigEntries, DEFAULT_FIGURE_TRIALS};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::fmt;
use std::time::Instant;

pub const CRITERIA: usize = 11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Budget {
    /// A tenth of the trials and doubled tolerances.
    Quick,
    Full,
}

impl Budget {
    fn trials(self, full: u64) -> u64 {
        match self {
            Budget::Quick => full / 10,
            Budget::Full => full,
        }
    }

    fn tol(self, full: f64) -> f64 {
        match self {
            Budget::Quick => 2.0 * full,
            Budget::Full => full,
        }
    }
}

/// Deliberate corruption for exercising the failure path.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Fault {
    /// Multiplies every closed-form second moment when set.
    pub moment_scale: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} criterion {:>2} {}: {} [{:.2} s]",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub results: Vec<CriterionResult>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["criterion", "name", "passed", "seconds", "detail"])?;
        for r in &self.results {
            w.write_record([
                r.id.to_string(),
                r.name.to_string(),
                r.passed.to_string(),
                format!("{:.3}", r.seconds),
                r.detail.clone(),
            ])?;
        }
        w.into_inner()
            .map_err(|e| std::io::Error::other(e.to_string()).into())
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            writeln!(f, "{r}")?;
        }
        let failed = self.results.iter().filter(|r| !r.passed).count();
        write!(f, "{} of {} criteria passed", self.results.len() - failed, self.results.len())
    }
}

pub fn criterion_name(id: usize) -> &'static str {
    match id {
        1 => "moment identity",
        2 => "simulated second moment",
        3 => "user-1 outage with mean eavesdropper",
        4 => "low-SNR CDF of user 2",
        5 => "diversity orders",
        6 => "user-1 outage floor",
        7 => "secrecy capacity agreement",
        8 => "high-SNR slopes",
        9 => "growth in N",
        10 => "special-function oracles",
        11 => "determinism",
        _ => "unknown",
    }
}

/// Runs every criterion in order.
pub fn validate_report(cfg: &SystemConfig, budget: Budget, fault: Fault) -> Report {
    Report {
        results: (1..=CRITERIA)
            .map(|id| run_criterion(id, cfg, budget, fault))
            .collect(),
    }
}

/// Runs one criterion; internal errors count as a failure.
pub fn run_criterion(id: usize, cfg: &SystemConfig, budget: Budget, fault: Fault) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => moment_identity(budget, fault),
        2 => simulated_moment(cfg, budget, fault),
        3 => mean_eve_outage(cfg, budget),
        4 => low_snr_cdf(cfg, budget),
        5 => diversity_orders(cfg, budget),
        6 => outage_floor(cfg, budget),
        7 => capacity_agreement(cfg, budget),
        8 => high_snr_slopes(cfg, budget),
        9 => growth_in_n(cfg),
        10 => special_functions(budget),
        11 => determinism(budget),
        _ => Ok((false, format!("no criterion {id}"))),
    };
    let (passed, detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    CriterionResult {
        id,
        name: criterion_name(id),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

type Outcome = Result<(bool, String)>;

fn scaled_moment(pair: &PairStats, n: usize, fault: Fault) -> Result<f64> {
    Ok(expected_gain_squared(pair, n)? * fault.moment_scale.unwrap_or(1.0))
}

fn moment_identity(budget: Budget, fault: Fault) -> Outcome {
    let tol = budget.tol(1e-8);
    let shapes = [0.5, 1.0, 2.0, 3.0];
    let mut worst: (f64, String) = (0.0, String::new());
    for &ma in &shapes {
        for &mb in &shapes {
            let pair = PairStats::new(ma, mb)?;
            for n in [1, 2, 3, 5, 10, 30] {
                let got = scaled_moment(&pair, n, fault)?;
                let want = gain_squared_oracle(&pair, n);
                let rel = ((got - want) / want).abs();
                if !(rel <= worst.0) {
                    worst = (rel, format!("m=({ma},{mb}) N={n}"));
                }
            }
        }
    }
    Ok((
        worst.0 <= tol,
        format!("max relative error {:.3e} at {} (tol {tol:e})", worst.0, worst.1),
    ))
}

fn simulated_moment(cfg: &SystemConfig, budget: Budget, fault: Fault) -> Outcome {
    let trials = budget.trials(1_000_000);
    let limit = budget.tol(3.0);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0002);
    let mut worst = 0.0f64;
    let mut parts = Vec::new();
    for k in 0..5 {
        let mut c = cfg.clone();
        c.m1 = rng.random_range(0.5..=4.0);
        c.m2 = rng.random_range(0.5..=4.0);
        c.m3 = rng.random_range(0.5..=4.0);
        c.n = rng.random_range(1..=40);
        c.beta = 1.0 - 0.5 * rng.random::<f64>();
        let (link, pair) = if k % 2 == 0 {
            (GainLink::User2, c.pair_b2()?)
        } else {
            (GainLink::Eve, c.pair_e()?)
        };
        let want = c.beta * c.beta * scaled_moment(&pair, c.n, fault)?;
        let est = estimate_gain_second_moment(&c, link, trials, 0x5EED_0100 + k)?;
        let z = (est.value - want).abs() / est.std_error;
        worst = worst.max(z);
        parts.push(format!("{z:.2}"));
    }
    Ok((
        worst <= limit,
        format!("|z| = [{}] over {trials} draws (limit {limit})", parts.join(", ")),
    ))
}

fn mean_eve_outage(cfg: &SystemConfig, budget: Budget) -> Outcome {
    let trials = budget.trials(1_000_000);
    let limit = budget.tol(3.0);
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [1usize, 3] {
        for (i, rho) in [10.0, 20.0, 30.0, 40.0].into_iter().enumerate() {
            let mut c = cfg.clone();
            c.n = n;
            c.rho_db = rho;
            c.rho_e_db = 10.0;
            let p = Analyzer::new(&c)?.sop_user1();
            let seed = 0x5EED_0300 + 10 * n as u64 + i as u64;
            let mc = estimate_sop(&c, trials, seed, EveMode::MeanEve)?.user1.value;
            // standard error under the closed form
            let se = (p * (1.0 - p) / trials as f64).sqrt();
            let diff = (mc - p).abs();
            ok &= diff <= limit * se;
            let z = if se > 0.0 { diff / se } else if diff == 0.0 { 0.0 } else { f64::INFINITY };
            parts.push(format!("N={n} {rho}dB: {p:.5} vs {mc:.5} (z={z:.2})"));
        }
    }
    Ok((ok, format!("{}; {trials} trials, limit {limit} se", parts.join("; "))))
}

fn low_snr_cdf(cfg: &SystemConfig, budget: Budget) -> Outcome {
    let trials = budget.trials(1_000_000);
    let tol = budget.tol(0.02);
    let mut c = cfg.clone();
    c.n = 30;
    c.rho_db = 20.0;
    let an = Analyzer::new(&c)?;
    let pair = an.pair_b2();
    let lam = pair.lam(c.n);
    let scale = c.n as f64 * (1.0 - pair.eps) * c.rho() * c.reflect_gain_b2();
    let top = (lam.sqrt() + 6.0).powi(2);
    let grid: Vec<f64> = (0..200)
        .map(|j| {
            let x = top * j as f64 / 199.0;
            c.a2 * scale * x / (c.a1 * scale * x + 1.0)
        })
        .collect();
    let emp = empirical_cdf_gamma_b2(&c, trials, &grid, 0x5EED_0400)?;
    let mut err = None;
    let d = emp.sup_distance(|x| match an.cdf_gamma_b2_low(x) {
        Ok(v) => v,
        Err(e) => {
            err.get_or_insert(e);
            f64::NAN
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok((d <= tol, format!("sup distance {d:.4} over 200 points (tol {tol})")))
}

fn diversity_orders(cfg: &SystemConfig, budget: Budget) -> Outcome {
    let trials = budget.trials(10_000_000);
    let tol = budget.tol(0.10);
    let rhos = [30.0, 35.0, 40.0, 45.0, 50.0];
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [1usize, 3] {
        let mut p1 = Vec::new();
        let mut p2 = Vec::new();
        let mut order2 = 0.0;
        for (i, &rho) in rhos.iter().enumerate() {
            let mut c = cfg.clone();
            c.n = n;
            c.rho_db = rho;
            c.rho_e_db = 10.0;
            order2 = c.pair_b2()?.m_c * n as f64;
            let s = estimate_sop(&c, trials, 0x5EED_0500 + 10 * n as u64 + i as u64, EveMode::MeanEve)?;
            p1.push((rho, s.user1.value));
            p2.push((rho, s.user2.value));
        }
        for (user, pts, target) in [(1, &p1, 1.0), (2, &p2, order2)] {
            match fit_loglog_slope(pts) {
                Ok(d) => {
                    let good = ((d - target) / target).abs() <= tol;
                    ok &= good;
                    parts.push(format!("user {user} N={n}: {d:.3} (target {target})"));
                }
                Err(e) => {
                    ok = false;
                    parts.push(format!("user {user} N={n}: no fit ({e})"));
                }
            }
        }
        let ends = |p: &[(f64, f64)]| format!("{:.3e}..{:.3e}", p[0].1, p[p.len() - 1].1);
        parts.push(format!("N={n} SOP over 30..50 dB: user 1 {}, user 2 {}", ends(&p1), ends(&p2)));
    }
    Ok((ok, format!("{}; {trials} trials per point, tol {:.0}%", parts.join("; "), 100.0 * tol)))
}

fn outage_floor(cfg: &SystemConfig, budget: Budget) -> Outcome {
    let tol = budget.tol(0.01);
    let mut c = cfg.clone();
    c.n = 1;
    c.rho_db = 60.0;
    c.rho_e_db = 60.0;
    let an = Analyzer::new(&c)?;
    let p = an.sop_user1();
    let floor = an.sop1_floor();
    let rel = ((p - floor) / floor).abs();
    Ok((
        rel <= tol,
        format!("SOP {p:.6e} vs floor {floor:.6e}, relative gap {rel:.3e} (tol {tol})"),
    ))
}

fn capacity_agreement(cfg: &SystemConfig, budget: Budget) -> Outcome {
    let trials = budget.trials(1_000_000);
    let (t1, t2, t_ceil) = (budget.tol(0.05), budget.tol(0.3), budget.tol(0.01));
    let mut base = cfg.clone();
    base.n = 30;
    base.rho_e_db = 30.0;
    let mut ok = true;
    let mut parts = Vec::new();
    for (i, rho) in [20.0, 30.0, 40.0].into_iter().enumerate() {
        let mut c = base.clone();
        c.rho_db = rho;
        let an = Analyzer::new(&c)?;
        let a1 = an.asc(1, AscMethod::Quadrature)?.value;
        let q = an.asc(2, AscMethod::Quadrature)?.value;
        let j = an.asc(2, AscMethod::Jensen)?.value;
        let mc = estimate_asc(&c, trials, 0x5EED_0700 + i as u64)?;
        let (m1, m2) = (mc.asc1.value, mc.asc2.value);
        ok &= (a1 - m1).abs() <= t1
            && (q - j).abs() <= t2
            && (q - m2).abs() <= t2
            && (j - m2).abs() <= t2;
        parts.push(format!(
            "{rho}dB: asc1 {a1:.4}/{m1:.4}, asc2 quad {q:.4} jensen {j:.4} sim {m2:.4}"
        ));
    }
    let mut c = base.clone();
    c.rho_db = 80.0;
    let an = Analyzer::new(&c)?;
    let q = an.asc(2, AscMethod::Quadrature)?.value;
    let qc = an.asc_asymptotic(2, AscMethod::Quadrature)?;
    let j = an.asc(2, AscMethod::Jensen)?.value;
    let jc = an.asc_asymptotic(2, AscMethod::Jensen)?;
    ok &= (q - qc).abs() <= t_ceil && (j - jc).abs() <= t_ceil;
    parts.push(format!(
        "80dB: quad {q:.5} ceiling {qc:.5}, jensen {j:.5} ceiling {jc:.5}"
    ));
    Ok((ok, format!("{}; {trials} trials", parts.join("; "))))
}

fn high_snr_slopes(cfg: &SystemConfig, budget: Budget) -> Outcome {
    let (t1, t2) = (budget.tol(0.05), budget.tol(0.02));
    let mut c = cfg.clone();
    c.n = 30;
    c.rho_e_db = 30.0;
    let mut at = |rho: f64| -> Result<(f64, f64)> {
        c.rho_db = rho;
        let an = Analyzer::new(&c)?;
        Ok((
            an.asc(1, AscMethod::Quadrature)?.value,
            an.asc(2, AscMethod::Quadrature)?.value,
        ))
    };
    let (a50, b50) = at(50.0)?;
    let (a60, b60) = at(60.0)?;
    let span = 10f64.log2();
    let s1 = (a60 - a50) / span;
    let s2 = (b60 - b50) / span;
    Ok((
        (s1 - 1.0).abs() <= t1 && s2.abs() <= t2,
        format!(
            "asc1 {a50:.4} -> {a60:.4}, slope {s1:.4} (target 1 ± {t1}); \
             asc2 {b50:.4} -> {b60:.4}, slope {s2:.4} (target 0 ± {t2})"
        ),
    ))
}

fn growth_in_n(cfg: &SystemConfig) -> Outcome {
    let mut c = cfg.clone();
    c.m1 = 3.0;
    c.m3 = 1.0;
    c.rho_db = 90.0;
    c.rho_e_db = 70.0;
    let pair = c.pair_e()?;
    let mut mu_prev = 0.0;
    let mut sop_prev = 0.0;
    let mut mu_ok = true;
    let mut sop_ok = true;
    let mut first_bad = String::new();
    for n in 1..=64usize {
        c.n = n;
        let mu = expected_gain_squared(&pair, n)?;
        let sop = Analyzer::new(&c)?.sop_user1();
        if !(mu > mu_prev) {
            mu_ok = false;
            first_bad.push_str(&format!(" mu not increasing at N={n};"));
        }
        if sop < sop_prev {
            sop_ok = false;
            first_bad.push_str(&format!(" SOP decreasing at N={n};"));
        }
        mu_prev = mu;
        sop_prev = sop;
    }
    c.n = 1;
    let s1 = Analyzer::new(&c)?.sop_user1();
    Ok((
        mu_ok && sop_ok,
        format!(
            "mu(1..64) {} increasing, SOP {:.4e} -> {sop_prev:.4e} {}{first_bad}",
            if mu_ok { "strictly" } else { "not" },
            s1,
            if sop_ok { "nondecreasing" } else { "not monotone" },
        ),
    ))
}

fn special_functions(budget: Budget) -> Outcome {
    let (t_q, t_f, t_l) = (budget.tol(1e-8), budget.tol(1e-8), budget.tol(1e-9));

    let mut q_err = 0.0f64;
    for i in 0..50 {
        let a = 0.25 + 0.5 * (i % 10) as f64;
        let b = 0.2 + 1.3 * (i / 10) as f64 + 0.07 * (i % 3) as f64;
        let got = marcum_q_half(a, b)?;
        q_err = q_err.max((got - marcum_half_by_integration(a, b)).abs());
    }

    // Parameter triples of the cascaded-moment constants, restricted to
    // those where the plain series at −1 is summable.
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_1000);
    let mut f_err = 0.0f64;
    let mut count = 0;
    while count < 100 {
        let x: f64 = rng.random_range(0.5..=5.0);
        let y: f64 = rng.random_range(0.5..=5.0);
        let (mc, md) = if x <= y { (x, y) } else { (y, x) };
        let j = rng.random_range(0..=2) as f64;
        let (a, b, c) = (2.0 * mc + j, mc - md + 0.5 + j, mc + md + 0.5 + j);
        if c - a - b <= -0.5 {
            continue;
        }
        let got = hyp2f1_at_minus1(a, b, c, SeriesControl::default())?;
        let want = hyp2f1_minus1_direct(a, b, c)?;
        f_err = f_err.max(((got - want) / want).abs());
        count += 1;
    }

    let rule = gauss_laguerre_rule(100)?;
    let mut l_err = 0.0f64;
    let mut fact = 1.0;
    for k in 0..=10 {
        if k > 0 {
            fact *= k as f64;
        }
        let m = rule.integrate(|x| x.powi(k));
        l_err = l_err.max(((m - fact) / fact).abs());
    }

    Ok((
        q_err <= t_q && f_err <= t_f && l_err <= t_l,
        format!(
            "Marcum max abs error {q_err:.2e} (50 points, tol {t_q:e}); \
             2F1 max rel error {f_err:.2e} (100 triples, tol {t_f:e}); \
             Laguerre moments max rel error {l_err:.2e} (tol {t_l:e})"
        ),
    ))
}

fn determinism(budget: Budget) -> Outcome {
    let trials = budget.trials(DEFAULT_FIGURE_TRIALS);
    let entries = ConfigEntries::default();
    let render = |threads: usize| -> Result<Vec<u8>> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| crate::error::Error::InvalidConfig(e.to_string()))?;
        pool.install(|| figure_preset("fig2", &entries, trials, 42)?.to_csv())
    };
    let a = render(1)?;
    let b = render(1)?;
    let c = render(3)?;
    let same = a == b && a == c;
    Ok((
        same,
        format!(
            "fig2 seed 42, {trials} trials: {} bytes, repeat {}, 1 vs 3 threads {}",
            a.len(),
            if a == b { "identical" } else { "differs" },
            if a == c { "identical" } else { "differs" },
        ),
    ))
}
