//! Seeded, parallel Monte-Carlo estimators.
//!
//! Trials are grouped in fixed blocks of [`BLOCK_TRIALS`]; block `b` draws
//! from substream `b` of the master seed and blocks are reduced in index
//! order, so estimates do not depend on how many worker threads run.

use crate::channel::{
    expected_gain_squared, substream, ChannelSampler, SinrModel, SystemConfig,
};
use crate::error::{Error, Result};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::LN_2;

pub const BLOCK_TRIALS: u64 = 4096;

/// Environment variable holding the worker-thread count (0 = automatic).
pub const THREADS_ENV: &str = "IRS_NOMA_THREADS";

pub const MIN_TRIALS: u64 = 1_000;
pub const MIN_CDF_TRIALS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EveMode {
    /// Eve's cascaded gain is drawn with every trial.
    #[default]
    RandomEve,
    /// Eve's squared gain is pinned to its mean `β²μ`.
    MeanEve,
}

impl EveMode {
    pub fn tag(self) -> &'static str {
        match self {
            EveMode::RandomEve => "random_eve",
            EveMode::MeanEve => "mean_eve",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
    pub eve_mode: EveMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SopEstimates {
    pub user1: McEstimate,
    pub user2: McEstimate,
    pub network: McEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscEstimates {
    /// Mean of the clamped per-trial secrecy rate.
    pub asc1: McEstimate,
    pub asc2: McEstimate,
    /// Difference of the ergodic-rate means, without clamping.
    pub asc1_unclamped: McEstimate,
    pub asc2_unclamped: McEstimate,
    pub rate_b1: McEstimate,
    pub rate_b2: McEstimate,
    pub rate_e1: McEstimate,
    pub rate_e2: McEstimate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmaEstimates {
    pub sop1: McEstimate,
    pub sop2: McEstimate,
    pub asc1: McEstimate,
    pub asc2: McEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    pub grid: Vec<f64>,
    pub probs: Vec<f64>,
    pub trials: u64,
}

impl EmpiricalCdf {
    /// Largest absolute gap to `f` over the grid.
    pub fn sup_distance<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.grid
            .iter()
            .zip(&self.probs)
            .map(|(&x, &p)| (f(x) - p).abs())
            .fold(0.0, f64::max)
    }
}

/// Builds the global worker pool from [`THREADS_ENV`]. Returns the count
/// requested (0 when left to rayon).
pub fn configure_threads_from_env() -> Result<usize> {
    let n = match std::env::var(THREADS_ENV) {
        Ok(s) => s.trim().parse::<usize>().map_err(|_| {
            Error::InvalidConfig(format!("{THREADS_ENV} must be a nonnegative integer, got `{s}`"))
        })?,
        Err(_) => 0,
    };
    // A pool may already exist (e.g. inside a test harness); keep it.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(n)
}

fn check_trials(trials: u64, min: u64) -> Result<()> {
    if trials < min {
        return Err(Error::InvalidConfig(format!(
            "at least {min} trials are required, got {trials}"
        )));
    }
    Ok(())
}

/// Runs `f(rng, count)` for each block and returns the results in block
/// order.
fn run_blocks<T, F>(trials: u64, seed: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let blocks = trials.div_ceil(BLOCK_TRIALS);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let count = BLOCK_TRIALS.min(trials - b * BLOCK_TRIALS);
            let mut rng = substream(seed, b);
            f(&mut rng, count)
        })
        .collect()
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
struct KahanSum {
    sum: f64,
    comp: f64,
}

impl KahanSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Per-block first and second raw moments of one quantity.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    sum: f64,
    sumsq: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.sum += x;
        self.sumsq += x * x;
    }
}

fn reduce_moments<const K: usize>(blocks: &[[Moments; K]], k: usize) -> (f64, f64) {
    let mut s = KahanSum::default();
    let mut q = KahanSum::default();
    for b in blocks {
        s.add(b[k].sum);
        q.add(b[k].sumsq);
    }
    (s.value(), q.value())
}

fn mean_estimate(sum: f64, sumsq: f64, trials: u64, seed: u64, eve_mode: EveMode) -> McEstimate {
    let n = trials as f64;
    let mean = sum / n;
    let var = if trials > 1 {
        ((sumsq - n * mean * mean) / (n - 1.0)).max(0.0)
    } else {
        0.0
    };
    McEstimate {
        value: mean,
        std_error: (var / n).sqrt(),
        trials,
        seed,
        eve_mode,
    }
}

fn proportion(count: u64, trials: u64, seed: u64, eve_mode: EveMode) -> McEstimate {
    let p = count as f64 / trials as f64;
    McEstimate {
        value: p,
        std_error: (p * (1.0 - p) / trials as f64).sqrt(),
        trials,
        seed,
        eve_mode,
    }
}

fn pinned_eve_sq(cfg: &SystemConfig) -> Result<f64> {
    Ok(cfg.beta * cfg.beta * expected_gain_squared(&cfg.pair_e()?, cfg.n)?)
}

// [x]⁺ of the secrecy rate in bits, from ln(1+γ) values.
fn secrecy_rate(ln_b: f64, ln_e: f64) -> f64 {
    ((ln_b - ln_e) / LN_2).max(0.0)
}

/// Secrecy outage of both users and of the network.
pub fn estimate_sop(
    cfg: &SystemConfig,
    trials: u64,
    seed: u64,
    eve_mode: EveMode,
) -> Result<SopEstimates> {
    cfg.validate()?;
    check_trials(trials, MIN_TRIALS)?;
    let sampler = ChannelSampler::new(cfg)?;
    let model = SinrModel::new(cfg);
    let pinned = match eve_mode {
        EveMode::MeanEve => Some(pinned_eve_sq(cfg)?),
        EveMode::RandomEve => None,
    };
    let (r1, r2) = (cfg.r1, cfg.r2);
    let counts = run_blocks(trials, seed, |rng, count| {
        let mut c = [0u64; 3];
        for _ in 0..count {
            let g = sampler.draw_gains(rng, pinned.is_none());
            let e_sq = pinned.unwrap_or_else(|| {
                let e = g.h_hat_e.unwrap_or(0.0);
                e * e
            });
            let c1 = secrecy_rate(
                model.gamma_b1(g.h_b1_sq).ln_1p(),
                model.gamma_e(1, e_sq).ln_1p(),
            );
            let c2 = secrecy_rate(
                model.gamma_b2(g.h_hat_b2).ln_1p(),
                model.gamma_e(2, e_sq).ln_1p(),
            );
            let o1 = c1 < r1;
            let o2 = c2 < r2;
            c[0] += o1 as u64;
            c[1] += o2 as u64;
            c[2] += (o1 || o2) as u64;
        }
        c
    });
    let total = counts.iter().fold([0u64; 3], |mut acc, c| {
        for k in 0..3 {
            acc[k] += c[k];
        }
        acc
    });
    Ok(SopEstimates {
        user1: proportion(total[0], trials, seed, eve_mode),
        user2: proportion(total[1], trials, seed, eve_mode),
        network: proportion(total[2], trials, seed, eve_mode),
    })
}

/// Ergodic rates and average secrecy capacities, Eve drawn every trial.
pub fn estimate_asc(cfg: &SystemConfig, trials: u64, seed: u64) -> Result<AscEstimates> {
    cfg.validate()?;
    check_trials(trials, MIN_TRIALS)?;
    let sampler = ChannelSampler::new(cfg)?;
    let model = SinrModel::new(cfg);
    let blocks = run_blocks(trials, seed, |rng, count| {
        // rate_b1, rate_b2, rate_e1, rate_e2, asc1, asc2, diff1, diff2
        let mut m = [Moments::default(); 8];
        for _ in 0..count {
            let g = sampler.draw_gains(rng, true);
            let e = g.h_hat_e.unwrap_or(0.0);
            let ln_b1 = model.gamma_b1(g.h_b1_sq).ln_1p();
            let ln_b2 = model.gamma_b2(g.h_hat_b2).ln_1p();
            let ln_e1 = model.gamma_e(1, e * e).ln_1p();
            let ln_e2 = model.gamma_e(2, e * e).ln_1p();
            m[0].push(ln_b1 / LN_2);
            m[1].push(ln_b2 / LN_2);
            m[2].push(ln_e1 / LN_2);
            m[3].push(ln_e2 / LN_2);
            m[4].push(secrecy_rate(ln_b1, ln_e1));
            m[5].push(secrecy_rate(ln_b2, ln_e2));
            m[6].push((ln_b1 - ln_e1) / LN_2);
            m[7].push((ln_b2 - ln_e2) / LN_2);
        }
        m
    });
    let est = |k| {
        let (s, q) = reduce_moments(&blocks, k);
        mean_estimate(s, q, trials, seed, EveMode::RandomEve)
    };
    Ok(AscEstimates {
        rate_b1: est(0),
        rate_b2: est(1),
        rate_e1: est(2),
        rate_e2: est(3),
        asc1: est(4),
        asc2: est(5),
        asc1_unclamped: est(6),
        asc2_unclamped: est(7),
    })
}

/// Which cascaded equivalent gain to sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GainLink {
    User2,
    Eve,
}

/// Sample mean of `ĥ²` for the chosen reflected link (includes β²).
pub fn estimate_gain_second_moment(
    cfg: &SystemConfig,
    link: GainLink,
    trials: u64,
    seed: u64,
) -> Result<McEstimate> {
    cfg.validate()?;
    check_trials(trials, MIN_TRIALS)?;
    let sampler = ChannelSampler::new(cfg)?;
    let blocks = run_blocks(trials, seed, |rng, count| {
        let mut m = [Moments::default(); 1];
        for _ in 0..count {
            let g = sampler.draw_gains(rng, link == GainLink::Eve);
            let h = match link {
                GainLink::User2 => g.h_hat_b2,
                GainLink::Eve => g.h_hat_e.unwrap_or(0.0),
            };
            m[0].push(h * h);
        }
        m
    });
    let (s, q) = reduce_moments(&blocks, 0);
    Ok(mean_estimate(s, q, trials, seed, EveMode::RandomEve))
}

/// Empirical CDF of `γ_B2` at the points of a sorted grid.
pub fn empirical_cdf_gamma_b2(
    cfg: &SystemConfig,
    trials: u64,
    grid: &[f64],
    seed: u64,
) -> Result<EmpiricalCdf> {
    cfg.validate()?;
    check_trials(trials, MIN_CDF_TRIALS)?;
    if grid.is_empty() || grid.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(Error::InvalidConfig("CDF grid must be nonempty and sorted".into()));
    }
    let sampler = ChannelSampler::new(cfg)?;
    let model = SinrModel::new(cfg);
    let bins = grid.len() + 1;
    let hists = run_blocks(trials, seed, |rng, count| {
        let mut h = vec![0u64; bins];
        for _ in 0..count {
            let g = sampler.draw_gains(rng, false);
            let x = model.gamma_b2(g.h_hat_b2);
            h[grid.partition_point(|&v| v < x)] += 1;
        }
        h
    });
    let mut total = vec![0u64; bins];
    for h in &hists {
        for (t, v) in total.iter_mut().zip(h) {
            *t += v;
        }
    }
    let mut acc = 0u64;
    let probs = total[..grid.len()]
        .iter()
        .map(|&c| {
            acc += c;
            acc as f64 / trials as f64
        })
        .collect();
    Ok(EmpiricalCdf {
        grid: grid.to_vec(),
        probs,
        trials,
    })
}

/// Negated least-squares slope of `log₁₀ P` against `log₁₀ ρ`.
pub fn fit_loglog_slope(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::Degenerate(format!(
            "slope fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if let Some(&(r, p)) = points.iter().find(|(_, p)| !(*p > 0.0) || !p.is_finite()) {
        return Err(Error::Degenerate(format!(
            "probability {p} at {r} dB cannot be placed on a log axis"
        )));
    }
    let lo = points.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    if hi - lo < 10.0 {
        return Err(Error::Degenerate(format!(
            "points span {:.3} dB, need at least 10 dB",
            hi - lo
        )));
    }
    let n = points.len() as f64;
    let xs: Vec<f64> = points.iter().map(|p| p.0 / 10.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.log10()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Ok(-sxy / sxx)
}

/// Time-sharing OMA companion: each user gets half the resource at full
/// power, Eve sees the same half-rate split.
pub fn oma_baseline(cfg: &SystemConfig, trials: u64, seed: u64) -> Result<OmaEstimates> {
    cfg.validate()?;
    check_trials(trials, MIN_TRIALS)?;
    let sampler = ChannelSampler::new(cfg)?;
    let rho = cfg.rho();
    let rho_e = cfg.rho_e();
    let direct = cfg.direct_gain();
    let model = SinrModel::new(cfg);
    let (cas_b2, cas_e) = (model.cascade_b2(), model.cascade_e());
    let (r1, r2) = (cfg.r1, cfg.r2);
    let blocks = run_blocks(trials, seed, |rng, count| {
        let mut out = [0u64; 2];
        let mut m = [Moments::default(); 2];
        for _ in 0..count {
            let g = sampler.draw_gains(rng, true);
            let e = g.h_hat_e.unwrap_or(0.0);
            let ln_e = (rho_e * e * e * cas_e).ln_1p();
            let ln_b1 = (rho * g.h_b1_sq * direct).ln_1p();
            let ln_b2 = (rho * g.h_hat_b2 * g.h_hat_b2 * cas_b2).ln_1p();
            let c1 = 0.5 * secrecy_rate(ln_b1, ln_e);
            let c2 = 0.5 * secrecy_rate(ln_b2, ln_e);
            out[0] += (c1 < r1) as u64;
            out[1] += (c2 < r2) as u64;
            m[0].push(c1);
            m[1].push(c2);
        }
        (out, m)
    });
    let mut total = [0u64; 2];
    for (c, _) in &blocks {
        total[0] += c[0];
        total[1] += c[1];
    }
    let moments: Vec<[Moments; 2]> = blocks.iter().map(|(_, m)| *m).collect();
    let asc = |k| {
        let (s, q) = reduce_moments(&moments, k);
        mean_estimate(s, q, trials, seed, EveMode::RandomEve)
    };
    Ok(OmaEstimates {
        sop1: proportion(total[0], trials, seed, EveMode::RandomEve),
        sop2: proportion(total[1], trials, seed, EveMode::RandomEve),
        asc1: asc(0),
        asc2: asc(1),
    })
}
