//! Parameter sweeps, figure presets and table output.

pub mod config;
pub mod presets;
pub mod table;

pub use config::{config_echo, noise_power_dbm, parse_config, parse_config_str, ConfigEntries};
pub use presets::{figure_preset, Preset, DEFAULT_FIGURE_TRIALS};
pub use table::{read_meta, reproduce, Column, MetricTable, TableMeta};

use crate::analytic::{Analyzer, AscMethod, Which};
use crate::channel::SystemConfig;
use crate::error::{Error, Result};
use crate::montecarlo::{estimate_asc, estimate_sop, oma_baseline, EveMode, McEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    RhoDb,
    RhoEDb,
    N,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::RhoDb => "rho_db",
            Axis::RhoEDb => "rho_e_db",
            Axis::N => "N",
        }
    }

    pub fn from_name(s: &str) -> Option<Axis> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rho_db" | "rho" => Some(Axis::RhoDb),
            "rho_e_db" | "rho_e" => Some(Axis::RhoEDb),
            "n" => Some(Axis::N),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Metric {
    Sop1,
    Sop2,
    SopNet,
    Asc1,
    Asc2,
    Rates,
    Asymptotes,
    Floors,
    Oma,
}

impl Metric {
    pub const ALL: [Metric; 9] = [
        Metric::Sop1,
        Metric::Sop2,
        Metric::SopNet,
        Metric::Asc1,
        Metric::Asc2,
        Metric::Rates,
        Metric::Asymptotes,
        Metric::Floors,
        Metric::Oma,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Sop1 => "sop1",
            Metric::Sop2 => "sop2",
            Metric::SopNet => "sop_net",
            Metric::Asc1 => "asc1",
            Metric::Asc2 => "asc2",
            Metric::Rates => "rates",
            Metric::Asymptotes => "asymptotes",
            Metric::Floors => "floors",
            Metric::Oma => "oma",
        }
    }

    pub fn from_name(s: &str) -> Option<Metric> {
        let s = s.trim().to_ascii_lowercase();
        Metric::ALL.into_iter().find(|m| m.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub values: Vec<f64>,
    pub metrics: Vec<Metric>,
    /// Monte-Carlo trials per row and series; 0 skips simulation.
    pub trials: u64,
    pub seed: u64,
    /// Repeats the sweep for each element count, suffixing columns `_N{n}`.
    pub n_values: Option<Vec<usize>>,
    /// Sets `ρ_e = ρ` on every row.
    pub tie_eve: bool,
    pub eve_mode: EveMode,
}

impl SweepSpec {
    pub fn new(axis: Axis, values: Vec<f64>, metrics: Vec<Metric>) -> Self {
        Self {
            axis,
            values,
            metrics,
            trials: 0,
            seed: 0,
            n_values: None,
            tie_eve: false,
            eve_mode: EveMode::RandomEve,
        }
    }

    fn has(&self, m: Metric) -> bool {
        self.metrics.contains(&m)
    }

    fn check(&self) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidConfig("sweep needs at least one axis value".into()));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("axis values must be finite".into()));
        }
        if self.values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidConfig(
                "axis values must be strictly increasing".into(),
            ));
        }
        if self.axis == Axis::N {
            if self.n_values.is_some() {
                return Err(Error::InvalidConfig(
                    "n_values cannot be combined with an N axis".into(),
                ));
            }
            if self.values.iter().any(|v| !(*v >= 1.0) || v.fract() != 0.0) {
                return Err(Error::InvalidConfig(
                    "N axis values must be positive integers".into(),
                ));
            }
        }
        if self.tie_eve && self.axis == Axis::RhoEDb {
            return Err(Error::InvalidConfig(
                "tie_eve fixes rho_e_db and cannot sweep it".into(),
            ));
        }
        if let Some(ns) = &self.n_values {
            if ns.is_empty() || ns.contains(&0) {
                return Err(Error::InvalidConfig("n_values must be positive".into()));
            }
        }
        if self.metrics.is_empty() {
            return Err(Error::InvalidConfig("no metrics requested".into()));
        }
        if self.has(Metric::Oma) && self.trials == 0 {
            return Err(Error::InvalidConfig(
                "the OMA baseline is simulated and needs trials > 0".into(),
            ));
        }
        Ok(())
    }
}

/// Parses `a:b:step` or a comma-separated list.
pub fn parse_values(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidConfig(format!("cannot read axis values `{text}`"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() == 3 {
        let nums: Vec<f64> = parts
            .iter()
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad())?;
        let (a, b, step) = (nums[0], nums[1], nums[2]);
        if !(step > 0.0) || !(b >= a) {
            return Err(bad());
        }
        let count = ((b - a) / step + 1e-9).floor() as usize;
        return Ok((0..=count).map(|i| a + i as f64 * step).collect());
    }
    if parts.len() != 1 {
        return Err(bad());
    }
    text.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect()
}

/// Row seed from the table seed, row index and element count.
fn row_seed(seed: u64, row: usize, n: usize) -> u64 {
    let mut z = seed
        ^ (row as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (n as u64).wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

struct Builder {
    columns: Vec<Column>,
    rows: usize,
}

impl Builder {
    fn push(&mut self, name: String, method: &str, value: f64, se: Option<f64>) {
        let idx = match self.columns.iter().position(|c| c.name == name) {
            Some(i) => i,
            None => {
                self.columns.push(Column {
                    name,
                    method: String::new(),
                    values: Vec::with_capacity(self.rows),
                    std_error: se.map(|_| Vec::with_capacity(self.rows)),
                });
                self.columns.len() - 1
            }
        };
        let col = &mut self.columns[idx];
        if !col.method.split('|').any(|m| m == method) {
            if !col.method.is_empty() {
                col.method.push('|');
            }
            col.method.push_str(method);
        }
        col.values.push(value);
        if let (Some(v), Some(s)) = (col.std_error.as_mut(), se) {
            v.push(s);
        }
    }

    fn mc(&mut self, name: &str, suffix: &str, est: &McEstimate) {
        self.push(
            format!("{name}_mc{suffix}"),
            "monte_carlo",
            est.value,
            Some(est.std_error),
        );
    }
}

/// Evaluates the requested metrics at every axis point.
pub fn run_sweep(cfg: &SystemConfig, spec: &SweepSpec) -> Result<MetricTable> {
    spec.check()?;
    cfg.validate()?;
    let mut b = Builder {
        columns: Vec::new(),
        rows: spec.values.len(),
    };
    let ns: Vec<Option<usize>> = match &spec.n_values {
        Some(ns) => ns.iter().map(|&n| Some(n)).collect(),
        None => vec![None],
    };
    let asym_bases: Vec<Metric> = {
        let bases = [Metric::Sop1, Metric::Sop2, Metric::SopNet, Metric::Asc1, Metric::Asc2];
        let chosen: Vec<Metric> = bases.into_iter().filter(|m| spec.has(*m)).collect();
        if chosen.is_empty() {
            bases.to_vec()
        } else {
            chosen
        }
    };

    for n_fixed in &ns {
        let suffix = n_fixed.map(|n| format!("_N{n}")).unwrap_or_default();
        for (row, &x) in spec.values.iter().enumerate() {
            let mut c = cfg.clone();
            if let Some(n) = n_fixed {
                c.n = *n;
            }
            match spec.axis {
                Axis::RhoDb => c.rho_db = x,
                Axis::RhoEDb => c.rho_e_db = x,
                Axis::N => c.n = x as usize,
            }
            if spec.tie_eve {
                c.rho_e_db = c.rho_db;
            }
            let an = Analyzer::new(&c)?;
            let has_mt = an.pair_b2().m_tilde.is_some();
            let col = |name: &str| format!("{name}{suffix}");

            for &m in &spec.metrics {
                match m {
                    Metric::Sop1 => b.push(col("sop1"), "closed_form", an.sop_user1(), None),
                    Metric::Sop2 => {
                        let t = an.sop_user2(c.sop2_regime)?;
                        b.push(col("sop2"), t.method.tag(), t.value, None);
                    }
                    Metric::SopNet => {
                        let t = an.sop_network()?;
                        b.push(col("sop_net"), t.method.tag(), t.value, None);
                    }
                    Metric::Asc1 => {
                        let t = an.asc(1, AscMethod::Quadrature)?;
                        b.push(col("asc1"), t.method.tag(), t.value, None);
                    }
                    Metric::Asc2 => {
                        let q = an.asc(2, AscMethod::Quadrature)?;
                        b.push(col("asc2_quadrature"), q.method.tag(), q.value, None);
                        let j = an.asc(2, AscMethod::Jensen)?;
                        b.push(col("asc2_jensen"), j.method.tag(), j.value, None);
                    }
                    Metric::Rates => {
                        b.push(col("rate_b1"), "closed_form", an.ergodic_rate_user(1)?, None);
                        b.push(col("rate_b2"), "quadrature", an.ergodic_rate_user(2)?, None);
                        b.push(col("rate_e1"), "quadrature", an.ergodic_rate_eve(1)?, None);
                        b.push(col("rate_e2"), "quadrature", an.ergodic_rate_eve(2)?, None);
                    }
                    Metric::Asymptotes => {
                        for base in &asym_bases {
                            match base {
                                Metric::Sop1 => {
                                    let a = an.asymptotic_sop(Which::User1)?;
                                    b.push(col("asym_sop1"), "asymptotic", a.value, None);
                                }
                                Metric::Sop2 if has_mt => {
                                    let a = an.asymptotic_sop(Which::User2)?;
                                    b.push(col("asym_sop2"), "asymptotic", a.value, None);
                                }
                                Metric::SopNet if has_mt => {
                                    let a = an.asymptotic_sop(Which::Network)?;
                                    let tag = if a.tie { "asymptotic_tie" } else { "asymptotic" };
                                    b.push(col("asym_sop_net"), tag, a.value, None);
                                }
                                Metric::Asc1 => {
                                    let v = an.asc_asymptotic(1, AscMethod::Quadrature)?;
                                    b.push(col("asc1_asym"), "asymptotic", v, None);
                                }
                                Metric::Asc2 => {
                                    let q = an.asc_asymptotic(2, AscMethod::Quadrature)?;
                                    b.push(col("asc2_ceiling_quadrature"), "asymptotic", q, None);
                                    let j = an.asc_asymptotic(2, AscMethod::Jensen)?;
                                    b.push(col("asc2_ceiling_jensen"), "asymptotic", j, None);
                                }
                                _ => {}
                            }
                        }
                    }
                    Metric::Floors => {
                        b.push(col("sop1_floor"), "closed_form", an.sop1_floor(), None)
                    }
                    Metric::Oma => {}
                }
            }

            if spec.trials == 0 {
                continue;
            }
            let seed = row_seed(spec.seed, row, c.n);
            let wants_sop = spec.has(Metric::Sop1) || spec.has(Metric::Sop2) || spec.has(Metric::SopNet);
            if wants_sop {
                let s = estimate_sop(&c, spec.trials, seed, spec.eve_mode)?;
                if spec.has(Metric::Sop1) {
                    b.mc("sop1", &suffix, &s.user1);
                }
                if spec.has(Metric::Sop2) {
                    b.mc("sop2", &suffix, &s.user2);
                }
                if spec.has(Metric::SopNet) {
                    b.mc("sop_net", &suffix, &s.network);
                }
            }
            if spec.has(Metric::Asc1) || spec.has(Metric::Asc2) || spec.has(Metric::Rates) {
                let a = estimate_asc(&c, spec.trials, seed.wrapping_add(1))?;
                if spec.has(Metric::Asc1) {
                    b.mc("asc1", &suffix, &a.asc1);
                }
                if spec.has(Metric::Asc2) {
                    b.mc("asc2", &suffix, &a.asc2);
                }
                if spec.has(Metric::Rates) {
                    b.mc("rate_b1", &suffix, &a.rate_b1);
                    b.mc("rate_b2", &suffix, &a.rate_b2);
                    b.mc("rate_e1", &suffix, &a.rate_e1);
                    b.mc("rate_e2", &suffix, &a.rate_e2);
                }
            }
            if spec.has(Metric::Oma) {
                let o = oma_baseline(&c, spec.trials, seed.wrapping_add(2))?;
                b.mc("oma_sop1", &suffix, &o.sop1);
                b.mc("oma_sop2", &suffix, &o.sop2);
                b.mc("oma_asc1", &suffix, &o.asc1);
                b.mc("oma_asc2", &suffix, &o.asc2);
            }
        }
    }

    let rows = spec.values.len();
    if let Some(c) = b.columns.iter().find(|c| c.values.len() != rows) {
        return Err(Error::Degenerate(format!(
            "column `{}` has {} values for {rows} rows",
            c.name,
            c.values.len()
        )));
    }
    Ok(MetricTable {
        axis_name: spec.axis.name().to_string(),
        axis_values: spec.values.clone(),
        columns: b.columns,
        meta: TableMeta {
            config: cfg.clone(),
            spec: spec.clone(),
            preset: None,
        },
    })
}
