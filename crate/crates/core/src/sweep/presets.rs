//! Parameter sets behind the published figures.
//!
//! A preset fixes the swept axis, the series and a few configuration
//! values; anything in the user's config or overrides takes precedence
//! over the preset's configuration values. Setting `N` on a preset that
//! compares several element counts collapses it to that single count.

use super::config::ConfigEntries;
use super::{parse_values, run_sweep, Axis, Metric, MetricTable, SweepSpec};
use crate::error::{Error, Result};
use crate::montecarlo::EveMode;

pub const DEFAULT_FIGURE_TRIALS: u64 = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig8,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Fig2,
        Preset::Fig3,
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig6,
        Preset::Fig8,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6 => "fig6",
            Preset::Fig8 => "fig8",
        }
    }

    pub fn from_name(s: &str) -> Result<Preset> {
        let key = s.trim().to_ascii_lowercase();
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == key)
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }

    fn layout(self) -> (Axis, &'static str, &'static [Metric], Option<&'static [usize]>, bool, &'static str) {
        use Metric::*;
        match self {
            Preset::Fig2 => (Axis::RhoDb, "40:120:5", &[Sop1, Floors, Oma], Some(&[1, 3]), true, ""),
            Preset::Fig3 => (
                Axis::RhoDb,
                "20:100:5",
                &[Sop2, Oma],
                Some(&[3, 30]),
                false,
                "rho_e_db=10\nsop2_regime=low",
            ),
            Preset::Fig4 => (
                Axis::RhoDb,
                "40:120:5",
                &[Sop1, Sop2, Asymptotes],
                Some(&[1, 3]),
                false,
                "rho_e_db=10",
            ),
            Preset::Fig5 => (
                Axis::N,
                "1:64:1",
                &[Sop1, Sop2],
                None,
                false,
                "rho_db=90\nrho_e_db=70\nsop2_regime=low",
            ),
            Preset::Fig6 => (
                Axis::RhoDb,
                "40:120:5",
                &[Asc1, Asc2, Asymptotes],
                None,
                false,
                "N=30\nrho_e_db=30",
            ),
            Preset::Fig8 => (
                Axis::RhoDb,
                "40:120:10",
                &[Asc1, Asc2],
                Some(&[1, 2, 4, 8, 16, 32, 64]),
                true,
                "",
            ),
        }
    }
}

/// Configuration and sweep for `preset` under the user's entries.
pub fn preset_spec(
    preset: Preset,
    user: &ConfigEntries,
    trials: u64,
    seed: u64,
) -> Result<(crate::channel::SystemConfig, SweepSpec)> {
    let (axis, values, metrics, n_values, tie_eve, fixed) = preset.layout();
    let mut entries = ConfigEntries::parse(fixed)?;
    entries.overlay(user);
    let cfg = entries.build()?;
    let n_values = match n_values {
        Some(_) if user.sets_n() => Some(vec![cfg.n]),
        Some(ns) => Some(ns.to_vec()),
        None => None,
    };
    let spec = SweepSpec {
        axis,
        values: parse_values(values)?,
        metrics: metrics.to_vec(),
        trials,
        seed,
        n_values,
        tie_eve,
        eve_mode: EveMode::RandomEve,
    };
    Ok((cfg, spec))
}

pub fn figure_preset(
    name: &str,
    user: &ConfigEntries,
    trials: u64,
    seed: u64,
) -> Result<MetricTable> {
    let preset = Preset::from_name(name)?;
    let (cfg, spec) = preset_spec(preset, user, trials, seed)?;
    let mut table = run_sweep(&cfg, &spec)?;
    table.meta.preset = Some(preset.name().to_string());
    Ok(table)
}
