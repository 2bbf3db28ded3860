//! Flat `key=value` configuration files.
//!
//! One assignment per line (or several separated by commas), `#` starts a
//! comment. Unspecified keys keep their defaults. Absolute rate targets in
//! bit/s and a transmit power in dBm are converted using the bandwidth.

use crate::channel::{FormulaVariant, Sop2Regime, SystemConfig};
use crate::error::{Error, Result};
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Key {
    A1,
    A2,
    N,
    M1,
    M2,
    M3,
    D1,
    DB2,
    DE,
    DB1,
    Alpha1,
    AlphaB2,
    AlphaE,
    AlphaB1,
    RhoDb,
    RhoEDb,
    TxPowerDbm,
    R1,
    R2,
    RateTargetBps,
    R1Bps,
    R2Bps,
    Bandwidth,
    Beta,
    U1,
    U2,
    Sop2Regime,
    Variant,
}

impl Key {
    fn lookup(raw: &str) -> Option<Key> {
        let k = raw.trim().to_ascii_lowercase();
        Some(match k.as_str() {
            "a1" => Key::A1,
            "a2" => Key::A2,
            "n" => Key::N,
            "m1" => Key::M1,
            "m2" => Key::M2,
            "m3" => Key::M3,
            "d1" | "d_1" => Key::D1,
            "db2" | "d_b2" => Key::DB2,
            "de" | "d_e" => Key::DE,
            "db1" | "d_b1" => Key::DB1,
            "alpha1" | "alpha_1" => Key::Alpha1,
            "alphab2" | "alpha_b2" => Key::AlphaB2,
            "alphae" | "alpha_e" => Key::AlphaE,
            "alphab1" | "alpha_b1" => Key::AlphaB1,
            "rho_db" | "rho" => Key::RhoDb,
            "rho_e_db" | "rho_e" => Key::RhoEDb,
            "tx_power_dbm" => Key::TxPowerDbm,
            "r1" => Key::R1,
            "r2" => Key::R2,
            "rate_target_bps" => Key::RateTargetBps,
            "r1_bps" => Key::R1Bps,
            "r2_bps" => Key::R2Bps,
            "bandwidth_hz" | "bw" => Key::Bandwidth,
            "beta" => Key::Beta,
            "u1" => Key::U1,
            "u2" => Key::U2,
            "sop2_regime" => Key::Sop2Regime,
            "variant" => Key::Variant,
            _ => return None,
        })
    }

    // Keys that set the same field and cannot both be given.
    fn conflicts(self) -> &'static [Key] {
        match self {
            Key::RhoDb => &[Key::TxPowerDbm],
            Key::TxPowerDbm => &[Key::RhoDb],
            Key::R1 => &[Key::R1Bps, Key::RateTargetBps],
            Key::R2 => &[Key::R2Bps, Key::RateTargetBps],
            Key::R1Bps => &[Key::R1, Key::RateTargetBps],
            Key::R2Bps => &[Key::R2, Key::RateTargetBps],
            Key::RateTargetBps => &[Key::R1, Key::R2, Key::R1Bps, Key::R2Bps],
            _ => &[],
        }
    }
}

#[derive(Debug, Clone)]
struct Entry {
    key: Key,
    name: String,
    value: String,
    /// 1-based source line; 0 for command-line overrides.
    line: usize,
}

/// Parsed but not yet applied assignments.
#[derive(Debug, Clone, Default)]
pub struct ConfigEntries {
    entries: Vec<Entry>,
}

impl ConfigEntries {
    pub fn parse(text: &str) -> Result<Self> {
        let mut out = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("");
            for part in content.split(',') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                let (k, v) = part.split_once('=').ok_or_else(|| Error::Parse {
                    line,
                    message: format!("expected key=value, found `{part}`"),
                })?;
                let key = Key::lookup(k).ok_or_else(|| Error::Parse {
                    line,
                    message: format!("unknown key `{}`", k.trim()),
                })?;
                if let Some(prev) = out.entries.iter().find(|e| e.key == key) {
                    return Err(Error::Parse {
                        line,
                        message: format!("`{}` already set on line {}", k.trim(), prev.line),
                    });
                }
                if let Some(prev) = out.entries.iter().find(|e| key.conflicts().contains(&e.key)) {
                    return Err(Error::Parse {
                        line,
                        message: format!(
                            "`{}` conflicts with `{}` on line {}",
                            k.trim(),
                            prev.name,
                            prev.line
                        ),
                    });
                }
                out.entries.push(Entry {
                    key,
                    name: k.trim().to_string(),
                    value: v.trim().to_string(),
                    line,
                });
            }
        }
        Ok(out)
    }

    /// Applies `key=value`, replacing the same key and any key that sets
    /// the same field.
    pub fn set(&mut self, assignment: &str) -> Result<()> {
        let (k, v) = assignment.split_once('=').ok_or_else(|| {
            Error::InvalidConfig(format!("override `{assignment}` is not key=value"))
        })?;
        let key = Key::lookup(k)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown override key `{}`", k.trim())))?;
        self.entries
            .retain(|e| e.key != key && !key.conflicts().contains(&e.key));
        self.entries.push(Entry {
            key,
            name: k.trim().to_string(),
            value: v.trim().to_string(),
            line: 0,
        });
        Ok(())
    }

    /// Layers `other` on top, with the same replacement rule as [`set`](Self::set).
    pub fn overlay(&mut self, other: &ConfigEntries) {
        for e in &other.entries {
            self.entries
                .retain(|old| old.key != e.key && !e.key.conflicts().contains(&old.key));
            self.entries.push(e.clone());
        }
    }

    /// True when an assignment to the IRS element count is present.
    pub fn sets_n(&self) -> bool {
        self.entries.iter().any(|e| e.key == Key::N)
    }

    pub fn build(&self) -> Result<SystemConfig> {
        let mut cfg = SystemConfig::default();
        let get = |key: Key| self.entries.iter().find(|e| e.key == key);
        let err = |e: &Entry, message: String| {
            if e.line == 0 {
                Error::InvalidConfig(format!("override `{}`: {message}", e.name))
            } else {
                Error::Parse {
                    line: e.line,
                    message: format!("`{}`: {message}", e.name),
                }
            }
        };
        let real = |e: &Entry| -> Result<f64> {
            e.value
                .parse::<f64>()
                .map_err(|_| err(e, format!("`{}` is not a number", e.value)))
        };
        let count = |e: &Entry| -> Result<usize> {
            e.value
                .parse::<usize>()
                .map_err(|_| err(e, format!("`{}` is not a nonnegative integer", e.value)))
        };

        if let Some(e) = get(Key::Bandwidth) {
            cfg.bandwidth_hz = real(e)?;
            if !(cfg.bandwidth_hz > 0.0) {
                return Err(err(e, "bandwidth must be positive".into()));
            }
        }
        for e in &self.entries {
            match e.key {
                Key::A1 => cfg.a1 = real(e)?,
                Key::A2 => cfg.a2 = real(e)?,
                Key::N => cfg.n = count(e)?,
                Key::M1 => cfg.m1 = real(e)?,
                Key::M2 => cfg.m2 = real(e)?,
                Key::M3 => cfg.m3 = real(e)?,
                Key::D1 => cfg.d_1 = real(e)?,
                Key::DB2 => cfg.d_b2 = real(e)?,
                Key::DE => cfg.d_e = real(e)?,
                Key::DB1 => cfg.d_b1 = real(e)?,
                Key::Alpha1 => cfg.alpha_1 = real(e)?,
                Key::AlphaB2 => cfg.alpha_b2 = real(e)?,
                Key::AlphaE => cfg.alpha_e = real(e)?,
                Key::AlphaB1 => cfg.alpha_b1 = real(e)?,
                Key::RhoDb => cfg.rho_db = real(e)?,
                Key::RhoEDb => cfg.rho_e_db = real(e)?,
                Key::TxPowerDbm => {
                    cfg.rho_db = real(e)? - noise_power_dbm(cfg.bandwidth_hz);
                }
                Key::R1 => cfg.r1 = real(e)?,
                Key::R2 => cfg.r2 = real(e)?,
                Key::RateTargetBps => {
                    let r = real(e)? / cfg.bandwidth_hz;
                    cfg.r1 = r;
                    cfg.r2 = r;
                }
                Key::R1Bps => cfg.r1 = real(e)? / cfg.bandwidth_hz,
                Key::R2Bps => cfg.r2 = real(e)? / cfg.bandwidth_hz,
                Key::Bandwidth => {}
                Key::Beta => cfg.beta = real(e)?,
                Key::U1 => cfg.u1 = count(e)?,
                Key::U2 => cfg.u2 = count(e)?,
                Key::Sop2Regime => {
                    cfg.sop2_regime = match e.value.to_ascii_lowercase().as_str() {
                        "auto" => Sop2Regime::Auto,
                        "low" => Sop2Regime::Low,
                        "high" => Sop2Regime::High,
                        other => {
                            return Err(err(e, format!("expected auto, low or high, got `{other}`")))
                        }
                    }
                }
                Key::Variant => {
                    cfg.variant = match e.value.to_ascii_lowercase().as_str() {
                        "corrected" => FormulaVariant::Corrected,
                        "as_printed" => FormulaVariant::AsPrinted,
                        other => {
                            return Err(err(
                                e,
                                format!("expected corrected or as_printed, got `{other}`"),
                            ))
                        }
                    }
                }
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Thermal noise power `−174 + 10·log₁₀(BW)` in dBm.
pub fn noise_power_dbm(bandwidth_hz: f64) -> f64 {
    -174.0 + 10.0 * bandwidth_hz.log10()
}

pub fn parse_config_str(text: &str) -> Result<SystemConfig> {
    ConfigEntries::parse(text)?.build()
}

pub fn parse_config(path: &Path) -> Result<SystemConfig> {
    parse_config_str(&std::fs::read_to_string(path)?)
}

/// Every field of `cfg` as `key=value` pairs that parse back to the same
/// configuration.
pub fn config_echo(cfg: &SystemConfig) -> Vec<(&'static str, String)> {
    let regime = match cfg.sop2_regime {
        Sop2Regime::Auto => "auto",
        Sop2Regime::Low => "low",
        Sop2Regime::High => "high",
    };
    let variant = match cfg.variant {
        FormulaVariant::Corrected => "corrected",
        FormulaVariant::AsPrinted => "as_printed",
    };
    vec![
        ("a1", cfg.a1.to_string()),
        ("a2", cfg.a2.to_string()),
        ("N", cfg.n.to_string()),
        ("m1", cfg.m1.to_string()),
        ("m2", cfg.m2.to_string()),
        ("m3", cfg.m3.to_string()),
        ("d1", cfg.d_1.to_string()),
        ("dB2", cfg.d_b2.to_string()),
        ("dE", cfg.d_e.to_string()),
        ("dB1", cfg.d_b1.to_string()),
        ("alpha1", cfg.alpha_1.to_string()),
        ("alphaB2", cfg.alpha_b2.to_string()),
        ("alphaE", cfg.alpha_e.to_string()),
        ("alphaB1", cfg.alpha_b1.to_string()),
        ("rho_db", cfg.rho_db.to_string()),
        ("rho_e_db", cfg.rho_e_db.to_string()),
        ("R1", cfg.r1.to_string()),
        ("R2", cfg.r2.to_string()),
        ("bandwidth_hz", cfg.bandwidth_hz.to_string()),
        ("beta", cfg.beta.to_string()),
        ("u1", cfg.u1.to_string()),
        ("u2", cfg.u2.to_string()),
        ("sop2_regime", regime.to_string()),
        ("variant", variant.to_string()),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(parse_config_str("").unwrap(), SystemConfig::default());
        assert_eq!(
            parse_config_str("# only a comment\n\n").unwrap(),
            SystemConfig::default()
        );
    }

    #[test]
    fn reversed_allocation_is_rejected() {
        let e = parse_config_str("a1=0.6").unwrap_err();
        assert!(matches!(e, Error::InvalidConfig(_)));
        assert!(e.to_string().contains("a1 + a2") || e.to_string().contains("a1 < a2"));
        let e = parse_config_str("a1=0.6\na2=0.4").unwrap_err();
        assert!(e.to_string().contains("a1 < a2"), "{e}");
    }

    #[test]
    fn absolute_rate_target() {
        let c = parse_config_str("rate_target_bps=100000\nbandwidth_hz=1e6").unwrap();
        assert!((c.r1 - 0.1).abs() < 1e-15 && (c.r2 - 0.1).abs() < 1e-15);
        let c = parse_config_str("rate_target_bps=100000, bandwidth_hz=1e6").unwrap();
        assert!((c.r1 - 0.1).abs() < 1e-15);
    }

    #[test]
    fn transmit_power_conversion() {
        // −174 + 60 = −114 dBm of noise at 1 MHz
        let c = parse_config_str("tx_power_dbm=10").unwrap();
        assert!((c.rho_db - 124.0).abs() < 1e-12);
        assert!(parse_config_str("tx_power_dbm=10\nrho_db=30").is_err());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse_config_str("a1=0.2\nbogus=1").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
        match parse_config_str("\n\nN=three").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            e => panic!("{e}"),
        }
        match parse_config_str("m1=2\nm1=3").unwrap_err() {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
        assert!(parse_config_str("just text").is_err());
    }

    #[test]
    fn overrides_replace_conflicting_keys() {
        let mut e = ConfigEntries::parse("tx_power_dbm=10\nN=3").unwrap();
        e.set("rho_db=40").unwrap();
        let c = e.build().unwrap();
        assert_eq!((c.rho_db, c.n), (40.0, 3));
        assert!(e.set("nonsense").is_err());
        assert!(e.set("zzz=1").is_err());
    }

    #[test]
    fn echo_round_trips() {
        let c = SystemConfig {
            n: 17,
            rho_db: 33.3,
            rho_e_db: -0.1,
            beta: 0.9,
            sop2_regime: Sop2Regime::High,
            variant: FormulaVariant::AsPrinted,
            ..Default::default()
        };
        let text: String = config_echo(&c)
            .into_iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect();
        assert_eq!(parse_config_str(&text).unwrap(), c);
    }
}
