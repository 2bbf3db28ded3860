use clap::{Args, Parser, Subcommand, ValueEnum};
use irs_noma::analytic::{Analyzer, Which};
use irs_noma::montecarlo::{configure_threads_from_env, EveMode};
use irs_noma::sweep::{
    figure_preset, parse_values, run_sweep, Axis, ConfigEntries, Metric, MetricTable, SweepSpec,
    DEFAULT_FIGURE_TRIALS,
};
use irs_noma::validation::{validate_report, Budget, Fault};
use irs_noma::{Error, Result};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "irs-noma", version, about = "Secrecy outage and capacity of an IRS-aided NOMA downlink")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// key=value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    /// Monte-Carlo seed
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Monte-Carlo trials per point (0 disables simulation)
    #[arg(long)]
    trials: Option<u64>,
    /// Write the CSV here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override a configuration key, e.g. --override N=5
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Also write a gnuplot script next to --out
    #[arg(long)]
    plot_script: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Print derived channel constants, diversity orders and slopes
    Stats(Common),
    /// Sweep one parameter and tabulate metrics
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = AxisArg::RhoDb)]
        axis: AxisArg,
        /// `start:stop:step` or a comma-separated list
        #[arg(long)]
        values: String,
        /// Comma-separated subset of sop1,sop2,sop_net,asc1,asc2,rates,asymptotes,floors,oma
        #[arg(long, default_value = "sop1,sop2")]
        metrics: String,
        /// Repeat the sweep for these element counts
        #[arg(long)]
        n_values: Option<String>,
        /// Set the eavesdropper SNR equal to the transmit SNR
        #[arg(long)]
        tie_eve: bool,
        #[arg(long, value_enum, default_value_t = EveArg::Random)]
        eve_mode: EveArg,
    },
    /// Reproduce the table behind a figure (fig2, fig3, fig4, fig5, fig6, fig8)
    Figure {
        name: String,
        #[command(flatten)]
        common: Common,
    },
    /// Simulate a single operating point next to its closed forms
    Mc {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = EveArg::Random)]
        eve_mode: EveArg,
    },
    /// Check closed forms against simulation and reference numerics
    Validate {
        #[command(flatten)]
        common: Common,
        /// Fewer trials and looser tolerances
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AxisArg {
    RhoDb,
    RhoEDb,
    N,
}

#[derive(Clone, Copy, ValueEnum)]
enum EveArg {
    Random,
    Mean,
}

impl From<EveArg> for EveMode {
    fn from(e: EveArg) -> Self {
        match e {
            EveArg::Random => EveMode::RandomEve,
            EveArg::Mean => EveMode::MeanEve,
        }
    }
}

fn entries(common: &Common) -> Result<ConfigEntries> {
    let mut e = match &common.config {
        Some(p) => ConfigEntries::parse(&std::fs::read_to_string(p)?)?,
        None => ConfigEntries::default(),
    };
    for o in &common.overrides {
        e.set(o)?;
    }
    Ok(e)
}

fn emit(table: &MetricTable, common: &Common) -> Result<()> {
    let bytes = table.to_csv()?;
    match &common.out {
        Some(path) => {
            std::fs::write(path, &bytes)?;
            if common.plot_script {
                std::fs::write(path.with_extension("gp"), plot_script(table, path))?;
            }
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes)?;
            if common.plot_script {
                eprintln!("--plot-script needs --out");
            }
        }
    }
    Ok(())
}

fn plot_script(table: &MetricTable, csv: &Path) -> String {
    let file = csv.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default();
    let mut s = String::new();
    s.push_str("set datafile separator ','\nset datafile commentschars '#'\nset key outside\n");
    s.push_str(&format!("set xlabel '{}'\n", table.axis_name));
    if table.columns.iter().any(|c| c.name.contains("sop")) {
        s.push_str("set logscale y\n");
    }
    let mut plots = Vec::new();
    let mut idx = 2;
    for c in &table.columns {
        let style = if c.std_error.is_some() { "points" } else { "lines" };
        plots.push(format!("'{file}' using 1:{idx} skip 1 with {style} title '{}'", c.name));
        idx += if c.std_error.is_some() { 2 } else { 1 };
    }
    s.push_str(&format!("plot {}\n", plots.join(", \\\n     ")));
    s
}

fn stats(common: &Common) -> Result<()> {
    let cfg = entries(common)?.build()?;
    let an = Analyzer::new(&cfg)?;
    let (pb, pe) = (an.pair_b2(), an.pair_e());
    let summary = an.diversity_and_slopes();
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.10}")).unwrap_or_else(|| "undefined (m1 = m2)".into());
    println!("N                      {}", cfg.n);
    println!("eps (user 2)           {:.10}", pb.eps);
    println!("eps (Eve)              {:.10}", pe.eps);
    println!("lambda (user 2)        {:.10}", pb.lam(cfg.n));
    println!("lambda (Eve)           {:.10}", pe.lam(cfg.n));
    println!("m_s, m_l               {}, {}", pb.m_c, pb.m_d);
    println!("m_tilde                {}", opt(pb.m_tilde));
    println!("mu (Eve)               {:.10}", an.mu());
    println!("mu2 (user 2)           {:.10}", an.mu2());
    println!("diversity user 1       {}", summary.diversity_user1);
    println!("diversity user 2       {}", summary.diversity_user2);
    println!("diversity network      {}", summary.diversity_network);
    println!("high-SNR slope user 1  {}", summary.slope_user1);
    println!("high-SNR slope user 2  {}", summary.slope_user2);
    println!("user-1 floor (rho_e = rho) {:.6e}", summary.sop1_floor);
    println!("SOP user 1             {:.6e}", an.sop_user1());
    let s2 = an.sop_user2(cfg.sop2_regime)?;
    println!("SOP user 2             {:.6e} ({})", s2.value, s2.method.tag());
    if let Ok(a) = an.asymptotic_sop(Which::Network) {
        println!("asymptotic SOP network {:.6e}{}", a.value, if a.tie { " (tie)" } else { "" });
    }
    Ok(())
}

fn run(cli: Cli) -> Result<bool> {
    configure_threads_from_env()?;
    match cli.command {
        Command::Stats(common) => stats(&common)?,
        Command::Sweep {
            common,
            axis,
            values,
            metrics,
            n_values,
            tie_eve,
            eve_mode,
        } => {
            let cfg = entries(&common)?.build()?;
            let metrics = metrics
                .split(',')
                .map(|m| {
                    Metric::from_name(m)
                        .ok_or_else(|| Error::InvalidConfig(format!("unknown metric `{}`", m.trim())))
                })
                .collect::<Result<Vec<_>>>()?;
            let n_values = n_values
                .map(|s| {
                    s.split(',')
                        .map(|n| {
                            n.trim().parse::<usize>().map_err(|_| {
                                Error::InvalidConfig(format!("bad element count `{}`", n.trim()))
                            })
                        })
                        .collect::<Result<Vec<_>>>()
                })
                .transpose()?;
            let spec = SweepSpec {
                axis: match axis {
                    AxisArg::RhoDb => Axis::RhoDb,
                    AxisArg::RhoEDb => Axis::RhoEDb,
                    AxisArg::N => Axis::N,
                },
                values: parse_values(&values)?,
                metrics,
                trials: common.trials.unwrap_or(0),
                seed: common.seed,
                n_values,
                tie_eve,
                eve_mode: eve_mode.into(),
            };
            emit(&run_sweep(&cfg, &spec)?, &common)?;
        }
        Command::Figure { name, common } => {
            let e = entries(&common)?;
            let trials = common.trials.unwrap_or(DEFAULT_FIGURE_TRIALS);
            emit(&figure_preset(&name, &e, trials, common.seed)?, &common)?;
        }
        Command::Mc { common, eve_mode } => {
            let cfg = entries(&common)?.build()?;
            let mut spec = SweepSpec::new(
                Axis::RhoDb,
                vec![cfg.rho_db],
                vec![Metric::Sop1, Metric::Sop2, Metric::SopNet, Metric::Asc1, Metric::Asc2],
            );
            spec.trials = common.trials.unwrap_or(1_000_000);
            spec.seed = common.seed;
            spec.eve_mode = eve_mode.into();
            emit(&run_sweep(&cfg, &spec)?, &common)?;
        }
        Command::Validate { common, quick } => {
            let cfg = entries(&common)?.build()?;
            let budget = if quick { Budget::Quick } else { Budget::Full };
            let report = validate_report(&cfg, budget, Fault::default());
            println!("{report}");
            if let Some(path) = &common.out {
                std::fs::write(path, report.csv()?)?;
            }
            return Ok(report.passed());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Parse { .. } | Error::InvalidConfig(_) | Error::UnknownPreset(_) | Error::Io(_) => {
                    ExitCode::from(2)
                }
                _ => ExitCode::from(1),
            }
        }
    }
}
