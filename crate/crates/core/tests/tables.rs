use irs_noma::channel::SystemConfig;
use irs_noma::montecarlo::EveMode;
use irs_noma::sweep::{
    figure_preset, read_meta, reproduce, run_sweep, Axis, ConfigEntries, Metric, SweepSpec,
};
use irs_noma::Error;

fn small_spec() -> SweepSpec {
    let mut spec = SweepSpec::new(
        Axis::RhoDb,
        vec![30.0, 40.0, 50.0],
        vec![Metric::Sop1, Metric::Sop2, Metric::Asc1, Metric::Asc2, Metric::Asymptotes],
    );
    spec.trials = 5_000;
    spec.seed = 7;
    spec.n_values = Some(vec![1, 3]);
    spec
}

#[test]
fn every_column_has_one_value_per_row() {
    let t = run_sweep(&SystemConfig::default(), &small_spec()).unwrap();
    assert_eq!(t.axis_values.len(), 3);
    for c in &t.columns {
        assert_eq!(c.values.len(), 3, "{}", c.name);
        if let Some(se) = &c.std_error {
            assert_eq!(se.len(), 3);
        }
    }
    for name in ["sop1_N1", "sop1_mc_N3", "asc2_jensen_N1", "asym_sop2_N3", "asc2_ceiling_quadrature_N1"] {
        assert!(t.column(name).is_some(), "missing {name}");
    }
    assert!(t.column("sop1_mc_N1").unwrap().std_error.is_some());
    assert!(t.column("sop1_N1").unwrap().std_error.is_none());
}

#[test]
fn header_reproduces_table_bytes() {
    let cfg = irs_noma::sweep::parse_config_str("rho_e_db=5\nbeta=0.9").unwrap();
    let t = run_sweep(&cfg, &small_spec()).unwrap();
    let bytes = t.to_csv().unwrap();
    let text = String::from_utf8(bytes.clone()).unwrap();
    let meta = read_meta(&text).unwrap();
    assert_eq!(meta.config, cfg);
    assert_eq!(meta.spec, small_spec());
    assert_eq!(reproduce(&text).unwrap().to_csv().unwrap(), bytes);
}

#[test]
fn figure_header_reproduces_figure() {
    let t = figure_preset("fig4", &ConfigEntries::default(), 2_000, 3).unwrap();
    let bytes = t.to_csv().unwrap();
    let again = reproduce(std::str::from_utf8(&bytes).unwrap()).unwrap();
    assert_eq!(again.to_csv().unwrap(), bytes);
    assert_eq!(again.meta.preset.as_deref(), Some("fig4"));
}

#[test]
fn identical_across_thread_counts() {
    let spec = small_spec();
    let cfg = SystemConfig::default();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_sweep(&cfg, &spec).unwrap().to_csv().unwrap())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn csv_layout() {
    let mut spec = SweepSpec::new(Axis::N, vec![1.0, 2.0], vec![Metric::Sop1, Metric::Floors]);
    spec.trials = 1_000;
    spec.eve_mode = EveMode::MeanEve;
    let t = run_sweep(&SystemConfig::default(), &spec).unwrap();
    let text = String::from_utf8(t.to_csv().unwrap()).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "N,sop1,sop1_floor,sop1_mc,sop1_mc_se");
    assert_eq!(data.len(), 3);
    assert!(text.contains("#! eve_mode=mean_eve"));
    assert!(text.contains("#@ rho_db=30"));
}

#[test]
fn fig2_override_changes_element_count_only() {
    let base = figure_preset("fig2", &ConfigEntries::default(), 1_000, 1).unwrap();
    let mut e = ConfigEntries::default();
    e.set("N=5").unwrap();
    let five = figure_preset("fig2", &e, 1_000, 1).unwrap();
    assert_eq!(base.axis_values, five.axis_values);
    let strip = |t: &irs_noma::sweep::MetricTable, n: &str| -> Vec<String> {
        t.columns
            .iter()
            .filter(|c| c.name.ends_with(n))
            .map(|c| c.name.trim_end_matches(n).to_string())
            .collect()
    };
    assert_eq!(strip(&base, "_N1"), strip(&five, "_N5"));
    assert!(five.columns.iter().all(|c| c.name.ends_with("_N5")));
}

#[test]
fn preset_columns() {
    let t = figure_preset("fig6", &ConfigEntries::default(), 0, 1);
    assert!(t.is_ok());
    let t = t.unwrap();
    assert_eq!(t.meta.config.n, 30);
    assert_eq!(t.meta.config.rho_e_db, 30.0);
    for name in ["asc1", "asc2_quadrature", "asc2_jensen", "asc1_asym", "asc2_ceiling_quadrature", "asc2_ceiling_jensen"] {
        assert!(t.column(name).is_some(), "missing {name}");
    }
    let t = figure_preset("fig4", &ConfigEntries::default(), 0, 1).unwrap();
    assert_eq!(t.meta.config.rho_e_db, 10.0);
    for n in [1, 3] {
        for name in ["sop1", "sop2", "asym_sop1", "asym_sop2"] {
            assert!(t.column(&format!("{name}_N{n}")).is_some());
        }
    }
    let t = figure_preset("fig8", &ConfigEntries::default(), 0, 1).unwrap();
    assert!(t.meta.spec.tie_eve);
    assert_eq!(t.meta.spec.n_values.as_ref().unwrap().len(), 7);
}

#[test]
fn unknown_preset() {
    let e = figure_preset("fig7", &ConfigEntries::default(), 0, 1).unwrap_err();
    assert!(matches!(e, Error::UnknownPreset(_)));
}
