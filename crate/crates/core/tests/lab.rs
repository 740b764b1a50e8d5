use zmlab_core::lab::{run_suite, LabConfig, SuiteSelection};
use zmlab_core::LabError;

fn config(dir: &std::path::Path) -> LabConfig {
    let mut cfg = LabConfig::new(1000.0);
    cfg.out_dir = dir.join("out");
    cfg.cache_dir = Some(dir.join("cache"));
    cfg.k = vec![0.0, 1.0, 2.0];
    cfg.sites = 100;
    cfg
}

#[test]
fn second_run_hits_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path());
    cfg.suites.moments = true;
    let first = run_suite(&cfg).unwrap();
    assert!(first.passed(), "{:?}", first.failures());
    assert_eq!(first.cache.misses, 1);
    assert!(first.cache.zeta_evaluations > 0);
    let csv = std::fs::read(cfg.out_dir.join("moments.csv")).unwrap();

    let second = run_suite(&cfg).unwrap();
    assert_eq!((second.cache.hits, second.cache.zeta_evaluations), (1, 0));
    assert_eq!(std::fs::read(cfg.out_dir.join("moments.csv")).unwrap(), csv);
}

#[test]
fn moments_report_columns() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(dir.path());
    cfg.suites.moments = true;
    run_suite(&cfg).unwrap();
    let mut r = csv::Reader::from_path(cfg.out_dir.join("moments.csv")).unwrap();
    let header: Vec<String> = r.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["kind", "T", "k", "spacing", "value", "richardson_err", "comparator", "ratio"]);
    let first = r.records().next().unwrap().unwrap();
    assert_eq!(&first[0], "I_k");
    let value: f64 = first[4].parse().unwrap();
    assert!((value - 1000.0).abs() < 1e-9);
    // 17 significant digits round-trip
    assert_eq!(first[4].parse::<f64>().unwrap().to_bits(), value.to_bits());
    assert!(first[4].contains('e') && first[4].split('e').next().unwrap().len() == 18);
}

#[test]
fn unwritable_output_names_the_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let mut cfg = config(dir.path());
    cfg.out_dir = blocker.join("out");
    cfg.suites = SuiteSelection::all();
    match run_suite(&cfg) {
        Err(LabError::Io { path, .. }) => assert!(path.starts_with(&blocker)),
        other => panic!("expected an I/O error, got {other:?}"),
    }
}

#[test]
fn invalid_config_is_refused() {
    let mut cfg = LabConfig::new(1000.0);
    cfg.k = vec![-0.5];
    cfg.suites.moments = true;
    assert!(matches!(run_suite(&cfg), Err(LabError::InvalidParameter(_))));
}
