use linrec::harness::{
    experiment_csv, run_experiment, sweep, sweep_csv, ExperimentConfig, PatternCount, SweepAxis, CSV_COLUMNS,
};
use linrec::prob::TypicalityMode;
use linrec::Error;

fn truncation(n: usize, patterns: PatternCount, trials: u64) -> ExperimentConfig {
    ExperimentConfig { n, patterns, trials, mode: TypicalityMode::ScoreOnly, seed: 3, ..ExperimentConfig::default() }
}

#[test]
fn inside_the_achievable_region() {
    let res = run_experiment(&truncation(200, PatternCount::Count(256), 400)).unwrap();
    assert!(res.p_hat <= 0.05, "{}", res.p_hat);
    assert!((res.bounds.thm1 - 0.25).abs() < 1e-3);
    assert!(res.ci.0 <= res.p_hat && res.p_hat <= res.ci.1);
}

#[test]
fn noiseless_recognition_never_errs() {
    let mut cfg = truncation(64, PatternCount::Count(512), 50);
    cfg.noise = "none".into();
    let res = run_experiment(&cfg).unwrap();
    assert_eq!((res.errors, res.p_hat), (0, 0.0));
}

#[test]
fn rate_sweep_crosses_the_bound() {
    let template = truncation(60, PatternCount::Count(1), 300);
    let points = sweep(&template, SweepAxis::Rc, &[0.1, 0.35]);
    let p: Vec<f64> = points.iter().map(|pt| pt.result.as_ref().unwrap().p_hat).collect();
    assert!(p[0] <= 0.1 && p[1] >= 0.5, "{p:?}");
}

#[test]
fn length_sweep_below_the_bound_does_not_worsen() {
    let mut template = truncation(40, PatternCount::Rate(0.15), 300);
    template.clamp_mc = true;
    let points = sweep(&template, SweepAxis::N, &[40.0, 80.0, 120.0]);
    let p: Vec<f64> = points.iter().map(|pt| pt.result.as_ref().unwrap().p_hat).collect();
    assert!(p[0] >= p[1] && p[1] >= p[2], "{p:?}");
}

#[test]
fn sweep_csv_shapes() {
    let template = truncation(40, PatternCount::Count(16), 10);
    let header = CSV_COLUMNS.join(",");
    let empty = sweep_csv(&template, &sweep(&template, SweepAxis::Rc, &[]));
    assert_eq!(empty.lines().filter(|l| !l.starts_with('#')).collect::<Vec<_>>(), vec![header.as_str()]);

    let points = sweep(&template, SweepAxis::Q, &[0.05, 1.5]);
    assert!(points[1].result.is_err());
    let text = sweep_csv(&template, &points);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 2);
    for row in rows {
        assert_eq!(row.split(',').count(), CSV_COLUMNS.len());
    }
}

#[test]
fn experiment_csv_is_one_row() {
    let res = run_experiment(&truncation(40, PatternCount::Count(16), 10)).unwrap();
    let text = experiment_csv(&res);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with('#'));
    assert_eq!(lines[1], CSV_COLUMNS.join(","));
    assert_eq!(lines.len(), 3);
}

#[test]
fn oversized_work_is_refused() {
    let mut cfg = truncation(200, PatternCount::Count(1 << 22), 1_000_000);
    cfg.budget = 1e9;
    assert!(matches!(run_experiment(&cfg), Err(Error::Resource(_))));
    let cfg = truncation(200, PatternCount::Count(1 << 23), 1);
    assert!(matches!(run_experiment(&cfg), Err(Error::Resource(_))));
}

#[test]
fn bad_configs_name_their_field() {
    let mut cfg = truncation(40, PatternCount::Count(16), 10);
    cfg.r = 4;
    match run_experiment(&cfg) {
        Err(Error::Config { field, .. }) => assert_eq!(field, "env.r"),
        other => panic!("{other:?}"),
    }
}
