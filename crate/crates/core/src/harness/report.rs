//! Error-rate intervals and CSV output.

use super::config::{ExperimentConfig, PatternCount};
use super::engine::{ExperimentResult, SweepPoint};
use std::fmt::Write;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    wilson_interval_z(errors, trials, Z95)
}

pub fn wilson_interval_z(errors: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// `printf("%g")`: six significant digits, trailing zeros removed,
/// exponent form outside `[1e-4, 1e6)`.
pub fn fmt_g(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        trim_zeros(format!("{x:.*}", (5 - exp) as usize))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub const CSV_COLUMNS: &[&str] = &[
    "r",
    "n",
    "rc_requested",
    "rc_realized",
    "rm",
    "rs",
    "strategy",
    "noise",
    "epsilon",
    "mode",
    "trials",
    "errors",
    "p_hat",
    "ci_lo",
    "ci_hi",
    "event_missed",
    "event_false_accept",
    "event_tie",
    "bound_thm1",
    "bound_ldpc",
    "bound_thm3",
    "seed",
];

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Comment line recording how systems were drawn, then the header.
pub fn csv_preamble(fixed_system: bool) -> String {
    let ensemble = if fixed_system { "fixed-system" } else { "fresh-per-trial" };
    format!(
        "# linrec {}; systems={ensemble}; bounds at epsilon=0 with realized rates\n{}\n",
        env!("CARGO_PKG_VERSION"),
        CSV_COLUMNS.join(",")
    )
}

pub fn csv_row(res: &ExperimentResult) -> String {
    let fields = [
        res.r.to_string(),
        res.n.to_string(),
        fmt_g(res.rc_requested),
        fmt_g(res.rc_realized),
        fmt_g(res.rm),
        fmt_g(res.rs),
        res.strategy.name().to_string(),
        quote(&res.noise),
        fmt_g(res.epsilon),
        res.mode.name().to_string(),
        res.trials.to_string(),
        res.errors.to_string(),
        fmt_g(res.p_hat),
        fmt_g(res.ci.0),
        fmt_g(res.ci.1),
        res.events.missed_typicality.to_string(),
        res.events.false_accept.to_string(),
        res.events.tie.to_string(),
        fmt_g(res.bounds.thm1),
        res.bounds.ldpc.map(fmt_g).unwrap_or_default(),
        fmt_g(res.bounds.thm3),
        res.seed.to_string(),
    ];
    fields.join(",")
}

/// Row for a configuration that could not be run: the configured values
/// with every result column empty.
pub fn csv_failure_row(cfg: &ExperimentConfig) -> String {
    let rc = match cfg.patterns {
        PatternCount::Rate(rc) => fmt_g(rc),
        PatternCount::Count(mc) if cfg.n > 0 => fmt_g((mc as f64).log2() / cfg.n as f64),
        PatternCount::Count(_) => String::new(),
    };
    let mut fields = vec![
        cfg.r.to_string(),
        cfg.n.to_string(),
        rc,
        String::new(),
        fmt_g(cfg.rm),
        fmt_g(cfg.rs),
        cfg.strategy.name().to_string(),
        quote(&cfg.noise),
        fmt_g(cfg.epsilon),
        cfg.mode.name().to_string(),
        cfg.trials.to_string(),
    ];
    fields.resize(CSV_COLUMNS.len() - 1, String::new());
    fields.push(cfg.seed.to_string());
    fields.join(",")
}

pub fn experiment_csv(res: &ExperimentResult) -> String {
    let mut out = csv_preamble(res.fixed_system);
    let _ = writeln!(out, "{}", csv_row(res));
    out
}

pub fn sweep_csv(template: &ExperimentConfig, points: &[SweepPoint]) -> String {
    let mut out = csv_preamble(template.fixed_system);
    for p in points {
        let row = match &p.result {
            Ok(res) => csv_row(res),
            Err(_) => csv_failure_row(&p.config),
        };
        let _ = writeln!(out, "{row}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, Seed};
    use rand::Rng;

    #[test]
    fn g_format() {
        let cases = [
            (0.0, "0"),
            (1.0, "1"),
            (0.25, "0.25"),
            (0.499915958164528, "0.499916"),
            (123456.7, "123457"),
            (1234567.0, "1.23457e+06"),
            (0.0001, "0.0001"),
            (0.00001234, "1.234e-05"),
            (-2.5, "-2.5"),
            (999999.5, "1e+06"),
            (0.0333333333, "0.0333333"),
            (f64::NEG_INFINITY, "-inf"),
        ];
        for (x, want) in cases {
            assert_eq!(fmt_g(x), want, "{x}");
        }
    }

    #[test]
    fn wilson_values() {
        // closed form at p_hat = 0 reduces to [0, z^2 / (n + z^2)]
        let (lo, hi) = wilson_interval(0, 100);
        assert_eq!(lo, 0.0);
        assert!((hi - Z95 * Z95 / (100.0 + Z95 * Z95)).abs() < 1e-15);
        let (lo, hi) = wilson_interval(50, 100);
        assert!((lo + hi - 1.0).abs() < 1e-12);
        assert!((lo - 0.403_831_7).abs() < 1e-6, "{lo}");
    }

    #[test]
    fn wilson_coverage() {
        let mut rng = Seed(12).stream(Purpose::TestDraw, 0);
        for (p, n) in [(0.1, 200u64), (0.02, 400), (0.5, 50)] {
            let reps = 4000;
            let mut covered = 0;
            for _ in 0..reps {
                let errors = (0..n).filter(|_| rng.gen::<f64>() < p).count() as u64;
                let (lo, hi) = wilson_interval(errors, n);
                covered += usize::from(lo <= p && p <= hi);
            }
            let rate = covered as f64 / reps as f64;
            assert!((0.925..=0.975).contains(&rate), "p={p} n={n}: {rate}");
        }
    }

    #[test]
    fn header_matches_schema() {
        let pre = csv_preamble(false);
        let mut lines = pre.lines();
        assert!(lines.next().unwrap().starts_with("# linrec"));
        assert_eq!(lines.next().unwrap().split(',').count(), 22);
        let row = csv_failure_row(&ExperimentConfig::default());
        assert_eq!(row.split(',').count(), 22);
        assert!(row.ends_with(",1"));
    }
}
