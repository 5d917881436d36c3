use clap::{Args, Parser, Subcommand};
use linrec::bounds::{ldpc_bound, thm1_bound, thm3_bound, worst_case_noise_bound};
use linrec::compressors::{sample_ldpc, write_alist, LdpcEnsembleSpec};
use linrec::gf::FieldSpec;
use linrec::harness::{self, fmt_g, ExperimentConfig, SweepAxis};
use linrec::prob::{binary_entropy, Pmf, TypicalityMode};
use linrec::Error;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "linrec", version, about = "Recognition from linearly compressed pattern memories")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write a CSV row.
    Run(Common),
    /// Run the experiment once per value of one parameter.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Parameter to vary: rc, n, q or rate (sets rm and rs together).
        #[arg(long)]
        axis: String,
        /// Comma-separated values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Vec<f64>,
    },
    /// Print rate bounds over a grid of compression rates and crossover probabilities.
    Bounds {
        #[arg(long, default_value_t = 2)]
        r: u32,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.25, 0.5, 0.75, 1.0])]
        rates: Vec<f64>,
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.01, 0.05, 0.11, 0.2])]
        q: Vec<f64>,
    },
    /// Sample a regular LDPC matrix and print it in alist format.
    GenMatrix {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        dv: usize,
        #[arg(long, default_value_t = 6)]
        dc: usize,
        #[arg(long, default_value_t = 2)]
        r: u32,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the built-in oracle checks.
    Selftest {
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct Common {
    /// Config file with `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a config key, e.g. `--set env.n=400`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    mode: Option<TypicalityMode>,
    /// Print the resolved configuration and exit.
    #[arg(long)]
    print_config: bool,
}

impl Common {
    fn resolve(&self) -> linrec::Result<ExperimentConfig> {
        let mut cfg = ExperimentConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_text(&std::fs::read_to_string(path)?)?;
        }
        for o in &self.overrides {
            cfg.apply_override(o)?;
        }
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(trials) = self.trials {
            cfg.trials = trials;
        }
        if let Some(out) = &self.out {
            cfg.out = Some(out.clone());
        }
        if let Some(threads) = self.threads {
            cfg.threads = threads;
        }
        if let Some(mode) = self.mode {
            cfg.mode = mode;
        }
        Ok(cfg)
    }
}

fn emit(text: &str, out: Option<&Path>) -> linrec::Result<()> {
    match out {
        Some(path) => Ok(std::fs::write(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> linrec::Result<bool> {
    match cli.command {
        Command::Run(common) => {
            let cfg = common.resolve()?;
            if common.print_config {
                print!("{}", cfg.to_text());
                return Ok(true);
            }
            let res = harness::run_experiment(&cfg)?;
            eprintln!(
                "p_hat = {} [{}, {}] ({} errors / {} trials, M_c = {}) in {:.1?}",
                fmt_g(res.p_hat),
                fmt_g(res.ci.0),
                fmt_g(res.ci.1),
                res.errors,
                res.trials,
                res.mc,
                res.wall_clock
            );
            emit(&harness::experiment_csv(&res), cfg.out.as_deref())?;
        }
        Command::Sweep { common, axis, values } => {
            let cfg = common.resolve()?;
            let axis: SweepAxis = axis.parse()?;
            if common.print_config {
                print!("{}", cfg.to_text());
                return Ok(true);
            }
            let points = harness::sweep(&cfg, axis, &values);
            emit(&harness::sweep_csv(&cfg, &points), cfg.out.as_deref())?;
            if let Some(p) = points.iter().find(|p| p.result.is_err()) {
                eprintln!("warning: sweep point {}={} failed", axis.name(), p.value);
            }
        }
        Command::Bounds { r, rates, q } => {
            let spec = FieldSpec::new(r).map_err(|e| Error::Config { field: "r".into(), message: e.to_string() })?;
            println!("rate,q,thm1_uniform,ldpc,thm3_iid,worst_case");
            for &rate in &rates {
                for &qv in &q {
                    let noise = Pmf::symmetric(spec, qv)?;
                    let thm1 = thm1_bound(rate, rate, &Pmf::uniform(spec), &noise)?.value;
                    let ldpc = if r == 2 { fmt_g(ldpc_bound(rate, rate, qv)?.value) } else { String::new() };
                    let thm3 = thm3_bound(rate, rate, noise.entropy())?.value;
                    let wc = worst_case_noise_bound(r, qv, rate)?.value;
                    println!("{},{},{},{ldpc},{},{}", fmt_g(rate), fmt_g(qv), fmt_g(thm1), fmt_g(thm3), fmt_g(wc));
                }
            }
            if r == 2 {
                eprintln!("H2(0.11) = {}", fmt_g(binary_entropy(0.11)));
            }
        }
        Command::GenMatrix { n, dv, dc, r, seed, out } => {
            let spec = FieldSpec::new(r).map_err(|e| Error::Config { field: "r".into(), message: e.to_string() })?;
            let h = sample_ldpc(&LdpcEnsembleSpec { n, dv, dc, spec, seed })
                .map_err(|e| Error::Config { field: "dc".into(), message: e.to_string() })?;
            emit(&write_alist(&h), out.as_deref())?;
        }
        Command::Selftest { seed } => {
            let checks = harness::selftest::run_all(seed);
            for c in &checks {
                println!("{} {} ({})", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
            }
            return Ok(checks.iter().all(|c| c.passed));
        }
    }
    Ok(true)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Resource(_) => 3,
        Error::Config { .. }
        | Error::Parse(_)
        | Error::InvalidParameter(_)
        | Error::InvalidPmf(_)
        | Error::InvalidField(_)
        | Error::InfeasibleDegrees(_)
        | Error::Precondition(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::try_parse() {
        Ok(cli) => match run(cli) {
            Ok(true) => ExitCode::SUCCESS,
            Ok(false) => ExitCode::from(1),
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(exit_code(&e))
            }
        },
        Err(e) => {
            let _ = e.print();
            ExitCode::from(if e.use_stderr() { 2 } else { 0 })
        }
    }
}
