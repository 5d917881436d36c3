//! Experiment configuration: flat `key = value` text with `env.`, `sys.`
//! and `run.` sections.

use crate::decoders::{BpConfig, DEFAULT_MAX_COSET};
use crate::environment::{GilbertElliott, NoiseModel, DEFAULT_MC_CAP};
use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::prob::{Pmf, TypicalityMode, TypicalityParams};
use std::fmt::Write;
use std::path::PathBuf;
use std::str::FromStr;

/// Default ceiling on the predicted work of one experiment, in elementary
/// symbol operations.
pub const DEFAULT_BUDGET: f64 = 1e12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PatternCount {
    /// `M_c = round(2^(n rc))`.
    Rate(f64),
    Count(u64),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StrategyKind {
    Truncation,
    SyndromeBp,
    SyndromeMl,
}

impl StrategyKind {
    pub fn name(self) -> &'static str {
        match self {
            StrategyKind::Truncation => "truncation",
            StrategyKind::SyndromeBp => "syndrome-bp",
            StrategyKind::SyndromeMl => "syndrome-ml",
        }
    }
}

impl FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "truncation" => Ok(StrategyKind::Truncation),
            "syndrome-bp" | "syndrome" | "bp" => Ok(StrategyKind::SyndromeBp),
            "syndrome-ml" | "ml" => Ok(StrategyKind::SyndromeMl),
            _ => Err(format!("unknown strategy `{s}` (truncation, syndrome-bp, syndrome-ml)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub r: u32,
    pub n: usize,
    pub patterns: PatternCount,
    pub mc_cap: u64,
    /// Cap `M_c` at `mc_cap` instead of refusing larger counts.
    pub clamp_mc: bool,
    pub qx: String,
    pub noise: String,
    pub strategy: StrategyKind,
    pub rm: f64,
    pub rs: f64,
    pub dv: usize,
    pub dc: usize,
    pub bp: BpConfig,
    pub ml_max_coset: u64,
    pub epsilon: f64,
    pub mode: TypicalityMode,
    pub trials: u64,
    pub seed: u64,
    /// Worker threads; 0 uses every available core.
    pub threads: usize,
    pub out: Option<PathBuf>,
    /// Reuse one database and compressor pair for every trial.
    pub fixed_system: bool,
    pub budget: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            r: 2,
            n: 200,
            patterns: PatternCount::Count(256),
            mc_cap: DEFAULT_MC_CAP,
            clamp_mc: false,
            qx: "uniform".into(),
            noise: "bern:0.11".into(),
            strategy: StrategyKind::Truncation,
            rm: 0.5,
            rs: 0.5,
            dv: 3,
            dc: 6,
            bp: BpConfig::default(),
            ml_max_coset: DEFAULT_MAX_COSET,
            epsilon: TypicalityParams::default().epsilon,
            mode: TypicalityParams::default().mode,
            trials: 100,
            seed: 1,
            threads: 0,
            out: None,
            fixed_system: false,
            budget: DEFAULT_BUDGET,
        }
    }
}

/// Every accepted key, in the order `to_text` prints them.
pub const KEYS: &[&str] = &[
    "env.r",
    "env.n",
    "env.rc",
    "env.mc",
    "env.mc_cap",
    "env.clamp_mc",
    "env.qx",
    "env.noise",
    "sys.strategy",
    "sys.rm",
    "sys.rs",
    "sys.dv",
    "sys.dc",
    "sys.bp_iterations",
    "sys.bp_damping",
    "sys.bp_early_exit",
    "sys.ml_max_coset",
    "sys.epsilon",
    "sys.mode",
    "run.trials",
    "run.seed",
    "run.threads",
    "run.out",
    "run.fixed_system",
    "run.budget",
];

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{value}`")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::config(key, format!("expected a boolean, got `{value}`"))),
    }
}

impl ExperimentConfig {
    /// Parses a config file on top of the defaults.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`, got `{line}`", lineno + 1)))?;
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected `key=value`, got `{assignment}`")))?;
        self.set(key.trim(), value.trim())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "env.r" => self.r = parse(key, value)?,
            "env.n" => self.n = parse(key, value)?,
            "env.rc" => self.patterns = PatternCount::Rate(parse(key, value)?),
            "env.mc" => self.patterns = PatternCount::Count(parse(key, value)?),
            "env.mc_cap" => self.mc_cap = parse(key, value)?,
            "env.clamp_mc" => self.clamp_mc = parse_bool(key, value)?,
            "env.qx" => self.qx = value.to_string(),
            "env.noise" => self.noise = value.to_string(),
            "sys.strategy" => self.strategy = value.parse().map_err(|m| Error::config(key, m))?,
            "sys.rm" => self.rm = parse(key, value)?,
            "sys.rs" => self.rs = parse(key, value)?,
            "sys.dv" => self.dv = parse(key, value)?,
            "sys.dc" => self.dc = parse(key, value)?,
            "sys.bp_iterations" => self.bp.max_iterations = parse(key, value)?,
            "sys.bp_damping" => self.bp.damping = parse(key, value)?,
            "sys.bp_early_exit" => self.bp.early_exit = parse_bool(key, value)?,
            "sys.ml_max_coset" => self.ml_max_coset = parse(key, value)?,
            "sys.epsilon" => self.epsilon = parse(key, value)?,
            "sys.mode" => self.mode = value.parse().map_err(|_| Error::config(key, format!("unknown mode `{value}` (strict, score)")))?,
            "run.trials" => self.trials = parse(key, value)?,
            "run.seed" => self.seed = parse(key, value)?,
            "run.threads" => self.threads = parse(key, value)?,
            "run.out" => self.out = if value.is_empty() { None } else { Some(PathBuf::from(value)) },
            "run.fixed_system" => self.fixed_system = parse_bool(key, value)?,
            "run.budget" => self.budget = parse(key, value)?,
            _ => return Err(Error::config(key, "unknown key")),
        }
        Ok(())
    }

    /// The fully resolved configuration in the file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(out, "{k} = {v}");
        };
        put("env.r", self.r.to_string());
        put("env.n", self.n.to_string());
        match self.patterns {
            PatternCount::Rate(rc) => put("env.rc", rc.to_string()),
            PatternCount::Count(mc) => put("env.mc", mc.to_string()),
        }
        put("env.mc_cap", self.mc_cap.to_string());
        put("env.clamp_mc", self.clamp_mc.to_string());
        put("env.qx", self.qx.clone());
        put("env.noise", self.noise.clone());
        put("sys.strategy", self.strategy.name().into());
        put("sys.rm", self.rm.to_string());
        put("sys.rs", self.rs.to_string());
        put("sys.dv", self.dv.to_string());
        put("sys.dc", self.dc.to_string());
        put("sys.bp_iterations", self.bp.max_iterations.to_string());
        put("sys.bp_damping", self.bp.damping.to_string());
        put("sys.bp_early_exit", self.bp.early_exit.to_string());
        put("sys.ml_max_coset", self.ml_max_coset.to_string());
        put("sys.epsilon", self.epsilon.to_string());
        put("sys.mode", self.mode.name().into());
        put("run.trials", self.trials.to_string());
        put("run.seed", self.seed.to_string());
        put("run.threads", self.threads.to_string());
        put("run.out", self.out.as_ref().map(|p| p.display().to_string()).unwrap_or_default());
        put("run.fixed_system", self.fixed_system.to_string());
        put("run.budget", self.budget.to_string());
        out
    }

    pub fn field(&self) -> Result<FieldSpec> {
        FieldSpec::new(self.r).map_err(|e| Error::config("env.r", e.to_string()))
    }

    pub fn typicality(&self) -> Result<TypicalityParams> {
        TypicalityParams::new(self.epsilon, self.mode).map_err(|e| Error::config("sys.epsilon", e.to_string()))
    }
}

/// Pattern distribution from a descriptor: `uniform`, `none` (all zero),
/// `bern:q` (GF(2)), `sym:q` (`1-q` at zero, `q/(r-1)` elsewhere) or
/// `pmf:p0/p1/...`.
pub fn parse_pmf(desc: &str, spec: FieldSpec) -> Result<Pmf> {
    let desc = desc.trim();
    let (kind, arg) = desc.split_once(':').unwrap_or((desc, ""));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{s}` in `{desc}`")));
    match kind {
        "uniform" => Ok(Pmf::uniform(spec)),
        "none" | "zero" => Pmf::point_mass(spec, 0),
        "bern" => {
            if spec.order() != 2 {
                return Err(Error::InvalidParameter(format!("`{desc}` needs GF(2); use sym:q for {spec}")));
            }
            Pmf::bernoulli(num(arg)?)
        }
        "sym" => Pmf::symmetric(spec, num(arg)?),
        "pmf" => Pmf::new(spec, arg.split('/').map(num).collect::<Result<_>>()?),
        _ => Err(Error::Parse(format!("unknown distribution `{desc}`"))),
    }
}

/// Noise from a descriptor: any [`parse_pmf`] form for i.i.d. noise, or
/// `ge:p_gb/p_bg/q_good/q_bad` for Gilbert-Elliott noise with symmetric
/// per-state emissions.
pub fn parse_noise(desc: &str, spec: FieldSpec) -> Result<NoiseModel> {
    let desc = desc.trim();
    match desc.split_once(':') {
        Some(("ge", args)) => {
            let v: Vec<f64> = args
                .split('/')
                .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number `{s}` in `{desc}`"))))
                .collect::<Result<_>>()?;
            let [p_gb, p_bg, qg, qb] = v[..] else {
                return Err(Error::Parse(format!("`{desc}`: expected ge:p_gb/p_bg/q_good/q_bad")));
            };
            Ok(NoiseModel::GilbertElliott(GilbertElliott::new(
                p_gb,
                p_bg,
                Pmf::symmetric(spec, qg)?,
                Pmf::symmetric(spec, qb)?,
            )?))
        }
        _ => Ok(NoiseModel::Iid(parse_pmf(desc, spec)?)),
    }
}
