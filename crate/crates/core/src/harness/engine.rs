//! Monte Carlo trials: plan an experiment, run it, sweep one parameter.

use super::config::{parse_noise, parse_pmf, ExperimentConfig, PatternCount, StrategyKind};
use super::report::wilson_interval;
use crate::bounds::{ldpc_bound, thm1_bound, thm3_bound};
use crate::compressors::{compress, ldpc_pair, truncation_pair, CompressorPair, LdpcEnsembleSpec};
use crate::decoders::MlConfig;
use crate::environment::{draw_test_streamed, EntropyRate, Environment, NoiseModel};
use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::prob::{Pmf, TypicalityMode, TypicalityParams};
use crate::recognition::{classify_error, ErrorEvent, RecognitionSystem, Strategy, SyndromeDecoder};
use crate::rng::{Purpose, Seed};
use rayon::prelude::*;
use std::time::{Duration, Instant};

/// Counts of each error event over an experiment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EventCounts {
    pub missed_typicality: u64,
    pub false_accept: u64,
    pub tie: u64,
}

impl EventCounts {
    pub fn total(&self) -> u64 {
        self.missed_typicality + self.false_accept + self.tie
    }

    fn add(&mut self, event: ErrorEvent) {
        match event {
            ErrorEvent::None => {}
            ErrorEvent::MissedTypicality => self.missed_typicality += 1,
            ErrorEvent::FalseAccept => self.false_accept += 1,
            ErrorEvent::Tie => self.tie += 1,
        }
    }
}

/// Bound values at the realized rates (`epsilon = 0`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundValues {
    pub thm1: f64,
    /// Only defined for binary noise.
    pub ldpc: Option<f64>,
    pub thm3: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub r: u32,
    pub n: usize,
    pub mc: u64,
    pub rc_requested: f64,
    pub rc_realized: f64,
    pub rm: f64,
    pub rs: f64,
    pub strategy: StrategyKind,
    pub noise: String,
    pub epsilon: f64,
    pub mode: TypicalityMode,
    pub trials: u64,
    pub errors: u64,
    pub p_hat: f64,
    pub ci: (f64, f64),
    pub events: EventCounts,
    pub bounds: BoundValues,
    pub noise_rate: EntropyRate,
    pub seed: u64,
    pub fixed_system: bool,
    /// Wrong indices that produced a noise estimate, over all trials.
    pub false_accepts: u64,
    /// Index hypotheses evaluated, over all trials.
    pub evaluations: u64,
    pub mean_decoder_iterations: f64,
    pub wall_clock: Duration,
}

/// Outcome of one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub j: usize,
    pub j_hat: Option<usize>,
    pub event: ErrorEvent,
    pub false_accepts: u64,
    pub iterations: u64,
}

/// A validated experiment, ready to run.
pub struct Plan {
    cfg: ExperimentConfig,
    spec: FieldSpec,
    env: Environment,
    qx: Pmf,
    noise: NoiseModel,
    strategy: Strategy,
    typicality: TypicalityParams,
    noise_rate: EntropyRate,
    rows: (usize, usize),
    bounds: BoundValues,
    fixed: Option<RecognitionSystem>,
}

fn cfg_err(field: &'static str) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Resource(_) | Error::Config { .. } => e,
        other => Error::config(field, other.to_string()),
    }
}

impl Plan {
    pub fn new(cfg: &ExperimentConfig) -> Result<Self> {
        let spec = cfg.field()?;
        if cfg.n == 0 {
            return Err(Error::config("env.n", "pattern length must be at least 1"));
        }
        if cfg.trials == 0 {
            return Err(Error::config("run.trials", "need at least one trial"));
        }
        let qx = parse_pmf(&cfg.qx, spec).map_err(cfg_err("env.qx"))?;
        let noise = parse_noise(&cfg.noise, spec).map_err(cfg_err("env.noise"))?;
        let typicality = cfg.typicality()?;
        let env = match cfg.patterns {
            PatternCount::Rate(rc) if cfg.clamp_mc => Environment::clamped(cfg.n, rc, qx.clone(), noise.clone(), cfg.mc_cap),
            PatternCount::Rate(rc) => Environment::with_cap(cfg.n, rc, qx.clone(), noise.clone(), cfg.mc_cap),
            PatternCount::Count(mc) if mc > cfg.mc_cap => {
                return Err(Error::Resource(format!("M_c = {mc} exceeds the cap of {}", cfg.mc_cap)))
            }
            PatternCount::Count(mc) => Environment::with_pattern_count(cfg.n, mc, qx.clone(), noise.clone()),
        }
        .map_err(cfg_err(match cfg.patterns {
            PatternCount::Rate(_) => "env.rc",
            PatternCount::Count(_) => "env.mc",
        }))?;
        let strategy = match cfg.strategy {
            StrategyKind::Truncation => Strategy::Truncation,
            StrategyKind::SyndromeBp => {
                cfg.bp.validate().map_err(cfg_err("sys.bp_iterations"))?;
                Strategy::Syndrome(SyndromeDecoder::Bp(cfg.bp))
            }
            StrategyKind::SyndromeMl => Strategy::Syndrome(SyndromeDecoder::Oracle(MlConfig { max_coset: cfg.ml_max_coset })),
        };
        // Needed for the syndrome bound column even when typicality is off.
        let noise_rate = noise.entropy_rate();

        let mut plan = Plan {
            cfg: cfg.clone(),
            spec,
            env,
            qx,
            noise,
            strategy,
            typicality,
            noise_rate,
            rows: (0, 0),
            bounds: BoundValues { thm1: 0.0, ldpc: None, thm3: 0.0 },
            fixed: None,
        };
        // Building the first system validates rates and degrees up front.
        let first = plan.build_system(0)?;
        plan.rows = (first.pair().h().rows(), first.pair().g().rows());
        plan.bounds = plan.compute_bounds()?;
        plan.check_budget(&first)?;
        if cfg.fixed_system {
            plan.fixed = Some(first);
        }
        Ok(plan)
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.cfg
    }

    pub fn environment(&self) -> &Environment {
        &self.env
    }

    pub fn rm(&self) -> f64 {
        self.rows.0 as f64 / self.cfg.n as f64
    }

    pub fn rs(&self) -> f64 {
        self.rows.1 as f64 / self.cfg.n as f64
    }

    pub fn bounds(&self) -> BoundValues {
        self.bounds
    }

    fn system_index(&self, trial: u64) -> u64 {
        if self.cfg.fixed_system {
            0
        } else {
            trial
        }
    }

    fn pair(&self, seed: u64) -> Result<CompressorPair> {
        let cfg = &self.cfg;
        match cfg.strategy {
            StrategyKind::Truncation => truncation_pair(cfg.n, cfg.rm, cfg.rs, self.spec).map_err(|e| {
                let field = if e.to_string().contains("rs =") { "sys.rs" } else { "sys.rm" };
                Error::config(field, e.to_string())
            }),
            _ => {
                for (field, rate) in [("sys.rm", cfg.rm), ("sys.rs", cfg.rs)] {
                    if !(rate > 0.0 && rate <= 1.0) {
                        return Err(Error::config(field, format!("rate {rate} must lie in (0, 1]")));
                    }
                }
                let ens = LdpcEnsembleSpec { n: cfg.n, dv: cfg.dv, dc: cfg.dc, spec: self.spec, seed };
                ens.validate().map_err(cfg_err("sys.dc"))?;
                ens.check_rate(cfg.rm.min(cfg.rs)).map_err(cfg_err("sys.dv"))?;
                ldpc_pair(cfg.n, cfg.rm, cfg.rs, cfg.dv, cfg.dc, self.spec, seed).map_err(cfg_err("sys.dc"))
            }
        }
    }

    fn build_system(&self, index: u64) -> Result<RecognitionSystem> {
        let seed = Seed(self.cfg.seed).derive(Purpose::System, index).0;
        RecognitionSystem::with_noise_rate(
            self.pair(seed)?,
            self.strategy,
            self.typicality,
            self.noise.clone(),
            self.qx.clone(),
            Some(self.noise_rate.value),
        )
        .map_err(cfg_err("sys.strategy"))
    }

    fn compute_bounds(&self) -> Result<BoundValues> {
        let (rm, rs) = (self.rm(), self.rs());
        let marginal = self.noise.marginal();
        let ldpc = if self.spec.order() == 2 { Some(ldpc_bound(rm, rs, marginal.p(1))?.value) } else { None };
        Ok(BoundValues {
            thm1: thm1_bound(rm, rs, &self.qx, &marginal)?.value,
            ldpc,
            thm3: thm3_bound(rm, rs, self.noise_rate.value)?.value,
        })
    }

    /// Predicted work in symbol operations: every trial scores all `M_c`
    /// indices, each at the cost of one pattern draw plus one estimate.
    pub fn predicted_cost(&self, sys: &RecognitionSystem) -> f64 {
        let n = self.cfg.n as f64;
        let r = f64::from(self.cfg.r);
        let k = sys.shared_rows() as f64;
        let per_index = match self.cfg.strategy {
            StrategyKind::Truncation if self.cfg.r == 2 => (k / 64.0).ceil() + 8.0,
            StrategyKind::Truncation => k,
            StrategyKind::SyndromeBp => {
                let edges = sys.pair().h().nnz() as f64;
                let per_edge = if self.cfg.r == 2 { 4.0 } else { 3.0 * r * r };
                n + edges + self.cfg.bp.max_iterations as f64 * edges * per_edge
            }
            StrategyKind::SyndromeMl => n + r.powf(n - k) * n,
        };
        self.cfg.trials as f64 * self.env.pattern_count() as f64 * per_index
    }

    fn check_budget(&self, sys: &RecognitionSystem) -> Result<()> {
        let cost = self.predicted_cost(sys);
        if cost > self.cfg.budget {
            return Err(Error::Resource(format!(
                "predicted cost {cost:.3e} symbol operations exceeds the budget of {:.3e} (run.budget)",
                self.cfg.budget
            )));
        }
        Ok(())
    }

    /// Runs trial `t`. Every random draw is keyed by `(seed, t)`, so the
    /// outcome does not depend on which worker runs it or when.
    pub fn run_trial(&self, t: u64) -> Result<TrialOutcome> {
        let owned;
        let sys = match &self.fixed {
            Some(sys) => sys,
            None => {
                owned = self.build_system(t)?;
                &owned
            }
        };
        let master = Seed(self.cfg.seed);
        let db_seed = master.derive(Purpose::Database, self.system_index(t)).0;
        let test_seed = master.derive(Purpose::TestDraw, t).0;
        let (inst, _) = draw_test_streamed(&self.env, db_seed, test_seed);
        let sigma = compress(sys.pair().g(), &inst.y)?;
        let verdict = sys.recognize_streamed(&self.env, db_seed, &sigma)?;
        Ok(TrialOutcome {
            j: inst.j,
            j_hat: verdict.j_hat,
            event: classify_error(&verdict, &inst),
            false_accepts: verdict.false_accepts(inst.j) as u64,
            iterations: verdict.iterations,
        })
    }

    pub fn run_trials(&self) -> Result<Vec<TrialOutcome>> {
        let run = || (0..self.cfg.trials).into_par_iter().map(|t| self.run_trial(t)).collect::<Result<Vec<_>>>();
        if self.cfg.threads == 0 {
            run()
        } else {
            rayon::ThreadPoolBuilder::new()
                .num_threads(self.cfg.threads)
                .build()
                .map_err(|e| Error::config("run.threads", e.to_string()))?
                .install(run)
        }
    }

    pub fn run(&self) -> Result<ExperimentResult> {
        let start = Instant::now();
        let outcomes = self.run_trials()?;
        Ok(self.summarize(&outcomes, start.elapsed()))
    }

    pub fn summarize(&self, outcomes: &[TrialOutcome], wall_clock: Duration) -> ExperimentResult {
        let cfg = &self.cfg;
        let mut events = EventCounts::default();
        outcomes.iter().for_each(|o| events.add(o.event));
        let trials = outcomes.len() as u64;
        let errors = events.total();
        let mc = self.env.pattern_count();
        let iterations: u64 = outcomes.iter().map(|o| o.iterations).sum();
        ExperimentResult {
            r: cfg.r,
            n: cfg.n,
            mc,
            rc_requested: self.env.rc_requested(),
            rc_realized: self.env.rc_realized(),
            rm: self.rm(),
            rs: self.rs(),
            strategy: cfg.strategy,
            noise: cfg.noise.clone(),
            epsilon: cfg.epsilon,
            mode: cfg.mode,
            trials,
            errors,
            p_hat: errors as f64 / trials.max(1) as f64,
            ci: wilson_interval(errors, trials),
            events,
            bounds: self.bounds,
            noise_rate: self.noise_rate,
            seed: cfg.seed,
            fixed_system: cfg.fixed_system,
            false_accepts: outcomes.iter().map(|o| o.false_accepts).sum(),
            evaluations: trials * mc,
            mean_decoder_iterations: iterations as f64 / (trials * mc).max(1) as f64,
            wall_clock,
        }
    }
}

/// Validates, guards and runs one experiment.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    Plan::new(cfg)?.run()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    Rc,
    N,
    Q,
    Rate,
}

impl SweepAxis {
    pub fn name(self) -> &'static str {
        match self {
            SweepAxis::Rc => "rc",
            SweepAxis::N => "n",
            SweepAxis::Q => "q",
            SweepAxis::Rate => "rate",
        }
    }

    /// The template with this axis set to `value`.
    pub fn apply(self, template: &ExperimentConfig, value: f64) -> Result<ExperimentConfig> {
        let mut cfg = template.clone();
        match self {
            SweepAxis::Rc => cfg.patterns = PatternCount::Rate(value),
            SweepAxis::N => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(Error::config("env.n", format!("sweep value {value} is not a pattern length")));
                }
                cfg.n = value as usize;
            }
            SweepAxis::Q => cfg.noise = if cfg.r == 2 { format!("bern:{value}") } else { format!("sym:{value}") },
            SweepAxis::Rate => {
                cfg.rm = value;
                cfg.rs = value;
            }
        }
        Ok(cfg)
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rc" => Ok(SweepAxis::Rc),
            "n" => Ok(SweepAxis::N),
            "q" => Ok(SweepAxis::Q),
            "rate" => Ok(SweepAxis::Rate),
            _ => Err(Error::config("axis", format!("unknown sweep axis `{s}` (rc, n, q, rate)"))),
        }
    }
}

/// One sweep value with its configuration and result.
#[derive(Debug)]
pub struct SweepPoint {
    pub value: f64,
    pub config: ExperimentConfig,
    pub result: Result<ExperimentResult>,
}

/// Runs the template at every value; a failing point is kept with its error
/// and the sweep continues.
pub fn sweep(template: &ExperimentConfig, axis: SweepAxis, values: &[f64]) -> Vec<SweepPoint> {
    values
        .iter()
        .map(|&value| {
            let config = axis.apply(template, value).unwrap_or_else(|_| template.clone());
            let result = axis.apply(template, value).and_then(|cfg| run_experiment(&cfg));
            if let Err(e) = &result {
                log::warn!("sweep point {}={value} failed: {e}", axis.name());
            }
            SweepPoint { value, config, result }
        })
        .collect()
}
