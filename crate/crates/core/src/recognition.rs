//! The recognizer: estimate the noise under every index hypothesis and pick
//! the index whose estimate is most probable.

use crate::compressors::{CompressorPair, Construction};
use crate::decoders::{ml_syndrome_decode_with, BpConfig, BpDecoder, DecodeOutcome, MlConfig};
use crate::environment::{Environment, NoiseModel, PatternDatabase, TestInstance};
use crate::error::{Error, Result};
use crate::gf::{
    packed_words_for, weight_prefix, xor_weight_prefix, DenseMatrix, FieldSpec, FieldVector, PackedGf2Vector,
    RowEchelon, SparseMatrix,
};
use crate::prob::{log_prob_from_counts, JointTypicality, Pmf, TypicalityMode, TypicalityParams};
use rayon::prelude::*;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SyndromeDecoder {
    Bp(BpConfig),
    Oracle(MlConfig),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Strategy {
    /// Compare prefixes directly: `z_hat = sigma[..n_min] - s_i[..n_min]`.
    Truncation,
    /// Decode the hypothesis syndrome `sigma[..k] - s_i[..k]` over the shared block.
    Syndrome(SyndromeDecoder),
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Truncation => "truncation",
            Strategy::Syndrome(SyndromeDecoder::Bp(_)) => "syndrome-bp",
            Strategy::Syndrome(SyndromeDecoder::Oracle(_)) => "syndrome-ml",
        }
    }
}

/// Score and decoder effort for one index hypothesis. A score of `-inf`
/// stands for the failure symbol `e`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndexOutcome {
    pub score: f64,
    pub iterations: u32,
}

impl IndexOutcome {
    const FAILURE: IndexOutcome = IndexOutcome { score: f64::NEG_INFINITY, iterations: 0 };
}

enum NoiseScore {
    Iid(Vec<f64>),
    Markov,
}

#[derive(Clone, Debug)]
enum Engine {
    Truncation { joint: Option<JointTypicality> },
    Bp { decoder: BpDecoder, cfg: BpConfig, channel: Pmf, rate: f64 },
    Oracle { matrix: SparseMatrix, cfg: MlConfig, rate: f64 },
}

/// A compressor pair together with a recognition algorithm.
pub struct RecognitionSystem {
    pair: CompressorPair,
    strategy: Strategy,
    typicality: TypicalityParams,
    noise: NoiseModel,
    qx: Pmf,
    shared: usize,
    engine: Engine,
    scorer: NoiseScore,
}

impl std::fmt::Debug for RecognitionSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RecognitionSystem")
            .field("strategy", &self.strategy)
            .field("typicality", &self.typicality)
            .field("n", &self.pair.n())
            .field("shared", &self.shared)
            .finish()
    }
}

fn is_identity_prefix(m: &SparseMatrix, k: usize) -> bool {
    (0..k).all(|r| {
        let mut row = m.row(r);
        row.next() == Some((r, 1)) && row.next().is_none()
    })
}

impl RecognitionSystem {
    pub fn new(
        pair: CompressorPair,
        strategy: Strategy,
        typicality: TypicalityParams,
        noise: NoiseModel,
        qx: Pmf,
    ) -> Result<Self> {
        Self::with_noise_rate(pair, strategy, typicality, noise, qx, None)
    }

    /// Like [`new`](Self::new) with a known noise entropy rate for the
    /// strict syndrome check; `None` computes it from the noise model.
    pub fn with_noise_rate(
        pair: CompressorPair,
        strategy: Strategy,
        typicality: TypicalityParams,
        noise: NoiseModel,
        qx: Pmf,
        noise_rate: Option<f64>,
    ) -> Result<Self> {
        let spec = pair.spec();
        spec.ensure_same(noise.spec())?;
        spec.ensure_same(qx.spec())?;
        let shared = pair.n_min();
        let strict = typicality.mode == TypicalityMode::Strict;
        let noise_rate = || match noise_rate {
            Some(rate) => rate,
            None if strict => noise.entropy_rate().value,
            None => 0.0,
        };
        let engine = match strategy {
            Strategy::Truncation => {
                if !(is_identity_prefix(pair.h(), shared) && is_identity_prefix(pair.g(), shared)) {
                    return Err(Error::Precondition(
                        "truncation recognition needs identity prefixes in both compressors".into(),
                    ));
                }
                let joint = if strict {
                    Some(JointTypicality::new(&qx, &noise.marginal(), typicality.epsilon)?)
                } else {
                    None
                };
                Engine::Truncation { joint }
            }
            Strategy::Syndrome(dec) => {
                if pair.construction() == Construction::Truncation || !pair.shares_top_block() {
                    return Err(Error::Precondition(
                        "syndrome recognition needs compressors sharing their top block".into(),
                    ));
                }
                let matrix = pair.h().top_rows(shared)?;
                match dec {
                    SyndromeDecoder::Bp(cfg) => {
                        cfg.validate()?;
                        Engine::Bp { decoder: BpDecoder::new(&matrix), cfg, channel: noise.marginal(), rate: noise_rate() }
                    }
                    SyndromeDecoder::Oracle(cfg) => {
                        let nullity = RowEchelon::reduce(&DenseMatrix::from_sparse(&matrix)).nullity();
                        if (spec.r() as f64).powi(nullity as i32) > cfg.max_coset as f64 {
                            return Err(Error::Resource(format!(
                                "ML oracle would enumerate {}^{nullity} coset members per index",
                                spec.r()
                            )));
                        }
                        Engine::Oracle { matrix, cfg, rate: noise_rate() }
                    }
                }
            }
        };
        let scorer = match &noise {
            NoiseModel::Iid(p) => NoiseScore::Iid(p.log2_table()),
            NoiseModel::GilbertElliott(ge) if ge.good() == ge.bad() => NoiseScore::Iid(ge.good().log2_table()),
            NoiseModel::GilbertElliott(_) => NoiseScore::Markov,
        };
        Ok(RecognitionSystem { pair, strategy, typicality, noise, qx, shared, engine, scorer })
    }

    pub fn pair(&self) -> &CompressorPair {
        &self.pair
    }

    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    pub fn typicality(&self) -> TypicalityParams {
        self.typicality
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn spec(&self) -> FieldSpec {
        self.pair.spec()
    }

    pub fn n(&self) -> usize {
        self.pair.n()
    }

    /// Rows compared between memory and observation (`n_min`).
    pub fn shared_rows(&self) -> usize {
        self.shared
    }

    fn strict(&self) -> bool {
        self.typicality.mode == TypicalityMode::Strict
    }

    fn log_likelihood(&self, z: &[u8]) -> f64 {
        match (&self.scorer, &self.noise) {
            (NoiseScore::Iid(table), _) => {
                let mut counts = vec![0usize; table.len()];
                z.iter().for_each(|&a| counts[a as usize] += 1);
                log_prob_from_counts(&counts, table)
            }
            (NoiseScore::Markov, NoiseModel::GilbertElliott(ge)) => ge.forward_log_likelihood(z),
            (NoiseScore::Markov, NoiseModel::Iid(_)) => unreachable!("scorer follows the noise model"),
        }
    }

    /// `s_i = H x_i` for every stored pattern.
    pub fn build_memory(&self, db: &PatternDatabase) -> Result<CompressedMemory> {
        self.spec().ensure_same(db.spec())?;
        if db.n() != self.n() {
            return Err(Error::Shape(format!("patterns have length {}, compressors expect {}", db.n(), self.n())));
        }
        let h = self.pair.h();
        let mut data = Vec::with_capacity(db.len() * h.rows());
        for x in db.iter() {
            data.extend(h.mul_slice(x));
        }
        Ok(CompressedMemory { spec: self.spec(), rows: h.rows(), data })
    }

    fn check_inputs(&self, s_i: &FieldVector, sigma: &FieldVector) -> Result<()> {
        self.spec().ensure_same(s_i.spec())?;
        self.spec().ensure_same(sigma.spec())?;
        if s_i.len() != self.pair.h().rows() || sigma.len() != self.pair.g().rows() {
            return Err(Error::Shape(format!(
                "memory entry of length {} and observation of length {}, expected {} and {}",
                s_i.len(),
                sigma.len(),
                self.pair.h().rows(),
                self.pair.g().rows()
            )));
        }
        Ok(())
    }

    /// `sigma[..n_min] - s_i[..n_min]` zero padded to length `n`, or `None`
    /// (the failure `e`) when strict typicality rejects the pair.
    pub fn estimate_noise_truncation(&self, s_i: &FieldVector, sigma: &FieldVector) -> Result<Option<FieldVector>> {
        self.check_inputs(s_i, sigma)?;
        let Engine::Truncation { joint } = &self.engine else {
            return Err(Error::Precondition("system does not use truncation recognition".into()));
        };
        let k = self.shared;
        let (x, y) = (&s_i.as_slice()[..k], &sigma.as_slice()[..k]);
        if let Some(joint) = joint {
            if !joint.check(x, y) {
                return Ok(None);
            }
        }
        let f = self.spec();
        let z: Vec<u8> = y.iter().zip(x).map(|(&b, &a)| f.sub(b, a)).collect();
        Ok(Some(FieldVector::from_raw(f, z).zero_padded(self.n())?))
    }

    /// Decodes the hypothesis syndrome `sigma[..k] - s_i[..k]`; `None` on
    /// decoder failure or (strict mode) an atypical estimate.
    pub fn estimate_noise_syndrome(&self, s_i: &FieldVector, sigma: &FieldVector) -> Result<Option<FieldVector>> {
        self.check_inputs(s_i, sigma)?;
        Ok(self.decode_hypothesis(s_i.as_slice(), sigma.as_slice())?.estimate)
    }

    fn decode_hypothesis(&self, s_i: &[u8], sigma: &[u8]) -> Result<DecodeOutcome> {
        let f = self.spec();
        let k = self.shared;
        let t: Vec<u8> = sigma[..k].iter().zip(&s_i[..k]).map(|(&b, &a)| f.sub(b, a)).collect();
        let t = FieldVector::from_raw(f, t);
        let (mut out, rate) = match &self.engine {
            Engine::Bp { decoder, cfg, channel, rate } => (decoder.decode(&t, channel, cfg)?, *rate),
            Engine::Oracle { matrix, cfg, rate } => (ml_syndrome_decode_with(matrix, &t, &self.noise, cfg)?, *rate),
            Engine::Truncation { .. } => {
                return Err(Error::Precondition("system does not use syndrome recognition".into()))
            }
        };
        if self.strict() {
            if let Some(z) = &out.estimate {
                let per_symbol = -self.log_likelihood(z.as_slice()) / z.len() as f64;
                if (per_symbol - rate).abs() >= self.typicality.epsilon {
                    out.estimate = None;
                }
            }
        }
        Ok(out)
    }

    /// Outcome for one index from its memory entry and the observation.
    pub fn evaluate(&self, s_i: &[u8], sigma: &[u8]) -> Result<IndexOutcome> {
        match &self.engine {
            Engine::Truncation { joint } => Ok(self.truncation_outcome(joint.as_ref(), s_i, sigma)),
            _ => {
                let out = self.decode_hypothesis(s_i, sigma)?;
                let score = out.estimate.as_ref().map_or(f64::NEG_INFINITY, |z| self.log_likelihood(z.as_slice()));
                Ok(IndexOutcome { score, iterations: out.iterations as u32 })
            }
        }
    }

    /// Scores `log2 P_z(z_hat[..n_min])`; the zero padding adds a constant
    /// to every index and cannot change the argmax.
    fn truncation_outcome(&self, joint: Option<&JointTypicality>, s_i: &[u8], sigma: &[u8]) -> IndexOutcome {
        let k = self.shared;
        let (x, y) = (&s_i[..k], &sigma[..k]);
        if let Some(joint) = joint {
            if !joint.check(x, y) {
                return IndexOutcome::FAILURE;
            }
        }
        let f = self.spec();
        let z: Vec<u8> = y.iter().zip(x).map(|(&b, &a)| f.sub(b, a)).collect();
        IndexOutcome { score: self.log_likelihood(&z), iterations: 0 }
    }

    /// Runs the recognizer over a materialized memory.
    pub fn recognize(&self, memory: &CompressedMemory, sigma: &FieldVector) -> Result<Verdict> {
        self.spec().ensure_same(memory.spec)?;
        self.spec().ensure_same(sigma.spec())?;
        if memory.rows != self.pair.h().rows() || sigma.len() != self.pair.g().rows() {
            return Err(Error::Shape("memory or observation does not match the compressors".into()));
        }
        let sigma = sigma.as_slice();
        let outcomes: Vec<IndexOutcome> = (0..memory.len())
            .into_par_iter()
            .map(|i| self.evaluate(memory.entry(i), sigma))
            .collect::<Result<_>>()?;
        Ok(Verdict::from_outcomes(&outcomes))
    }

    /// Same verdict as [`recognize`](Self::recognize) on the memory of
    /// `generate_database(env, db_seed)`, regenerating each pattern on the fly
    /// instead of storing the database.
    pub fn recognize_streamed(&self, env: &Environment, db_seed: u64, sigma: &FieldVector) -> Result<Verdict> {
        self.spec().ensure_same(env.spec())?;
        self.spec().ensure_same(sigma.spec())?;
        if env.n() != self.n() || sigma.len() != self.pair.g().rows() {
            return Err(Error::Shape("environment or observation does not match the compressors".into()));
        }
        if env.qx() != &self.qx {
            return Err(Error::Precondition("environment pattern distribution differs from the system's".into()));
        }
        let mc = env.pattern_count();
        let sampler = env.qx().sampler();
        let sig = sigma.as_slice();
        let outcomes: Vec<IndexOutcome> = match (&self.engine, &self.scorer) {
            (Engine::Truncation { joint }, NoiseScore::Iid(table)) if self.spec().order() == 2 => {
                let k = self.shared;
                let words = packed_words_for(k);
                let sig_packed = PackedGf2Vector::from_bits(&sig[..k]);
                let wy = sig_packed.weight();
                (0..mc)
                    .into_par_iter()
                    .map_init(
                        || vec![0u64; words],
                        |buf, i| {
                            sampler.fill_packed(&mut Environment::pattern_rng(db_seed, i), k, buf);
                            let w = xor_weight_prefix(buf, sig_packed.words(), k);
                            if let Some(joint) = joint {
                                let wx = weight_prefix(buf, k);
                                if !joint.check_counts(k, &[k - wx, wx], &[k - wy, wy], &[k - w, w]) {
                                    return IndexOutcome::FAILURE;
                                }
                            }
                            IndexOutcome { score: log_prob_from_counts(&[k - w, w], table), iterations: 0 }
                        },
                    )
                    .collect()
            }
            (Engine::Truncation { joint }, _) => {
                let k = self.shared;
                (0..mc)
                    .into_par_iter()
                    .map_init(
                        || vec![0u8; k],
                        |buf, i| {
                            sampler.fill(&mut Environment::pattern_rng(db_seed, i), buf);
                            self.truncation_outcome(joint.as_ref(), buf, sig)
                        },
                    )
                    .collect()
            }
            _ => {
                let h = self.pair.h();
                (0..mc)
                    .into_par_iter()
                    .map_init(
                        || vec![0u8; self.n()],
                        |buf, i| {
                            sampler.fill(&mut Environment::pattern_rng(db_seed, i), buf);
                            self.evaluate(&h.mul_slice(buf), sig)
                        },
                    )
                    .collect::<Result<_>>()?
            }
        };
        Ok(Verdict::from_outcomes(&outcomes))
    }
}

/// The compressed patterns `s_i`, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CompressedMemory {
    spec: FieldSpec,
    rows: usize,
    data: Vec<u8>,
}

impl CompressedMemory {
    pub fn from_entries(spec: FieldSpec, entries: &[FieldVector]) -> Result<Self> {
        let rows = entries.first().map_or(0, FieldVector::len);
        let mut data = Vec::with_capacity(rows * entries.len());
        for e in entries {
            spec.ensure_same(e.spec())?;
            if e.len() != rows {
                return Err(Error::Shape("memory entries differ in length".into()));
            }
            data.extend_from_slice(e.as_slice());
        }
        Ok(CompressedMemory { spec, rows, data })
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    /// Length of each entry (`rows(H)`).
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn len(&self) -> usize {
        if self.rows == 0 {
            0
        } else {
            self.data.len() / self.rows
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn entry(&self, i: usize) -> &[u8] {
        &self.data[i * self.rows..(i + 1) * self.rows]
    }

    pub fn entry_vector(&self, i: usize) -> FieldVector {
        FieldVector::from_raw(self.spec, self.entry(i).to_vec())
    }
}

/// Result of one recognition: per-index scores (`-inf` for `e`), the
/// estimated index and whether the maximum is shared.
#[derive(Clone, Debug, PartialEq)]
pub struct Verdict {
    pub j_hat: Option<usize>,
    pub scores: Vec<f64>,
    pub tie: bool,
    pub iterations: u64,
}

impl Verdict {
    /// `j_hat` is the smallest index attaining the largest finite score;
    /// `None` when every index failed.
    pub fn from_scores(scores: Vec<f64>) -> Self {
        let mut j_hat: Option<usize> = None;
        let mut tie = false;
        for (i, &s) in scores.iter().enumerate() {
            if s == f64::NEG_INFINITY {
                continue;
            }
            match j_hat {
                None => j_hat = Some(i),
                Some(b) if s > scores[b] => {
                    j_hat = Some(i);
                    tie = false;
                }
                Some(b) if s == scores[b] => tie = true,
                _ => {}
            }
        }
        Verdict { j_hat, scores, tie, iterations: 0 }
    }

    pub fn from_outcomes(outcomes: &[IndexOutcome]) -> Self {
        let mut v = Self::from_scores(outcomes.iter().map(|o| o.score).collect());
        v.iterations = outcomes.iter().map(|o| u64::from(o.iterations)).sum();
        v
    }

    pub fn is_reject_all(&self) -> bool {
        self.j_hat.is_none()
    }

    pub fn best_score(&self) -> f64 {
        self.j_hat.map_or(f64::NEG_INFINITY, |j| self.scores[j])
    }

    /// Indices other than `j` that produced an estimate.
    pub fn false_accepts(&self, j: usize) -> usize {
        self.scores.iter().enumerate().filter(|&(i, s)| i != j && s.is_finite()).count()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ErrorEvent {
    None,
    /// The true index failed its check.
    MissedTypicality,
    /// A wrong index scored strictly best.
    FalseAccept,
    /// The true index shares the best score with another index.
    Tie,
}

impl ErrorEvent {
    pub fn is_error(self) -> bool {
        self != ErrorEvent::None
    }
}

/// Classifies a verdict against the true index `j`. A rejected true index
/// takes precedence; ties at the maximum count as errors.
pub fn classify(verdict: &Verdict, j: usize) -> ErrorEvent {
    let own = verdict.scores.get(j).copied().unwrap_or(f64::NEG_INFINITY);
    if own == f64::NEG_INFINITY {
        ErrorEvent::MissedTypicality
    } else if own == verdict.best_score() && verdict.tie {
        ErrorEvent::Tie
    } else if verdict.j_hat == Some(j) {
        ErrorEvent::None
    } else {
        ErrorEvent::FalseAccept
    }
}

pub fn classify_error(verdict: &Verdict, instance: &TestInstance) -> ErrorEvent {
    classify(verdict, instance.j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compressors::{compress, ldpc_pair, truncation_pair};
    use crate::environment::{draw_test, draw_test_streamed, generate_database};
    use crate::rng::{Purpose, Seed};

    fn binary_trunc(n: usize, rm: f64, rs: f64, mode: TypicalityParams, q: f64) -> RecognitionSystem {
        let f = FieldSpec::binary();
        RecognitionSystem::new(
            truncation_pair(n, rm, rs, f).unwrap(),
            Strategy::Truncation,
            mode,
            NoiseModel::Iid(Pmf::bernoulli(q).unwrap()),
            Pmf::uniform(f),
        )
        .unwrap()
    }

    #[test]
    fn memory_entries() {
        let sys = binary_trunc(20, 0.5, 0.5, TypicalityParams::default(), 0.1);
        let env = Environment::with_pattern_count(20, 16, Pmf::uniform(FieldSpec::binary()), sys.noise().clone()).unwrap();
        let db = generate_database(&env, 3).unwrap();
        let mem = sys.build_memory(&db).unwrap();
        assert_eq!(mem.len(), 16);
        for i in 0..16 {
            assert_eq!(mem.entry(i), &db.pattern(i)[..10]);
        }
        let full = binary_trunc(20, 1.0, 1.0, TypicalityParams::default(), 0.1);
        let mem = full.build_memory(&db).unwrap();
        assert_eq!(mem.entry(5), db.pattern(5));

        let f = FieldSpec::new(3).unwrap();
        let pair = ldpc_pair(24, 0.5, 0.5, 3, 6, f, 1).unwrap();
        let x1 = FieldVector::new(f, (0..24).map(|k| (k % 3) as u8).collect()).unwrap();
        let x2 = FieldVector::new(f, (0..24).map(|k| (k * k % 3) as u8).collect()).unwrap();
        let s = |x: &FieldVector| compress(pair.h(), x).unwrap();
        assert_eq!(s(&x1.add(&x2).unwrap()), s(&x1).add(&s(&x2)).unwrap());
    }

    #[test]
    fn truncation_estimates() {
        let f = FieldSpec::binary();
        let sys = binary_trunc(12, 0.5, 0.75, TypicalityParams::default(), 0.1);
        let x = FieldVector::new(f, vec![1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1, 0]).unwrap();
        let z = FieldVector::new(f, vec![0, 1, 0, 0, 0, 1, 0, 0, 1, 0, 0, 0]).unwrap();
        let s = compress(sys.pair().h(), &x).unwrap();
        let clean = compress(sys.pair().g(), &x).unwrap();
        assert_eq!(sys.estimate_noise_truncation(&s, &clean).unwrap(), Some(FieldVector::zeros(f, 12)));
        let sigma = compress(sys.pair().g(), &x.add(&z).unwrap()).unwrap();
        let est = sys.estimate_noise_truncation(&s, &sigma).unwrap().unwrap();
        assert_eq!(est.prefix(6).unwrap(), z.prefix(6).unwrap());
        assert!(est.as_slice()[6..].iter().all(|&b| b == 0));
        assert!(sys.estimate_noise_syndrome(&s, &sigma).is_err());
    }

    #[test]
    fn strict_truncation_rejects_false_pairs() {
        let f = FieldSpec::binary();
        let sys = binary_trunc(500, 1.0, 1.0, TypicalityParams::strict(0.1).unwrap(), 0.11);
        let sampler = Pmf::uniform(f).sampler();
        let noise = Pmf::bernoulli(0.11).unwrap().sampler();
        let mut rng = Seed(1).stream(Purpose::TestDraw, 0);
        let (mut rejected, mut true_kept) = (0, 0);
        for _ in 0..1000 {
            let xi = sampler.sample(&mut rng, 500);
            let xj = sampler.sample(&mut rng, 500);
            let y = xj.add(&noise.sample(&mut rng, 500)).unwrap();
            rejected += usize::from(sys.estimate_noise_truncation(&xi, &y).unwrap().is_none());
            true_kept += usize::from(sys.estimate_noise_truncation(&xj, &y).unwrap().is_some());
        }
        assert!(rejected >= 900, "{rejected}");
        assert!(true_kept >= 900, "{true_kept}");
    }

    #[test]
    fn verdict_rules() {
        let ninf = f64::NEG_INFINITY;
        let v = Verdict::from_scores(vec![-3.0, -1.0, ninf, -1.5]);
        assert_eq!((v.j_hat, v.tie), (Some(1), false));
        assert_eq!(classify(&v, 1), ErrorEvent::None);
        assert_eq!(classify(&v, 0), ErrorEvent::FalseAccept);
        assert_eq!(classify(&v, 2), ErrorEvent::MissedTypicality);
        let t = Verdict::from_scores(vec![-2.0, -1.0, -1.0]);
        assert_eq!((t.j_hat, t.tie), (Some(1), true));
        assert_eq!(classify(&t, 1), ErrorEvent::Tie);
        assert_eq!(classify(&t, 2), ErrorEvent::Tie);
        assert_eq!(classify(&t, 0), ErrorEvent::FalseAccept);
        let none = Verdict::from_scores(vec![ninf, ninf]);
        assert!(none.is_reject_all());
        assert_eq!(classify(&none, 0), ErrorEvent::MissedTypicality);
        let single = Verdict::from_scores(vec![-4.0]);
        assert_eq!(single.j_hat, Some(0));
        // a later higher score clears an earlier tie
        let cleared = Verdict::from_scores(vec![-2.0, -2.0, -1.0]);
        assert_eq!((cleared.j_hat, cleared.tie), (Some(2), false));
    }

    #[test]
    fn argmax_invariant_under_monotone_maps() {
        let mut rng = Seed(4).stream(Purpose::TestDraw, 0);
        for _ in 0..200 {
            let scores: Vec<f64> = (0..20)
                .map(|_| {
                    let u: u32 = rand::Rng::gen_range(&mut rng, 0..12);
                    if u == 0 { f64::NEG_INFINITY } else { -(u as f64) * 0.75 }
                })
                .collect();
            let a = Verdict::from_scores(scores.clone());
            let b = Verdict::from_scores(scores.iter().map(|s| 3.0 * s - 7.0).collect());
            let c = Verdict::from_scores(scores.iter().map(|s| s.exp2()).map(|p| if p == 0.0 { f64::NEG_INFINITY } else { p }).collect());
            assert_eq!((a.j_hat, a.tie), (b.j_hat, b.tie));
            assert_eq!((a.j_hat, a.tie), (c.j_hat, c.tie));
        }
    }

    #[test]
    fn noiseless_truncation_always_finds_the_pattern() {
        let f = FieldSpec::binary();
        let sys = RecognitionSystem::new(
            truncation_pair(64, 0.5, 0.5, f).unwrap(),
            Strategy::Truncation,
            TypicalityParams::default(),
            NoiseModel::Iid(Pmf::bernoulli(0.05).unwrap()),
            Pmf::uniform(f),
        )
        .unwrap();
        let env = Environment::with_pattern_count(64, 64, Pmf::uniform(f), NoiseModel::noiseless(f)).unwrap();
        let db = generate_database(&env, 2).unwrap();
        let mem = sys.build_memory(&db).unwrap();
        for t in 0..30 {
            let inst = draw_test(&db, &NoiseModel::noiseless(f), t).unwrap();
            let sigma = compress(sys.pair().g(), &inst.y).unwrap();
            let v = sys.recognize(&mem, &sigma).unwrap();
            assert_eq!(classify_error(&v, &inst), ErrorEvent::None);
        }
    }

    fn assert_streamed_matches(sys: &RecognitionSystem, env: &Environment, trials: u64) {
        let db = generate_database(env, 9).unwrap();
        let mem = sys.build_memory(&db).unwrap();
        for t in 0..trials {
            let (inst, _) = draw_test_streamed(env, 9, t);
            let sigma = compress(sys.pair().g(), &inst.y).unwrap();
            let a = sys.recognize(&mem, &sigma).unwrap();
            let b = sys.recognize_streamed(env, 9, &sigma).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn streamed_recognition_matches_materialized() {
        let f2 = FieldSpec::binary();
        for params in [TypicalityParams::default(), TypicalityParams::strict(0.2).unwrap()] {
            for qx in [Pmf::uniform(f2), Pmf::bernoulli(0.3).unwrap()] {
                let noise = NoiseModel::Iid(Pmf::bernoulli(0.1).unwrap());
                let sys = RecognitionSystem::new(
                    truncation_pair(150, 0.4, 0.5, f2).unwrap(),
                    Strategy::Truncation,
                    params,
                    noise.clone(),
                    qx.clone(),
                )
                .unwrap();
                let env = Environment::with_pattern_count(150, 300, qx, noise).unwrap();
                assert_streamed_matches(&sys, &env, 5);
            }
        }
        let f3 = FieldSpec::new(3).unwrap();
        let noise = NoiseModel::Iid(Pmf::symmetric(f3, 0.1).unwrap());
        let sys = RecognitionSystem::new(
            truncation_pair(90, 0.5, 0.5, f3).unwrap(),
            Strategy::Truncation,
            TypicalityParams::default(),
            noise.clone(),
            Pmf::uniform(f3),
        )
        .unwrap();
        assert_streamed_matches(&sys, &Environment::with_pattern_count(90, 100, Pmf::uniform(f3), noise).unwrap(), 5);

        let noise = NoiseModel::Iid(Pmf::bernoulli(0.04).unwrap());
        let sys = RecognitionSystem::new(
            ldpc_pair(120, 0.5, 0.75, 3, 6, f2, 3).unwrap(),
            Strategy::Syndrome(SyndromeDecoder::Bp(BpConfig::default())),
            TypicalityParams::strict(0.2).unwrap(),
            noise.clone(),
            Pmf::uniform(f2),
        )
        .unwrap();
        assert_streamed_matches(&sys, &Environment::with_pattern_count(120, 20, Pmf::uniform(f2), noise).unwrap(), 3);
    }

    #[test]
    fn syndrome_hypothesis_of_true_index_is_noise_syndrome() {
        let f = FieldSpec::binary();
        let noise = NoiseModel::Iid(Pmf::bernoulli(0.03).unwrap());
        let sys = RecognitionSystem::new(
            ldpc_pair(240, 0.5, 0.5, 3, 6, f, 2).unwrap(),
            Strategy::Syndrome(SyndromeDecoder::Bp(BpConfig::default())),
            TypicalityParams::default(),
            noise.clone(),
            Pmf::uniform(f),
        )
        .unwrap();
        let env = Environment::with_pattern_count(240, 8, Pmf::uniform(f), NoiseModel::noiseless(f)).unwrap();
        let (inst, x) = draw_test_streamed(&env, 1, 1);
        let s = compress(sys.pair().h(), &x).unwrap();
        let sigma = compress(sys.pair().g(), &inst.y).unwrap();
        assert_eq!(sys.estimate_noise_syndrome(&s, &sigma).unwrap(), Some(FieldVector::zeros(f, 240)));

        let mut rng = Seed(2).stream(Purpose::TestDraw, 0);
        for _ in 0..20 {
            let z = noise.sample(&mut rng, 240);
            let sigma = compress(sys.pair().g(), &x.add(&z).unwrap()).unwrap();
            let t = sigma.sub(&s).unwrap();
            assert_eq!(t, compress(sys.pair().h(), &z).unwrap());
        }
    }

    #[test]
    fn strategy_compatibility() {
        let f = FieldSpec::binary();
        let noise = NoiseModel::Iid(Pmf::bernoulli(0.05).unwrap());
        let ldpc = ldpc_pair(60, 0.5, 0.5, 3, 6, f, 1).unwrap();
        assert!(RecognitionSystem::new(ldpc, Strategy::Truncation, TypicalityParams::default(), noise.clone(), Pmf::uniform(f)).is_err());
        let trunc = truncation_pair(60, 0.5, 0.5, f).unwrap();
        let syn = Strategy::Syndrome(SyndromeDecoder::Bp(BpConfig::default()));
        assert!(RecognitionSystem::new(trunc, syn, TypicalityParams::default(), noise.clone(), Pmf::uniform(f)).is_err());
        let big = ldpc_pair(120, 0.5, 0.5, 3, 6, f, 1).unwrap();
        let ml = Strategy::Syndrome(SyndromeDecoder::Oracle(MlConfig { max_coset: 1 << 12 }));
        assert!(matches!(
            RecognitionSystem::new(big, ml, TypicalityParams::default(), noise, Pmf::uniform(f)),
            Err(Error::Resource(_))
        ));
    }
}
