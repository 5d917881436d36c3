//! Distributions over GF(r), entropies, sequence likelihoods and typical-set
//! predicates. All logarithms are base 2.

use crate::environment::NoiseModel;
use crate::error::{Error, Result};
use crate::gf::{symbol_counts, FieldSpec, FieldVector};
use rand::RngCore;

const SUM_TOLERANCE: f64 = 1e-12;

/// A probability mass function over the symbols of GF(r).
#[derive(Clone, Debug, PartialEq)]
pub struct Pmf {
    spec: FieldSpec,
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new(spec: FieldSpec, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != spec.r() {
            return Err(Error::InvalidPmf(format!(
                "{} probabilities for {spec}",
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidPmf(format!("probability {p} is not in [0, 1]")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidPmf(format!("probabilities sum to {total}")));
        }
        Ok(Pmf { spec, probs })
    }

    pub fn uniform(spec: FieldSpec) -> Self {
        Pmf {
            spec,
            probs: vec![1.0 / spec.r() as f64; spec.r()],
        }
    }

    pub fn point_mass(spec: FieldSpec, at: u8) -> Result<Self> {
        spec.check(at)?;
        let mut probs = vec![0.0; spec.r()];
        probs[at as usize] = 1.0;
        Ok(Pmf { spec, probs })
    }

    /// Bernoulli(q) over GF(2): `P(1) = q`.
    pub fn bernoulli(q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidPmf(format!("Bernoulli parameter {q}")));
        }
        Ok(Pmf {
            spec: FieldSpec::binary(),
            probs: vec![1.0 - q, q],
        })
    }

    /// `P(0) = 1 - q`, remaining mass spread evenly over the nonzero symbols.
    pub fn symmetric(spec: FieldSpec, q: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidPmf(format!("symmetric parameter {q}")));
        }
        let mut probs = vec![q / (spec.r() - 1) as f64; spec.r()];
        probs[0] = 1.0 - q;
        Ok(Pmf { spec, probs })
    }

    /// `w a + (1 - w) b`.
    pub fn mixture(w: f64, a: &Pmf, b: &Pmf) -> Result<Self> {
        a.spec.ensure_same(b.spec)?;
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidPmf(format!("mixture weight {w}")));
        }
        let probs: Vec<f64> = a
            .probs
            .iter()
            .zip(&b.probs)
            .map(|(x, y)| w * x + (1.0 - w) * y)
            .collect();
        let total: f64 = probs.iter().sum();
        Ok(Pmf {
            spec: a.spec,
            probs: probs.into_iter().map(|p| p / total).collect(),
        })
    }

    #[inline]
    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    #[inline]
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn p(&self, a: u8) -> f64 {
        self.probs[a as usize]
    }

    pub fn is_uniform(&self) -> bool {
        let u = 1.0 / self.spec.r() as f64;
        self.probs.iter().all(|&p| p == u)
    }

    /// Per-symbol `log2 p`, `-inf` for zero-probability symbols.
    pub fn log2_table(&self) -> Vec<f64> {
        self.probs.iter().map(|&p| p.log2()).collect()
    }

    /// The most probable symbol; the smallest one on ties.
    pub fn mode(&self) -> u8 {
        let mut best = 0;
        for (a, &p) in self.probs.iter().enumerate() {
            if p > self.probs[best] {
                best = a;
            }
        }
        best as u8
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        entropy(self)
    }

    pub fn sampler(&self) -> SymbolSampler {
        SymbolSampler::new(self)
    }
}

/// `-sum p log2 p` with `0 log 0 = 0`.
pub fn entropy(p: &Pmf) -> f64 {
    -p.probs
        .iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.log2())
        .sum::<f64>()
}

/// Binary entropy function H2(q).
pub fn binary_entropy(q: f64) -> f64 {
    let h = |x: f64| if x > 0.0 { -x * x.log2() } else { 0.0 };
    h(q) + h(1.0 - q)
}

/// Distribution of `X + Z` for independent `X ~ px`, `Z ~ pz`.
pub fn convolve(px: &Pmf, pz: &Pmf) -> Result<Pmf> {
    px.spec.ensure_same(pz.spec)?;
    let f = px.spec;
    let mut out = vec![0.0; f.r()];
    for (k, slot) in out.iter_mut().enumerate() {
        for a in 0..f.order() {
            *slot += px.p(a) * pz.p(f.sub(k as u8, a));
        }
    }
    Ok(Pmf {
        spec: f,
        probs: out,
    })
}

/// `sum_k counts[k] log2 p_k`. Symbols with zero count contribute nothing,
/// so the result only depends on the symbol type of the sequence.
pub fn log_prob_from_counts(counts: &[usize], log2p: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&c, &l) in counts.iter().zip(log2p) {
        if c > 0 {
            acc += c as f64 * l;
        }
    }
    acc
}

/// `log2 P(v)` for `v` i.i.d. from `p`; `-inf` if any symbol has probability 0.
pub fn seq_log_prob(v: &FieldVector, p: &Pmf) -> f64 {
    debug_assert_eq!(v.spec(), p.spec());
    log_prob_from_counts(&v.symbol_counts(), &p.log2_table())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TypicalityMode {
    /// Candidates failing the typical-set test are rejected.
    Strict,
    /// No rejection; candidates are ranked by likelihood only.
    ScoreOnly,
}

impl TypicalityMode {
    pub fn name(self) -> &'static str {
        match self {
            TypicalityMode::Strict => "strict",
            TypicalityMode::ScoreOnly => "score",
        }
    }
}

impl std::str::FromStr for TypicalityMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" | "strict-typicality" => Ok(TypicalityMode::Strict),
            "score" | "score-only" => Ok(TypicalityMode::ScoreOnly),
            other => Err(Error::Parse(format!("unknown typicality mode `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TypicalityParams {
    pub epsilon: f64,
    pub mode: TypicalityMode,
}

impl TypicalityParams {
    pub fn new(epsilon: f64, mode: TypicalityMode) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
        }
        Ok(TypicalityParams { epsilon, mode })
    }

    pub fn strict(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, TypicalityMode::Strict)
    }

    pub fn score_only(epsilon: f64) -> Result<Self> {
        Self::new(epsilon, TypicalityMode::ScoreOnly)
    }
}

impl Default for TypicalityParams {
    fn default() -> Self {
        TypicalityParams {
            epsilon: 0.1,
            mode: TypicalityMode::ScoreOnly,
        }
    }
}

/// The jointly typical set test for pairs `(x, y)` with `y = x + z`,
/// `x ~ qx`, `z ~ qz`, with entropies and log tables precomputed.
#[derive(Clone, Debug)]
pub struct JointTypicality {
    spec: FieldSpec,
    epsilon: f64,
    hx: f64,
    hy: f64,
    hz: f64,
    log_qx: Vec<f64>,
    log_qy: Vec<f64>,
    log_qz: Vec<f64>,
}

impl JointTypicality {
    pub fn new(qx: &Pmf, qz: &Pmf, epsilon: f64) -> Result<Self> {
        let qy = convolve(qx, qz)?;
        Ok(JointTypicality {
            spec: qx.spec,
            epsilon,
            hx: qx.entropy(),
            hy: qy.entropy(),
            hz: qz.entropy(),
            log_qx: qx.log2_table(),
            log_qy: qy.log2_table(),
            log_qz: qz.log2_table(),
        })
    }

    /// Test from the symbol types of `x`, `y` and `y - x`, each of length `n`.
    pub fn check_counts(&self, n: usize, cx: &[usize], cy: &[usize], cdiff: &[usize]) -> bool {
        let n = n as f64;
        let lx = log_prob_from_counts(cx, &self.log_qx);
        let ly = log_prob_from_counts(cy, &self.log_qy);
        let lxy = lx + log_prob_from_counts(cdiff, &self.log_qz);
        (-lx / n - self.hx).abs() < self.epsilon
            && (-ly / n - self.hy).abs() < self.epsilon
            && (-lxy / n - self.hx - self.hz).abs() < self.epsilon
    }

    pub fn check(&self, x: &[u8], y: &[u8]) -> bool {
        debug_assert_eq!(x.len(), y.len());
        let f = self.spec;
        let diff: Vec<u8> = y.iter().zip(x).map(|(&b, &a)| f.sub(b, a)).collect();
        self.check_counts(
            x.len(),
            &symbol_counts(f, x),
            &symbol_counts(f, y),
            &symbol_counts(f, &diff),
        )
    }
}

/// Whether `(x, y)` lies in the jointly typical set for `(qx, qz)`.
pub fn in_joint_typical_set(
    x: &FieldVector,
    y: &FieldVector,
    qx: &Pmf,
    qz: &Pmf,
    params: &TypicalityParams,
) -> Result<bool> {
    x.spec().ensure_same(y.spec())?;
    x.spec().ensure_same(qx.spec())?;
    if x.len() != y.len() || x.is_empty() {
        return Err(Error::Shape(format!(
            "typicality test on lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    Ok(JointTypicality::new(qx, qz, params.epsilon)?.check(x.as_slice(), y.as_slice()))
}

/// `| -(1/n) log2 P(z) - rate | < epsilon` with an already known entropy rate.
pub fn in_noise_typical_set_with_rate(
    z: &FieldVector,
    noise: &NoiseModel,
    rate: f64,
    epsilon: f64,
) -> bool {
    let n = z.len() as f64;
    (-noise.log_likelihood(z) / n - rate).abs() < epsilon
}

/// Whether `z` lies in the noise typical set of `noise`.
///
/// The entropy rate is recomputed on each call (a Monte Carlo estimate for
/// Gilbert-Elliott noise); use [`in_noise_typical_set_with_rate`] in loops.
pub fn in_noise_typical_set(z: &FieldVector, noise: &NoiseModel, params: &TypicalityParams) -> bool {
    let rate = noise.entropy_rate().value;
    in_noise_typical_set_with_rate(z, noise, rate, params.epsilon)
}

/// Draws symbols from a [`Pmf`].
///
/// Uniform GF(2) draws take one bit each, 64 per `u64`; every other
/// distribution takes one `u64` per symbol (inverse CDF). A sequence of
/// length `n` always consumes [`SymbolSampler::words_for`]`(n)` words, so
/// prefixes of longer draws are the same as shorter draws.
#[derive(Clone, Debug)]
pub struct SymbolSampler {
    spec: FieldSpec,
    fair_bits: bool,
    cdf: Vec<f64>,
}

impl SymbolSampler {
    pub fn new(p: &Pmf) -> Self {
        let mut acc = 0.0;
        let cdf = p
            .probs
            .iter()
            .map(|&x| {
                acc += x;
                acc
            })
            .collect();
        SymbolSampler {
            spec: p.spec,
            fair_bits: p.spec.order() == 2 && p.is_uniform(),
            cdf,
        }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    /// Whether draws are raw fair bits (uniform GF(2)).
    pub fn is_fair_bits(&self) -> bool {
        self.fair_bits
    }

    pub fn words_for(&self, len: usize) -> usize {
        if self.fair_bits {
            len.div_ceil(64)
        } else {
            len
        }
    }

    #[inline]
    fn symbol(&self, word: u64) -> u8 {
        let u = (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        // Last symbol with nonzero mass absorbs rounding in the CDF tail.
        match self.cdf.iter().position(|&c| u < c) {
            Some(k) => k as u8,
            None => self
                .cdf
                .iter()
                .enumerate()
                .rev()
                .find(|&(k, &c)| k == 0 || c > self.cdf[k - 1])
                .map_or(0, |(k, _)| k as u8),
        }
    }

    pub fn sample_one<R: RngCore>(&self, rng: &mut R) -> u8 {
        self.symbol(rng.next_u64())
    }

    /// Fills `out` with `out.len()` draws.
    pub fn fill<R: RngCore>(&self, rng: &mut R, out: &mut [u8]) {
        if self.fair_bits {
            for chunk in out.chunks_mut(64) {
                let w = rng.next_u64();
                for (i, s) in chunk.iter_mut().enumerate() {
                    *s = ((w >> i) & 1) as u8;
                }
            }
        } else {
            for s in out.iter_mut() {
                *s = self.symbol(rng.next_u64());
            }
        }
    }

    /// Fills packed GF(2) words with `len` draws; matches [`Self::fill`].
    pub fn fill_packed<R: RngCore>(&self, rng: &mut R, len: usize, out: &mut [u64]) {
        debug_assert_eq!(self.spec.order(), 2);
        debug_assert_eq!(out.len(), len.div_ceil(64));
        if self.fair_bits {
            for (k, w) in out.iter_mut().enumerate() {
                *w = rng.next_u64() & crate::gf::packed_tail_mask(len, k);
            }
        } else {
            out.fill(0);
            for i in 0..len {
                out[i / 64] |= (self.symbol(rng.next_u64()) as u64) << (i % 64);
            }
        }
    }

    pub fn sample<R: RngCore>(&self, rng: &mut R, len: usize) -> FieldVector {
        let mut v = vec![0u8; len];
        self.fill(rng, &mut v);
        FieldVector::from_raw(self.spec, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, Seed};

    fn bern(q: f64) -> Pmf {
        Pmf::bernoulli(q).unwrap()
    }

    #[test]
    fn pmf_validation() {
        let f = FieldSpec::new(3).unwrap();
        assert!(Pmf::new(f, vec![0.5, 0.5]).is_err());
        assert!(Pmf::new(f, vec![0.5, 0.6, -0.1]).is_err());
        assert!(Pmf::new(f, vec![0.5, 0.5, 0.1]).is_err());
        assert!(Pmf::new(f, vec![0.2, 0.3, 0.5]).is_ok());
        assert!(Pmf::bernoulli(1.5).is_err());
    }

    #[test]
    fn entropy_values() {
        assert_eq!(Pmf::uniform(FieldSpec::binary()).entropy(), 1.0);
        assert_eq!(Pmf::point_mass(FieldSpec::new(5).unwrap(), 2).unwrap().entropy(), 0.0);
        // -0.11 log2 0.11 - 0.89 log2 0.89, evaluated independently
        let direct = -(0.11f64 * 0.11f64.ln() + 0.89f64 * 0.89f64.ln()) / 2f64.ln();
        assert!((bern(0.11).entropy() - direct).abs() < 1e-15);
        assert!((bern(0.11).entropy() - 0.499_915_958_164_528).abs() < 1e-12);
        let f3 = FieldSpec::new(3).unwrap();
        assert!((Pmf::uniform(f3).entropy() - 3f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn convolution_cases() {
        let c = convolve(&bern(0.1), &bern(0.2)).unwrap();
        assert!((c.p(1) - (0.1 + 0.2 - 2.0 * 0.1 * 0.2)).abs() < 1e-15);
        let f3 = FieldSpec::new(3).unwrap();
        let shifted = convolve(&Pmf::point_mass(f3, 1).unwrap(), &Pmf::point_mass(f3, 2).unwrap()).unwrap();
        assert_eq!(shifted, Pmf::point_mass(f3, 0).unwrap());
        let f5 = FieldSpec::new(5).unwrap();
        let any = Pmf::new(f5, vec![0.1, 0.2, 0.3, 0.15, 0.25]).unwrap();
        let u = convolve(&Pmf::uniform(f5), &any).unwrap();
        for &p in u.probs() {
            assert!((p - 0.2).abs() < 1e-15);
        }
        assert!(convolve(&any, &bern(0.1)).is_err());
    }

    #[test]
    fn shift_invariance_of_entropy() {
        let f5 = FieldSpec::new(5).unwrap();
        let p = Pmf::new(f5, vec![0.1, 0.2, 0.3, 0.15, 0.25]).unwrap();
        for a in 0..5 {
            let shifted = convolve(&p, &Pmf::point_mass(f5, a).unwrap()).unwrap();
            assert!((shifted.entropy() - p.entropy()).abs() < 1e-12);
        }
    }

    #[test]
    fn binary_convolution_entropy_identity() {
        for a in [0.01, 0.1, 0.25, 0.4] {
            for b in [0.02, 0.11, 0.3, 0.5] {
                let c = convolve(&bern(a), &bern(b)).unwrap();
                assert!((c.entropy() - binary_entropy(a + b - 2.0 * a * b)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sequence_log_probabilities() {
        let z = FieldVector::zeros(FieldSpec::binary(), 10);
        let expected = 10.0 * 0.89f64.log2();
        assert!((seq_log_prob(&z, &bern(0.11)) - expected).abs() < 1e-12);
        assert!((expected - -1.681_227_588_083_269).abs() < 1e-12);
        let f4 = FieldSpec::new(5).unwrap();
        let v = FieldVector::new(f4, vec![0, 1, 2, 3, 4, 4, 3]).unwrap();
        assert!((seq_log_prob(&v, &Pmf::uniform(f4)) - 7.0 * 0.2f64.log2()).abs() < 1e-12);
        let ones = FieldVector::filled(FieldSpec::binary(), 3, 1).unwrap();
        assert_eq!(seq_log_prob(&ones, &bern(0.0)), f64::NEG_INFINITY);
        assert_eq!(seq_log_prob(&z, &bern(0.0)), 0.0);
    }

    #[test]
    fn log_prob_is_additive_under_concatenation() {
        let f3 = FieldSpec::new(3).unwrap();
        let p = Pmf::new(f3, vec![0.7, 0.2, 0.1]).unwrap();
        let mut rng = Seed(3).stream(Purpose::Auxiliary, 0);
        let s = p.sampler();
        for _ in 0..100 {
            let a = s.sample(&mut rng, 37);
            let b = s.sample(&mut rng, 21);
            let joined = seq_log_prob(&a.concat(&b).unwrap(), &p);
            assert!((joined - seq_log_prob(&a, &p) - seq_log_prob(&b, &p)).abs() < 1e-9);
        }
    }

    #[test]
    fn joint_typicality_examples() {
        let f = FieldSpec::binary();
        let params = TypicalityParams::strict(0.01).unwrap();
        let mut rng = Seed(1).stream(Purpose::Auxiliary, 1);
        let x = Pmf::uniform(f).sampler().sample(&mut rng, 400);
        let zero_noise = Pmf::point_mass(f, 0).unwrap();
        assert!(in_joint_typical_set(&x, &x, &Pmf::uniform(f), &zero_noise, &params).unwrap());

        let params = TypicalityParams::strict(0.1).unwrap();
        let zeros = FieldVector::zeros(f, 100);
        let ones = FieldVector::filled(f, 100, 1).unwrap();
        assert!(!in_joint_typical_set(&zeros, &ones, &Pmf::uniform(f), &bern(0.1), &params).unwrap());
        assert!(in_joint_typical_set(&zeros, &ones.prefix(50).unwrap(), &Pmf::uniform(f), &bern(0.1), &params).is_err());
    }

    #[test]
    fn sampler_prefix_consistency() {
        for p in [Pmf::uniform(FieldSpec::binary()), bern(0.3), Pmf::uniform(FieldSpec::new(7).unwrap())] {
            let s = p.sampler();
            let long = s.sample(&mut Seed(5).stream(Purpose::Patterns, 2), 150);
            let short = s.sample(&mut Seed(5).stream(Purpose::Patterns, 2), 70);
            assert_eq!(&long.as_slice()[..70], short.as_slice());
        }
    }

    #[test]
    fn packed_sampling_matches_bytes() {
        for p in [Pmf::uniform(FieldSpec::binary()), bern(0.2)] {
            let s = p.sampler();
            let bytes = s.sample(&mut Seed(8).stream(Purpose::Patterns, 0), 130);
            let mut words = vec![0u64; 3];
            s.fill_packed(&mut Seed(8).stream(Purpose::Patterns, 0), 130, &mut words);
            let packed = crate::gf::PackedGf2Vector::from_words(130, words).unwrap();
            assert_eq!(packed.to_field_vector(), bytes);
        }
    }

    #[test]
    fn sampler_frequencies() {
        let f3 = FieldSpec::new(3).unwrap();
        let p = Pmf::new(f3, vec![0.6, 0.3, 0.1]).unwrap();
        let v = p.sampler().sample(&mut Seed(9).stream(Purpose::Auxiliary, 0), 100_000);
        let c = v.symbol_counts();
        for k in 0..3 {
            assert!((c[k] as f64 / 1e5 - p.probs()[k]).abs() < 0.01);
        }
        let never = Pmf::new(f3, vec![0.5, 0.5, 0.0]).unwrap();
        let v = never.sampler().sample(&mut Seed(9).stream(Purpose::Auxiliary, 1), 10_000);
        assert_eq!(v.symbol_counts()[2], 0);
    }
}
