//! The recognition environment: pattern databases drawn i.i.d. from `qx`,
//! uniformly chosen test indices, and additive noise.

use crate::error::{Error, Result};
use crate::gf::{FieldSpec, FieldVector};
use crate::prob::{seq_log_prob, Pmf};
use crate::rng::{Purpose, Seed, StreamRng};
use rand::{Rng, RngCore};
use std::io::{Read, Write};

/// Largest pattern count an [`Environment`] may hold by default.
pub const DEFAULT_MC_CAP: u64 = 1 << 22;

/// Largest number of symbols a materialized [`PatternDatabase`] may hold by default.
pub const DEFAULT_DB_BUDGET: u64 = 1 << 28;

/// Two-state hidden Markov noise. State 0 is "good", state 1 is "bad"; each
/// state emits i.i.d. symbols from its own distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct GilbertElliott {
    p_gb: f64,
    p_bg: f64,
    good: Pmf,
    bad: Pmf,
}

impl GilbertElliott {
    pub fn new(p_gb: f64, p_bg: f64, good: Pmf, bad: Pmf) -> Result<Self> {
        good.spec().ensure_same(bad.spec())?;
        for (name, p) in [("p_gb", p_gb), ("p_bg", p_bg)] {
            if !(p > 0.0 && p < 1.0) {
                return Err(Error::InvalidParameter(format!("{name} = {p} must lie in (0, 1)")));
            }
        }
        Ok(GilbertElliott { p_gb, p_bg, good, bad })
    }

    pub fn p_gb(&self) -> f64 {
        self.p_gb
    }

    pub fn p_bg(&self) -> f64 {
        self.p_bg
    }

    pub fn good(&self) -> &Pmf {
        &self.good
    }

    pub fn bad(&self) -> &Pmf {
        &self.bad
    }

    /// Stationary probability of the bad state.
    pub fn stationary_bad(&self) -> f64 {
        self.p_gb / (self.p_gb + self.p_bg)
    }

    fn transition(&self, from: usize, to: usize) -> f64 {
        match (from, to) {
            (0, 0) => 1.0 - self.p_gb,
            (0, _) => self.p_gb,
            (_, 0) => self.p_bg,
            _ => 1.0 - self.p_bg,
        }
    }

    fn emission(&self, state: usize) -> &Pmf {
        if state == 0 {
            &self.good
        } else {
            &self.bad
        }
    }

    /// Exact `log2 P(z)` by the scaled forward recursion.
    pub fn forward_log_likelihood(&self, z: &[u8]) -> f64 {
        let pi_b = self.stationary_bad();
        let mut alpha = [1.0 - pi_b, pi_b];
        let mut log_p = 0.0;
        for (t, &sym) in z.iter().enumerate() {
            let mut next = [0.0; 2];
            for (s, slot) in next.iter_mut().enumerate() {
                let prior = if t == 0 {
                    alpha[s]
                } else {
                    alpha[0] * self.transition(0, s) + alpha[1] * self.transition(1, s)
                };
                *slot = prior * self.emission(s).p(sym);
            }
            let c = next[0] + next[1];
            if c <= 0.0 {
                return f64::NEG_INFINITY;
            }
            log_p += c.log2();
            alpha = [next[0] / c, next[1] / c];
        }
        log_p
    }
}

/// Additive noise process.
#[derive(Clone, Debug, PartialEq)]
pub enum NoiseModel {
    Iid(Pmf),
    GilbertElliott(GilbertElliott),
}

/// An entropy rate in bits per symbol with the standard error of its estimate
/// (zero when exact).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyRate {
    pub value: f64,
    pub std_error: f64,
}

/// Monte Carlo settings for entropy rates without a closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EntropyRateEstimator {
    pub sequences: usize,
    pub length: usize,
    pub seed: u64,
}

impl Default for EntropyRateEstimator {
    fn default() -> Self {
        EntropyRateEstimator {
            sequences: 500,
            length: 5000,
            seed: 0x005e_ed0f_e27a,
        }
    }
}

impl NoiseModel {
    pub fn spec(&self) -> FieldSpec {
        match self {
            NoiseModel::Iid(p) => p.spec(),
            NoiseModel::GilbertElliott(ge) => ge.good.spec(),
        }
    }

    /// Noise that is always zero.
    pub fn noiseless(spec: FieldSpec) -> Self {
        NoiseModel::Iid(Pmf::point_mass(spec, 0).expect("0 is in every field"))
    }

    /// Per-symbol marginal distribution (stationary mixture for Gilbert-Elliott).
    pub fn marginal(&self) -> Pmf {
        match self {
            NoiseModel::Iid(p) => p.clone(),
            NoiseModel::GilbertElliott(ge) => {
                Pmf::mixture(1.0 - ge.stationary_bad(), &ge.good, &ge.bad)
                    .expect("emission distributions share a field")
            }
        }
    }

    /// Exact `log2 P(z)`.
    pub fn log_likelihood(&self, z: &FieldVector) -> f64 {
        match self {
            NoiseModel::Iid(p) => seq_log_prob(z, p),
            // Identical emissions make the hidden chain irrelevant.
            NoiseModel::GilbertElliott(ge) if ge.good == ge.bad => seq_log_prob(z, &ge.good),
            NoiseModel::GilbertElliott(ge) => ge.forward_log_likelihood(z.as_slice()),
        }
    }

    /// Draws a noise sequence of length `n`.
    pub fn sample<R: RngCore>(&self, rng: &mut R, n: usize) -> FieldVector {
        match self {
            NoiseModel::Iid(p) => p.sampler().sample(rng, n),
            NoiseModel::GilbertElliott(ge) => {
                let samplers = [ge.good.sampler(), ge.bad.sampler()];
                let mut state = usize::from(rng.gen::<f64>() < ge.stationary_bad());
                let mut z = Vec::with_capacity(n);
                for _ in 0..n {
                    z.push(samplers[state].sample_one(rng));
                    let leave = if state == 0 { ge.p_gb } else { ge.p_bg };
                    if rng.gen::<f64>() < leave {
                        state ^= 1;
                    }
                }
                FieldVector::new(self.spec(), z).expect("sampled symbols are in range")
            }
        }
    }

    pub fn entropy_rate(&self) -> EntropyRate {
        self.entropy_rate_with(&EntropyRateEstimator::default())
    }

    /// Exact for i.i.d. noise; for Gilbert-Elliott the mean of
    /// `-(1/n) log2 P(z)` over sampled sequences.
    pub fn entropy_rate_with(&self, est: &EntropyRateEstimator) -> EntropyRate {
        match self {
            NoiseModel::Iid(p) => EntropyRate {
                value: p.entropy(),
                std_error: 0.0,
            },
            NoiseModel::GilbertElliott(ge) => {
                let seed = Seed(est.seed);
                let samples: Vec<f64> = (0..est.sequences)
                    .map(|i| {
                        let mut rng = seed.stream(Purpose::EntropyRate, i as u64);
                        let z = self.sample(&mut rng, est.length);
                        -ge.forward_log_likelihood(z.as_slice()) / est.length as f64
                    })
                    .collect();
                let n = samples.len() as f64;
                let mean = samples.iter().sum::<f64>() / n;
                let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
                EntropyRate {
                    value: mean,
                    std_error: (var / n).sqrt(),
                }
            }
        }
    }
}

/// `log2 P(z)` under `noise`.
pub fn noise_log_likelihood(z: &FieldVector, noise: &NoiseModel) -> f64 {
    noise.log_likelihood(z)
}

pub fn entropy_rate(noise: &NoiseModel) -> EntropyRate {
    noise.entropy_rate()
}

/// Pattern field, length, count and the pattern and noise distributions.
#[derive(Clone, Debug, PartialEq)]
pub struct Environment {
    spec: FieldSpec,
    n: usize,
    mc: u64,
    rc_requested: f64,
    qx: Pmf,
    noise: NoiseModel,
}

impl Environment {
    /// `M_c = round(2^(n rc))`, refused above [`DEFAULT_MC_CAP`].
    pub fn new(n: usize, rc: f64, qx: Pmf, noise: NoiseModel) -> Result<Self> {
        Self::with_cap(n, rc, qx, noise, DEFAULT_MC_CAP)
    }

    pub fn with_cap(n: usize, rc: f64, qx: Pmf, noise: NoiseModel, cap: u64) -> Result<Self> {
        if !(rc > 0.0 && rc.is_finite()) {
            return Err(Error::InvalidParameter(format!("pattern rate {rc} must be positive")));
        }
        let exponent = n as f64 * rc;
        let mc = 2f64.powf(exponent).round();
        if mc > cap as f64 {
            return Err(Error::Resource(format!(
                "M_c = 2^{exponent:.3} ~ {mc:.3e} patterns exceeds the cap of {cap}"
            )));
        }
        let mut env = Self::with_pattern_count(n, mc as u64, qx, noise)?;
        env.rc_requested = rc;
        Ok(env)
    }

    /// `M_c = min(round(2^(n rc)), cap)`; the realized rate drops below the
    /// requested one when the cap binds.
    pub fn clamped(n: usize, rc: f64, qx: Pmf, noise: NoiseModel, cap: u64) -> Result<Self> {
        if !(rc > 0.0 && rc.is_finite()) {
            return Err(Error::InvalidParameter(format!("pattern rate {rc} must be positive")));
        }
        let mc = 2f64.powf(n as f64 * rc).round().min(cap as f64);
        let mut env = Self::with_pattern_count(n, mc as u64, qx, noise)?;
        env.rc_requested = rc;
        Ok(env)
    }

    /// An explicit pattern count.
    pub fn with_pattern_count(n: usize, mc: u64, qx: Pmf, noise: NoiseModel) -> Result<Self> {
        qx.spec().ensure_same(noise.spec())?;
        if n == 0 {
            return Err(Error::InvalidParameter("pattern length must be at least 1".into()));
        }
        if mc < 2 {
            return Err(Error::InvalidParameter(format!("M_c = {mc}, need at least 2 patterns")));
        }
        Ok(Environment {
            spec: qx.spec(),
            n,
            mc,
            rc_requested: (mc as f64).log2() / n as f64,
            qx,
            noise,
        })
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pattern_count(&self) -> u64 {
        self.mc
    }

    pub fn rc_requested(&self) -> f64 {
        self.rc_requested
    }

    /// `log2(M_c) / n` for the realized pattern count.
    pub fn rc_realized(&self) -> f64 {
        (self.mc as f64).log2() / self.n as f64
    }

    pub fn qx(&self) -> &Pmf {
        &self.qx
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn pattern_rng(db_seed: u64, index: u64) -> StreamRng {
        Seed(db_seed).stream(Purpose::Patterns, index)
    }

    /// Pattern `index` of the database generated with `db_seed`.
    pub fn sample_pattern(&self, db_seed: u64, index: u64) -> FieldVector {
        self.qx.sampler().sample(&mut Self::pattern_rng(db_seed, index), self.n)
    }
}

/// The stored patterns, row-major, one byte per symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternDatabase {
    spec: FieldSpec,
    n: usize,
    seed: u64,
    data: Vec<u8>,
}

impl PatternDatabase {
    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        if self.n == 0 {
            0
        } else {
            self.data.len() / self.n
        }
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn pattern(&self, i: usize) -> &[u8] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn pattern_vector(&self, i: usize) -> FieldVector {
        FieldVector::from_raw(self.spec, self.pattern(i).to_vec())
    }

    pub fn iter(&self) -> impl Iterator<Item = &[u8]> {
        self.data.chunks_exact(self.n)
    }

    /// Writes the flat binary form: magic `LRDB`, then `r` (u32), `n`, `M_c`
    /// and seed (u64), all little-endian, then the symbols row-major.
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(DB_MAGIC)?;
        w.write_all(&(self.spec.order() as u32).to_le_bytes())?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        w.write_all(&self.data)?;
        Ok(())
    }

    pub fn read_from<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic)?;
        if &magic != DB_MAGIC {
            return Err(Error::Parse("not a pattern database file".into()));
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4)?;
        let spec = FieldSpec::new(u32::from_le_bytes(b4))?;
        let mut next_u64 = |r: &mut R| -> Result<u64> {
            r.read_exact(&mut b8)?;
            Ok(u64::from_le_bytes(b8))
        };
        let n = next_u64(&mut r)? as usize;
        let mc = next_u64(&mut r)? as usize;
        let seed = next_u64(&mut r)?;
        let total = n
            .checked_mul(mc)
            .ok_or_else(|| Error::Parse("database dimensions overflow".into()))?;
        let mut data = Vec::new();
        r.take(total as u64).read_to_end(&mut data)?;
        if data.len() != total {
            return Err(Error::Parse(format!("expected {total} symbols, found {}", data.len())));
        }
        if let Some(&bad) = data.iter().find(|&&a| !spec.contains(a)) {
            return Err(Error::SymbolOutOfRange { symbol: bad, order: spec.order() });
        }
        Ok(PatternDatabase { spec, n, seed, data })
    }
}

const DB_MAGIC: &[u8; 4] = b"LRDB";

pub fn generate_database(env: &Environment, seed: u64) -> Result<PatternDatabase> {
    generate_database_with_budget(env, seed, DEFAULT_DB_BUDGET)
}

/// Samples all `M_c` patterns; pattern `i` depends only on `(seed, i)`.
pub fn generate_database_with_budget(env: &Environment, seed: u64, budget: u64) -> Result<PatternDatabase> {
    let symbols = env.mc.saturating_mul(env.n as u64);
    if symbols > budget {
        return Err(Error::Resource(format!(
            "database of M_c = {} patterns x n = {} needs {symbols} symbols, budget is {budget}",
            env.mc, env.n
        )));
    }
    let sampler = env.qx.sampler();
    let mut data = vec![0u8; symbols as usize];
    for (i, row) in data.chunks_exact_mut(env.n).enumerate() {
        sampler.fill(&mut Environment::pattern_rng(seed, i as u64), row);
    }
    Ok(PatternDatabase {
        spec: env.spec,
        n: env.n,
        seed,
        data,
    })
}

/// One test-phase draw: true index `j`, noise `z` and observation `y = x_j + z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestInstance {
    pub j: usize,
    pub z: FieldVector,
    pub y: FieldVector,
}

fn draw_index_and_noise(mc: usize, noise: &NoiseModel, n: usize, seed: u64) -> (usize, FieldVector) {
    let j = Seed(seed).stream(Purpose::Index, 0).gen_range(0..mc);
    let z = noise.sample(&mut Seed(seed).stream(Purpose::Noise, 0), n);
    (j, z)
}

/// Draws `j` uniformly and `z` from `noise`, independent of the database.
pub fn draw_test(db: &PatternDatabase, noise: &NoiseModel, seed: u64) -> Result<TestInstance> {
    if db.is_empty() {
        return Err(Error::Precondition("empty pattern database".into()));
    }
    db.spec.ensure_same(noise.spec())?;
    let (j, z) = draw_index_and_noise(db.len(), noise, db.n, seed);
    let y = db.pattern_vector(j).add(&z)?;
    Ok(TestInstance { j, z, y })
}

/// Same draw as [`draw_test`] on `generate_database(env, db_seed)`, without
/// materializing the database. Also returns `x_j`.
pub fn draw_test_streamed(env: &Environment, db_seed: u64, seed: u64) -> (TestInstance, FieldVector) {
    let (j, z) = draw_index_and_noise(env.mc as usize, &env.noise, env.n, seed);
    let x = env.sample_pattern(db_seed, j as u64);
    let y = x.add(&z).expect("pattern and noise share field and length");
    (TestInstance { j, z, y }, x)
}


#[cfg(test)]
mod tests {
    use super::*;

    fn bern(q: f64) -> Pmf {
        Pmf::bernoulli(q).unwrap()
    }

    fn binary_env(n: usize, rc: f64, q: f64) -> Environment {
        Environment::new(n, rc, Pmf::uniform(FieldSpec::binary()), NoiseModel::Iid(bern(q))).unwrap()
    }

    /// Sum over every hidden state path of `P(path) P(z | path)`.
    fn brute_force_ge(ge: &GilbertElliott, z: &[u8]) -> f64 {
        let n = z.len();
        let pi_b = ge.stationary_bad();
        let mut total = 0.0;
        for path in 0..(1u32 << n) {
            let state = |t: usize| ((path >> t) & 1) as usize;
            let mut p = if state(0) == 0 { 1.0 - pi_b } else { pi_b };
            for t in 0..n {
                if t > 0 {
                    p *= ge.transition(state(t - 1), state(t));
                }
                p *= ge.emission(state(t)).p(z[t]);
            }
            total += p;
        }
        total.log2()
    }

    #[test]
    fn pattern_count_and_determinism() {
        let env = binary_env(8, 0.25, 0.1);
        assert_eq!(env.pattern_count(), 4);
        let a = generate_database(&env, 17).unwrap();
        assert_eq!(a.len(), 4);
        assert_eq!(a.n(), 8);
        assert_eq!(a, generate_database(&env, 17).unwrap());
        assert_ne!(a, generate_database(&env, 18).unwrap());
    }

    #[test]
    fn environment_validation() {
        let u = Pmf::uniform(FieldSpec::binary());
        let z = NoiseModel::Iid(bern(0.1));
        assert!(Environment::new(8, 0.0, u.clone(), z.clone()).is_err());
        assert!(matches!(Environment::new(100, 0.5, u.clone(), z.clone()), Err(Error::Resource(_))));
        assert!(Environment::with_pattern_count(8, 1, u.clone(), z.clone()).is_err());
        let f3 = NoiseModel::Iid(Pmf::uniform(FieldSpec::new(3).unwrap()));
        assert!(Environment::with_pattern_count(8, 4, u.clone(), f3).is_err());
        let capped = Environment::clamped(400, 0.1, u.clone(), z.clone(), 1 << 22).unwrap();
        assert_eq!(capped.pattern_count(), 1 << 22);
        assert_eq!(capped.rc_requested(), 0.1);
        assert!((capped.rc_realized() - 22.0 / 400.0).abs() < 1e-15);
        assert_eq!(Environment::clamped(100, 0.1, u, z, 1 << 22).unwrap().pattern_count(), 1024);
    }

    #[test]
    fn database_budget_is_enforced() {
        let env = binary_env(64, 0.25, 0.1);
        assert!(matches!(
            generate_database_with_budget(&env, 1, 1000),
            Err(Error::Resource(msg)) if msg.contains("M_c = 65536")
        ));
    }

    #[test]
    fn pooled_symbol_frequency() {
        let env = Environment::with_pattern_count(1000, 64, Pmf::uniform(FieldSpec::binary()), NoiseModel::Iid(bern(0.1))).unwrap();
        let db = generate_database(&env, 3).unwrap();
        let ones: usize = db.iter().map(|p| p.iter().filter(|&&b| b == 1).count()).sum();
        let freq = ones as f64 / 64_000.0;
        assert!((0.49..=0.51).contains(&freq), "{freq}");
    }

    #[test]
    fn test_draws() {
        let f = FieldSpec::binary();
        let env = Environment::with_pattern_count(20, 8, Pmf::uniform(f), NoiseModel::noiseless(f)).unwrap();
        let db = generate_database(&env, 5).unwrap();
        let t = draw_test(&db, env.noise(), 9).unwrap();
        assert_eq!(t.y.as_slice(), db.pattern(t.j));

        let flip = NoiseModel::Iid(bern(1.0));
        let t = draw_test(&db, &flip, 9).unwrap();
        let expected: Vec<u8> = db.pattern(t.j).iter().map(|b| b ^ 1).collect();
        assert_eq!(t.y.as_slice(), expected.as_slice());

        let mut counts = [0usize; 8];
        for s in 0..10_000 {
            counts[draw_test(&db, env.noise(), s).unwrap().j] += 1;
        }
        for c in counts {
            let f = c as f64 / 10_000.0;
            assert!((0.10..=0.15).contains(&f), "{f}");
        }
    }

    #[test]
    fn test_instance_identity_and_streamed_draws() {
        let f = FieldSpec::new(5).unwrap();
        let env = Environment::with_pattern_count(30, 16, Pmf::uniform(f), NoiseModel::Iid(Pmf::symmetric(f, 0.3).unwrap())).unwrap();
        let db = generate_database(&env, 77).unwrap();
        for s in 0..50 {
            let t = draw_test(&db, env.noise(), s).unwrap();
            assert_eq!(t.y.sub(&db.pattern_vector(t.j)).unwrap(), t.z);
            let (streamed, x) = draw_test_streamed(&env, 77, s);
            assert_eq!(streamed, t);
            assert_eq!(x, db.pattern_vector(t.j));
        }
        for i in 0..16 {
            assert_eq!(env.sample_pattern(77, i).as_slice(), db.pattern(i as usize));
        }
    }

    #[test]
    fn database_file_round_trip() {
        let env = Environment::with_pattern_count(13, 5, Pmf::uniform(FieldSpec::new(3).unwrap()), NoiseModel::noiseless(FieldSpec::new(3).unwrap())).unwrap();
        let db = generate_database(&env, 4).unwrap();
        let mut buf = Vec::new();
        db.write_to(&mut buf).unwrap();
        assert_eq!(buf.len(), 4 + 4 + 24 + 65);
        assert_eq!(PatternDatabase::read_from(buf.as_slice()).unwrap(), db);
        buf.truncate(buf.len() - 1);
        assert!(PatternDatabase::read_from(buf.as_slice()).is_err());
        assert!(PatternDatabase::read_from(&b"XXXX"[..]).is_err());
    }

    #[test]
    fn ge_forward_matches_path_enumeration() {
        let f = FieldSpec::binary();
        let sets = [
            (0.1, 0.3, 0.01, 0.3),
            (0.02, 0.2, 0.05, 0.5),
            (0.7, 0.6, 0.2, 0.9),
        ];
        for (pgb, pbg, qg, qb) in sets {
            let ge = GilbertElliott::new(pgb, pbg, bern(qg), bern(qb)).unwrap();
            for n in 1..=8 {
                for bits in 0..(1u32 << n) {
                    let z: Vec<u8> = (0..n).map(|t| ((bits >> t) & 1) as u8).collect();
                    let fwd = ge.forward_log_likelihood(&z);
                    assert!((fwd - brute_force_ge(&ge, &z)).abs() < 1e-10);
                }
            }
        }
        let _ = f;
    }

    #[test]
    fn degenerate_ge_is_iid() {
        let p = bern(0.2);
        let ge = NoiseModel::GilbertElliott(GilbertElliott::new(0.5, 0.5, p.clone(), p.clone()).unwrap());
        let iid = NoiseModel::Iid(p);
        let mut rng = Seed(2).stream(Purpose::Auxiliary, 0);
        for _ in 0..20 {
            let z = iid.sample(&mut rng, 50);
            assert_eq!(ge.log_likelihood(&z), iid.log_likelihood(&z));
            if let NoiseModel::GilbertElliott(g) = &ge {
                assert!((g.forward_log_likelihood(z.as_slice()) - iid.log_likelihood(&z)).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn entropy_rates() {
        let r = NoiseModel::Iid(bern(0.11)).entropy_rate();
        assert!((r.value - 0.499_915_958_164_528).abs() < 1e-12);
        assert_eq!(r.std_error, 0.0);
        let f3 = FieldSpec::new(3).unwrap();
        assert!((NoiseModel::Iid(Pmf::uniform(f3)).entropy_rate().value - 1.584_962_500_721_156).abs() < 1e-12);

        let p = bern(0.11);
        let ge = NoiseModel::GilbertElliott(GilbertElliott::new(0.3, 0.4, p.clone(), p.clone()).unwrap());
        let est = ge.entropy_rate_with(&EntropyRateEstimator { sequences: 200, length: 2000, seed: 1 });
        assert!(est.std_error > 0.0);
        assert!((est.value - p.entropy()).abs() < 2.0 * est.std_error, "{est:?}");
    }

    #[test]
    fn ge_entropy_rate_lies_between_bounds() {
        // H(Z_t | hidden state) <= rate <= H(marginal)
        let ge = GilbertElliott::new(0.05, 0.2, bern(0.02), bern(0.3)).unwrap();
        let model = NoiseModel::GilbertElliott(ge.clone());
        let est = model.entropy_rate_with(&EntropyRateEstimator { sequences: 100, length: 3000, seed: 4 });
        let pb = ge.stationary_bad();
        let lower = (1.0 - pb) * ge.good().entropy() + pb * ge.bad().entropy();
        let upper = model.marginal().entropy();
        assert!(est.value > lower && est.value < upper, "{lower} < {} < {upper}", est.value);
    }

    #[test]
    fn aep_for_iid_noise() {
        let noise = NoiseModel::Iid(bern(0.11));
        let h = noise.entropy_rate().value;
        let mean = (0..200)
            .map(|i| {
                let z = noise.sample(&mut Seed(6).stream(Purpose::Noise, i), 2000);
                -noise.log_likelihood(&z) / 2000.0
            })
            .sum::<f64>()
            / 200.0;
        assert!((mean - h).abs() < 0.02);
    }

    #[test]
    fn ge_parameter_validation() {
        assert!(GilbertElliott::new(0.0, 0.5, bern(0.1), bern(0.2)).is_err());
        assert!(GilbertElliott::new(0.5, 1.0, bern(0.1), bern(0.2)).is_err());
        assert!(GilbertElliott::new(0.5, 0.5, bern(0.1), Pmf::uniform(FieldSpec::new(3).unwrap())).is_err());
    }
}
