//! Sum-product decoding on the Tanner graph of `H`, with each check
//! constraint offset by its syndrome symbol.

use super::{BpConfig, DecodeOutcome};
use crate::error::{Error, Result};
use crate::gf::{FieldSpec, FieldVector, SparseMatrix};
use crate::prob::Pmf;

const LLR_CLAMP: f64 = 40.0;
const TANH_CLAMP: f64 = 1.0 - 1e-15;
const PROB_FLOOR: f64 = 1e-300;

/// Edge layout of one parity-check matrix, shared by any number of decode
/// calls.
#[derive(Clone, Debug)]
pub struct BpDecoder {
    spec: FieldSpec,
    n: usize,
    /// Edges in row-major order; `row_ptr[c]..row_ptr[c + 1]` belong to check `c`.
    row_ptr: Vec<usize>,
    edge_var: Vec<usize>,
    edge_val: Vec<u8>,
    /// Edge indices grouped by variable.
    col_ptr: Vec<usize>,
    col_edges: Vec<usize>,
}

impl BpDecoder {
    pub fn new(h: &SparseMatrix) -> Self {
        let (m, n) = (h.rows(), h.cols());
        let mut row_ptr = Vec::with_capacity(m + 1);
        let mut edge_var = Vec::with_capacity(h.nnz());
        let mut edge_val = Vec::with_capacity(h.nnz());
        row_ptr.push(0);
        for r in 0..m {
            for (c, v) in h.row(r) {
                edge_var.push(c);
                edge_val.push(v);
            }
            row_ptr.push(edge_var.len());
        }
        let mut col_ptr = vec![0; n + 1];
        for &v in &edge_var {
            col_ptr[v + 1] += 1;
        }
        for v in 0..n {
            col_ptr[v + 1] += col_ptr[v];
        }
        let mut fill = col_ptr.clone();
        let mut col_edges = vec![0; edge_var.len()];
        for (e, &v) in edge_var.iter().enumerate() {
            col_edges[fill[v]] = e;
            fill[v] += 1;
        }
        BpDecoder { spec: h.spec(), n, row_ptr, edge_var, edge_val, col_ptr, col_edges }
    }

    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn checks(&self) -> usize {
        self.row_ptr.len() - 1
    }

    fn check_syndrome(&self, syndrome: &FieldVector) -> Result<()> {
        self.spec.ensure_same(syndrome.spec())?;
        if syndrome.len() != self.checks() {
            return Err(Error::Shape(format!(
                "syndrome has length {}, matrix has {} rows",
                syndrome.len(),
                self.checks()
            )));
        }
        Ok(())
    }

    fn satisfies(&self, z: &[u8], syndrome: &[u8]) -> bool {
        let f = self.spec;
        (0..self.checks()).all(|c| {
            let mut acc = 0u8;
            for e in self.row_ptr[c]..self.row_ptr[c + 1] {
                acc = f.add(acc, f.mul(self.edge_val[e], z[self.edge_var[e]]));
            }
            acc == syndrome[c]
        })
    }

    fn finish(&self, z: Vec<u8>, iterations: usize, syndrome: &[u8]) -> DecodeOutcome {
        if self.satisfies(&z, syndrome) {
            DecodeOutcome {
                estimate: Some(FieldVector::from_raw(self.spec, z)),
                iterations,
                syndrome_satisfied: true,
                ambiguous: false,
            }
        } else {
            DecodeOutcome::failure(iterations)
        }
    }

    /// Decodes `syndrome` under an iid channel `channel`.
    pub fn decode(&self, syndrome: &FieldVector, channel: &Pmf, cfg: &BpConfig) -> Result<DecodeOutcome> {
        self.check_syndrome(syndrome)?;
        self.spec.ensure_same(channel.spec())?;
        if self.spec.order() == 2 {
            let llr = channel_llr(channel.p(0), channel.p(1));
            let llrs = vec![llr; self.n];
            Ok(self.decode_llr_unchecked(syndrome.as_slice(), &llrs, cfg))
        } else {
            Ok(self.decode_rary_unchecked(syndrome.as_slice(), channel, cfg))
        }
    }

    /// GF(2) decoding with per-variable channel log-likelihood ratios
    /// `ln P(z_v = 0) / P(z_v = 1)`.
    pub fn decode_llr(&self, syndrome: &FieldVector, llrs: &[f64], cfg: &BpConfig) -> Result<DecodeOutcome> {
        self.check_syndrome(syndrome)?;
        if self.spec.order() != 2 {
            return Err(Error::InvalidParameter("LLR decoding needs GF(2)".into()));
        }
        if llrs.len() != self.n {
            return Err(Error::Shape(format!("{} LLRs for {} variables", llrs.len(), self.n)));
        }
        Ok(self.decode_llr_unchecked(syndrome.as_slice(), llrs, cfg))
    }

    fn decode_llr_unchecked(&self, syndrome: &[u8], llrs: &[f64], cfg: &BpConfig) -> DecodeOutcome {
        let llrs: Vec<f64> = llrs.iter().map(|l| l.clamp(-LLR_CLAMP, LLR_CLAMP)).collect();
        let mut z: Vec<u8> = llrs.iter().map(|&l| u8::from(l < 0.0)).collect();
        if (cfg.early_exit || cfg.max_iterations == 0) && self.satisfies(&z, syndrome) {
            return self.finish(z, 0, syndrome);
        }
        let edges = self.edge_var.len();
        let mut v2c: Vec<f64> = self.edge_var.iter().map(|&v| llrs[v]).collect();
        let mut c2v = vec![0.0; edges];
        let mut tanh_buf = Vec::new();
        let mut suffix = Vec::new();
        for it in 1..=cfg.max_iterations {
            for c in 0..self.checks() {
                let (lo, hi) = (self.row_ptr[c], self.row_ptr[c + 1]);
                tanh_buf.clear();
                tanh_buf.extend(v2c[lo..hi].iter().map(|&m| half_tanh(m)));
                suffix.clear();
                suffix.resize(hi - lo + 1, 1.0);
                for k in (0..hi - lo).rev() {
                    suffix[k] = suffix[k + 1] * tanh_buf[k];
                }
                let sign = if syndrome[c] == 0 { 1.0 } else { -1.0 };
                let mut prefix = 1.0;
                for k in 0..hi - lo {
                    let prod = (prefix * suffix[k + 1]).clamp(-TANH_CLAMP, TANH_CLAMP);
                    let msg = sign * twice_atanh(prod);
                    let e = lo + k;
                    c2v[e] = (1.0 - cfg.damping) * msg + cfg.damping * c2v[e];
                    prefix *= tanh_buf[k];
                }
            }
            for v in 0..self.n {
                let edges_v = &self.col_edges[self.col_ptr[v]..self.col_ptr[v + 1]];
                let total = llrs[v] + edges_v.iter().map(|&e| c2v[e]).sum::<f64>();
                for &e in edges_v {
                    v2c[e] = (total - c2v[e]).clamp(-LLR_CLAMP, LLR_CLAMP);
                }
                z[v] = u8::from(total < 0.0);
            }
            if cfg.early_exit && self.satisfies(&z, syndrome) {
                return self.finish(z, it, syndrome);
            }
        }
        self.finish(z, cfg.max_iterations, syndrome)
    }

    /// Probability-domain decoding with r-ary messages; used for every
    /// field other than GF(2) and available for GF(2) as a cross-check.
    pub fn decode_rary(&self, syndrome: &FieldVector, channel: &Pmf, cfg: &BpConfig) -> Result<DecodeOutcome> {
        self.check_syndrome(syndrome)?;
        self.spec.ensure_same(channel.spec())?;
        Ok(self.decode_rary_unchecked(syndrome.as_slice(), channel, cfg))
    }

    fn decode_rary_unchecked(&self, syndrome: &[u8], channel: &Pmf, cfg: &BpConfig) -> DecodeOutcome {
        let f = self.spec;
        let r = f.r();
        let ch: Vec<f64> = channel.probs().to_vec();
        let ln_ch: Vec<f64> = ch.iter().map(|p| p.ln()).collect();
        let hard = argmax(&ch) as u8;
        let mut z = vec![hard; self.n];
        if (cfg.early_exit || cfg.max_iterations == 0) && self.satisfies(&z, syndrome) {
            return self.finish(z, 0, syndrome);
        }
        let edges = self.edge_var.len();
        // v2c[e*r + a] = P(z_v = a); c2v[e*r + a] = message about z_v = a.
        let mut v2c: Vec<f64> = (0..edges).flat_map(|_| ch.iter().copied()).collect();
        let mut c2v = vec![1.0 / r as f64; edges * r];
        let mut fwd = Vec::new();
        let mut bwd = Vec::new();
        let mut shifted = vec![0.0; r];
        let mut excl = vec![0.0; r];
        let mut log_belief = vec![0.0; r];
        for it in 1..=cfg.max_iterations {
            for c in 0..self.checks() {
                let (lo, hi) = (self.row_ptr[c], self.row_ptr[c + 1]);
                let d = hi - lo;
                // Distribution of h_e z_e for each edge, then prefix/suffix
                // cyclic convolutions.
                fwd.clear();
                fwd.resize((d + 1) * r, 0.0);
                bwd.clear();
                bwd.resize((d + 1) * r, 0.0);
                fwd[0] = 1.0;
                bwd[d * r] = 1.0;
                for k in 0..d {
                    scale_message(f, &v2c[(lo + k) * r..(lo + k + 1) * r], self.edge_val[lo + k], &mut shifted);
                    let (head, tail) = fwd.split_at_mut((k + 1) * r);
                    cyclic_convolve(&head[k * r..], &shifted, &mut tail[..r]);
                }
                for k in (0..d).rev() {
                    scale_message(f, &v2c[(lo + k) * r..(lo + k + 1) * r], self.edge_val[lo + k], &mut shifted);
                    let (head, tail) = bwd.split_at_mut((k + 1) * r);
                    cyclic_convolve(&tail[..r], &shifted, &mut head[k * r..]);
                }
                for k in 0..d {
                    cyclic_convolve(&fwd[k * r..(k + 1) * r], &bwd[(k + 1) * r..(k + 2) * r], &mut excl);
                    let e = lo + k;
                    let h = self.edge_val[e];
                    let out = &mut c2v[e * r..(e + 1) * r];
                    let mut total = 0.0;
                    for a in 0..r {
                        let need = f.sub(syndrome[c], f.mul(h, a as u8)) as usize;
                        let msg = (1.0 - cfg.damping) * excl[need] + cfg.damping * out[a];
                        out[a] = msg;
                        total += msg;
                    }
                    normalize(out, total);
                }
            }
            for v in 0..self.n {
                let edges_v = &self.col_edges[self.col_ptr[v]..self.col_ptr[v + 1]];
                log_belief.copy_from_slice(&ln_ch);
                for &e in edges_v {
                    for a in 0..r {
                        log_belief[a] += c2v[e * r + a].max(PROB_FLOOR).ln();
                    }
                }
                z[v] = argmax(&log_belief) as u8;
                for &e in edges_v {
                    let out = &mut v2c[e * r..(e + 1) * r];
                    let mut best = f64::NEG_INFINITY;
                    for a in 0..r {
                        out[a] = log_belief[a] - c2v[e * r + a].max(PROB_FLOOR).ln();
                        best = best.max(out[a]);
                    }
                    let mut total = 0.0;
                    for x in out.iter_mut() {
                        *x = (*x - best).exp();
                        total += *x;
                    }
                    normalize(out, total);
                }
            }
            if cfg.early_exit && self.satisfies(&z, syndrome) {
                return self.finish(z, it, syndrome);
            }
        }
        self.finish(z, cfg.max_iterations, syndrome)
    }
}

/// One-shot decode; builds the edge layout on every call.
pub fn bp_syndrome_decode(h: &SparseMatrix, syndrome: &FieldVector, channel: &Pmf, cfg: &BpConfig) -> Result<DecodeOutcome> {
    BpDecoder::new(h).decode(syndrome, channel, cfg)
}

/// `tanh(m / 2)`, exactly odd in `m`.
#[inline]
fn half_tanh(m: f64) -> f64 {
    let e = (-m.abs()).exp();
    ((1.0 - e) / (1.0 + e)).copysign(m)
}

/// `2 atanh(p)`, exactly odd in `p`.
#[inline]
fn twice_atanh(p: f64) -> f64 {
    let a = p.abs();
    ((1.0 + a) / (1.0 - a)).ln().copysign(p)
}

fn channel_llr(p0: f64, p1: f64) -> f64 {
    if p1 == 0.0 {
        LLR_CLAMP
    } else if p0 == 0.0 {
        -LLR_CLAMP
    } else {
        (p0 / p1).ln()
    }
}

/// Smallest index attaining the maximum.
fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

fn normalize(v: &mut [f64], total: f64) {
    if total > 0.0 && total.is_finite() {
        v.iter_mut().for_each(|x| *x /= total);
    } else {
        let u = 1.0 / v.len() as f64;
        v.iter_mut().for_each(|x| *x = u);
    }
}

/// `out[h a] = q[a]`.
fn scale_message(f: FieldSpec, q: &[f64], h: u8, out: &mut [f64]) {
    for (a, &p) in q.iter().enumerate() {
        out[f.mul(h, a as u8) as usize] = p;
    }
}

fn cyclic_convolve(a: &[f64], b: &[f64], out: &mut [f64]) {
    let r = out.len();
    for x in out.iter_mut() {
        *x = 0.0;
    }
    for (i, &pa) in a[..r].iter().enumerate() {
        if pa == 0.0 {
            continue;
        }
        for (j, &pb) in b[..r].iter().enumerate() {
            let k = if i + j >= r { i + j - r } else { i + j };
            out[k] += pa * pb;
        }
    }
    let total: f64 = out.iter().sum();
    normalize(out, total);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compressors::{compress, sample_ldpc, LdpcEnsembleSpec};
    use crate::decoders::ml_syndrome_decode;
    use crate::environment::NoiseModel;
    use crate::rng::{Purpose, Seed};

    fn ldpc(n: usize, r: u32, seed: u64) -> SparseMatrix {
        let spec = FieldSpec::new(r).unwrap();
        sample_ldpc(&LdpcEnsembleSpec { n, dv: 3, dc: 6, spec, seed }).unwrap()
    }

    #[test]
    fn zero_syndrome_decodes_at_iteration_zero() {
        for r in [2, 3, 5] {
            let h = ldpc(60, r, 1);
            let spec = h.spec();
            let s = FieldVector::zeros(spec, h.rows());
            let out = bp_syndrome_decode(&h, &s, &Pmf::symmetric(spec, 0.05).unwrap(), &BpConfig::default()).unwrap();
            assert_eq!(out.estimate, Some(FieldVector::zeros(spec, 60)));
            assert_eq!(out.iterations, 0);
        }
    }

    #[test]
    fn no_iterations_returns_hard_decision_or_failure() {
        let h = ldpc(60, 2, 1);
        let cfg = BpConfig { max_iterations: 0, ..BpConfig::default() };
        let ch = Pmf::bernoulli(0.1).unwrap();
        let zero = FieldVector::zeros(h.spec(), h.rows());
        assert!(bp_syndrome_decode(&h, &zero, &ch, &cfg).unwrap().estimate.is_some());
        let mut z = vec![0u8; 60];
        z[3] = 1;
        let s = compress(&h, &FieldVector::new(h.spec(), z).unwrap()).unwrap();
        let out = bp_syndrome_decode(&h, &s, &ch, &cfg).unwrap();
        assert!(out.is_failure());
        assert_eq!(out.iterations, 0);
        assert!(cfg.validate().is_err());
        assert!(BpConfig { damping: 1.0, ..BpConfig::default() }.validate().is_err());
    }

    #[test]
    fn estimates_satisfy_the_syndrome() {
        let mut rng = Seed(2).stream(Purpose::TestDraw, 0);
        for r in [2, 3, 7] {
            let h = ldpc(120, r, 5);
            let dec = BpDecoder::new(&h);
            let noise = NoiseModel::Iid(Pmf::symmetric(h.spec(), 0.08).unwrap());
            for _ in 0..30 {
                let z = noise.sample(&mut rng, 120);
                let s = compress(&h, &z).unwrap();
                let out = dec.decode(&s, &noise.marginal(), &BpConfig::default()).unwrap();
                if let Some(est) = out.estimate {
                    assert!(out.syndrome_satisfied);
                    assert_eq!(compress(&h, &est).unwrap(), s);
                }
            }
        }
    }

    #[test]
    fn matches_ml_on_small_codes() {
        let h = ldpc(16, 2, 3);
        let dec = BpDecoder::new(&h);
        let ch = Pmf::bernoulli(0.05).unwrap();
        let noise = NoiseModel::Iid(ch.clone());
        let mut rng = Seed(4).stream(Purpose::TestDraw, 0);
        let (mut compared, mut agreed) = (0, 0);
        for _ in 0..200 {
            let mut z = vec![0u8; 16];
            z[rand::Rng::gen_range(&mut rng, 0..16)] = 1;
            let s = compress(&h, &FieldVector::new(h.spec(), z).unwrap()).unwrap();
            let ml = ml_syndrome_decode(&h, &s, &noise).unwrap();
            if ml.ambiguous {
                continue;
            }
            compared += 1;
            let bp = dec.decode(&s, &ch, &BpConfig::default()).unwrap();
            agreed += usize::from(bp.estimate == ml.estimate);
        }
        assert!(compared > 0);
        assert_eq!(agreed, compared);
    }

    #[test]
    fn binary_paths_agree() {
        let h = ldpc(240, 2, 9);
        let dec = BpDecoder::new(&h);
        let ch = Pmf::bernoulli(0.05).unwrap();
        let mut rng = Seed(5).stream(Purpose::TestDraw, 0);
        let sampler = ch.sampler();
        let mut same = 0;
        for _ in 0..100 {
            let z = sampler.sample(&mut rng, 240);
            let s = compress(&h, &z).unwrap();
            let a = dec.decode(&s, &ch, &BpConfig::default()).unwrap();
            let b = dec.decode_rary(&s, &ch, &BpConfig::default()).unwrap();
            same += usize::from(a.estimate == b.estimate);
        }
        assert!(same >= 98, "{same}");
    }

    #[test]
    fn coset_translation_is_exact() {
        let h = ldpc(96, 2, 7);
        let dec = BpDecoder::new(&h);
        let spec = h.spec();
        let ch = Pmf::bernoulli(0.06).unwrap();
        let llr = (0.94f64 / 0.06).ln();
        let mut rng = Seed(6).stream(Purpose::TestDraw, 0);
        let sampler = ch.sampler();
        for _ in 0..50 {
            let z = sampler.sample(&mut rng, 96);
            let s = compress(&h, &z).unwrap();
            let direct = dec.decode_llr(&s, &vec![llr; 96], &BpConfig::default()).unwrap();
            // Shift by z0 = z: syndrome 0 with the channel flipped where z0 = 1.
            let flipped: Vec<f64> = z.as_slice().iter().map(|&b| if b == 1 { -llr } else { llr }).collect();
            let zero = FieldVector::zeros(spec, h.rows());
            let shifted = dec.decode_llr(&zero, &flipped, &BpConfig::default()).unwrap();
            assert_eq!(direct.iterations, shifted.iterations);
            assert_eq!(
                direct.estimate,
                shifted.estimate.map(|e| e.add(&z).unwrap())
            );
        }
    }

    #[test]
    fn nonbinary_decoding_recovers_light_noise() {
        for r in [3, 5] {
            let h = ldpc(300, r, 2);
            let dec = BpDecoder::new(&h);
            let ch = Pmf::symmetric(h.spec(), 0.03).unwrap();
            let sampler = ch.sampler();
            let mut rng = Seed(r as u64).stream(Purpose::TestDraw, 0);
            let mut ok = 0;
            for _ in 0..50 {
                let z = sampler.sample(&mut rng, 300);
                let s = compress(&h, &z).unwrap();
                ok += usize::from(dec.decode(&s, &ch, &BpConfig::default()).unwrap().estimate == Some(z));
            }
            assert!(ok >= 45, "GF({r}): {ok}/50");
        }
    }

    #[test]
    fn shape_errors() {
        let h = ldpc(12, 2, 0);
        let ch = Pmf::bernoulli(0.1).unwrap();
        let bad = FieldVector::zeros(h.spec(), 5);
        assert!(bp_syndrome_decode(&h, &bad, &ch, &BpConfig::default()).is_err());
        let f3 = Pmf::uniform(FieldSpec::new(3).unwrap());
        let s = FieldVector::zeros(h.spec(), h.rows());
        assert!(bp_syndrome_decode(&h, &s, &f3, &BpConfig::default()).is_err());
    }
}
