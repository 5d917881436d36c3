use linrec::compressors::{compress, sample_ldpc, LdpcEnsembleSpec};
use linrec::decoders::{BpConfig, BpDecoder};
use linrec::environment::NoiseModel;
use linrec::gf::{FieldSpec, SparseMatrix};
use linrec::prob::Pmf;
use linrec::rng::{Purpose, Seed};

fn code(n: usize, seed: u64) -> SparseMatrix {
    sample_ldpc(&LdpcEnsembleSpec { n, dv: 3, dc: 6, spec: FieldSpec::binary(), seed }).unwrap()
}

/// Block failures over `trials` noise draws, where a failure is anything
/// other than exact recovery of `z`.
fn block_failures(h: &SparseMatrix, q: f64, trials: u64, seed: u64) -> usize {
    let ch = Pmf::bernoulli(q).unwrap();
    let noise = NoiseModel::Iid(ch.clone());
    let dec = BpDecoder::new(h);
    let cfg = BpConfig::default();
    (0..trials)
        .filter(|&t| {
            let z = noise.sample(&mut Seed(seed).stream(Purpose::Noise, t), h.cols());
            let s = compress(h, &z).unwrap();
            let out = dec.decode(&s, &ch, &cfg).unwrap();
            if let Some(est) = &out.estimate {
                assert_eq!(compress(h, est).unwrap(), s);
            }
            out.estimate.as_ref() != Some(&z)
        })
        .count()
}

#[test]
fn bp_block_failure_rate_at_n1200() {
    let h = code(1200, 21);
    let failures = block_failures(&h, 0.05, 500, 1);
    assert!(failures <= 10, "{failures}/500 block failures");
}

#[test]
fn failure_rate_grows_with_crossover() {
    let h = code(400, 22);
    let low = block_failures(&h, 0.03, 500, 2);
    let high = block_failures(&h, 0.07, 500, 2);
    assert!(low <= high, "q=0.03: {low}, q=0.07: {high}");
}
