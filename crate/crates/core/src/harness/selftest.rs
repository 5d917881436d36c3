//! Quick oracle checks run by `linrec selftest`.

use super::report::wilson_interval;
use crate::compressors::{compress, sample_ldpc, LdpcEnsembleSpec};
use crate::decoders::{ml_syndrome_decode, BpConfig, BpDecoder};
use crate::environment::{GilbertElliott, NoiseModel};
use crate::gf::{FieldSpec, FieldVector, SparseMatrix};
use crate::prob::{binary_entropy, Pmf};
use crate::rng::{Purpose, Seed};
use rand::Rng;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub fn run_all(seed: u64) -> Vec<Check> {
    vec![
        field_axioms(),
        sparse_vs_dense(seed),
        markov_forward(),
        binary_entropy_identity(),
        bp_vs_ml(seed),
        wilson_coverage(seed),
    ]
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn field_axioms() -> Check {
    let mut failures = 0;
    for r in [2, 3, 5, 7, 11, 13] {
        let f = FieldSpec::new(r).expect("prime");
        let o = f.order();
        for a in 0..o {
            if f.add(a, f.neg(a)) != 0 || (a != 0 && f.mul(a, f.inv(a).expect("nonzero")) != 1) {
                failures += 1;
            }
            for b in 0..o {
                if f.add(a, b) != (a as u32 + b as u32) as u8 % o || f.mul(a, b) != ((a as u32 * b as u32) % r) as u8 {
                    failures += 1;
                }
                for c in 0..o {
                    if f.mul(a, f.add(b, c)) != f.add(f.mul(a, b), f.mul(a, c)) {
                        failures += 1;
                    }
                }
            }
        }
    }
    check("field axioms r in {2,3,5,7,11,13}", failures == 0, format!("{failures} violations"))
}

fn sparse_vs_dense(seed: u64) -> Check {
    let mut rng = Seed(seed).stream(Purpose::Auxiliary, 1);
    let mut mismatches = 0;
    for _ in 0..200 {
        let f = FieldSpec::new([2, 3, 5, 7][rng.gen_range(0..4)]).expect("prime");
        let (rows, cols) = (rng.gen_range(1..12), rng.gen_range(1..16));
        let dense: Vec<Vec<u8>> = (0..rows)
            .map(|_| (0..cols).map(|_| if rng.gen::<f64>() < 0.3 { rng.gen_range(0..f.order()) } else { 0 }).collect())
            .collect();
        let m = SparseMatrix::from_dense(f, &dense, cols).expect("valid entries");
        let v: Vec<u8> = (0..cols).map(|_| rng.gen_range(0..f.order())).collect();
        let want: Vec<u8> = dense
            .iter()
            .map(|row| row.iter().zip(&v).fold(0u8, |acc, (&a, &b)| f.add(acc, f.mul(a, b))))
            .collect();
        let got = m.mul_vec(&FieldVector::new(f, v).expect("in range")).expect("shapes match");
        mismatches += usize::from(got.as_slice() != want.as_slice());
    }
    check("sparse product vs dense oracle", mismatches == 0, format!("{mismatches}/200 mismatches"))
}

fn markov_forward() -> Check {
    let ge = GilbertElliott::new(
        0.1,
        0.3,
        Pmf::bernoulli(0.02).expect("valid"),
        Pmf::bernoulli(0.3).expect("valid"),
    )
    .expect("valid");
    let mut worst: f64 = 0.0;
    for len in 1..=8usize {
        for code in 0..1u32 << len {
            let z: Vec<u8> = (0..len).map(|k| (code >> k & 1) as u8).collect();
            let mut total = 0.0;
            for path in 0..1u32 << len {
                let state = |t: usize| (path >> t & 1) as usize;
                let pi_b = ge.stationary_bad();
                let mut p = if state(0) == 1 { pi_b } else { 1.0 - pi_b };
                for t in 0..len {
                    if t > 0 {
                        let stay = if state(t - 1) == 0 { 1.0 - ge.p_gb() } else { 1.0 - ge.p_bg() };
                        p *= if state(t) == state(t - 1) { stay } else { 1.0 - stay };
                    }
                    p *= if state(t) == 0 { ge.good() } else { ge.bad() }.p(z[t]);
                }
                total += p;
            }
            worst = worst.max((ge.forward_log_likelihood(&z) - total.log2()).abs());
        }
    }
    check("Gilbert-Elliott forward vs path sum", worst < 1e-10, format!("max deviation {worst:.2e}"))
}

fn binary_entropy_identity() -> Check {
    let mut worst: f64 = 0.0;
    for k in 1..100 {
        let q = k as f64 / 100.0;
        let direct = -q * q.log2() - (1.0 - q) * (1.0 - q).log2();
        worst = worst.max((binary_entropy(q) - direct).abs());
        worst = worst.max((Pmf::bernoulli(q).expect("valid").entropy() - direct).abs());
    }
    check("binary entropy vs direct formula", worst < 1e-14, format!("max deviation {worst:.2e}"))
}

fn bp_vs_ml(seed: u64) -> Check {
    let f = FieldSpec::binary();
    let h = sample_ldpc(&LdpcEnsembleSpec { n: 16, dv: 3, dc: 6, spec: f, seed }).expect("feasible");
    let ch = Pmf::bernoulli(0.05).expect("valid");
    let noise = NoiseModel::Iid(ch.clone());
    let dec = BpDecoder::new(&h);
    let mut rng = Seed(seed).stream(Purpose::Auxiliary, 2);
    let (mut compared, mut agreed) = (0, 0);
    for _ in 0..100 {
        let z = noise.sample(&mut rng, 16);
        let s = compress(&h, &z).expect("shapes match");
        let ml = ml_syndrome_decode(&h, &s, &noise).expect("small coset");
        if ml.ambiguous {
            continue;
        }
        compared += 1;
        agreed += usize::from(dec.decode(&s, &ch, &BpConfig::default()).expect("shapes match").estimate == ml.estimate);
    }
    let ok = compared > 0 && agreed * 100 >= compared * 90;
    check("BP vs exhaustive ML (n=16)", ok, format!("{agreed}/{compared} agree"))
}

fn wilson_coverage(seed: u64) -> Check {
    let mut rng = Seed(seed).stream(Purpose::Auxiliary, 3);
    let (p, n, reps) = (0.1, 200u64, 1000);
    let mut covered = 0;
    for _ in 0..reps {
        let errors = (0..n).filter(|_| rng.gen::<f64>() < p).count() as u64;
        let (lo, hi) = wilson_interval(errors, n);
        covered += usize::from(lo <= p && p <= hi);
    }
    let rate = covered as f64 / reps as f64;
    check("Wilson 95% interval coverage", (0.92..=0.98).contains(&rate), format!("coverage {rate:.3}"))
}
