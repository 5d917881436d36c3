//! Exhaustive maximum-likelihood syndrome decoding over the coset
//! `{z : H z = t}`, enumerated as a particular solution plus null-space
//! combinations.

use super::DecodeOutcome;
use crate::environment::NoiseModel;
use crate::error::{Error, Result};
use crate::gf::{DenseMatrix, FieldVector, RowEchelon, SparseMatrix};
use crate::prob::log_prob_from_counts;

/// Largest coset enumerated by default (`2^24` members).
pub const DEFAULT_MAX_COSET: u64 = 1 << 24;

/// Scores closer than this to the optimum count as ties.
const TIE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MlConfig {
    pub max_coset: u64,
}

impl Default for MlConfig {
    fn default() -> Self {
        MlConfig { max_coset: DEFAULT_MAX_COSET }
    }
}

pub fn ml_syndrome_decode(h: &SparseMatrix, syndrome: &FieldVector, noise: &NoiseModel) -> Result<DecodeOutcome> {
    ml_syndrome_decode_with(h, syndrome, noise, &MlConfig::default())
}

/// Maximizes the noise log-likelihood over the coset. Ties within
/// `1e-9` bits are broken toward the lexicographically smallest vector and
/// flagged as ambiguous.
pub fn ml_syndrome_decode_with(
    h: &SparseMatrix,
    syndrome: &FieldVector,
    noise: &NoiseModel,
    cfg: &MlConfig,
) -> Result<DecodeOutcome> {
    let spec = h.spec();
    spec.ensure_same(noise.spec())?;
    let ech = RowEchelon::reduce(&DenseMatrix::from_sparse(h));
    let Some(particular) = ech.particular_solution(syndrome)? else {
        return Ok(DecodeOutcome::failure(0));
    };
    let basis = ech.null_space();
    let size = (spec.r() as f64).powi(basis.len() as i32);
    if size > cfg.max_coset as f64 {
        return Err(Error::Resource(format!(
            "coset has {}^{} members, above the limit of {}",
            spec.r(),
            basis.len(),
            cfg.max_coset
        )));
    }

    let score: Box<dyn Fn(&[u8]) -> f64> = match noise {
        NoiseModel::Iid(p) => {
            let table = p.log2_table();
            let r = spec.r();
            Box::new(move |z: &[u8]| {
                let mut counts = vec![0usize; r];
                z.iter().for_each(|&a| counts[a as usize] += 1);
                log_prob_from_counts(&counts, &table)
            })
        }
        NoiseModel::GilbertElliott(ge) => Box::new(move |z: &[u8]| ge.forward_log_likelihood(z)),
    };

    let basis: Vec<Vec<u8>> = basis.into_iter().map(FieldVector::into_vec).collect();
    let mut z = particular.into_vec();
    let mut digits = vec![0u8; basis.len()];
    let mut best = z.clone();
    let mut best_score = score(&z);
    let mut ambiguous = false;
    loop {
        // Mixed-radix increment; every digit step, including a wrap to zero,
        // adds one copy of its basis vector.
        let mut k = 0;
        while k < digits.len() {
            for (zi, &bi) in z.iter_mut().zip(&basis[k]) {
                *zi = spec.add(*zi, bi);
            }
            digits[k] += 1;
            if digits[k] < spec.order() {
                break;
            }
            digits[k] = 0;
            k += 1;
        }
        if k == digits.len() {
            break;
        }
        let s = score(&z);
        if s > best_score + TIE_TOLERANCE {
            best_score = s;
            best.copy_from_slice(&z);
            ambiguous = false;
        } else if s >= best_score - TIE_TOLERANCE {
            ambiguous = true;
            if z < best {
                best.copy_from_slice(&z);
            }
            best_score = best_score.max(s);
        }
    }
    if !best_score.is_finite() {
        return Ok(DecodeOutcome::failure(0));
    }
    let estimate = FieldVector::from_raw(spec, best);
    let satisfied = h.mul_vec(&estimate)? == *syndrome;
    debug_assert!(satisfied);
    Ok(DecodeOutcome { estimate: Some(estimate), iterations: 0, syndrome_satisfied: satisfied, ambiguous })
}
