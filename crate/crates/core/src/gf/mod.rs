//! Arithmetic over prime fields GF(r) and the vectors and sparse matrices
//! built on it.
//!
//! Residues are stored as `u8`, so the supported orders are the primes up to
//! 251. Extension fields are not supported.

mod linalg;
mod packed;
mod sparse;

pub use linalg::{DenseMatrix, RowEchelon};
pub use packed::{PackedGf2Matrix, PackedGf2Vector};
pub(crate) use packed::{
    tail_mask as packed_tail_mask, weight_prefix, words_for as packed_words_for, xor_weight_prefix,
};
pub use sparse::SparseMatrix;

use crate::error::{Error, Result};
use std::fmt;

fn is_prime(r: u32) -> bool {
    r >= 2 && (2..).take_while(|d| d * d <= r).all(|d| r % d != 0)
}

/// A prime field GF(r).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FieldSpec {
    order: u8,
}

impl FieldSpec {
    pub fn new(order: u32) -> Result<Self> {
        if order > 251 || !is_prime(order) {
            return Err(Error::InvalidField(order));
        }
        Ok(FieldSpec { order: order as u8 })
    }

    pub const fn binary() -> Self {
        FieldSpec { order: 2 }
    }

    #[inline]
    pub fn order(self) -> u8 {
        self.order
    }

    #[inline]
    pub fn r(self) -> usize {
        self.order as usize
    }

    #[inline]
    pub fn contains(self, a: u8) -> bool {
        a < self.order
    }

    pub fn check(self, a: u8) -> Result<u8> {
        if self.contains(a) {
            Ok(a)
        } else {
            Err(Error::SymbolOutOfRange {
                symbol: a,
                order: self.order,
            })
        }
    }

    pub fn ensure_same(self, other: FieldSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::FieldMismatch {
                left: self.order,
                right: other.order,
            })
        }
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        ((a as u16 + b as u16) % self.order as u16) as u8
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        ((a as u16 + self.order as u16 - b as u16) % self.order as u16) as u8
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        self.sub(0, a)
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        ((a as u16 * b as u16) % self.order as u16) as u8
    }

    /// Multiplicative inverse by Fermat's little theorem.
    pub fn inv(self, a: u8) -> Result<u8> {
        if a % self.order == 0 {
            return Err(Error::NoInverse(a));
        }
        Ok(self.pow(a, self.order as u32 - 2))
    }

    pub fn pow(self, a: u8, mut e: u32) -> u8 {
        let mut base = a % self.order;
        let mut acc = 1u8 % self.order;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.order)
    }
}

/// A fixed-length vector over GF(r).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldVector {
    spec: FieldSpec,
    elems: Vec<u8>,
}

impl FieldVector {
    pub fn new(spec: FieldSpec, elems: Vec<u8>) -> Result<Self> {
        for &a in &elems {
            spec.check(a)?;
        }
        Ok(FieldVector { spec, elems })
    }

    /// Caller guarantees every element is below `spec.order()`.
    pub(crate) fn from_raw(spec: FieldSpec, elems: Vec<u8>) -> Self {
        debug_assert!(elems.iter().all(|&a| spec.contains(a)));
        FieldVector { spec, elems }
    }

    pub fn zeros(spec: FieldSpec, len: usize) -> Self {
        FieldVector {
            spec,
            elems: vec![0; len],
        }
    }

    pub fn filled(spec: FieldSpec, len: usize, value: u8) -> Result<Self> {
        spec.check(value)?;
        Ok(FieldVector {
            spec,
            elems: vec![value; len],
        })
    }

    #[inline]
    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[u8] {
        &self.elems
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.elems
    }

    pub fn is_zero(&self) -> bool {
        self.elems.iter().all(|&a| a == 0)
    }

    /// Number of nonzero symbols.
    pub fn weight(&self) -> usize {
        self.elems.iter().filter(|&&a| a != 0).count()
    }

    /// Occurrence count of each symbol `0..r`.
    pub fn symbol_counts(&self) -> Vec<usize> {
        symbol_counts(self.spec, &self.elems)
    }

    /// The first `k` symbols.
    pub fn prefix(&self, k: usize) -> Result<FieldVector> {
        if k > self.len() {
            return Err(Error::Shape(format!(
                "prefix of length {k} from vector of length {}",
                self.len()
            )));
        }
        Ok(FieldVector::from_raw(self.spec, self.elems[..k].to_vec()))
    }

    /// This vector followed by `extra` zeros.
    pub fn zero_padded(&self, len: usize) -> Result<FieldVector> {
        if len < self.len() {
            return Err(Error::Shape(format!(
                "cannot pad length {} down to {len}",
                self.len()
            )));
        }
        let mut elems = self.elems.clone();
        elems.resize(len, 0);
        Ok(FieldVector::from_raw(self.spec, elems))
    }

    pub fn concat(&self, other: &FieldVector) -> Result<FieldVector> {
        self.spec.ensure_same(other.spec)?;
        let mut elems = self.elems.clone();
        elems.extend_from_slice(&other.elems);
        Ok(FieldVector::from_raw(self.spec, elems))
    }

    fn check_compatible(&self, other: &FieldVector) -> Result<()> {
        self.spec.ensure_same(other.spec)?;
        if self.len() != other.len() {
            return Err(Error::Shape(format!(
                "vector lengths {} and {}",
                self.len(),
                other.len()
            )));
        }
        Ok(())
    }

    pub fn add(&self, other: &FieldVector) -> Result<FieldVector> {
        self.check_compatible(other)?;
        let f = self.spec;
        Ok(FieldVector::from_raw(
            f,
            self.elems
                .iter()
                .zip(&other.elems)
                .map(|(&a, &b)| f.add(a, b))
                .collect(),
        ))
    }

    pub fn sub(&self, other: &FieldVector) -> Result<FieldVector> {
        self.check_compatible(other)?;
        let f = self.spec;
        Ok(FieldVector::from_raw(
            f,
            self.elems
                .iter()
                .zip(&other.elems)
                .map(|(&a, &b)| f.sub(a, b))
                .collect(),
        ))
    }

    pub fn scale(&self, c: u8) -> Result<FieldVector> {
        self.spec.check(c)?;
        let f = self.spec;
        Ok(FieldVector::from_raw(
            f,
            self.elems.iter().map(|&a| f.mul(a, c)).collect(),
        ))
    }
}

impl std::ops::Index<usize> for FieldVector {
    type Output = u8;
    fn index(&self, i: usize) -> &u8 {
        &self.elems[i]
    }
}

pub(crate) fn symbol_counts(spec: FieldSpec, elems: &[u8]) -> Vec<usize> {
    let mut counts = vec![0usize; spec.r()];
    for &a in elems {
        counts[a as usize] += 1;
    }
    counts
}

pub fn vec_add(u: &FieldVector, v: &FieldVector) -> Result<FieldVector> {
    u.add(v)
}

pub fn vec_sub(u: &FieldVector, v: &FieldVector) -> Result<FieldVector> {
    u.sub(v)
}

pub fn mat_vec_mul(m: &SparseMatrix, v: &FieldVector) -> Result<FieldVector> {
    m.mul_vec(v)
}
