//! Bit-packed GF(2) vectors and matrices.
//!
//! Same semantics as the generic byte-per-symbol path; symbol `i` lives in
//! bit `i % 64` of word `i / 64`.

use super::{FieldSpec, FieldVector, SparseMatrix};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PackedGf2Vector {
    len: usize,
    words: Vec<u64>,
}

#[inline]
pub(crate) fn words_for(len: usize) -> usize {
    len.div_ceil(64)
}

/// Mask selecting the first `len` bits of the word sequence, for word `w`.
#[inline]
pub(crate) fn tail_mask(len: usize, w: usize) -> u64 {
    let full = len / 64;
    if w < full {
        u64::MAX
    } else if w == full && len % 64 != 0 {
        (1u64 << (len % 64)) - 1
    } else {
        0
    }
}

impl PackedGf2Vector {
    pub fn zeros(len: usize) -> Self {
        PackedGf2Vector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    /// Takes ownership of `words`; bits past `len` are cleared.
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Result<Self> {
        if words.len() != words_for(len) {
            return Err(Error::Shape(format!(
                "{} words for {len} bits",
                words.len()
            )));
        }
        for (w, word) in words.iter_mut().enumerate() {
            *word &= tail_mask(len, w);
        }
        Ok(PackedGf2Vector { len, words })
    }

    pub fn from_field_vector(v: &FieldVector) -> Result<Self> {
        FieldSpec::binary().ensure_same(v.spec())?;
        Ok(Self::from_bits(v.as_slice()))
    }

    pub(crate) fn from_bits(bits: &[u8]) -> Self {
        let mut out = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            out.words[i / 64] |= ((b & 1) as u64) << (i % 64);
        }
        out
    }

    pub fn to_field_vector(&self) -> FieldVector {
        FieldVector::from_raw(FieldSpec::binary(), self.to_bits())
    }

    pub(crate) fn to_bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.bit(i)).collect()
    }

    #[inline]
    pub fn bit(&self, i: usize) -> u8 {
        ((self.words[i / 64] >> (i % 64)) & 1) as u8
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn xor(&self, other: &Self) -> Result<Self> {
        if self.len != other.len {
            return Err(Error::Shape(format!("{} vs {} bits", self.len, other.len)));
        }
        Ok(PackedGf2Vector {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a ^ b).collect(),
        })
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Weight of `a xor b` over the first `len` bits.
#[inline]
pub(crate) fn xor_weight_prefix(a: &[u64], b: &[u64], len: usize) -> usize {
    let mut w = 0u32;
    for k in 0..words_for(len) {
        w += ((a[k] ^ b[k]) & tail_mask(len, k)).count_ones();
    }
    w as usize
}

#[inline]
pub(crate) fn weight_prefix(a: &[u64], len: usize) -> usize {
    let mut w = 0u32;
    for (k, word) in a.iter().enumerate().take(words_for(len)) {
        w += (word & tail_mask(len, k)).count_ones();
    }
    w as usize
}

/// Dense bit-packed GF(2) matrix; each row is a packed vector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackedGf2Matrix {
    rows: usize,
    cols: usize,
    row_words: usize,
    data: Vec<u64>,
}

impl PackedGf2Matrix {
    pub fn from_sparse(m: &SparseMatrix) -> Result<Self> {
        FieldSpec::binary().ensure_same(m.spec())?;
        let row_words = words_for(m.cols());
        let mut data = vec![0u64; row_words * m.rows()];
        for (r, c, _) in m.entries() {
            data[r * row_words + c / 64] |= 1 << (c % 64);
        }
        Ok(PackedGf2Matrix {
            rows: m.rows(),
            cols: m.cols(),
            row_words,
            data,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn mul_vec(&self, v: &PackedGf2Vector) -> Result<PackedGf2Vector> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "{}x{} matrix times {} bits",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = PackedGf2Vector::zeros(self.rows);
        for r in 0..self.rows {
            let row = &self.data[r * self.row_words..(r + 1) * self.row_words];
            let parity = row
                .iter()
                .zip(v.words())
                .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
                & 1;
            out.words[r / 64] |= (parity as u64) << (r % 64);
        }
        Ok(out)
    }
}
