use super::{FieldSpec, FieldVector};
use crate::error::{Error, Result};

/// Sparse matrix over GF(r) in compressed-row form.
///
/// Entries within a row are sorted by column; only nonzero values are stored
/// and no `(row, col)` pair appears twice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    spec: FieldSpec,
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<u8>,
}

impl SparseMatrix {
    /// Builds a matrix from `(row, col, value)` triplets.
    pub fn from_triplets(
        spec: FieldSpec,
        rows: usize,
        cols: usize,
        entries: impl IntoIterator<Item = (usize, usize, u8)>,
    ) -> Result<Self> {
        let mut entries: Vec<(usize, usize, u8)> = entries.into_iter().collect();
        for &(r, c, v) in &entries {
            if r >= rows || c >= cols {
                return Err(Error::Shape(format!(
                    "entry ({r}, {c}) outside {rows}x{cols} matrix"
                )));
            }
            if v == 0 || !spec.contains(v) {
                return Err(Error::InvalidParameter(format!(
                    "entry ({r}, {c}) has value {v}, expected 1..{}",
                    spec.order()
                )));
            }
        }
        entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        if let Some(w) = entries.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::InvalidParameter(format!(
                "duplicate entry at ({}, {})",
                w[0].0, w[0].1
            )));
        }
        let mut row_ptr = vec![0usize; rows + 1];
        for &(r, _, _) in &entries {
            row_ptr[r + 1] += 1;
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(SparseMatrix {
            spec,
            rows,
            cols,
            row_ptr,
            col_idx: entries.iter().map(|e| e.1).collect(),
            vals: entries.iter().map(|e| e.2).collect(),
        })
    }

    /// `[I_k 0]`, the k x n truncation matrix.
    pub fn identity_prefix(spec: FieldSpec, k: usize, n: usize) -> Result<Self> {
        if k > n {
            return Err(Error::Shape(format!("identity block {k} wider than {n}")));
        }
        Self::from_triplets(spec, k, n, (0..k).map(|i| (i, i, 1)))
    }

    pub fn from_dense(spec: FieldSpec, dense: &[Vec<u8>], cols: usize) -> Result<Self> {
        let mut entries = Vec::new();
        for (r, row) in dense.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Shape(format!("row {r} has length {}", row.len())));
            }
            for (c, &v) in row.iter().enumerate() {
                if v != 0 {
                    entries.push((r, c, v));
                }
            }
        }
        Self::from_triplets(spec, dense.len(), cols, entries)
    }

    #[inline]
    pub fn spec(&self) -> FieldSpec {
        self.spec
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `(col, value)` pairs of row `r`.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, u8)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.col_idx[span.clone()]
            .iter()
            .copied()
            .zip(self.vals[span].iter().copied())
    }

    pub fn row_degree(&self, r: usize) -> usize {
        self.row_ptr[r + 1] - self.row_ptr[r]
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, u8)> + '_ {
        (0..self.rows).flat_map(move |r| self.row(r).map(move |(c, v)| (r, c, v)))
    }

    pub fn get(&self, r: usize, c: usize) -> u8 {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        match self.col_idx[span.clone()].binary_search(&c) {
            Ok(k) => self.vals[span.start + k],
            Err(_) => 0,
        }
    }

    pub fn column_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.cols];
        for &c in &self.col_idx {
            deg[c] += 1;
        }
        deg
    }

    pub fn row_degrees(&self) -> Vec<usize> {
        (0..self.rows).map(|r| self.row_degree(r)).collect()
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut out = vec![vec![0u8; self.cols]; self.rows];
        for (r, c, v) in self.entries() {
            out[r][c] = v;
        }
        out
    }

    /// The first `k` rows.
    pub fn top_rows(&self, k: usize) -> Result<SparseMatrix> {
        if k > self.rows {
            return Err(Error::Shape(format!("top {k} rows of {}", self.rows)));
        }
        let end = self.row_ptr[k];
        Ok(SparseMatrix {
            spec: self.spec,
            rows: k,
            cols: self.cols,
            row_ptr: self.row_ptr[..=k].to_vec(),
            col_idx: self.col_idx[..end].to_vec(),
            vals: self.vals[..end].to_vec(),
        })
    }

    /// `[self; below]`.
    pub fn vstack(&self, below: &SparseMatrix) -> Result<SparseMatrix> {
        self.spec.ensure_same(below.spec)?;
        if self.cols != below.cols {
            return Err(Error::Shape(format!(
                "stacking {} columns on {}",
                below.cols, self.cols
            )));
        }
        let base = self.nnz();
        let mut row_ptr = self.row_ptr.clone();
        row_ptr.extend(below.row_ptr[1..].iter().map(|p| p + base));
        let mut col_idx = self.col_idx.clone();
        col_idx.extend_from_slice(&below.col_idx);
        let mut vals = self.vals.clone();
        vals.extend_from_slice(&below.vals);
        Ok(SparseMatrix {
            spec: self.spec,
            rows: self.rows + below.rows,
            cols: self.cols,
            row_ptr,
            col_idx,
            vals,
        })
    }

    /// Exact product `M v`.
    pub fn mul_vec(&self, v: &FieldVector) -> Result<FieldVector> {
        self.spec.ensure_same(v.spec())?;
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "{}x{} matrix times vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok(FieldVector::from_raw(self.spec, self.mul_slice(v.as_slice())))
    }

    /// Product on a raw symbol slice of length `cols`.
    pub(crate) fn mul_slice(&self, x: &[u8]) -> Vec<u8> {
        debug_assert_eq!(x.len(), self.cols);
        let r = self.spec.order() as u32;
        (0..self.rows)
            .map(|row| {
                let span = self.row_ptr[row]..self.row_ptr[row + 1];
                if r == 2 {
                    let mut acc = 0u8;
                    for &c in &self.col_idx[span] {
                        acc ^= x[c];
                    }
                    acc
                } else {
                    let mut acc = 0u32;
                    for k in span {
                        acc += self.vals[k] as u32 * x[self.col_idx[k]] as u32;
                    }
                    (acc % r) as u8
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, Seed};
    use rand::Rng;

    fn dense_mul(spec: FieldSpec, m: &[Vec<u8>], v: &[u8]) -> Vec<u8> {
        m.iter()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(0u8, |acc, (&a, &b)| spec.add(acc, spec.mul(a, b)))
            })
            .collect()
    }

    #[test]
    fn rejects_bad_entries() {
        let f = FieldSpec::new(3).unwrap();
        assert!(SparseMatrix::from_triplets(f, 2, 2, [(0, 0, 1), (0, 0, 2)]).is_err());
        assert!(SparseMatrix::from_triplets(f, 2, 2, [(0, 0, 0)]).is_err());
        assert!(SparseMatrix::from_triplets(f, 2, 2, [(0, 0, 3)]).is_err());
        assert!(SparseMatrix::from_triplets(f, 2, 2, [(2, 0, 1)]).is_err());
    }

    #[test]
    fn identity_prefix_truncates() {
        let f = FieldSpec::new(5).unwrap();
        let m = SparseMatrix::identity_prefix(f, 3, 6).unwrap();
        let v = FieldVector::new(f, vec![4, 3, 2, 1, 0, 4]).unwrap();
        assert_eq!(m.mul_vec(&v).unwrap().as_slice(), &[4, 3, 2]);
        assert!(m.mul_vec(&FieldVector::zeros(f, 6)).unwrap().is_zero());
        assert!(matches!(
            m.mul_vec(&FieldVector::zeros(f, 5)),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn random_gf3_matches_dense() {
        let f = FieldSpec::new(3).unwrap();
        let mut rng = Seed(11).stream(Purpose::Auxiliary, 0);
        let dense: Vec<Vec<u8>> = (0..4)
            .map(|_| (0..8).map(|_| rng.gen_range(0..3)).collect())
            .collect();
        let m = SparseMatrix::from_dense(f, &dense, 8).unwrap();
        let v: Vec<u8> = vec![2, 0, 1, 1, 2, 0, 2, 1];
        let got = m.mul_vec(&FieldVector::new(f, v.clone()).unwrap()).unwrap();
        assert_eq!(got.as_slice(), dense_mul(f, &dense, &v).as_slice());
        assert_eq!(m.to_dense(), dense);
    }

    #[test]
    fn stacking_and_top_rows() {
        let f = FieldSpec::binary();
        let a = SparseMatrix::from_triplets(f, 2, 4, [(0, 1, 1), (1, 3, 1)]).unwrap();
        let b = SparseMatrix::from_triplets(f, 1, 4, [(0, 0, 1), (0, 2, 1)]).unwrap();
        let s = a.vstack(&b).unwrap();
        assert_eq!(s.rows(), 3);
        assert_eq!(s.get(2, 2), 1);
        assert_eq!(s.top_rows(2).unwrap(), a);
        assert_eq!(s.column_degrees(), vec![1, 1, 1, 1]);
        assert_eq!(s.row_degrees(), vec![1, 1, 2]);
    }
}
