//! Gaussian elimination over GF(r): rank, coset particular solutions and
//! null-space bases. Used by the exhaustive decoder and by tests.

use super::{FieldSpec, FieldVector, SparseMatrix};
use crate::error::{Error, Result};

/// Dense row-major matrix over GF(r).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DenseMatrix {
    spec: FieldSpec,
    cols: usize,
    rows: Vec<Vec<u8>>,
}

impl DenseMatrix {
    pub fn new(spec: FieldSpec, cols: usize, rows: Vec<Vec<u8>>) -> Result<Self> {
        for row in &rows {
            if row.len() != cols {
                return Err(Error::Shape(format!("row of length {} in {cols}-column matrix", row.len())));
            }
            for &a in row {
                spec.check(a)?;
            }
        }
        Ok(DenseMatrix { spec, cols, rows })
    }

    pub fn from_sparse(m: &SparseMatrix) -> Self {
        DenseMatrix {
            spec: m.spec(),
            cols: m.cols(),
            rows: m.to_dense(),
        }
    }

    pub fn rank(&self) -> usize {
        RowEchelon::reduce(self).rank()
    }
}

/// Reduced row echelon form `R = T H` together with the row transform `T`.
#[derive(Clone, Debug)]
pub struct RowEchelon {
    spec: FieldSpec,
    cols: usize,
    reduced: Vec<Vec<u8>>,
    transform: Vec<Vec<u8>>,
    pivots: Vec<usize>,
}

impl RowEchelon {
    pub fn reduce(m: &DenseMatrix) -> Self {
        let f = m.spec;
        let nrows = m.rows.len();
        let mut a = m.rows.clone();
        let mut t: Vec<Vec<u8>> = (0..nrows)
            .map(|i| (0..nrows).map(|j| u8::from(i == j)).collect())
            .collect();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == nrows {
                break;
            }
            let Some(p) = (row..nrows).find(|&i| a[i][col] != 0) else {
                continue;
            };
            a.swap(row, p);
            t.swap(row, p);
            let inv = f.inv(a[row][col]).expect("pivot is nonzero");
            for x in a[row].iter_mut() {
                *x = f.mul(*x, inv);
            }
            for x in t[row].iter_mut() {
                *x = f.mul(*x, inv);
            }
            for i in 0..nrows {
                if i == row || a[i][col] == 0 {
                    continue;
                }
                let c = a[i][col];
                for k in 0..m.cols {
                    let d = f.mul(c, a[row][k]);
                    a[i][k] = f.sub(a[i][k], d);
                }
                for k in 0..nrows {
                    let d = f.mul(c, t[row][k]);
                    t[i][k] = f.sub(t[i][k], d);
                }
            }
            pivots.push(col);
            row += 1;
        }
        RowEchelon {
            spec: f,
            cols: m.cols,
            reduced: a,
            transform: t,
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.rank()
    }

    /// Some `z` with `H z = s`, or `None` when the coset is empty.
    pub fn particular_solution(&self, syndrome: &FieldVector) -> Result<Option<FieldVector>> {
        let f = self.spec;
        f.ensure_same(syndrome.spec())?;
        if syndrome.len() != self.transform.len() {
            return Err(Error::Shape(format!(
                "syndrome of length {} for {} checks",
                syndrome.len(),
                self.transform.len()
            )));
        }
        let s = syndrome.as_slice();
        let ts: Vec<u8> = self
            .transform
            .iter()
            .map(|row| row.iter().zip(s).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b))))
            .collect();
        if ts[self.rank()..].iter().any(|&x| x != 0) {
            return Ok(None);
        }
        let mut z = vec![0u8; self.cols];
        for (k, &p) in self.pivots.iter().enumerate() {
            z[p] = ts[k];
        }
        Ok(Some(FieldVector::from_raw(f, z)))
    }

    /// A basis of `{z : H z = 0}`, one vector per free column.
    pub fn null_space(&self) -> Vec<FieldVector> {
        let f = self.spec;
        let mut is_pivot = vec![false; self.cols];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut z = vec![0u8; self.cols];
                z[free] = 1;
                for (k, &p) in self.pivots.iter().enumerate() {
                    z[p] = f.neg(self.reduced[k][free]);
                }
                FieldVector::from_raw(f, z)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_of_small_matrices() {
        let f = FieldSpec::binary();
        let m = DenseMatrix::new(f, 3, vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]).unwrap();
        assert_eq!(m.rank(), 2);
        let f3 = FieldSpec::new(3).unwrap();
        let m = DenseMatrix::new(f3, 3, vec![vec![1, 2, 0], vec![2, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(m.rank(), 2);
    }

    #[test]
    fn coset_solutions_and_null_space() {
        let f = FieldSpec::new(5).unwrap();
        let dense = vec![vec![1, 2, 0, 4], vec![0, 3, 1, 1], vec![1, 0, 4, 2]];
        let h = SparseMatrix::from_dense(f, &dense, 4).unwrap();
        let ech = RowEchelon::reduce(&DenseMatrix::from_sparse(&h));
        for v in ech.null_space() {
            assert!(h.mul_vec(&v).unwrap().is_zero());
        }
        assert_eq!(ech.null_space().len(), ech.nullity());
        let z = FieldVector::new(f, vec![3, 1, 4, 1]).unwrap();
        let s = h.mul_vec(&z).unwrap();
        let p = ech.particular_solution(&s).unwrap().unwrap();
        assert_eq!(h.mul_vec(&p).unwrap(), s);
    }

    #[test]
    fn inconsistent_syndrome_has_empty_coset() {
        let f = FieldSpec::binary();
        let h = SparseMatrix::from_dense(f, &[vec![1, 1], vec![1, 1]], 2).unwrap();
        let ech = RowEchelon::reduce(&DenseMatrix::from_sparse(&h));
        let s = FieldVector::new(f, vec![1, 0]).unwrap();
        assert!(ech.particular_solution(&s).unwrap().is_none());
    }
}
