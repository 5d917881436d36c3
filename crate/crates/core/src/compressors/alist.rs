//! The alist sparse-matrix text format.
//!
//! ```text
//! n m
//! max_col_degree max_row_degree
//! <n column degrees>
//! <m row degrees>
//! <n lines: 1-based row indices of each column, zero padded>
//! <m lines: 1-based column indices of each row, zero padded>
//! ```
//!
//! Over GF(r) with r > 2 every index is followed by its nonzero value
//! (`index value` pairs; padding is `0 0`).

use crate::error::{Error, Result};
use crate::gf::{FieldSpec, SparseMatrix};
use std::fmt::Write;

pub fn write_alist(h: &SparseMatrix) -> String {
    let nonbinary = h.spec().order() > 2;
    let mut cols: Vec<Vec<(usize, u8)>> = vec![Vec::new(); h.cols()];
    let mut rows: Vec<Vec<(usize, u8)>> = vec![Vec::new(); h.rows()];
    for (r, c, v) in h.entries() {
        cols[c].push((r, v));
        rows[r].push((c, v));
    }
    let max_col = cols.iter().map(Vec::len).max().unwrap_or(0);
    let max_row = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", h.cols(), h.rows());
    let _ = writeln!(out, "{max_col} {max_row}");
    let join = |it: &mut dyn Iterator<Item = usize>| it.map(|d| d.to_string()).collect::<Vec<_>>().join(" ");
    let _ = writeln!(out, "{}", join(&mut cols.iter().map(Vec::len)));
    let _ = writeln!(out, "{}", join(&mut rows.iter().map(Vec::len)));
    let mut emit = |list: &[(usize, u8)], width: usize| {
        let mut items: Vec<String> = list
            .iter()
            .map(|&(i, v)| if nonbinary { format!("{} {v}", i + 1) } else { (i + 1).to_string() })
            .collect();
        items.resize(width, if nonbinary { "0 0".into() } else { "0".into() });
        let _ = writeln!(out, "{}", items.join(" "));
    };
    for c in &cols {
        emit(c, max_col);
    }
    for r in &rows {
        emit(r, max_row);
    }
    out
}

pub fn read_alist(text: &str, spec: FieldSpec) -> Result<SparseMatrix> {
    let nonbinary = spec.order() > 2;
    let mut tokens = text.split_ascii_whitespace().map(|t| {
        t.parse::<usize>()
            .map_err(|_| Error::Parse(format!("alist token `{t}` is not an integer")))
    });
    let mut next = || tokens.next().unwrap_or_else(|| Err(Error::Parse("alist ended early".into())));
    let n = next()?;
    let m = next()?;
    let max_col = next()?;
    let max_row = next()?;
    let col_deg: Vec<usize> = (0..n).map(|_| next()).collect::<Result<_>>()?;
    let _row_deg: Vec<usize> = (0..m).map(|_| next()).collect::<Result<_>>()?;
    let mut entries = Vec::new();
    for (c, &deg) in col_deg.iter().enumerate() {
        for k in 0..max_col {
            let r = next()?;
            let v = if nonbinary { next()? } else { 1 };
            if k < deg {
                if r == 0 || r > m {
                    return Err(Error::Parse(format!("row index {r} in column {}", c + 1)));
                }
                let v = u8::try_from(v).map_err(|_| Error::Parse(format!("value {v}")))?;
                entries.push((r - 1, c, v));
            }
        }
    }
    // Row lists repeat the column lists; consume them for validation only.
    for _ in 0..m * max_row * if nonbinary { 2 } else { 1 } {
        next()?;
    }
    SparseMatrix::from_triplets(spec, m, n, entries)
}
