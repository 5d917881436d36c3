//! Linear compressors: memory matrix `H` (`s_i = H x_i`) and sensory
//! matrix `G` (`sigma = G y`).

use crate::error::{Error, Result};
use crate::gf::{FieldSpec, FieldVector, SparseMatrix};
use crate::rng::{Purpose, Seed, StreamRng};
use rand::seq::SliceRandom;
use rand::Rng;
use std::collections::HashMap;

mod alist;
pub use alist::{read_alist, write_alist};

/// Swap-repair passes over 4-cycle edges before a sample is accepted as is.
pub const FOUR_CYCLE_PASSES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Construction {
    /// `H = [I 0]`, `G = [I 0]`.
    Truncation,
    /// A sampled LDPC matrix shared as the top block of both `H` and `G`.
    LdpcExtended,
    Explicit,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompressorPair {
    h: SparseMatrix,
    g: SparseMatrix,
    construction: Construction,
}

impl CompressorPair {
    /// Pair from arbitrary matrices over the same field and column count.
    pub fn explicit(h: SparseMatrix, g: SparseMatrix) -> Result<Self> {
        Self::build(h, g, Construction::Explicit)
    }

    fn build(h: SparseMatrix, g: SparseMatrix, construction: Construction) -> Result<Self> {
        h.spec().ensure_same(g.spec())?;
        if h.cols() != g.cols() {
            return Err(Error::Shape(format!(
                "memory matrix has {} columns, sensory matrix {}",
                h.cols(),
                g.cols()
            )));
        }
        Ok(CompressorPair { h, g, construction })
    }

    pub fn h(&self) -> &SparseMatrix {
        &self.h
    }

    pub fn g(&self) -> &SparseMatrix {
        &self.g
    }

    pub fn construction(&self) -> Construction {
        self.construction
    }

    pub fn spec(&self) -> FieldSpec {
        self.h.spec()
    }

    pub fn n(&self) -> usize {
        self.h.cols()
    }

    /// Realized memory rate `rows(H) / n`.
    pub fn rm(&self) -> f64 {
        self.h.rows() as f64 / self.n() as f64
    }

    /// Realized sensory rate `rows(G) / n`.
    pub fn rs(&self) -> f64 {
        self.g.rows() as f64 / self.n() as f64
    }

    /// `min(rows(H), rows(G))`.
    pub fn n_min(&self) -> usize {
        self.h.rows().min(self.g.rows())
    }

    /// Whether the first `n_min` rows of `H` and `G` coincide.
    pub fn shares_top_block(&self) -> bool {
        let k = self.n_min();
        (0..k).all(|r| self.h.row(r).eq(self.g.row(r)))
    }
}

fn rate_rows(n: usize, rate: f64, name: &str) -> Result<usize> {
    if !(rate > 0.0 && rate <= 1.0) {
        return Err(Error::InvalidParameter(format!("{name} = {rate} must lie in (0, 1]")));
    }
    let rows = (n as f64 * rate).round() as usize;
    if rows == 0 {
        return Err(Error::InvalidParameter(format!("{name} = {rate} rounds to zero rows at n = {n}")));
    }
    Ok(rows)
}

/// `H = [I_{n rm} 0]`, `G = [I_{n rs} 0]`.
pub fn truncation_pair(n: usize, rm: f64, rs: f64, spec: FieldSpec) -> Result<CompressorPair> {
    let km = rate_rows(n, rm, "rm")?;
    let ks = rate_rows(n, rs, "rs")?;
    CompressorPair::build(
        SparseMatrix::identity_prefix(spec, km, n)?,
        SparseMatrix::identity_prefix(spec, ks, n)?,
        Construction::Truncation,
    )
}

/// `M v`.
pub fn compress(m: &SparseMatrix, v: &FieldVector) -> Result<FieldVector> {
    m.mul_vec(v)
}

/// A `(dv, dc)`-regular parity-check ensemble with `n dv / dc` rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LdpcEnsembleSpec {
    pub n: usize,
    pub dv: usize,
    pub dc: usize,
    pub spec: FieldSpec,
    pub seed: u64,
}

impl LdpcEnsembleSpec {
    pub fn rows(&self) -> usize {
        self.n * self.dv / self.dc
    }

    pub fn rate(&self) -> f64 {
        self.dv as f64 / self.dc as f64
    }

    pub fn validate(&self) -> Result<()> {
        let LdpcEnsembleSpec { n, dv, dc, .. } = *self;
        if dv == 0 || dc == 0 || n == 0 {
            return Err(Error::InfeasibleDegrees(format!("n = {n}, dv = {dv}, dc = {dc}")));
        }
        if (n * dv) % dc != 0 {
            return Err(Error::InfeasibleDegrees(format!("n dv = {} is not divisible by dc = {dc}", n * dv)));
        }
        if dc > n {
            return Err(Error::InfeasibleDegrees(format!(
                "degrees ({dv}, {dc}) cannot fit a {}x{n} matrix without repeated entries",
                self.rows()
            )));
        }
        Ok(())
    }

    /// Checks that the implied rate `dv/dc` gives `round(n rate)` rows.
    pub fn check_rate(&self, rate: f64) -> Result<()> {
        let wanted = (self.n as f64 * rate).round() as usize;
        if wanted != self.rows() {
            return Err(Error::InvalidParameter(format!(
                "degrees ({}, {}) give {} rows, rate {rate} at n = {} needs {wanted}",
                self.dv,
                self.dc,
                self.rows(),
                self.n
            )));
        }
        Ok(())
    }
}

/// Makes every group free of repeated items by swapping items between groups.
fn repair_duplicates(groups: &mut [Vec<usize>], rng: &mut StreamRng) -> Result<()> {
    if groups.len() < 2 {
        return if groups.iter().all(|g| has_no_duplicates(g)) {
            Ok(())
        } else {
            Err(Error::InfeasibleDegrees("a single check cannot hold repeated columns".into()))
        };
    }
    let budget = 1000 * groups.iter().map(Vec::len).sum::<usize>().max(1);
    let mut attempts = 0;
    for g in 0..groups.len() {
        while let Some(k) = duplicate_slot(&groups[g]) {
            attempts += 1;
            if attempts > budget {
                return Err(Error::InfeasibleDegrees("could not remove repeated entries".into()));
            }
            let g2 = rng.gen_range(0..groups.len());
            if g2 == g || groups[g2].is_empty() {
                continue;
            }
            let k2 = rng.gen_range(0..groups[g2].len());
            let (a, b) = (groups[g][k], groups[g2][k2]);
            if groups[g].contains(&b) || groups[g2].contains(&a) {
                continue;
            }
            groups[g][k] = b;
            groups[g2][k2] = a;
        }
    }
    Ok(())
}

fn has_no_duplicates(g: &[usize]) -> bool {
    duplicate_slot(g).is_none()
}

fn duplicate_slot(g: &[usize]) -> Option<usize> {
    (1..g.len()).find(|&k| g[..k].contains(&g[k]))
}

/// Check/variable adjacency used while removing 4-cycles.
struct Tanner {
    check_vars: Vec<Vec<usize>>,
    var_checks: Vec<Vec<usize>>,
}

impl Tanner {
    fn new(check_vars: Vec<Vec<usize>>, n: usize) -> Self {
        let mut var_checks = vec![Vec::new(); n];
        for (c, vars) in check_vars.iter().enumerate() {
            for &v in vars {
                var_checks[v].push(c);
            }
        }
        Tanner { check_vars, var_checks }
    }

    fn edge_in_four_cycle(&self, c: usize, v: usize) -> bool {
        self.var_checks[v].iter().filter(|&&c2| c2 != c).any(|&c2| {
            self.check_vars[c]
                .iter()
                .any(|&v2| v2 != v && self.var_checks[v2].contains(&c2))
        })
    }

    fn swap(&mut self, c1: usize, k1: usize, c2: usize, k2: usize) {
        let v1 = self.check_vars[c1][k1];
        let v2 = self.check_vars[c2][k2];
        self.check_vars[c1][k1] = v2;
        self.check_vars[c2][k2] = v1;
        replace(&mut self.var_checks[v1], c1, c2);
        replace(&mut self.var_checks[v2], c2, c1);
    }

    /// One pass of edge swaps; a swap is kept only if neither new edge lies
    /// on a 4-cycle, so no new 4-cycles are ever created.
    fn remove_four_cycles_pass(&mut self, rng: &mut StreamRng) -> usize {
        let m = self.check_vars.len();
        let mut removed = 0;
        for c in 0..m {
            for k in 0..self.check_vars[c].len() {
                let v = self.check_vars[c][k];
                if !self.edge_in_four_cycle(c, v) {
                    continue;
                }
                for _ in 0..10 {
                    let c2 = rng.gen_range(0..m);
                    if c2 == c {
                        continue;
                    }
                    let k2 = rng.gen_range(0..self.check_vars[c2].len());
                    let v2 = self.check_vars[c2][k2];
                    if v2 == v || self.check_vars[c].contains(&v2) || self.check_vars[c2].contains(&v) {
                        continue;
                    }
                    self.swap(c, k, c2, k2);
                    if !self.edge_in_four_cycle(c, v2) && !self.edge_in_four_cycle(c2, v) {
                        removed += 1;
                        break;
                    }
                    self.swap(c, k, c2, k2);
                }
            }
        }
        removed
    }
}

fn replace(list: &mut [usize], from: usize, to: usize) {
    if let Some(x) = list.iter_mut().find(|x| **x == from) {
        *x = to;
    }
}

fn to_matrix(check_vars: &[Vec<usize>], n: usize, spec: FieldSpec, rng: &mut StreamRng) -> Result<SparseMatrix> {
    let mut entries = Vec::with_capacity(check_vars.iter().map(Vec::len).sum());
    for (c, vars) in check_vars.iter().enumerate() {
        for &v in vars {
            let val = if spec.order() == 2 { 1 } else { rng.gen_range(1..spec.order()) };
            entries.push((c, v, val));
        }
    }
    SparseMatrix::from_triplets(spec, check_vars.len(), n, entries)
}

/// Samples a `(dv, dc)`-regular parity-check matrix: a random permutation of
/// variable sockets dealt out to checks, repeated entries repaired by swaps,
/// then up to [`FOUR_CYCLE_PASSES`] swap passes against 4-cycles. Nonzero
/// values are uniform on `1..r`.
pub fn sample_ldpc(ens: &LdpcEnsembleSpec) -> Result<SparseMatrix> {
    ens.validate()?;
    let mut rng = Seed(ens.seed).stream(Purpose::Matrix, 0);
    let mut sockets: Vec<usize> = (0..ens.n).flat_map(|v| std::iter::repeat_n(v, ens.dv)).collect();
    sockets.shuffle(&mut rng);
    let mut groups: Vec<Vec<usize>> = sockets.chunks(ens.dc).map(<[usize]>::to_vec).collect();
    repair_duplicates(&mut groups, &mut rng)?;

    let mut tanner = Tanner::new(groups, ens.n);
    for _ in 0..FOUR_CYCLE_PASSES {
        if tanner.remove_four_cycles_pass(&mut rng) == 0 {
            break;
        }
    }
    let h = to_matrix(&tanner.check_vars, ens.n, ens.spec, &mut rng)?;
    let cycles = count_four_cycles(&h);
    if cycles > 0 {
        log::debug!("accepted ({}, {}) LDPC sample with {cycles} residual 4-cycles", ens.dv, ens.dc);
    }
    Ok(h)
}

/// Number of 4-cycles in the Tanner graph (pairs of columns sharing two rows).
pub fn count_four_cycles(h: &SparseMatrix) -> usize {
    let mut shared: HashMap<(usize, usize), usize> = HashMap::new();
    for r in 0..h.rows() {
        let cols: Vec<usize> = h.row(r).map(|(c, _)| c).collect();
        for (i, &a) in cols.iter().enumerate() {
            for &b in &cols[i + 1..] {
                *shared.entry((a, b)).or_default() += 1;
            }
        }
    }
    shared.values().map(|&k| k * (k.saturating_sub(1)) / 2).sum()
}

/// `rows` extra sparse rows of weight `weight`, with column usage as even as
/// possible.
fn sample_extra_rows(spec: FieldSpec, n: usize, rows: usize, weight: usize, seed: u64) -> Result<SparseMatrix> {
    let weight = weight.clamp(1, n);
    let mut rng = Seed(seed).stream(Purpose::MatrixExtension, 0);
    let mut sockets = Vec::with_capacity(rows * weight);
    while sockets.len() < rows * weight {
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        sockets.extend(perm);
    }
    sockets.truncate(rows * weight);
    let mut groups: Vec<Vec<usize>> = sockets.chunks(weight).map(<[usize]>::to_vec).collect();
    repair_duplicates(&mut groups, &mut rng)?;
    to_matrix(&groups, n, spec, &mut rng)
}

/// Sensory matrix `G = [H; E]` whose first `rows(H)` rows are `H` itself; `E`
/// holds `round(n rs) - rows(H)` fresh sparse rows with the average row
/// weight of `H`. Requires `rs >= rows(H) / n`.
pub fn extend_to_sensory(h: &SparseMatrix, rs: f64, seed: u64) -> Result<CompressorPair> {
    let g = extend_rows(h, rs, seed, "rs")?;
    CompressorPair::build(h.clone(), g, Construction::LdpcExtended)
}

fn extend_rows(base: &SparseMatrix, rate: f64, seed: u64, name: &str) -> Result<SparseMatrix> {
    let n = base.cols();
    let rows = rate_rows(n, rate, name)?;
    if rows < base.rows() {
        return Err(Error::Precondition(format!(
            "{name} = {rate} gives {rows} rows, fewer than the {} rows of the base matrix; swap memory and sensory roles",
            base.rows()
        )));
    }
    if rows == base.rows() {
        return Ok(base.clone());
    }
    let weight = (base.nnz() as f64 / base.rows().max(1) as f64).round() as usize;
    let extra = sample_extra_rows(base.spec(), n, rows - base.rows(), weight, seed)?;
    base.vstack(&extra)
}

/// LDPC pair for arbitrary `(rm, rs)`: a `(dv, dc)` matrix at rate
/// `min(rm, rs)` forms the shared top block and the larger side is extended.
pub fn ldpc_pair(n: usize, rm: f64, rs: f64, dv: usize, dc: usize, spec: FieldSpec, seed: u64) -> Result<CompressorPair> {
    rate_rows(n, rm, "rm")?;
    rate_rows(n, rs, "rs")?;
    let ens = LdpcEnsembleSpec { n, dv, dc, spec, seed };
    ens.validate()?;
    ens.check_rate(rm.min(rs))?;
    let base = sample_ldpc(&ens)?;
    let ext_seed = Seed(seed).derive(Purpose::MatrixExtension, 0).0;
    let (h, g) = if rm <= rs {
        let g = extend_rows(&base, rs, ext_seed, "rs")?;
        (base, g)
    } else {
        let h = extend_rows(&base, rm, ext_seed, "rm")?;
        (h, base)
    };
    CompressorPair::build(h, g, Construction::LdpcExtended)
}
