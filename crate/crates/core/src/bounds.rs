//! Achievable pattern-rate boundaries, evaluated at `epsilon = 0`.

use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::prob::{binary_entropy, convolve, Pmf};

/// A rate boundary; negative formal values are reported as zero with
/// `floored` set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bound {
    pub value: f64,
    pub raw: f64,
    pub floored: bool,
}

impl Bound {
    fn floor(raw: f64) -> Self {
        Bound { value: raw.max(0.0), raw, floored: raw < 0.0 }
    }
}

/// `(rc, rm, rs)` in bits per symbol.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RatePoint {
    pub rc: f64,
    pub rm: f64,
    pub rs: f64,
    /// Whether the rates are post-rounding values.
    pub realized: bool,
}

impl RatePoint {
    pub fn new(rc: f64, rm: f64, rs: f64, realized: bool) -> Result<Self> {
        for (name, v) in [("rc", rc), ("rm", rm), ("rs", rs)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {v} must be a nonnegative rate")));
            }
        }
        Ok(RatePoint { rc, rm, rs, realized })
    }

    pub fn min_compression(&self) -> f64 {
        self.rm.min(self.rs)
    }

    pub fn below(&self, bound: &Bound) -> bool {
        self.rc < bound.value
    }
}

fn check_rates(rm: f64, rs: f64) -> Result<f64> {
    if !(rm >= 0.0 && rs >= 0.0 && rm.is_finite() && rs.is_finite()) {
        return Err(Error::InvalidParameter(format!("compression rates ({rm}, {rs}) must be nonnegative")));
    }
    Ok(rm.min(rs))
}

/// `min(rm, rs) (H(qx * qz) - H(qz))` for the truncation recognizer.
pub fn thm1_bound(rm: f64, rs: f64, qx: &Pmf, qz: &Pmf) -> Result<Bound> {
    let m = check_rates(rm, rs)?;
    let hy = convolve(qx, qz)?.entropy();
    Ok(Bound::floor(m * (hy - qz.entropy())))
}

/// `min(rm, rs) - H2(q)`: the rate reachable by treating the patterns as
/// codewords of an LDPC code over a binary symmetric channel.
pub fn ldpc_bound(rm: f64, rs: f64, q: f64) -> Result<Bound> {
    let m = check_rates(rm, rs)?;
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidParameter(format!("crossover {q} outside [0, 1]")));
    }
    Ok(Bound::floor(m - binary_entropy(q)))
}

/// `min(rm, rs) - rz` for syndrome recognition with noise entropy rate `rz`.
pub fn thm3_bound(rm: f64, rs: f64, rz: f64) -> Result<Bound> {
    let m = check_rates(rm, rs)?;
    if !(rz >= 0.0 && rz.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise entropy rate {rz} must be nonnegative")));
    }
    Ok(Bound::floor(m - rz))
}

/// `R (log2 r + (1-q) log2(1-q) + q log2(q/(r-1)))`: the pattern rate that
/// survives the least favourable noise with `P(z != 0) = q` over an
/// alphabet of size `r`.
pub fn worst_case_noise_bound(r: u32, q: f64, rate: f64) -> Result<Bound> {
    if r < 2 {
        return Err(Error::InvalidParameter(format!("alphabet size {r} below 2")));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!("q = {q} must lie in (0, 1)")));
    }
    check_rates(rate, rate)?;
    let r = f64::from(r);
    Ok(Bound::floor(rate * (r.log2() + (1.0 - q) * (1.0 - q).log2() + q * (q / (r - 1.0)).log2())))
}

/// The maximizing noise: `1 - q` at zero and `q / (r - 1)` elsewhere.
pub fn worst_case_noise(spec: FieldSpec, q: f64) -> Result<Pmf> {
    if !(q > 0.0 && q < 1.0) {
        return Err(Error::InvalidParameter(format!("q = {q} must lie in (0, 1)")));
    }
    Pmf::symmetric(spec, q)
}
