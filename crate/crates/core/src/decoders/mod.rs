//! Syndrome decoders: find a likely noise vector `z` with `H z = t`.

use crate::error::{Error, Result};
use crate::gf::FieldVector;

mod bp;
mod ml;

pub use bp::{bp_syndrome_decode, BpDecoder};
pub use ml::{ml_syndrome_decode, ml_syndrome_decode_with, MlConfig, DEFAULT_MAX_COSET};

/// Outcome of one decode call. `estimate == None` is the failure symbol `e`.
#[derive(Clone, Debug, PartialEq)]
pub struct DecodeOutcome {
    pub estimate: Option<FieldVector>,
    pub iterations: usize,
    pub syndrome_satisfied: bool,
    /// Set by the ML oracle when another coset member ties the optimum.
    pub ambiguous: bool,
}

impl DecodeOutcome {
    pub fn failure(iterations: usize) -> Self {
        DecodeOutcome { estimate: None, iterations, syndrome_satisfied: false, ambiguous: false }
    }

    pub fn is_failure(&self) -> bool {
        self.estimate.is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BpConfig {
    pub max_iterations: usize,
    /// Weight of the previous check message, in `[0, 1)`.
    pub damping: f64,
    /// Stop as soon as the hard decision satisfies the syndrome.
    pub early_exit: bool,
}

impl Default for BpConfig {
    fn default() -> Self {
        BpConfig { max_iterations: 50, damping: 0.0, early_exit: true }
    }
}

impl BpConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.damping) {
            return Err(Error::InvalidParameter(format!("damping {} must lie in [0, 1)", self.damping)));
        }
        Ok(())
    }
}
