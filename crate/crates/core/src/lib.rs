//! Recognition of noisy patterns from linearly compressed memories.

pub mod bounds;
pub mod compressors;
pub mod decoders;
pub mod environment;
pub mod error;
pub mod gf;
pub mod harness;
pub mod prob;
pub mod recognition;
pub mod rng;

pub use error::{Error, Result};
