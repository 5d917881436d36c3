//! Keyed random streams.
//!
//! Every random draw in the crate comes from a generator keyed by
//! `(master seed, purpose, index)`, where the index is a trial or pattern
//! number. Draws are therefore reproducible per item no matter which worker
//! produces them or in what order.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

pub type StreamRng = Xoshiro256PlusPlus;

/// What a stream is used for. Streams with different purposes never overlap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    Patterns = 1,
    Index = 2,
    Noise = 3,
    Matrix = 4,
    MatrixExtension = 5,
    Database = 6,
    System = 7,
    TestDraw = 8,
    EntropyRate = 9,
    Auxiliary = 10,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// A 64-bit seed that can derive independent child seeds.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

impl Seed {
    /// Child seed for `(purpose, index)`.
    pub fn derive(self, purpose: Purpose, index: u64) -> Seed {
        let mut s = self.0 ^ (purpose as u64).wrapping_mul(0xd1b5_4a32_d192_ed03);
        let a = splitmix64(&mut s);
        let mut t = a ^ index.wrapping_mul(0x8cb9_2ba7_2f3d_8dd7);
        Seed(splitmix64(&mut t))
    }

    /// Stream `index` of the generator keyed by `(self, purpose)`.
    pub fn stream(self, purpose: Purpose, index: u64) -> StreamRng {
        StreamRng::seed_from_u64(self.derive(purpose, index).0)
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}
