//! Seeded, splittable random streams.
//!
//! A stream is a ChaCha20 keystream keyed by `master_seed` (expanded with
//! `SeedableRng::seed_from_u64`) and positioned on the 64-bit ChaCha stream
//! `stream_id`. Distinct ids select disjoint keystreams under the same key.
//!
//! Standard normals come from the ziggurat sampler of `rand_distr`
//! (`StandardNormal`). Ports to other languages should match the stream
//! distributionally, not bit-for-bit.

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

/// What a stream is used for inside one trial. Mixed into the stream id so
/// the data draw, network initialisations and batch shuffles never overlap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Purpose {
    Data = 1,
    Split = 2,
    NetworkInit = 3,
    BatchOrder = 4,
    Test = 0xFF,
}

/// Packs `(trial, purpose, slot)` into a stream id. `slot` separates
/// several consumers of the same purpose (e.g. one network per model).
pub fn stream_id(trial: u64, purpose: Purpose, slot: u8) -> u64 {
    assert!(trial < 1 << 48, "trial index out of range");
    (trial << 16) | ((purpose as u64) << 8) | slot as u64
}

#[derive(Debug, Clone)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    rng: ChaCha20Rng,
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(master_seed);
        rng.set_stream(stream_id);
        Self {
            master_seed,
            stream_id,
            rng,
        }
    }

    pub fn for_trial(master_seed: u64, trial: u64, purpose: Purpose, slot: u8) -> Self {
        Self::new(master_seed, stream_id(trial, purpose, slot))
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Draw from N(0, std²). A zero `std` yields exact zeros.
    pub fn normal(&mut self, std: f64) -> f64 {
        std * self.standard_normal()
    }

    pub fn fill_normal(&mut self, out: &mut [f64], std: f64) {
        for v in out {
            *v = self.normal(std);
        }
    }

    /// Uniform on `[low, high)`.
    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.rng.random::<f64>()
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        items.shuffle(&mut self.rng);
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }
}
