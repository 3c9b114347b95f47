//! Seeded random streams. Every (concern, agent) pair gets its own ChaCha
//! stream derived from the master seed, so draws are reproducible and
//! independent of agent iteration order.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named substreams, one per stochastic concern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Concern {
    /// Initial agent values (and per-episode severity redraws).
    InitialValues,
    /// Admission requests, check-up minutes and self-request spacing.
    Arrivals,
    /// Reserved for decision noise independent of the fuzzy systems.
    Noise,
}

impl Concern {
    fn tag(&self) -> u64 {
        match self {
            Concern::InitialValues => 1,
            Concern::Arrivals => 2,
            Concern::Noise => 3,
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = x;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Master seed with stable derivation of per-concern, per-agent streams.
/// Identical seed and configuration reproduce every draw bit for bit.
#[derive(Debug, Clone, Copy)]
pub struct RandomStream {
    seed: u64,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent stream for one concern and one agent index.
    pub fn stream(&self, concern: Concern, index: u64) -> ChaCha8Rng {
        let mut state = splitmix64(self.seed ^ concern.tag().wrapping_mul(0xA076_1D64_78BD_642F));
        state = splitmix64(state ^ index.wrapping_mul(0xE703_7ED1_A0B4_28DB));
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        ChaCha8Rng::from_seed(key)
    }
}
