//! Named, counter-based random substreams.
//!
//! Every concern (aim noise, decisions, scenario layout, ...) draws from its
//! own ChaCha8 stream keyed by `(seed, name, indices)`. Adding a new draw site
//! with a new name never shifts the numbers seen by existing ones.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    /// Generator for `name` at position `index` (e.g. a round number).
    pub fn stream(&self, name: &str, index: u64) -> ChaCha8Rng {
        self.stream_at(name, &[index])
    }

    pub fn stream_at(&self, name: &str, indices: &[u64]) -> ChaCha8Rng {
        let mut h = Sha256::new();
        h.update(self.seed.to_le_bytes());
        h.update((name.len() as u64).to_le_bytes());
        h.update(name.as_bytes());
        for i in indices {
            h.update(i.to_le_bytes());
        }
        ChaCha8Rng::from_seed(h.finalize().into())
    }

    /// Child stream family, e.g. one per match of a campaign.
    pub fn child(&self, name: &str, index: u64) -> RngStream {
        RngStream::new(derive_seed_named(self.seed, name, index))
    }
}

fn derive_seed_named(base: u64, name: &str, index: u64) -> u64 {
    let mut h = Sha256::new();
    h.update(b"derive");
    h.update(base.to_le_bytes());
    h.update(name.as_bytes());
    h.update(index.to_le_bytes());
    let out = h.finalize();
    u64::from_le_bytes(out[..8].try_into().expect("digest has 32 bytes"))
}

/// Seed of match `i` in a campaign started from `base`.
pub fn derive_seed(base: u64, i: u64) -> u64 {
    derive_seed_named(base, "match", i)
}
