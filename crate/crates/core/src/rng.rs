//! Deterministic per-trial random streams.
//!
//! A stream is keyed by `(master_seed, experiment_id, trial_index)`. The key
//! is expanded into a ChaCha8 key, so every trial owns an independent stream
//! regardless of which worker thread runs it or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

const DOMAIN_TAG: &[u8; 8] = b"domlab01";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub master_seed: u64,
    pub experiment_id: u64,
    pub trial_index: u64,
}

impl RngStream {
    pub fn new(master_seed: u64, experiment_id: u64, trial_index: u64) -> Self {
        RngStream {
            master_seed,
            experiment_id,
            trial_index,
        }
    }

    /// The same stream family at another trial index.
    pub fn with_trial(self, trial_index: u64) -> Self {
        RngStream {
            trial_index,
            ..self
        }
    }

    /// Instantiate the generator. Calling this twice yields two generators
    /// producing the identical bit stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[0..8].copy_from_slice(&self.master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&self.experiment_id.to_le_bytes());
        key[16..24].copy_from_slice(&self.trial_index.to_le_bytes());
        key[24..32].copy_from_slice(DOMAIN_TAG);
        ChaCha8Rng::from_seed(key)
    }
}
