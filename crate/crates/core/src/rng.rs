//! Labelled, splittable random streams.
//!
//! A stream is identified by a 64-bit seed and a text label. The ChaCha key
//! is the SHA-256 digest of both, so distinct labels give unrelated key
//! streams. Per-unit draws (one tensor entry, one vertex pair, one clause)
//! use the ChaCha stream id as a counter, which makes them reproducible in
//! any evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub label: String,
}

impl RngStream {
    pub fn new(seed: u64, label: impl Into<String>) -> Self {
        Self {
            seed,
            label: label.into(),
        }
    }

    /// Child stream whose label is `self.label/suffix`.
    pub fn child(&self, suffix: impl AsRef<str>) -> Self {
        let label = if self.label.is_empty() {
            suffix.as_ref().to_string()
        } else {
            format!("{}/{}", self.label, suffix.as_ref())
        };
        Self {
            seed: self.seed,
            label,
        }
    }

    fn key(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        h.update(b"randopt-stream\0");
        h.update(self.seed.to_le_bytes());
        h.update((self.label.len() as u64).to_le_bytes());
        h.update(self.label.as_bytes());
        h.finalize().into()
    }

    /// The generator for this stream, positioned at its start.
    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::from_seed(self.key())
    }

    /// Independent generator for unit `index` of this stream.
    pub fn unit(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key());
        // stream 0 is used by `rng()`
        rng.set_stream(index.wrapping_add(1));
        rng
    }
}
