//! Deterministic random streams.
//!
//! Every (cell, replication) pair in a Monte Carlo run gets its own stream,
//! derived by hashing a versioned tag, the master seed, a canonical cell
//! label, and the replication index. Because streams are keyed by *content*
//! rather than by position in some enumeration, adding, removing, or
//! reordering cells never perturbs the draws of the remaining cells, and no
//! scheduling decision (thread count, work-stealing order) can either.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use sha2::{Digest, Sha256};

/// Version tag folded into every stream derivation. Bump it if the
/// derivation scheme ever changes, so that old and new binaries cannot
/// silently produce different results under the same advertised scheme.
const DERIVATION_TAG: &[u8] = b"longmem/stream/v1";

/// Human-readable description of the RNG scheme, recorded in run metadata.
pub const RNG_DESCRIPTION: &str =
    "ChaCha12 streams; one stream per (cell, replication), seeded by \
     SHA-256(tag || master-seed || cell-label || replication)";

/// A deterministic pseudo-random stream.
///
/// Wraps a ChaCha12 generator seeded from a SHA-256 digest. ChaCha12 passes
/// all standard statistical batteries with a comfortable safety margin while
/// being noticeably faster than the 20-round variant, and its output is
/// identical on every platform and word size.
pub struct RandomStream {
    rng: ChaCha12Rng,
}

impl RandomStream {
    /// Derive the stream for one replication of one experiment cell.
    ///
    /// `label` must be a canonical description of the cell (distribution,
    /// process, length, and — unless common random numbers are requested —
    /// the estimation method). The label is length-prefixed inside the hash
    /// so distinct (label, replication) pairs can never collide.
    pub fn derive(master_seed: u64, label: &str, replication: u64) -> Self {
        let mut hasher = Sha256::new();
        hasher.update(DERIVATION_TAG);
        hasher.update(master_seed.to_le_bytes());
        hasher.update((label.len() as u64).to_le_bytes());
        hasher.update(label.as_bytes());
        hasher.update(replication.to_le_bytes());
        let digest: [u8; 32] = hasher.finalize().into();
        RandomStream {
            rng: ChaCha12Rng::from_seed(digest),
        }
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> std::result::Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}
