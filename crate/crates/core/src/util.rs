//! Small shared helpers: seed derivation, seeded generators, and stable
//! hashing.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// The crate's standard deterministic generator.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent sub-seed from a base seed and a purpose tag.
///
/// Every random stream in an experiment is derived this way from the
/// configured seed, so distinct stages never share a stream and runs are
/// reproducible across machines.
pub fn derive_seed(base: u64, tag: &str) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(base.to_le_bytes());
    hasher.update(tag.as_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("digest at least 8 bytes"))
}

/// SHA-256 over a value's canonical JSON serialization, hex-encoded.
///
/// Whitespace-insensitive by construction: the value is re-serialized from
/// its parsed form, so only semantically meaningful fields contribute.
pub fn stable_hash_json<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_vec(value).expect("value serializes to JSON");
    let digest = Sha256::digest(&json);
    to_hex(&digest)
}

fn to_hex(bytes: &[u8]) -> String {
    use std::fmt::Write;
    let mut out = String::with_capacity(bytes.len() * 2);
    for b in bytes {
        write!(out, "{b:02x}").expect("writing to string cannot fail");
    }
    out
}
