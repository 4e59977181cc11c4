//! SHA-256 digests over canonical JSON.

use serde::Serialize;
use sha2::{Digest, Sha256};

/// Hex SHA-256 of the compact JSON serialization of `value`.
///
/// `serde_json` emits struct fields in declaration order and floats in
/// shortest round-trip form, which makes the encoding canonical for our types.
pub fn json_digest<S: Serialize>(value: &S) -> String {
    let bytes = serde_json::to_vec(value).expect("value serializes to JSON");
    bytes_digest(&bytes)
}

pub fn bytes_digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}
