//! Table-driven AES for all three key sizes.
//!
//! Used standalone (ECB baseline) and as the cipher engine behind the
//! quantum-keyed mode. Deliberately the straightforward byte-table
//! construction: no T-tables, no hardware instructions, not constant-time.
//! This is a protocol-research artifact, not production cryptography;
//! never use it to protect real data.

mod block;
mod ecb;
mod sbox;
mod schedule;

pub use block::{decrypt_block, encrypt_block};
pub use ecb::{ecb_decrypt, ecb_encrypt, pkcs7_pad, pkcs7_unpad};
pub use sbox::{sbox_lookup, SboxDirection};
pub use schedule::key_expansion;

use std::error::Error;
use std::fmt;

pub const BLOCK_BYTES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AesError {
    /// Key length other than 16, 24, or 32 bytes.
    InvalidKeyLength(usize),
    /// Round-key count other than 11, 13, or 15.
    InvalidScheduleLength(usize),
    /// Ciphertext length zero or not a multiple of the block size.
    CiphertextNotBlockAligned(usize),
    /// Decrypted block does not end in well-formed PKCS#7 padding;
    /// wrong key and corrupted data both land here.
    BadPadding,
}

impl fmt::Display for AesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AesError::InvalidKeyLength(n) => {
                write!(f, "invalid key length {n} bytes (expected 16, 24, or 32)")
            }
            AesError::InvalidScheduleLength(n) => {
                write!(f, "invalid round-key count {n} (expected 11, 13, or 15)")
            }
            AesError::CiphertextNotBlockAligned(n) => {
                write!(f, "ciphertext length {n} is not a positive multiple of 16")
            }
            AesError::BadPadding => write!(f, "bad PKCS#7 padding"),
        }
    }
}

impl Error for AesError {}

/// The three key sizes the cipher accepts, each fixing the round count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KeySize {
    Bits128,
    Bits192,
    Bits256,
}

impl KeySize {
    pub fn from_byte_len(len: usize) -> Result<Self, AesError> {
        match len {
            16 => Ok(KeySize::Bits128),
            24 => Ok(KeySize::Bits192),
            32 => Ok(KeySize::Bits256),
            other => Err(AesError::InvalidKeyLength(other)),
        }
    }

    pub fn from_bits(bits: usize) -> Result<Self, AesError> {
        Self::from_byte_len(bits / 8).map_err(|_| AesError::InvalidKeyLength(bits))
    }

    pub fn byte_len(self) -> usize {
        match self {
            KeySize::Bits128 => 16,
            KeySize::Bits192 => 24,
            KeySize::Bits256 => 32,
        }
    }

    pub fn bits(self) -> usize {
        self.byte_len() * 8
    }

    /// Number of cipher rounds: 10, 12, or 14.
    pub fn rounds(self) -> usize {
        match self {
            KeySize::Bits128 => 10,
            KeySize::Bits192 => 12,
            KeySize::Bits256 => 14,
        }
    }
}

/// A validated cipher key of 16, 24, or 32 bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CipherKey {
    bytes: Vec<u8>,
}

impl CipherKey {
    pub fn new(bytes: Vec<u8>) -> Result<Self, AesError> {
        KeySize::from_byte_len(bytes.len())?;
        Ok(CipherKey { bytes })
    }

    pub fn bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn size(&self) -> KeySize {
        // length was validated at construction
        KeySize::from_byte_len(self.bytes.len()).unwrap()
    }

    pub fn rounds(&self) -> usize {
        self.size().rounds()
    }
}

/// Where a schedule's round keys came from.
///
/// `Expanded` marks the standard key-expansion output; `QuantumStream` marks
/// round keys injected directly from quantum-derived key material, bypassing
/// expansion. The cipher rounds treat both identically; the tag exists so
/// callers can assert which path produced a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScheduleSource {
    Expanded,
    QuantumStream,
}

/// Nr+1 round keys of 16 bytes each, consumed in order by [`encrypt_block`]
/// and in reverse by [`decrypt_block`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundKeySchedule {
    round_keys: Vec<[u8; 16]>,
    source: ScheduleSource,
}

impl RoundKeySchedule {
    /// Builds a schedule from explicit round keys. The count must be Nr+1
    /// for one of the legal round counts (11, 13, or 15 keys).
    pub fn from_round_keys(
        round_keys: Vec<[u8; 16]>,
        source: ScheduleSource,
    ) -> Result<Self, AesError> {
        match round_keys.len() {
            11 | 13 | 15 => Ok(RoundKeySchedule { round_keys, source }),
            other => Err(AesError::InvalidScheduleLength(other)),
        }
    }

    pub fn round_keys(&self) -> &[[u8; 16]] {
        &self.round_keys
    }

    /// Cipher round count Nr (one less than the number of round keys).
    pub fn rounds(&self) -> usize {
        self.round_keys.len() - 1
    }

    pub fn source(&self) -> ScheduleSource {
        self.source
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_size_round_counts() {
        assert_eq!(KeySize::Bits128.rounds(), 10);
        assert_eq!(KeySize::Bits192.rounds(), 12);
        assert_eq!(KeySize::Bits256.rounds(), 14);
        assert_eq!(KeySize::from_bits(192).unwrap(), KeySize::Bits192);
    }

    #[test]
    fn cipher_key_rejects_bad_lengths() {
        assert!(CipherKey::new(vec![0; 16]).is_ok());
        assert!(CipherKey::new(vec![0; 24]).is_ok());
        assert!(CipherKey::new(vec![0; 32]).is_ok());
        for n in [0, 1, 15, 17, 23, 25, 31, 33, 64] {
            assert_eq!(
                CipherKey::new(vec![0; n]),
                Err(AesError::InvalidKeyLength(n)),
                "length {n} must be rejected"
            );
        }
    }

    #[test]
    fn schedule_rejects_bad_round_key_counts() {
        for n in [0, 1, 10, 12, 14, 16] {
            let keys = vec![[0u8; 16]; n];
            assert_eq!(
                RoundKeySchedule::from_round_keys(keys, ScheduleSource::QuantumStream),
                Err(AesError::InvalidScheduleLength(n))
            );
        }
        let ok = RoundKeySchedule::from_round_keys(vec![[0; 16]; 11], ScheduleSource::Expanded);
        assert_eq!(ok.unwrap().rounds(), 10);
    }
}
