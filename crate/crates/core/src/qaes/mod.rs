//! Quantum-keyed cipher modes.
//!
//! Instead of one key for a whole message, the cipher draws a stream of
//! unrelated keys qk1, qk2, ... from a [`KeyStream`] and gives every
//! 16-byte block its own key (per-block mode) or builds every block's round
//! keys directly from raw 16-byte stream chunks (per-round mode). Identical
//! plaintext blocks then encrypt to different ciphertext blocks, unlike
//! plain ECB, while each block still decrypts independently.

pub mod provider;

pub use provider::{KeyStream, ProviderKind};

use crate::aes::{
    decrypt_block, encrypt_block, key_expansion, pkcs7_pad, pkcs7_unpad, AesError, CipherKey,
    KeySize, RoundKeySchedule, ScheduleSource, BLOCK_BYTES,
};
use std::error::Error;
use std::fmt;

/// File-format magic for the ciphertext container.
pub const MAGIC: [u8; 4] = *b"QAES";
/// Container format version this build reads and writes.
pub const FORMAT_VERSION: u8 = 1;
/// Header length in bytes: magic, version, key size, key mode, block count.
pub const HEADER_BYTES: usize = 4 + 1 + 1 + 1 + 8;

/// How key material maps onto the cipher.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KeyMode {
    /// Block i is encrypted under its own key qk(i) through the normal
    /// key expansion.
    PerBlockKey,
    /// Each block's Nr+1 round keys are successive raw 16-byte stream
    /// chunks; key expansion is bypassed entirely.
    PerRoundKey,
}

impl KeyMode {
    /// Header code byte.
    pub fn code(self) -> u8 {
        match self {
            KeyMode::PerBlockKey => 0,
            KeyMode::PerRoundKey => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<KeyMode> {
        match code {
            0 => Some(KeyMode::PerBlockKey),
            1 => Some(KeyMode::PerRoundKey),
            _ => None,
        }
    }
}

/// Cipher-mode parameters. The channel settings ride along so live key
/// agreement and master-key setup share one place to look.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QaesConfig {
    pub key_size: KeySize,
    pub key_mode: KeyMode,
    pub channel: crate::bb84::ChannelConfig,
}

/// A parsed ciphertext container: header fields plus the block-aligned body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QaesCiphertext {
    pub key_size: KeySize,
    pub key_mode: KeyMode,
    pub block_count: u64,
    pub body: Vec<u8>,
}

impl QaesCiphertext {
    /// Serializes header and body into the container byte format.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_BYTES + self.body.len());
        out.extend_from_slice(&MAGIC);
        out.push(FORMAT_VERSION);
        out.push(self.key_size.byte_len() as u8);
        out.push(self.key_mode.code());
        out.extend_from_slice(&self.block_count.to_be_bytes());
        out.extend_from_slice(&self.body);
        out
    }

    /// Parses and validates a container, including the body-length
    /// invariant body.len() = 16 * block_count.
    pub fn from_bytes(bytes: &[u8]) -> Result<QaesCiphertext, QaesError> {
        if bytes.len() < HEADER_BYTES {
            return Err(QaesError::HeaderMismatch {
                detail: format!("container shorter than the {HEADER_BYTES}-byte header"),
            });
        }
        if bytes[..4] != MAGIC {
            return Err(QaesError::HeaderMismatch { detail: "bad magic".into() });
        }
        if bytes[4] != FORMAT_VERSION {
            return Err(QaesError::HeaderMismatch {
                detail: format!("unsupported format version {}", bytes[4]),
            });
        }
        let key_size = KeySize::from_byte_len(bytes[5] as usize).map_err(|_| {
            QaesError::HeaderMismatch { detail: format!("bad key size code {}", bytes[5]) }
        })?;
        let key_mode = KeyMode::from_code(bytes[6]).ok_or_else(|| {
            QaesError::HeaderMismatch { detail: format!("bad key mode code {}", bytes[6]) }
        })?;
        let block_count = u64::from_be_bytes(bytes[7..15].try_into().unwrap());
        let body = bytes[HEADER_BYTES..].to_vec();
        let expected = block_count
            .checked_mul(BLOCK_BYTES as u64)
            .filter(|&n| n == body.len() as u64);
        if expected.is_none() {
            return Err(QaesError::HeaderMismatch {
                detail: format!(
                    "body is {} bytes but the header declares {} blocks",
                    body.len(),
                    block_count
                ),
            });
        }
        Ok(QaesCiphertext { key_size, key_mode, block_count, body })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum QaesError {
    /// The key source cannot produce more material.
    KeyStreamExhausted,
    /// A live key agreement session aborted on a suspicious error rate.
    QberAbort { qber: f64, threshold: f64 },
    /// Padding invalid after decryption: wrong keys or corrupted data.
    BadPadding,
    /// Container malformed or inconsistent with the requested parameters.
    HeaderMismatch { detail: String },
}

impl fmt::Display for QaesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QaesError::KeyStreamExhausted => write!(f, "key stream exhausted"),
            QaesError::QberAbort { qber, threshold } => {
                write!(f, "key agreement aborted: QBER {qber:.4} over threshold {threshold}")
            }
            QaesError::BadPadding => write!(f, "invalid padding after decryption"),
            QaesError::HeaderMismatch { detail } => write!(f, "header mismatch: {detail}"),
        }
    }
}

impl Error for QaesError {}

/// One block's worth of round keys, by the configured mode.
fn block_schedule(
    config: &QaesConfig,
    stream: &mut KeyStream,
) -> Result<RoundKeySchedule, QaesError> {
    match config.key_mode {
        KeyMode::PerBlockKey => {
            let key = CipherKey::new(stream.next_key()?).expect("stream key length");
            Ok(key_expansion(&key))
        }
        KeyMode::PerRoundKey => {
            let rounds = config.key_size.rounds();
            let mut chunks = Vec::with_capacity(rounds + 1);
            for _ in 0..=rounds {
                chunks.push(stream.next_round_chunk()?);
            }
            Ok(RoundKeySchedule::from_round_keys(chunks, ScheduleSource::QuantumStream)
                .expect("chunk count matches the round count"))
        }
    }
}

/// Encrypts `plaintext` under a fresh key per block (or per round),
/// consuming the stream in block order. The stream's key size must match
/// the configuration.
pub fn qaes_encrypt(
    plaintext: &[u8],
    config: &QaesConfig,
    stream: &mut KeyStream,
) -> Result<QaesCiphertext, QaesError> {
    assert_eq!(
        stream.key_size(),
        config.key_size,
        "key stream size does not match the cipher configuration"
    );
    let padded = pkcs7_pad(plaintext);
    let mut body = Vec::with_capacity(padded.len());
    for block in padded.chunks_exact(BLOCK_BYTES) {
        let schedule = block_schedule(config, stream)?;
        let block: [u8; BLOCK_BYTES] = block.try_into().unwrap();
        body.extend_from_slice(&encrypt_block(&block, &schedule));
    }
    Ok(QaesCiphertext {
        key_size: config.key_size,
        key_mode: config.key_mode,
        block_count: (body.len() / BLOCK_BYTES) as u64,
        body,
    })
}

/// Inverts [`qaes_encrypt`], replaying the same key sequence from `stream`.
/// The container must agree with `config` on key size and mode.
pub fn qaes_decrypt(
    ciphertext: &QaesCiphertext,
    config: &QaesConfig,
    stream: &mut KeyStream,
) -> Result<Vec<u8>, QaesError> {
    assert_eq!(
        stream.key_size(),
        config.key_size,
        "key stream size does not match the cipher configuration"
    );
    if ciphertext.key_size != config.key_size {
        return Err(QaesError::HeaderMismatch {
            detail: format!(
                "container was written for {}-bit keys, configured for {}-bit",
                ciphertext.key_size.bits(),
                config.key_size.bits()
            ),
        });
    }
    if ciphertext.key_mode != config.key_mode {
        return Err(QaesError::HeaderMismatch {
            detail: "container key mode does not match the configuration".into(),
        });
    }
    if ciphertext.body.len() % BLOCK_BYTES != 0
        || ciphertext.body.len() as u64 != ciphertext.block_count * BLOCK_BYTES as u64
    {
        return Err(QaesError::HeaderMismatch {
            detail: "body length disagrees with the declared block count".into(),
        });
    }
    let mut padded = Vec::with_capacity(ciphertext.body.len());
    for block in ciphertext.body.chunks_exact(BLOCK_BYTES) {
        let schedule = block_schedule(config, stream)?;
        let block: [u8; BLOCK_BYTES] = block.try_into().unwrap();
        padded.extend_from_slice(&decrypt_block(&block, &schedule));
    }
    pkcs7_unpad(&padded).map_err(|e| match e {
        AesError::BadPadding => QaesError::BadPadding,
        other => QaesError::HeaderMismatch { detail: other.to_string() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aes::ecb_encrypt;
    use crate::bb84::ChannelConfig;
    use crate::rng::seeded_rng;
    use rand::RngCore;

    fn key(n: usize) -> CipherKey {
        CipherKey::new((0..n as u8).collect()).unwrap()
    }

    fn config(key_size: KeySize, key_mode: KeyMode) -> QaesConfig {
        QaesConfig { key_size, key_mode, channel: ChannelConfig::clean(1) }
    }

    #[test]
    fn per_block_fixed_equals_plain_ecb() {
        let mut rng = seeded_rng(31);
        for len in [0usize, 1, 15, 16, 17, 64, 1000] {
            let mut plaintext = vec![0u8; len];
            rng.fill_bytes(&mut plaintext);
            for bytes in [16, 24, 32] {
                let cfg = config(KeySize::from_byte_len(bytes).unwrap(), KeyMode::PerBlockKey);
                let mut stream = KeyStream::fixed(key(bytes));
                let ct = qaes_encrypt(&plaintext, &cfg, &mut stream).unwrap();
                assert_eq!(ct.body, ecb_encrypt(&plaintext, &key(bytes)));
            }
        }
    }

    #[test]
    fn round_trips_in_both_modes_and_all_sizes() {
        let mut rng = seeded_rng(32);
        for mode in [KeyMode::PerBlockKey, KeyMode::PerRoundKey] {
            for bytes in [16usize, 24, 32] {
                let mut plaintext = vec![0u8; 333];
                rng.fill_bytes(&mut plaintext);
                let cfg = config(KeySize::from_byte_len(bytes).unwrap(), mode);
                let master = key(16);
                let mut enc = KeyStream::derived_from_master(&master, cfg.key_size);
                let ct = qaes_encrypt(&plaintext, &cfg, &mut enc).unwrap();
                let mut dec = KeyStream::derived_from_master(&master, cfg.key_size);
                assert_eq!(qaes_decrypt(&ct, &cfg, &mut dec).unwrap(), plaintext);
            }
        }
    }

    #[test]
    fn identical_blocks_encrypt_differently_under_fresh_keys() {
        let plaintext = [0xAB; 48];
        let cfg = config(KeySize::Bits128, KeyMode::PerBlockKey);
        let mut stream = KeyStream::derived_from_master(&key(16), KeySize::Bits128);
        let ct = qaes_encrypt(&plaintext, &cfg, &mut stream).unwrap();
        let blocks: Vec<&[u8]> = ct.body.chunks_exact(16).collect();
        assert_eq!(blocks.len(), 4);
        assert_ne!(blocks[0], blocks[1]);
        assert_ne!(blocks[1], blocks[2]);
        assert_ne!(blocks[0], blocks[2]);

        // same input under the fixed provider leaks block equality instead
        let mut fixed = KeyStream::fixed(key(16));
        let ct = qaes_encrypt(&plaintext, &cfg, &mut fixed).unwrap();
        let blocks: Vec<&[u8]> = ct.body.chunks_exact(16).collect();
        assert_eq!(blocks[0], blocks[1]);
    }

    #[test]
    fn empty_plaintext_is_one_padding_block() {
        let cfg = config(KeySize::Bits128, KeyMode::PerBlockKey);
        let mut stream = KeyStream::fixed(key(16));
        let ct = qaes_encrypt(&[], &cfg, &mut stream).unwrap();
        assert_eq!(ct.block_count, 1);
        assert_eq!(ct.body, ecb_encrypt(&[], &key(16)));
        let mut stream = KeyStream::fixed(key(16));
        assert_eq!(qaes_decrypt(&ct, &cfg, &mut stream).unwrap(), Vec::<u8>::new());
    }

    #[test]
    fn per_round_consumes_exactly_rounds_plus_one_chunks_per_block() {
        for (bytes, rounds) in [(16usize, 10u64), (24, 12), (32, 14)] {
            let cfg = config(KeySize::from_byte_len(bytes).unwrap(), KeyMode::PerRoundKey);
            let mut stream = KeyStream::derived_from_master(&key(16), cfg.key_size);
            let plaintext = [7u8; 100]; // pads to 7 blocks
            qaes_encrypt(&plaintext, &cfg, &mut stream).unwrap();
            assert_eq!(stream.chunks_issued(), 7 * (rounds + 1));
            assert_eq!(stream.bytes_drawn(), 7 * (rounds + 1) * 16);
            assert_eq!(stream.keys_issued(), 0);
        }
    }

    #[test]
    fn per_block_consumes_exactly_one_key_per_block() {
        let cfg = config(KeySize::Bits256, KeyMode::PerBlockKey);
        let mut stream = KeyStream::derived_from_master(&key(16), KeySize::Bits256);
        qaes_encrypt(&[1u8; 64], &cfg, &mut stream).unwrap(); // 5 blocks padded
        assert_eq!(stream.keys_issued(), 5);
        assert_eq!(stream.bytes_drawn(), 5 * 32);
    }

    #[test]
    fn container_bytes_round_trip() {
        let ct = QaesCiphertext {
            key_size: KeySize::Bits192,
            key_mode: KeyMode::PerRoundKey,
            block_count: 2,
            body: vec![0x5A; 32],
        };
        let bytes = ct.to_bytes();
        assert_eq!(&bytes[..4], b"QAES");
        assert_eq!(bytes[4], 1);
        assert_eq!(bytes[5], 24);
        assert_eq!(bytes[6], 1);
        assert_eq!(bytes[7..15], 2u64.to_be_bytes());
        assert_eq!(QaesCiphertext::from_bytes(&bytes).unwrap(), ct);
    }

    #[test]
    fn container_parsing_rejects_malformed_input() {
        let good = QaesCiphertext {
            key_size: KeySize::Bits128,
            key_mode: KeyMode::PerBlockKey,
            block_count: 1,
            body: vec![0; 16],
        }
        .to_bytes();

        let cases: Vec<(&str, Vec<u8>)> = vec![
            ("short", good[..10].to_vec()),
            ("magic", {
                let mut b = good.clone();
                b[0] = b'Z';
                b
            }),
            ("version", {
                let mut b = good.clone();
                b[4] = 9;
                b
            }),
            ("key size", {
                let mut b = good.clone();
                b[5] = 17;
                b
            }),
            ("key mode", {
                let mut b = good.clone();
                b[6] = 2;
                b
            }),
            ("block count", {
                let mut b = good.clone();
                b[14] = 3;
                b
            }),
        ];
        for (what, bytes) in cases {
            assert!(
                matches!(
                    QaesCiphertext::from_bytes(&bytes),
                    Err(QaesError::HeaderMismatch { .. })
                ),
                "{what} accepted"
            );
        }
    }

    #[test]
    fn decrypt_rejects_config_disagreement() {
        let cfg = config(KeySize::Bits128, KeyMode::PerBlockKey);
        let mut stream = KeyStream::fixed(key(16));
        let ct = qaes_encrypt(b"hello", &cfg, &mut stream).unwrap();

        let wrong_size = config(KeySize::Bits256, KeyMode::PerBlockKey);
        let mut stream = KeyStream::fixed(key(32));
        assert!(matches!(
            qaes_decrypt(&ct, &wrong_size, &mut stream),
            Err(QaesError::HeaderMismatch { .. })
        ));

        let wrong_mode = config(KeySize::Bits128, KeyMode::PerRoundKey);
        let mut stream = KeyStream::fixed(key(16));
        assert!(matches!(
            qaes_decrypt(&ct, &wrong_mode, &mut stream),
            Err(QaesError::HeaderMismatch { .. })
        ));
    }

    #[test]
    fn wrong_master_fails_padding() {
        let cfg = config(KeySize::Bits128, KeyMode::PerBlockKey);
        let mut enc = KeyStream::derived_from_master(&key(16), KeySize::Bits128);
        let ct = qaes_encrypt(b"some plaintext bytes", &cfg, &mut enc).unwrap();
        let other = CipherKey::new((100..116).collect()).unwrap();
        let mut dec = KeyStream::derived_from_master(&other, KeySize::Bits128);
        assert!(matches!(qaes_decrypt(&ct, &cfg, &mut dec), Err(QaesError::BadPadding)));
    }

    #[test]
    fn tampering_one_block_corrupts_only_that_block() {
        // three full blocks plus a padding block; flip a byte in block 1
        let plaintext = [0x33; 48];
        let cfg = config(KeySize::Bits128, KeyMode::PerBlockKey);
        let master = key(16);
        let mut enc = KeyStream::derived_from_master(&master, KeySize::Bits128);
        let mut ct = qaes_encrypt(&plaintext, &cfg, &mut enc).unwrap();
        ct.body[16] ^= 0x01;
        let mut dec = KeyStream::derived_from_master(&master, KeySize::Bits128);
        let out = qaes_decrypt(&ct, &cfg, &mut dec).unwrap();
        assert_eq!(out.len(), 48);
        assert_eq!(out[..16], plaintext[..16]);
        assert_ne!(out[16..32], plaintext[16..32]);
        assert_eq!(out[32..], plaintext[32..]);
    }

    #[test]
    fn live_two_endpoint_run_shares_plaintext() {
        // both endpoints derive their streams from the same channel seed
        let channel = ChannelConfig::clean(55);
        let cfg = QaesConfig {
            key_size: KeySize::Bits128,
            key_mode: KeyMode::PerBlockKey,
            channel,
        };
        let plaintext = b"a short message across the quantum link";
        let mut sender = KeyStream::live_bb84(channel, cfg.key_size);
        let ct = qaes_encrypt(plaintext, &cfg, &mut sender).unwrap();
        let mut receiver = KeyStream::live_bb84(channel, cfg.key_size);
        assert_eq!(qaes_decrypt(&ct, &cfg, &mut receiver).unwrap(), plaintext.to_vec());
    }

    #[test]
    fn eavesdropped_live_encryption_aborts_before_output() {
        let channel = ChannelConfig { noise_level: 0.0, eve_enabled: true, rng_seed: 4 };
        let cfg = QaesConfig {
            key_size: KeySize::Bits128,
            key_mode: KeyMode::PerBlockKey,
            channel,
        };
        let mut stream = KeyStream::live_bb84(channel, cfg.key_size);
        assert!(matches!(
            qaes_encrypt(b"never encrypted", &cfg, &mut stream),
            Err(QaesError::QberAbort { .. })
        ));
    }
}
