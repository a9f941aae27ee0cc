//! Sources of per-block and per-round key material.
//!
//! A [`KeyStream`] hands out the key sequence qk1, qk2, ... in issue order,
//! either as whole cipher keys or as raw 16-byte round-key chunks. The
//! stream is stateful; callers on two endpoints replay the same sequence by
//! constructing streams from the same shared state (master key or channel
//! seed).

use super::QaesError;
use crate::aes::{encrypt_block, key_expansion, CipherKey, KeySize, RoundKeySchedule};
use crate::bb84::{generate_key, Bb84Error, ChannelConfig};
use crate::rng::{derive_seed, domain};

/// Which kind of source backs a stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProviderKind {
    /// A fresh key agreement session per key (or per round chunk). Slow;
    /// every draw pays for a full protocol run.
    LiveBB84,
    /// Deterministic expansion of one shared master key: the byte stream is
    /// the master cipher applied to an incrementing counter, so both
    /// endpoints reproduce the exact sequence from the master alone.
    DerivedFromMaster,
    /// One constant key, repeated. Testing only: it reduces the per-block
    /// mode to plain ECB and must never protect real data.
    Fixed,
}

enum Source {
    Fixed {
        key: Vec<u8>,
        /// Byte offset into the cycled key for round-chunk draws.
        phase: usize,
    },
    Derived {
        /// Expanded master key, reused for every counter block.
        schedule: RoundKeySchedule,
        counter: u64,
        buf: [u8; 16],
        /// Bytes of `buf` already handed out; 16 means empty.
        buf_used: usize,
    },
    Live {
        channel: ChannelConfig,
        sessions_opened: u64,
    },
}

/// A stateful source of key material for the quantum-keyed cipher modes.
///
/// Every key drawn has exactly `key_size` bytes; every round chunk has 16.
/// `bytes_drawn` counts both, so stream-offset accounting is exact.
pub struct KeyStream {
    source: Source,
    key_size: KeySize,
    keys_issued: u64,
    chunks_issued: u64,
    bytes_drawn: u64,
}

impl KeyStream {
    /// Stream that repeats `key` forever.
    pub fn fixed(key: CipherKey) -> KeyStream {
        let key_size = key.size();
        KeyStream {
            source: Source::Fixed { key: key.bytes().to_vec(), phase: 0 },
            key_size,
            keys_issued: 0,
            chunks_issued: 0,
            bytes_drawn: 0,
        }
    }

    /// Stream of `key_size` keys carved from the master-keyed counter
    /// stream. Both endpoints holding `master` produce identical sequences.
    pub fn derived_from_master(master: &CipherKey, key_size: KeySize) -> KeyStream {
        KeyStream {
            source: Source::Derived {
                schedule: key_expansion(master),
                counter: 0,
                buf: [0; 16],
                buf_used: 16,
            },
            key_size,
            keys_issued: 0,
            chunks_issued: 0,
            bytes_drawn: 0,
        }
    }

    /// Stream where every draw runs a fresh key agreement session over
    /// `channel`. Session seeds derive from the channel seed and a session
    /// counter, so draws stay reproducible yet mutually independent.
    pub fn live_bb84(channel: ChannelConfig, key_size: KeySize) -> KeyStream {
        KeyStream {
            source: Source::Live { channel, sessions_opened: 0 },
            key_size,
            keys_issued: 0,
            chunks_issued: 0,
            bytes_drawn: 0,
        }
    }

    pub fn provider_kind(&self) -> ProviderKind {
        match self.source {
            Source::Fixed { .. } => ProviderKind::Fixed,
            Source::Derived { .. } => ProviderKind::DerivedFromMaster,
            Source::Live { .. } => ProviderKind::LiveBB84,
        }
    }

    pub fn key_size(&self) -> KeySize {
        self.key_size
    }

    /// Whole keys issued so far; the next key is qk(keys_issued+1).
    pub fn keys_issued(&self) -> u64 {
        self.keys_issued
    }

    /// Round chunks issued so far.
    pub fn chunks_issued(&self) -> u64 {
        self.chunks_issued
    }

    /// Total key-material bytes drawn, keys and chunks combined.
    pub fn bytes_drawn(&self) -> u64 {
        self.bytes_drawn
    }

    /// The next whole key, `key_size` bytes.
    pub fn next_key(&mut self) -> Result<Vec<u8>, QaesError> {
        let n = self.key_size.byte_len();
        let bytes = self.draw(n, self.key_size)?;
        self.keys_issued += 1;
        self.bytes_drawn += n as u64;
        Ok(bytes)
    }

    /// The next 16-byte round-key chunk.
    pub fn next_round_chunk(&mut self) -> Result<[u8; 16], QaesError> {
        let bytes = self.draw(16, KeySize::Bits128)?;
        self.chunks_issued += 1;
        self.bytes_drawn += 16;
        let mut chunk = [0u8; 16];
        chunk.copy_from_slice(&bytes);
        Ok(chunk)
    }

    /// Draws `n` bytes. `session_size` is the key length a live session
    /// agrees on for this draw; deterministic sources ignore it.
    fn draw(&mut self, n: usize, session_size: KeySize) -> Result<Vec<u8>, QaesError> {
        match &mut self.source {
            Source::Fixed { key, phase } => {
                let out = (0..n).map(|i| key[(*phase + i) % key.len()]).collect();
                *phase = (*phase + n) % key.len();
                Ok(out)
            }
            Source::Derived { schedule, counter, buf, buf_used } => {
                let mut out = Vec::with_capacity(n);
                while out.len() < n {
                    if *buf_used == 16 {
                        let mut block = [0u8; 16];
                        block[8..].copy_from_slice(&counter.to_be_bytes());
                        *buf = encrypt_block(&block, schedule);
                        *buf_used = 0;
                        *counter = counter
                            .checked_add(1)
                            .ok_or(QaesError::KeyStreamExhausted)?;
                    }
                    let take = (n - out.len()).min(16 - *buf_used);
                    out.extend_from_slice(&buf[*buf_used..*buf_used + take]);
                    *buf_used += take;
                }
                Ok(out)
            }
            Source::Live { channel, sessions_opened } => {
                let mut out = Vec::with_capacity(n);
                while out.len() < n {
                    let seed =
                        derive_seed(channel.rng_seed, domain::SESSION_BASE + *sessions_opened);
                    let session = ChannelConfig {
                        noise_level: channel.noise_level,
                        eve_enabled: channel.eve_enabled,
                        rng_seed: seed,
                    };
                    *sessions_opened += 1;
                    let bits = (n - out.len()).min(session_size.byte_len()) * 8;
                    let key = generate_key(bits, &session).map_err(|e| match e {
                        Bb84Error::QberAbort { qber, threshold } => {
                            QaesError::QberAbort { qber, threshold }
                        }
                        _ => QaesError::KeyStreamExhausted,
                    })?;
                    out.extend_from_slice(&key.to_bytes());
                }
                out.truncate(n);
                Ok(out)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    fn key128() -> CipherKey {
        CipherKey::new((0u8..16).collect()).unwrap()
    }

    #[test]
    fn fixed_stream_repeats_the_key() {
        let mut stream = KeyStream::fixed(key128());
        let a = stream.next_key().unwrap();
        let b = stream.next_key().unwrap();
        assert_eq!(a, key128().bytes());
        assert_eq!(a, b);
        assert_eq!(stream.keys_issued(), 2);
        assert_eq!(stream.bytes_drawn(), 32);
        assert_eq!(stream.provider_kind(), ProviderKind::Fixed);
    }

    #[test]
    fn fixed_round_chunks_cycle_the_key_bytes() {
        let key = CipherKey::new((0u8..24).collect()).unwrap();
        let mut stream = KeyStream::fixed(key);
        let a = stream.next_round_chunk().unwrap();
        let b = stream.next_round_chunk().unwrap();
        assert_eq!(a.to_vec(), (0u8..16).collect::<Vec<u8>>());
        let mut expect = (16u8..24).collect::<Vec<u8>>();
        expect.extend(0u8..8);
        assert_eq!(b.to_vec(), expect);
    }

    #[test]
    fn derived_streams_replay_identically() {
        let master = key128();
        let mut a = KeyStream::derived_from_master(&master, KeySize::Bits256);
        let mut b = KeyStream::derived_from_master(&master, KeySize::Bits256);
        for _ in 0..50 {
            assert_eq!(a.next_key().unwrap(), b.next_key().unwrap());
        }
        assert_eq!(a.bytes_drawn(), 50 * 32);
    }

    #[test]
    fn derived_keys_are_pairwise_distinct() {
        let mut stream = KeyStream::derived_from_master(&key128(), KeySize::Bits128);
        let mut seen = HashSet::new();
        for _ in 0..10_000 {
            assert!(seen.insert(stream.next_key().unwrap()), "repeated key in stream");
        }
    }

    #[test]
    fn derived_chunks_and_keys_share_one_byte_stream() {
        // drawing 16+16 bytes as chunks equals drawing one 256-bit key
        let master = key128();
        let mut chunks = KeyStream::derived_from_master(&master, KeySize::Bits256);
        let mut keys = KeyStream::derived_from_master(&master, KeySize::Bits256);
        let c1 = chunks.next_round_chunk().unwrap();
        let c2 = chunks.next_round_chunk().unwrap();
        let k = keys.next_key().unwrap();
        assert_eq!([c1.as_slice(), c2.as_slice()].concat(), k);
    }

    #[test]
    fn different_masters_give_different_streams() {
        let other = CipherKey::new((1u8..17).collect()).unwrap();
        let mut a = KeyStream::derived_from_master(&key128(), KeySize::Bits128);
        let mut b = KeyStream::derived_from_master(&other, KeySize::Bits128);
        assert_ne!(a.next_key().unwrap(), b.next_key().unwrap());
    }

    #[test]
    fn live_stream_is_seed_reproducible_and_nonrepeating() {
        let channel = ChannelConfig::clean(77);
        let mut a = KeyStream::live_bb84(channel, KeySize::Bits128);
        let mut b = KeyStream::live_bb84(channel, KeySize::Bits128);
        let ka: Vec<_> = (0..3).map(|_| a.next_key().unwrap()).collect();
        let kb: Vec<_> = (0..3).map(|_| b.next_key().unwrap()).collect();
        assert_eq!(ka, kb);
        assert_ne!(ka[0], ka[1]);
        assert_ne!(ka[1], ka[2]);
    }

    #[test]
    fn live_stream_propagates_the_abort() {
        let channel = ChannelConfig { noise_level: 0.0, eve_enabled: true, rng_seed: 3 };
        let mut stream = KeyStream::live_bb84(channel, KeySize::Bits128);
        assert!(matches!(stream.next_key(), Err(QaesError::QberAbort { .. })));
    }
}
