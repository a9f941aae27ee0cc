//! QAES: the AES block cipher driven by quantum-distributed key material.
//!
//! A simulated BB84 session ([`bb84`]) establishes shared secret bits between
//! two parties; [`qaes`] feeds AES ([`aes`]) a fresh key per ciphertext block
//! (or a fresh round-key schedule per block), so equal plaintext blocks no
//! longer produce equal ciphertext blocks. [`nist`] scores ciphertext with
//! twelve statistical randomness tests and [`bench`] times the
//! key-generation/encryption phases separately.
//!
//! Everything here is a research simulation. The cipher is table-driven and
//! not constant-time, the "quantum" channel is a seeded PRNG, and no attempt
//! is made to resist side channels. Do not protect real data with this crate.

pub mod aes;
pub mod bb84;
pub mod bench;
pub mod nist;
pub mod qaes;
pub mod rng;
