//! Two-party BB84 key distribution, simulated.
//!
//! One party encodes random bits as polarized pulses in randomly chosen
//! bases, the other measures in its own random bases; announcing bases over
//! the classical channel and keeping only the matched positions (sifting)
//! yields a shared secret, and publicly comparing a sacrificed sample of it
//! estimates the error rate. Elevated QBER means eavesdropping or noise,
//! and the session aborts above the threshold.
//!
//! The "quantum" part is a seeded PRNG playing out the measurement rules;
//! see [`channel`] for the transmission model and [`session`] for the
//! full two-party protocol.

pub mod channel;
pub mod session;

pub use channel::{ClassicalMessage, Direction, Transcript, TranscriptEntry};
pub use session::{
    generate_key, pump_fixed_budget, run_session, SessionOutcome, DEFAULT_PULSE_BUDGET_FACTOR,
    DEFAULT_SACRIFICE_FRACTION, MIN_QBER_SAMPLE_BITS, QBER_ABORT_THRESHOLD,
};

use rand::Rng;
use std::error::Error;
use std::fmt;
use std::time::Duration;

/// Measurement frame: only matched-basis measurements are deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Basis {
    Rectilinear,
    Diagonal,
}

impl Basis {
    pub fn random<R: Rng>(rng: &mut R) -> Basis {
        if rng.gen_bool(0.5) {
            Basis::Rectilinear
        } else {
            Basis::Diagonal
        }
    }
}

/// The four pulse polarizations: horizontal, vertical, left-diagonal,
/// right-diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    H,
    V,
    LD,
    RD,
}

impl Polarization {
    /// Encoding convention: Rectilinear 0→H, 1→V; Diagonal 0→LD, 1→RD.
    pub fn encode(bit: u8, basis: Basis) -> Polarization {
        assert!(bit <= 1, "bit must be 0 or 1");
        match (basis, bit) {
            (Basis::Rectilinear, 0) => Polarization::H,
            (Basis::Rectilinear, _) => Polarization::V,
            (Basis::Diagonal, 0) => Polarization::LD,
            (Basis::Diagonal, _) => Polarization::RD,
        }
    }

    /// The basis this polarization belongs to.
    pub fn basis(self) -> Basis {
        match self {
            Polarization::H | Polarization::V => Basis::Rectilinear,
            Polarization::LD | Polarization::RD => Basis::Diagonal,
        }
    }

    /// The bit this polarization encodes within its own basis.
    pub fn bit(self) -> u8 {
        match self {
            Polarization::H | Polarization::LD => 0,
            Polarization::V | Polarization::RD => 1,
        }
    }

    pub fn uniform<R: Rng>(rng: &mut R) -> Polarization {
        match rng.gen_range(0..4) {
            0 => Polarization::H,
            1 => Polarization::V,
            2 => Polarization::LD,
            _ => Polarization::RD,
        }
    }
}

/// Transmission-medium parameters plus the seed every random decision of a
/// session derives from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelConfig {
    /// Per-pulse probability that the polarization is redrawn uniformly
    /// from all four states in transit.
    pub noise_level: f64,
    /// Intercept-resend eavesdropper measuring every pulse in a uniformly
    /// random basis.
    pub eve_enabled: bool,
    pub rng_seed: u64,
}

impl ChannelConfig {
    pub fn new(noise_level: f64, eve_enabled: bool, rng_seed: u64) -> Result<Self, Bb84Error> {
        if !(0.0..=1.0).contains(&noise_level) {
            return Err(Bb84Error::InvalidNoiseLevel(noise_level));
        }
        Ok(ChannelConfig { noise_level, eve_enabled, rng_seed })
    }

    /// Noiseless, eavesdropper-free channel.
    pub fn clean(rng_seed: u64) -> Self {
        ChannelConfig { noise_level: 0.0, eve_enabled: false, rng_seed }
    }
}

/// Everything that happened to one simulated pulse. Receiver-side fields
/// stay `None` until the pulse has actually been measured.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PulseRecord {
    pub sender_bit: u8,
    pub sender_basis: Basis,
    pub polarization_sent: Polarization,
    /// Post-channel state; equals `polarization_sent` until transmission.
    pub polarization_arrived: Polarization,
    pub disturbed_by_noise: bool,
    pub intercepted: bool,
    pub receiver_basis: Option<Basis>,
    pub received_bit: Option<u8>,
}

/// A sifted, sample-checked secret key with its session statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumKey {
    /// Key bits, one per element, values 0/1.
    pub bits: Vec<u8>,
    /// Mismatch fraction observed on the sacrificed sample.
    pub qber_estimate: f64,
    /// Total pulses the sender transmitted for this key.
    pub pulses_pumped: usize,
    /// Wall-clock time the session took (a measurement, not seed-determined).
    pub generation_time: Duration,
}

impl QuantumKey {
    /// Packs the bits into bytes, first bit highest in the first byte.
    /// A trailing partial byte is zero-filled on the right.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; self.bits.len().div_ceil(8)];
        for (i, &b) in self.bits.iter().enumerate() {
            out[i / 8] |= (b & 1) << (7 - i % 8);
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Bb84Error {
    /// Parallel input sequences of unequal length.
    LengthMismatch { left: usize, right: usize },
    EmptyInput,
    InvalidNoiseLevel(f64),
    InvalidSacrificeFraction(f64),
    /// Sample error rate above the abort threshold: the channel is noisy
    /// beyond tolerance or someone is listening.
    QberAbort { qber: f64, threshold: f64 },
    /// Pulse budget ran out before the target key length was reached.
    ExhaustionLimit { pulses_pumped: usize, budget: usize },
}

impl fmt::Display for Bb84Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bb84Error::LengthMismatch { left, right } => {
                write!(f, "sequence lengths differ: {left} vs {right}")
            }
            Bb84Error::EmptyInput => write!(f, "empty input"),
            Bb84Error::InvalidNoiseLevel(p) => {
                write!(f, "noise level {p} outside [0, 1]")
            }
            Bb84Error::InvalidSacrificeFraction(x) => {
                write!(f, "sacrifice fraction {x} outside (0, 1)")
            }
            Bb84Error::QberAbort { qber, threshold } => {
                write!(f, "QBER {qber:.4} exceeds abort threshold {threshold}")
            }
            Bb84Error::ExhaustionLimit { pulses_pumped, budget } => {
                write!(f, "pulse budget {budget} exhausted after {pulses_pumped} pulses")
            }
        }
    }
}

impl Error for Bb84Error {}

/// Encodes (bit, basis) pairs into fresh outgoing pulse records.
pub fn prepare_pulses(bits: &[u8], bases: &[Basis]) -> Result<Vec<PulseRecord>, Bb84Error> {
    if bits.len() != bases.len() {
        return Err(Bb84Error::LengthMismatch { left: bits.len(), right: bases.len() });
    }
    Ok(bits
        .iter()
        .zip(bases.iter())
        .map(|(&bit, &basis)| {
            let pol = Polarization::encode(bit, basis);
            PulseRecord {
                sender_bit: bit,
                sender_basis: basis,
                polarization_sent: pol,
                polarization_arrived: pol,
                disturbed_by_noise: false,
                intercepted: false,
                receiver_basis: None,
                received_bit: None,
            }
        })
        .collect())
}

/// Runs every pulse through the transmission medium: the eavesdropper first
/// (measure in a uniform basis, resend the collapsed state), then
/// depolarizing noise (probability `noise_level` of a uniform redraw).
/// Flags record what happened; `polarization_arrived` is what the receiver
/// will see.
pub fn apply_channel<R: Rng>(
    mut pulses: Vec<PulseRecord>,
    config: &ChannelConfig,
    rng: &mut R,
) -> Vec<PulseRecord> {
    for p in &mut pulses {
        if config.eve_enabled {
            let eve_basis = Basis::random(rng);
            let eve_bit = if eve_basis == p.polarization_arrived.basis() {
                p.polarization_arrived.bit()
            } else {
                rng.gen_bool(0.5) as u8
            };
            p.polarization_arrived = Polarization::encode(eve_bit, eve_basis);
            p.intercepted = true;
        }
        if rng.gen_bool(config.noise_level) {
            p.polarization_arrived = Polarization::uniform(rng);
            p.disturbed_by_noise = true;
        }
    }
    pulses
}

/// Measures arrived pulses in the given bases: a matched basis decodes the
/// polarization deterministically, a mismatched one yields a uniform bit.
pub fn measure_pulses<R: Rng>(
    pulses: &[PulseRecord],
    bases: &[Basis],
    rng: &mut R,
) -> Result<Vec<u8>, Bb84Error> {
    if pulses.len() != bases.len() {
        return Err(Bb84Error::LengthMismatch { left: pulses.len(), right: bases.len() });
    }
    Ok(pulses
        .iter()
        .zip(bases.iter())
        .map(|(p, &basis)| {
            if basis == p.polarization_arrived.basis() {
                p.polarization_arrived.bit()
            } else {
                rng.gen_bool(0.5) as u8
            }
        })
        .collect())
}

/// Keeps exactly the positions where both parties chose the same basis,
/// preserving order and index alignment of the two bit sequences.
pub fn sift(
    sender_bases: &[Basis],
    receiver_bases: &[Basis],
    sender_bits: &[u8],
    receiver_bits: &[u8],
) -> Result<(Vec<u8>, Vec<u8>, Vec<usize>), Bb84Error> {
    let n = sender_bases.len();
    for len in [receiver_bases.len(), sender_bits.len(), receiver_bits.len()] {
        if len != n {
            return Err(Bb84Error::LengthMismatch { left: n, right: len });
        }
    }
    let mut kept_sender = Vec::new();
    let mut kept_receiver = Vec::new();
    let mut kept_indices = Vec::new();
    for i in 0..n {
        if sender_bases[i] == receiver_bases[i] {
            kept_sender.push(sender_bits[i]);
            kept_receiver.push(receiver_bits[i]);
            kept_indices.push(i);
        }
    }
    Ok((kept_sender, kept_receiver, kept_indices))
}

/// Outcome of one sample comparison: the estimate plus both parties'
/// surviving (unrevealed) bits.
#[derive(Debug, Clone)]
pub(crate) struct QberSample {
    pub sample_size: usize,
    pub mismatches: usize,
    /// Revealed positions in ascending order, with the receiver-side bits
    /// aligned to them. Both go over the classical channel.
    pub revealed_indices: Vec<usize>,
    pub revealed_receiver_bits: Vec<u8>,
    pub surviving_sender: Vec<u8>,
    pub surviving_receiver: Vec<u8>,
}

impl QberSample {
    pub fn qber(&self) -> f64 {
        self.mismatches as f64 / self.sample_size as f64
    }
}

/// Sample-count twin of [`estimate_qber`]: reveals exactly `count` positions.
/// Positions are drawn without replacement from `rng`; revealed bits are
/// discarded from both sides.
pub(crate) fn estimate_qber_with_count<R: Rng>(
    sender_bits: &[u8],
    receiver_bits: &[u8],
    count: usize,
    rng: &mut R,
) -> Result<QberSample, Bb84Error> {
    let n = sender_bits.len();
    if n != receiver_bits.len() {
        return Err(Bb84Error::LengthMismatch { left: n, right: receiver_bits.len() });
    }
    if n == 0 || count == 0 {
        return Err(Bb84Error::EmptyInput);
    }
    let count = count.min(n);

    // partial Fisher-Yates: after `count` swaps the prefix is the sample
    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..count {
        let j = rng.gen_range(i..n);
        indices.swap(i, j);
    }
    let mut revealed = vec![false; n];
    let mut mismatches = 0;
    for &idx in &indices[..count] {
        revealed[idx] = true;
        if sender_bits[idx] != receiver_bits[idx] {
            mismatches += 1;
        }
    }
    let mut revealed_indices = Vec::with_capacity(count);
    let mut revealed_receiver_bits = Vec::with_capacity(count);
    let mut surviving_sender = Vec::with_capacity(n - count);
    let mut surviving_receiver = Vec::with_capacity(n - count);
    for i in 0..n {
        if revealed[i] {
            revealed_indices.push(i);
            revealed_receiver_bits.push(receiver_bits[i]);
        } else {
            surviving_sender.push(sender_bits[i]);
            surviving_receiver.push(receiver_bits[i]);
        }
    }
    Ok(QberSample {
        sample_size: count,
        mismatches,
        revealed_indices,
        revealed_receiver_bits,
        surviving_sender,
        surviving_receiver,
    })
}

/// Publicly compares a uniformly chosen `sacrifice_fraction` of the aligned
/// bit sequences and discards it, returning the mismatch fraction on the
/// sample and both sides' surviving bits.
pub fn estimate_qber<R: Rng>(
    sender_bits: &[u8],
    receiver_bits: &[u8],
    sacrifice_fraction: f64,
    rng: &mut R,
) -> Result<(f64, Vec<u8>, Vec<u8>), Bb84Error> {
    if !(sacrifice_fraction > 0.0 && sacrifice_fraction < 1.0) {
        return Err(Bb84Error::InvalidSacrificeFraction(sacrifice_fraction));
    }
    if sender_bits.is_empty() {
        return Err(Bb84Error::EmptyInput);
    }
    let count = (sacrifice_fraction * sender_bits.len() as f64).ceil() as usize;
    let sample = estimate_qber_with_count(sender_bits, receiver_bits, count, rng)?;
    Ok((sample.qber(), sample.surviving_sender, sample.surviving_receiver))
}
