//! The full two-party key agreement session.
//!
//! Pulses are pumped in batches: the sender transmits random bits in random
//! bases, the receiver measures in its own random bases and announces them,
//! the sender replies with the matched positions, and a publicly compared
//! sample of the sifted bits estimates the error rate. The session aborts
//! the moment the running estimate exceeds [`QBER_ABORT_THRESHOLD`];
//! otherwise unrevealed bits accumulate until the target length is reached.

use super::channel::{ClassicalMessage, Direction, SessionChannel, Transcript};
use super::{
    estimate_qber_with_count, measure_pulses, prepare_pulses, sift, Basis, Bb84Error,
    ChannelConfig, PulseRecord, QuantumKey,
};
use crate::rng::{derive_seed, domain, seeded_rng};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use std::time::Instant;

/// Abort when the sampled error rate exceeds this. An intercept-resend
/// eavesdropper induces ≈ 0.25, far above; honest channel noise p sits at
/// p/2, so noise below 0.22 still passes.
pub const QBER_ABORT_THRESHOLD: f64 = 0.11;

/// Fraction of sifted bits revealed for error estimation.
pub const DEFAULT_SACRIFICE_FRACTION: f64 = 0.2;

/// A session never returns a key with fewer than this many cumulative
/// sample bits; top-up batches run until the floor is met. Short sessions
/// otherwise compare so few bits that an eavesdropper slips under the
/// threshold too often: at 32 sample bits an interceptor survives ≈ 2.5%
/// of sessions, at 50 bits ≈ 0.7%. Any observed mismatch escalates the
/// floor to [`SUSPECT_SAMPLE_BITS`], which pushes the interceptor's
/// survival odds below one in a thousand.
pub const MIN_QBER_SAMPLE_BITS: usize = 50;

/// Sample floor once at least one mismatch has been seen. A mismatch is
/// expected under honest noise too, so the session widens the comparison
/// baseline instead of aborting; the wider sample separates noise-level
/// error rates from the interceptor's 0.25.
const SUSPECT_SAMPLE_BITS: usize = 100;

/// Default pulse budget for [`generate_key`], as a multiple of the target
/// bit count. Roughly 2.8 pulses are consumed per key bit, so this only
/// trips when something is wrong.
pub const DEFAULT_PULSE_BUDGET_FACTOR: usize = 512;

/// Smallest top-up batch worth the protocol round-trip.
const MIN_TOPUP_BATCH: usize = 16;

/// Extra sifted bits planned into the opening batch. Sifting is binomial,
/// so a batch sized at the bare expectation falls short half the time;
/// this slack lets roughly three quarters of sessions finish in one batch.
const FIRST_BATCH_SLACK: usize = 6;

/// Extra sifted bits planned into each top-up batch.
const TOPUP_SLACK: usize = 4;

/// Everything a finished session leaves behind. The two keys are identical
/// whenever the channel was clean; under noise they may differ in the bits
/// the sample never looked at.
#[derive(Debug, Clone)]
pub struct SessionOutcome {
    pub sender_key: QuantumKey,
    pub receiver_key: QuantumKey,
    pub pulses_pumped: usize,
    pub batches: usize,
    /// Total publicly compared bits across all batches.
    pub qber_sample_bits: usize,
    pub transcript: Transcript,
    /// Per-pulse log across all batches, in transmission order.
    pub records: Vec<PulseRecord>,
}

/// One party's private per-session randomness.
struct Party {
    rng: ChaCha12Rng,
}

impl Party {
    fn random_bits_and_bases(&mut self, n: usize) -> (Vec<u8>, Vec<Basis>) {
        let mut bits = Vec::with_capacity(n);
        let mut bases = Vec::with_capacity(n);
        for _ in 0..n {
            bits.push(self.rng.gen_bool(0.5) as u8);
            bases.push(Basis::random(&mut self.rng));
        }
        (bits, bases)
    }

    fn random_bases(&mut self, n: usize) -> Vec<Basis> {
        (0..n).map(|_| Basis::random(&mut self.rng)).collect()
    }
}

/// How a session decides it is finished.
enum Goal {
    /// Accumulate at least this many surviving bits (plus the minimum
    /// sample), in as many batches as needed within the pulse budget.
    TargetBits { target: usize, budget: usize },
    /// Pump exactly this many pulses in a single batch and keep whatever
    /// survives.
    FixedBudget(usize),
}

/// Generates a shared secret key of exactly `target_bits` bits using the
/// default pulse budget. Returns the sender-side key; use [`run_session`]
/// when both endpoints' keys are needed.
pub fn generate_key(target_bits: usize, config: &ChannelConfig) -> Result<QuantumKey, Bb84Error> {
    run_session(target_bits, config).map(|outcome| outcome.sender_key)
}

/// Like [`generate_key`], but returns the full two-endpoint outcome.
pub fn run_session(target_bits: usize, config: &ChannelConfig) -> Result<SessionOutcome, Bb84Error> {
    let budget = target_bits.saturating_mul(DEFAULT_PULSE_BUDGET_FACTOR);
    run_session_with_budget(target_bits, budget, config)
}

/// Target-driven session with an explicit pulse budget.
pub fn run_session_with_budget(
    target_bits: usize,
    pulse_budget: usize,
    config: &ChannelConfig,
) -> Result<SessionOutcome, Bb84Error> {
    if target_bits == 0 {
        return Err(Bb84Error::EmptyInput);
    }
    run(Goal::TargetBits { target: target_bits, budget: pulse_budget }, config)
}

/// Pumps exactly `budget` pulses in one batch and returns whatever key
/// material survives sifting and the sample. The QBER abort still applies.
pub fn pump_fixed_budget(budget: usize, config: &ChannelConfig) -> Result<SessionOutcome, Bb84Error> {
    if budget == 0 {
        return Err(Bb84Error::EmptyInput);
    }
    run(Goal::FixedBudget(budget), config)
}

fn run(goal: Goal, config: &ChannelConfig) -> Result<SessionOutcome, Bb84Error> {
    let started = Instant::now();
    let seed = config.rng_seed;
    let mut sender = Party { rng: seeded_rng(derive_seed(seed, domain::SENDER)) };
    let mut receiver = Party { rng: seeded_rng(derive_seed(seed, domain::RECEIVER)) };
    let mut channel =
        SessionChannel::new(*config, seeded_rng(derive_seed(seed, domain::CHANNEL_NOISE)));
    // the sample positions are announced in the clear, so they get their
    // own stream rather than leaking the sender's bit/basis stream state
    let mut sampling_rng = seeded_rng(derive_seed(seed, domain::SAMPLING));

    let mut surviving_sender: Vec<u8> = Vec::new();
    let mut surviving_receiver: Vec<u8> = Vec::new();
    let mut sample_bits_total = 0usize;
    let mut sample_mismatches_total = 0usize;
    let mut pulses_pumped = 0usize;
    let mut batches = 0usize;
    let mut records: Vec<PulseRecord> = Vec::new();

    loop {
        let sample_floor = if sample_mismatches_total == 0 {
            MIN_QBER_SAMPLE_BITS
        } else {
            SUSPECT_SAMPLE_BITS
        };
        let batch_size = match goal {
            Goal::FixedBudget(budget) => {
                if batches == 1 {
                    break;
                }
                budget
            }
            Goal::TargetBits { target, budget } => {
                let missing = target.saturating_sub(surviving_sender.len());
                let sample_deficit = sample_floor.saturating_sub(sample_bits_total);
                if missing == 0 && sample_deficit == 0 {
                    break;
                }
                // expected sifted yield is half the pulses; the batch must
                // cover the missing survivors after the sacrifice, which is
                // the larger of the fraction and the outstanding sample need
                let want_sifted = (missing + sample_deficit)
                    .max((missing as f64 / (1.0 - DEFAULT_SACRIFICE_FRACTION)).ceil() as usize);
                let slack = if batches == 0 { FIRST_BATCH_SLACK } else { TOPUP_SLACK };
                let want_pulses = (2 * (want_sifted + slack)).max(MIN_TOPUP_BATCH);
                let remaining = budget.saturating_sub(pulses_pumped);
                if remaining == 0 {
                    return Err(Bb84Error::ExhaustionLimit { pulses_pumped, budget });
                }
                want_pulses.min(remaining)
            }
        };
        batches += 1;
        pulses_pumped += batch_size;

        // sender prepares and transmits; the channel applies eve and noise
        let (sent_bits, sent_bases) = sender.random_bits_and_bases(batch_size);
        let pulses = prepare_pulses(&sent_bits, &sent_bases)?;
        let mut arrived = channel.transmit_pulses(pulses);

        // receiver measures in its own bases and announces them
        let recv_bases = receiver.random_bases(batch_size);
        let recv_bits = measure_pulses(&arrived, &recv_bases, &mut receiver.rng)?;
        for (record, (&basis, &bit)) in
            arrived.iter_mut().zip(recv_bases.iter().zip(recv_bits.iter()))
        {
            record.receiver_basis = Some(basis);
            record.received_bit = Some(bit);
        }
        let announced = match channel.classical(
            Direction::ReceiverToSender,
            ClassicalMessage::BasisAnnouncement(recv_bases),
        ) {
            ClassicalMessage::BasisAnnouncement(bases) => bases,
            _ => unreachable!(),
        };

        // sender sifts and publishes the kept positions
        let (sifted_sender, sifted_receiver, kept) =
            sift(&sent_bases, &announced, &sent_bits, &recv_bits)?;
        channel.classical(
            Direction::SenderToReceiver,
            ClassicalMessage::MatchedIndices(kept),
        );
        records.extend(arrived);
        if sifted_sender.is_empty() {
            continue;
        }

        // sample size: the sacrifice fraction, widened toward the minimum
        // comparison total, but never into bits the key still needs
        let sample_deficit = sample_floor.saturating_sub(sample_bits_total);
        let missing_now = match goal {
            Goal::TargetBits { target, .. } => target.saturating_sub(surviving_sender.len()),
            Goal::FixedBudget(_) => 0,
        };
        let affordable = sifted_sender.len().saturating_sub(missing_now);
        let by_fraction =
            (DEFAULT_SACRIFICE_FRACTION * sifted_sender.len() as f64).ceil() as usize;
        let count = by_fraction.max(sample_deficit.min(affordable)).min(sifted_sender.len());

        let sample =
            estimate_qber_with_count(&sifted_sender, &sifted_receiver, count, &mut sampling_rng)?;
        channel.classical(
            Direction::SenderToReceiver,
            ClassicalMessage::SampleIndices(sample.revealed_indices.clone()),
        );
        channel.classical(
            Direction::ReceiverToSender,
            ClassicalMessage::SampleBits(sample.revealed_receiver_bits.clone()),
        );

        sample_bits_total += sample.sample_size;
        sample_mismatches_total += sample.mismatches;
        let running_qber = sample_mismatches_total as f64 / sample_bits_total as f64;
        let proceed = running_qber <= QBER_ABORT_THRESHOLD;
        channel.classical(
            Direction::SenderToReceiver,
            ClassicalMessage::QberVerdict { qber: running_qber, proceed },
        );
        if !proceed {
            return Err(Bb84Error::QberAbort {
                qber: running_qber,
                threshold: QBER_ABORT_THRESHOLD,
            });
        }

        surviving_sender.extend(sample.surviving_sender);
        surviving_receiver.extend(sample.surviving_receiver);
    }

    if let Goal::TargetBits { target, .. } = goal {
        surviving_sender.truncate(target);
        surviving_receiver.truncate(target);
    }
    let qber_estimate = if sample_bits_total == 0 {
        0.0
    } else {
        sample_mismatches_total as f64 / sample_bits_total as f64
    };
    let generation_time = started.elapsed();

    let key = |bits: Vec<u8>| QuantumKey {
        bits,
        qber_estimate,
        pulses_pumped,
        generation_time,
    };
    Ok(SessionOutcome {
        sender_key: key(surviving_sender),
        receiver_key: key(surviving_receiver),
        pulses_pumped,
        batches,
        qber_sample_bits: sample_bits_total,
        transcript: channel.into_transcript(),
        records,
    })
}
