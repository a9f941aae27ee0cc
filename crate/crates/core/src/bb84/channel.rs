//! The two channels between the parties, and the protocol transcript.
//!
//! Pulses cross the quantum channel, where the eavesdropper and the noise
//! live; every other exchange crosses the classical channel. Both parties
//! interact only through [`SessionChannel`], so the protocol logic in
//! [`super::session`] never reaches into the other party's state, and the
//! same orchestration would work over a real transport. Every message is
//! logged to a transcript, one record per message.

use super::{apply_channel, Basis, ChannelConfig, PulseRecord};
use rand_chacha::ChaCha12Rng;

/// Who sent a message.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    SenderToReceiver,
    ReceiverToSender,
}

impl Direction {
    fn arrow(self) -> &'static str {
        match self {
            Direction::SenderToReceiver => "sender -> receiver",
            Direction::ReceiverToSender => "receiver -> sender",
        }
    }
}

/// Post-measurement protocol traffic.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassicalMessage {
    /// Receiver announces the bases it measured in.
    BasisAnnouncement(Vec<Basis>),
    /// Sender announces which positions had matching bases.
    MatchedIndices(Vec<usize>),
    /// Sender picks sifted positions to compare publicly.
    SampleIndices(Vec<usize>),
    /// Receiver reveals its bits at the sampled positions.
    SampleBits(Vec<u8>),
    /// Sender's error-rate decision for this batch.
    QberVerdict { qber: f64, proceed: bool },
}

impl ClassicalMessage {
    fn kind(&self) -> &'static str {
        match self {
            ClassicalMessage::BasisAnnouncement(_) => "basis-announcement",
            ClassicalMessage::MatchedIndices(_) => "matched-indices",
            ClassicalMessage::SampleIndices(_) => "sample-indices",
            ClassicalMessage::SampleBits(_) => "sample-bits",
            ClassicalMessage::QberVerdict { .. } => "qber-verdict",
        }
    }

    fn summary(&self) -> String {
        match self {
            ClassicalMessage::BasisAnnouncement(b) => format!("{} bases", b.len()),
            ClassicalMessage::MatchedIndices(i) => format!("{} positions", i.len()),
            ClassicalMessage::SampleIndices(i) => format!("{} positions", i.len()),
            ClassicalMessage::SampleBits(b) => format!("{} bits", b.len()),
            ClassicalMessage::QberVerdict { qber, proceed } => {
                format!("qber={qber:.4} proceed={proceed}")
            }
        }
    }
}

/// One protocol message as seen on the wire.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranscriptEntry {
    pub direction: Direction,
    pub kind: String,
    pub summary: String,
}

/// Chronological log of everything both channels carried.
#[derive(Debug, Clone, Default)]
pub struct Transcript {
    entries: Vec<TranscriptEntry>,
}

impl Transcript {
    fn record(&mut self, direction: Direction, kind: &str, summary: String) {
        self.entries.push(TranscriptEntry { direction, kind: kind.to_string(), summary });
    }

    pub fn entries(&self) -> &[TranscriptEntry] {
        &self.entries
    }

    /// Line-delimited rendering, one message per line.
    pub fn lines(&self) -> Vec<String> {
        self.entries
            .iter()
            .map(|e| format!("{}\t{}\t{}", e.direction.arrow(), e.kind, e.summary))
            .collect()
    }
}

/// Both channels of one session. The quantum side owns the medium RNG, so
/// channel effects are reproducible independently of the parties' choices.
pub struct SessionChannel {
    config: ChannelConfig,
    medium_rng: ChaCha12Rng,
    transcript: Transcript,
}

impl SessionChannel {
    pub fn new(config: ChannelConfig, medium_rng: ChaCha12Rng) -> Self {
        SessionChannel { config, medium_rng, transcript: Transcript::default() }
    }

    /// Sends pulses through the quantum channel (always sender → receiver),
    /// applying eavesdropping and noise in transit.
    pub fn transmit_pulses(&mut self, pulses: Vec<PulseRecord>) -> Vec<PulseRecord> {
        let count = pulses.len();
        let out = apply_channel(pulses, &self.config, &mut self.medium_rng);
        let touched = out.iter().filter(|p| p.disturbed_by_noise || p.intercepted).count();
        self.transcript.record(
            Direction::SenderToReceiver,
            "quantum-pulses",
            format!("{count} pulses, {touched} disturbed in transit"),
        );
        out
    }

    /// Delivers one classical message, logging it. Delivery is immediate
    /// and in order; the return value is what the peer receives.
    pub fn classical(&mut self, direction: Direction, msg: ClassicalMessage) -> ClassicalMessage {
        self.transcript.record(direction, msg.kind(), msg.summary());
        msg
    }

    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn into_transcript(self) -> Transcript {
        self.transcript
    }
}
