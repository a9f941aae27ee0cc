//! Timing benchmark for the cipher modes.
//!
//! Times plain AES-ECB against the quantum-keyed mode over a list of
//! input sizes, keeping key generation and encryption on separate
//! stopwatches. Every record satisfies t_total = t_keygen + t_encrypt
//! exactly, because t_total is constructed as that sum rather than
//! measured by a third clock. Timing magnitudes are hardware-specific;
//! only phase structure and orderings are meaningful across machines.

use std::error::Error;
use std::fmt;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use rand::RngCore;

use crate::aes::{ecb_decrypt, ecb_encrypt, CipherKey, KeySize};
use crate::bb84::session::{generate_key, pump_fixed_budget};
use crate::bb84::{Bb84Error, ChannelConfig};
use crate::qaes::{qaes_decrypt, qaes_encrypt, KeyMode, KeyStream, QaesConfig, QaesError};
use crate::rng::{derive_seed, domain, seeded_rng};

/// Repetitions whose timings are recorded.
pub const DEFAULT_REPETITIONS: usize = 10;
/// Untimed repetitions run first to warm caches and the allocator.
pub const DEFAULT_WARMUPS: usize = 3;
/// The conventional input-size sweep, in KiB.
pub const DEFAULT_SIZES_KB: [usize; 5] = [500, 1000, 1500, 2000, 3500];

/// Which cipher a record timed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchAlgorithm {
    /// Plain AES-ECB under a single fixed key; no key-generation phase.
    Aes,
    /// Quantum-keyed mode: one live key-agreement session plus the
    /// derived per-block key stream.
    Qaes,
}

impl BenchAlgorithm {
    pub fn name(self) -> &'static str {
        match self {
            BenchAlgorithm::Aes => "AES",
            BenchAlgorithm::Qaes => "QAES",
        }
    }
}

impl fmt::Display for BenchAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One timed repetition of one (algorithm, size) cell.
#[derive(Clone, Debug)]
pub struct BenchRecord {
    pub algorithm: BenchAlgorithm,
    pub key_size: KeySize,
    pub input_kb: usize,
    /// Repetition index, starting at 1.
    pub rep: usize,
    /// Key-agreement plus key-stream setup; zero for plain AES.
    pub t_keygen: Duration,
    pub t_encrypt: Duration,
    /// Always exactly t_keygen + t_encrypt.
    pub t_total: Duration,
}

impl BenchRecord {
    fn new(
        algorithm: BenchAlgorithm,
        key_size: KeySize,
        input_kb: usize,
        rep: usize,
        t_keygen: Duration,
        t_encrypt: Duration,
    ) -> Self {
        BenchRecord {
            algorithm,
            key_size,
            input_kb,
            rep,
            t_keygen,
            t_encrypt,
            t_total: t_keygen + t_encrypt,
        }
    }
}

/// Benchmark settings; `seeded` gives the conventional defaults.
#[derive(Clone, Copy, Debug)]
pub struct BenchConfig {
    pub key_size: KeySize,
    pub key_mode: KeyMode,
    /// Quantum channel for the key-agreement phase; its seed also roots
    /// the pseudorandom benchmark inputs.
    pub channel: ChannelConfig,
    pub repetitions: usize,
    pub warmups: usize,
}

impl BenchConfig {
    /// 128-bit keys, per-block mode, clean channel, default repetitions.
    pub fn seeded(seed: u64) -> Self {
        BenchConfig {
            key_size: KeySize::Bits128,
            key_mode: KeyMode::PerBlockKey,
            channel: ChannelConfig::clean(seed),
            repetitions: DEFAULT_REPETITIONS,
            warmups: DEFAULT_WARMUPS,
        }
    }
}

/// Benchmark failures: the key-agreement phase aborting, or the cipher
/// refusing its stream. Neither occurs on a clean channel.
#[derive(Debug, Clone, PartialEq)]
pub enum BenchError {
    Key(Bb84Error),
    Cipher(QaesError),
}

impl fmt::Display for BenchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchError::Key(e) => write!(f, "key generation failed: {e}"),
            BenchError::Cipher(e) => write!(f, "cipher failed: {e}"),
        }
    }
}

impl Error for BenchError {
    fn source(&self) -> Option<&(dyn Error + 'static)> {
        match self {
            BenchError::Key(e) => Some(e),
            BenchError::Cipher(e) => Some(e),
        }
    }
}

/// The deterministic pseudorandom input file for one size cell.
pub fn benchmark_input(seed: u64, size_kb: usize) -> Vec<u8> {
    let input_seed = derive_seed(derive_seed(seed, domain::BENCH_INPUT), size_kb as u64);
    let mut data = vec![0u8; size_kb * 1024];
    seeded_rng(input_seed).fill_bytes(&mut data);
    data
}

/// Times both algorithms over every size, `repetitions` records each.
///
/// Every benchmark file is round-tripped (encrypt then decrypt, outside
/// the timed sections) and must come back byte-identical; the ciphertext
/// block count is checked against ceil((len+1)/16).
pub fn run_benchmark(sizes_kb: &[usize], config: &BenchConfig) -> Result<Vec<BenchRecord>, BenchError> {
    assert!(sizes_kb.iter().all(|&s| s > 0), "sizes must be positive");
    let mut records =
        Vec::with_capacity(sizes_kb.len() * 2 * config.repetitions);
    for &size_kb in sizes_kb {
        let input = benchmark_input(config.channel.rng_seed, size_kb);
        bench_aes(&input, size_kb, config, &mut records)?;
        bench_qaes(&input, size_kb, config, &mut records)?;
    }
    Ok(records)
}

fn expected_blocks(input_len: usize) -> usize {
    (input_len + 1).div_ceil(16)
}

fn bench_aes(
    input: &[u8],
    size_kb: usize,
    config: &BenchConfig,
    records: &mut Vec<BenchRecord>,
) -> Result<(), BenchError> {
    // fixed baseline key drawn from the same seed tree as the inputs
    let key_seed = derive_seed(config.channel.rng_seed, domain::BENCH_INPUT) ^ 1;
    let mut key_bytes = vec![0u8; config.key_size.byte_len()];
    seeded_rng(key_seed).fill_bytes(&mut key_bytes);
    let key = CipherKey::new(key_bytes).expect("key length came from KeySize");

    let ciphertext = ecb_encrypt(input, &key);
    assert_eq!(ciphertext.len() / 16, expected_blocks(input.len()));
    let back = ecb_decrypt(&ciphertext, &key).expect("fresh ciphertext");
    assert_eq!(back, input, "baseline round-trip must be lossless");

    for _ in 0..config.warmups {
        std::hint::black_box(ecb_encrypt(input, &key));
    }
    for rep in 1..=config.repetitions {
        let started = Instant::now();
        let ct = ecb_encrypt(input, &key);
        let t_encrypt = started.elapsed();
        std::hint::black_box(ct);
        records.push(BenchRecord::new(
            BenchAlgorithm::Aes,
            config.key_size,
            size_kb,
            rep,
            Duration::ZERO,
            t_encrypt,
        ));
    }
    Ok(())
}

fn bench_qaes(
    input: &[u8],
    size_kb: usize,
    config: &BenchConfig,
    records: &mut Vec<BenchRecord>,
) -> Result<(), BenchError> {
    let qaes_config = QaesConfig {
        key_size: config.key_size,
        key_mode: config.key_mode,
        channel: config.channel,
    };
    // one untimed pass checks losslessness and block count
    let (mut stream, _) = agree_stream(config)?;
    let ciphertext =
        qaes_encrypt(input, &qaes_config, &mut stream).map_err(BenchError::Cipher)?;
    assert_eq!(ciphertext.block_count as usize, expected_blocks(input.len()));
    let (mut stream, _) = agree_stream(config)?;
    let back = qaes_decrypt(&ciphertext, &qaes_config, &mut stream).map_err(BenchError::Cipher)?;
    assert_eq!(back, input, "quantum-keyed round-trip must be lossless");

    for _ in 0..config.warmups {
        let (mut stream, _) = agree_stream(config)?;
        let ct = qaes_encrypt(input, &qaes_config, &mut stream).map_err(BenchError::Cipher)?;
        std::hint::black_box(ct);
    }
    for rep in 1..=config.repetitions {
        let (mut stream, t_keygen) = agree_stream(config)?;
        let started = Instant::now();
        let ct = qaes_encrypt(input, &qaes_config, &mut stream).map_err(BenchError::Cipher)?;
        let t_encrypt = started.elapsed();
        std::hint::black_box(ct);
        records.push(BenchRecord::new(
            BenchAlgorithm::Qaes,
            config.key_size,
            size_kb,
            rep,
            t_keygen,
            t_encrypt,
        ));
    }
    Ok(())
}

/// Runs the live key-agreement session and builds the derived per-block
/// stream from its key, timing both together as the key-generation phase.
fn agree_stream(config: &BenchConfig) -> Result<(KeyStream, Duration), BenchError> {
    let started = Instant::now();
    let master_bits = config.key_size.byte_len() * 8;
    let master = generate_key(master_bits, &config.channel).map_err(BenchError::Key)?;
    let master_key = CipherKey::new(master.to_bytes()).expect("session honored target length");
    let stream = KeyStream::derived_from_master(&master_key, config.key_size);
    Ok((stream, started.elapsed()))
}

/// Median total time for one (algorithm, size) cell. Panics when the
/// records contain no such cell.
pub fn median_total(records: &[BenchRecord], algorithm: BenchAlgorithm, size_kb: usize) -> Duration {
    let mut totals: Vec<Duration> = records
        .iter()
        .filter(|r| r.algorithm == algorithm && r.input_kb == size_kb)
        .map(|r| r.t_total)
        .collect();
    assert!(!totals.is_empty(), "no records for {algorithm} at {size_kb} KiB");
    totals.sort();
    totals[totals.len() / 2]
}

/// CSV dump, one row per record. Durations are microseconds with
/// nanosecond decimals, so the total column is the exact decimal sum of
/// the two phase columns.
pub fn records_to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from("algorithm,key_size,input_kb,rep,t_keygen_us,t_encrypt_us,t_total_us\n");
    for r in records {
        let _ = writeln!(
            out,
            "{},{},{},{},{:.3},{:.3},{:.3}",
            r.algorithm.name(),
            r.key_size.bits(),
            r.input_kb,
            r.rep,
            micros(r.t_keygen),
            micros(r.t_encrypt),
            micros(r.t_total),
        );
    }
    out
}

fn micros(d: Duration) -> f64 {
    d.as_nanos() as f64 / 1000.0
}

/// One key-generation timing under one channel configuration.
#[derive(Clone, Debug)]
pub struct KeygenProfileRow {
    pub pulse_budget: usize,
    pub noise_level: f64,
    pub eve_enabled: bool,
    /// Surviving key bits and the phase duration, or the abort that
    /// ended the session. Aborts are data, not failures.
    pub outcome: Result<(usize, Duration), Bb84Error>,
}

/// Runs one fixed-budget key-generation session per (budget, noise, eve)
/// combination and records what survived. Row `i` uses an independent
/// seed derived from the base seed, so rows are uncorrelated but the
/// whole table is reproducible.
pub fn keygen_profile(
    pulse_budgets: &[usize],
    noise_levels: &[f64],
    eve_settings: &[bool],
    base_seed: u64,
) -> Vec<KeygenProfileRow> {
    let mut rows = Vec::new();
    let mut index = 0u64;
    for &pulse_budget in pulse_budgets {
        for &noise_level in noise_levels {
            for &eve_enabled in eve_settings {
                let seed = derive_seed(base_seed, domain::SESSION_BASE + index);
                index += 1;
                let channel = match ChannelConfig::new(noise_level, eve_enabled, seed) {
                    Ok(c) => c,
                    Err(e) => {
                        rows.push(KeygenProfileRow {
                            pulse_budget,
                            noise_level,
                            eve_enabled,
                            outcome: Err(e),
                        });
                        continue;
                    }
                };
                let started = Instant::now();
                let outcome = pump_fixed_budget(pulse_budget, &channel)
                    .map(|o| (o.sender_key.bits.len(), started.elapsed()));
                rows.push(KeygenProfileRow {
                    pulse_budget,
                    noise_level,
                    eve_enabled,
                    outcome,
                });
            }
        }
    }
    rows
}

/// Plain-text table for a profile, one line per row. Aborted sessions
/// leave the key-bits column empty and carry the abort in the note.
pub fn profile_to_table(rows: &[KeygenProfileRow]) -> String {
    let mut out = String::from("pulses  noise  eve  key_bits  time_us  note\n");
    for row in rows {
        let eve = if row.eve_enabled { "on" } else { "off" };
        match &row.outcome {
            Ok((bits, time)) => {
                let _ = writeln!(
                    out,
                    "{:<7} {:<6.3} {:<4} {:<9} {:<8.1} -",
                    row.pulse_budget,
                    row.noise_level,
                    eve,
                    bits,
                    micros(*time),
                );
            }
            Err(e) => {
                let _ = writeln!(
                    out,
                    "{:<7} {:<6.3} {:<4} {:<9} {:<8} {e}",
                    row.pulse_budget, row.noise_level, eve, "", "",
                );
            }
        }
    }
    out
}
