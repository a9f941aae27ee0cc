//! `qaes`: operator front end for the quantum-keyed cipher library.
//!
//! One binary, six subcommands: `keygen` agrees a key over the simulated
//! quantum channel, `encrypt`/`decrypt` move files through the ciphertext
//! container format, `nist` runs the statistical randomness suite over a
//! file's bits, `bench` times plain AES against the quantum-keyed mode,
//! and `keygen-profile` tabulates key-agreement cost across channel
//! settings. Every command that consumes randomness takes `--seed` (or the
//! `QAES_SEED` environment variable) and writes bit-identical artifacts
//! across runs at a fixed seed; measured timings are the one exception.
//!
//! Exit codes:
//!   0  success (for `nist`: suite verdict pass)
//!   1  `nist` suite verdict reject
//!   2  command-line usage error
//!   3  key agreement aborted on a high error rate
//!   4  padding invalid after decryption (wrong key or corrupt data)
//!   5  container header malformed or inconsistent with the given key
//!   6  key material exhausted (pulse budget or key stream)
//!   7  file I/O failure
//!   8  invalid argument values

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qaes_core::aes::{CipherKey, KeySize};
use qaes_core::bb84::{run_session, Bb84Error, ChannelConfig};
use qaes_core::bench::{
    keygen_profile, median_total, profile_to_table, records_to_csv, run_benchmark,
    BenchAlgorithm, BenchConfig, BenchError,
};
use qaes_core::nist::{run_selected, run_suite, BitSequence, TestId};
use qaes_core::qaes::{
    qaes_decrypt, qaes_encrypt, KeyMode, KeyStream, ProviderKind, QaesCiphertext, QaesConfig,
    QaesError,
};

#[derive(Parser)]
#[command(
    name = "qaes",
    version,
    about = "AES under quantum-distributed keys: key agreement, encryption, randomness tests, benchmarks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Agree a key over the simulated quantum channel and save it as hex.
    Keygen(KeygenArgs),
    /// Encrypt a file into the ciphertext container format.
    Encrypt(EncryptArgs),
    /// Decrypt a ciphertext container back to the original bytes.
    Decrypt(DecryptArgs),
    /// Run the statistical randomness suite over a file's bits.
    Nist(NistArgs),
    /// Time plain AES against the quantum-keyed mode and write a CSV.
    Bench(BenchArgs),
    /// Tabulate key-agreement cost across channel configurations.
    KeygenProfile(ProfileArgs),
}

/// Simulated quantum channel settings shared by every command that runs
/// key agreement.
#[derive(Args)]
struct ChannelArgs {
    /// Depolarizing noise probability on the quantum channel, in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Place an intercept-resend eavesdropper on the channel.
    #[arg(long)]
    eve: bool,
    /// Root seed; every random choice in the command derives from it.
    #[arg(long, env = "QAES_SEED", default_value_t = 1)]
    seed: u64,
}

impl ChannelArgs {
    fn to_config(&self) -> Result<ChannelConfig, CliError> {
        ChannelConfig::new(self.noise, self.eve, self.seed).map_err(CliError::Key)
    }
}

#[derive(Args)]
struct KeygenArgs {
    /// Target key length in bits: 128, 192, or 256.
    #[arg(long, default_value_t = 128)]
    bits: usize,
    #[command(flatten)]
    channel: ChannelArgs,
    /// Destination for the hex-encoded key.
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args)]
#[command(group(
    clap::ArgGroup::new("key_source")
        .required(true)
        .args(["master_key", "fixed_key", "bb84"])
))]
struct EncryptArgs {
    /// Plaintext file to encrypt.
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Destination for the ciphertext container.
    #[arg(long, value_name = "FILE")]
    output: PathBuf,
    /// Derive per-block key material from the hex master key in FILE.
    #[arg(long, value_name = "FILE")]
    master_key: Option<PathBuf>,
    /// Encrypt every block under this one hex key. Testing only: this is
    /// plain ECB.
    #[arg(long, value_name = "HEX")]
    fixed_key: Option<String>,
    /// Agree a fresh master key over the quantum channel first.
    #[arg(long, requires = "save_master")]
    bb84: bool,
    /// Where to save the agreed master key (hex). Only with --bb84.
    #[arg(long, value_name = "FILE", requires = "bb84")]
    save_master: Option<PathBuf>,
    /// Cipher key size in bits: 128, 192, or 256. Defaults to 128, or to
    /// the fixed key's own size.
    #[arg(long)]
    key_size: Option<usize>,
    /// How key material is applied to blocks.
    #[arg(long, value_enum, default_value_t = KeyModeArg::PerBlock)]
    key_mode: KeyModeArg,
    #[command(flatten)]
    channel: ChannelArgs,
    /// Print key-stream accounting after encrypting.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
#[command(group(
    clap::ArgGroup::new("key_source")
        .required(true)
        .args(["master_key", "fixed_key"])
))]
struct DecryptArgs {
    /// Ciphertext container to decrypt.
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Destination for the recovered plaintext.
    #[arg(long, value_name = "FILE")]
    output: PathBuf,
    /// Derive per-block key material from the hex master key in FILE.
    #[arg(long, value_name = "FILE")]
    master_key: Option<PathBuf>,
    /// The hex key the container was encrypted under in fixed-key mode.
    #[arg(long, value_name = "HEX")]
    fixed_key: Option<String>,
    /// Print key-stream accounting after decrypting.
    #[arg(long)]
    verbose: bool,
}

#[derive(Args)]
struct NistArgs {
    /// File whose bits are tested, most significant bit of each byte first.
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Truncate the input to this many bits before testing.
    #[arg(long)]
    bits: Option<usize>,
    /// Run only the named test (repeatable). Defaults to all twelve.
    #[arg(long = "test", value_name = "NAME")]
    tests: Vec<String>,
    /// Also write the rendered report to FILE.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Input sizes in KB, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![500, 1000, 1500, 2000, 3500])]
    sizes: Vec<usize>,
    /// Timed repetitions per algorithm and size.
    #[arg(long, default_value_t = 10)]
    reps: usize,
    /// Untimed warm-up passes per algorithm and size.
    #[arg(long, default_value_t = 3)]
    warmups: usize,
    /// Cipher key size in bits: 128, 192, or 256.
    #[arg(long, default_value_t = 128)]
    key_size: usize,
    /// How key material is applied to blocks.
    #[arg(long, value_enum, default_value_t = KeyModeArg::PerBlock)]
    key_mode: KeyModeArg,
    #[command(flatten)]
    channel: ChannelArgs,
    /// Destination CSV.
    #[arg(long, value_name = "FILE", default_value = "bench.csv")]
    out: PathBuf,
}

#[derive(Args)]
struct ProfileArgs {
    /// Pulse budgets to profile, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![200, 500, 1000])]
    budgets: Vec<usize>,
    /// Noise levels to profile, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.0, 0.05, 0.1])]
    noises: Vec<f64>,
    /// Eavesdropper settings to include in the sweep.
    #[arg(long, value_enum, default_value_t = EveSetting::Both)]
    eve: EveSetting,
    /// Root seed; every random choice in the command derives from it.
    #[arg(long, env = "QAES_SEED", default_value_t = 1)]
    seed: u64,
    /// Also write the table to FILE.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KeyModeArg {
    /// One fresh key per block, run through the normal key expansion.
    PerBlock,
    /// Nr+1 raw 16-byte chunks per block; key expansion is bypassed.
    PerRound,
}

impl From<KeyModeArg> for KeyMode {
    fn from(arg: KeyModeArg) -> KeyMode {
        match arg {
            KeyModeArg::PerBlock => KeyMode::PerBlockKey,
            KeyModeArg::PerRound => KeyMode::PerRoundKey,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EveSetting {
    Off,
    On,
    Both,
}

impl EveSetting {
    fn flags(self) -> &'static [bool] {
        match self {
            EveSetting::Off => &[false],
            EveSetting::On => &[true],
            EveSetting::Both => &[false, true],
        }
    }
}

/// Everything a subcommand can fail with, each mapped to one documented
/// exit code.
#[derive(Debug)]
enum CliError {
    Key(Bb84Error),
    Cipher(QaesError),
    Io { path: PathBuf, source: std::io::Error },
    Args(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Key(Bb84Error::QberAbort { .. })
            | CliError::Cipher(QaesError::QberAbort { .. }) => 3,
            CliError::Cipher(QaesError::BadPadding) => 4,
            CliError::Cipher(QaesError::HeaderMismatch { .. }) => 5,
            CliError::Key(Bb84Error::ExhaustionLimit { .. })
            | CliError::Cipher(QaesError::KeyStreamExhausted) => 6,
            CliError::Io { .. } => 7,
            CliError::Key(_) | CliError::Args(_) => 8,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Key(e) => write!(f, "key agreement failed: {e}"),
            CliError::Cipher(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Args(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> CliError {
        match e {
            BenchError::Key(e) => CliError::Key(e),
            BenchError::Cipher(e) => CliError::Cipher(e),
        }
    }
}

fn main() -> ExitCode {
    // Default SIGPIPE disposition: a write to a closed pipe ends the
    // process quietly, the same as any other Unix filter.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(&cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(command: &Command) -> Result<u8, CliError> {
    match command {
        Command::Keygen(args) => cmd_keygen(args),
        Command::Encrypt(args) => cmd_encrypt(args),
        Command::Decrypt(args) => cmd_decrypt(args),
        Command::Nist(args) => cmd_nist(args),
        Command::Bench(args) => cmd_bench(args),
        Command::KeygenProfile(args) => cmd_profile(args),
    }
}

fn cmd_keygen(args: &KeygenArgs) -> Result<u8, CliError> {
    let size = parse_key_bits(args.bits)?;
    let channel = args.channel.to_config()?;
    let outcome = run_session(size.bits(), &channel).map_err(CliError::Key)?;
    let key = &outcome.sender_key;
    write_hex_key(&args.out, &key.to_bytes())?;
    println!("key bits:        {}", key.bits.len());
    println!("pulses pumped:   {}", key.pulses_pumped);
    println!("sift batches:    {}", outcome.batches);
    println!("sampled bits:    {}", outcome.qber_sample_bits);
    println!("qber estimate:   {:.4}", key.qber_estimate);
    println!("generation time: {:.1} us", key.generation_time.as_secs_f64() * 1e6);
    println!("key file:        {}", args.out.display());
    Ok(0)
}

fn cmd_encrypt(args: &EncryptArgs) -> Result<u8, CliError> {
    let plaintext = read_file(&args.input)?;
    let channel = args.channel.to_config()?;

    let (mut stream, key_size) = if let Some(path) = &args.master_key {
        let master = read_key_file(path)?;
        let size = parse_key_bits(args.key_size.unwrap_or(128))?;
        (KeyStream::derived_from_master(&master, size), size)
    } else if let Some(hex_key) = &args.fixed_key {
        let key = parse_hex_key(hex_key).map_err(CliError::Args)?;
        let size = key.size();
        if let Some(bits) = args.key_size {
            if parse_key_bits(bits)? != size {
                return Err(CliError::Args(format!(
                    "--key-size {bits} does not match the {}-bit fixed key",
                    size.bits()
                )));
            }
        }
        (KeyStream::fixed(key), size)
    } else {
        // One agreement session produces the master; block material is then
        // derived from it so the saved key file is all a receiver needs.
        let size = parse_key_bits(args.key_size.unwrap_or(128))?;
        let outcome = run_session(size.bits(), &channel).map_err(CliError::Key)?;
        let master = CipherKey::new(outcome.sender_key.to_bytes())
            .expect("a completed session yields exactly the requested bits");
        let save = args.save_master.as_ref().expect("clap enforces --save-master");
        write_hex_key(save, master.bytes())?;
        println!(
            "agreed {}-bit master over {} pulses (qber {:.4}), saved to {}",
            size.bits(),
            outcome.sender_key.pulses_pumped,
            outcome.sender_key.qber_estimate,
            save.display()
        );
        (KeyStream::derived_from_master(&master, size), size)
    };

    let config = QaesConfig { key_size, key_mode: args.key_mode.into(), channel };
    let ciphertext = qaes_encrypt(&plaintext, &config, &mut stream).map_err(CliError::Cipher)?;
    write_file(&args.output, &ciphertext.to_bytes())?;
    println!(
        "encrypted {} ({} bytes) -> {} ({} blocks)",
        args.input.display(),
        plaintext.len(),
        args.output.display(),
        ciphertext.block_count
    );
    if args.verbose {
        print_stream_stats(&stream, ciphertext.block_count);
    }
    Ok(0)
}

fn cmd_decrypt(args: &DecryptArgs) -> Result<u8, CliError> {
    let bytes = read_file(&args.input)?;
    let container = QaesCiphertext::from_bytes(&bytes).map_err(CliError::Cipher)?;

    let mut stream = if let Some(path) = &args.master_key {
        let master = read_key_file(path)?;
        KeyStream::derived_from_master(&master, container.key_size)
    } else {
        let hex_key = args.fixed_key.as_ref().expect("clap enforces one key source");
        let key = parse_hex_key(hex_key).map_err(CliError::Args)?;
        if key.size() != container.key_size {
            return Err(CliError::Cipher(QaesError::HeaderMismatch {
                detail: format!(
                    "container uses {}-bit keys but the fixed key has {} bits",
                    container.key_size.bits(),
                    key.size().bits()
                ),
            }));
        }
        KeyStream::fixed(key)
    };

    // The channel field only matters to live-agreement streams; decryption
    // never runs one.
    let config = QaesConfig {
        key_size: container.key_size,
        key_mode: container.key_mode,
        channel: ChannelConfig::clean(0),
    };
    let plaintext = qaes_decrypt(&container, &config, &mut stream).map_err(CliError::Cipher)?;
    write_file(&args.output, &plaintext)?;
    println!(
        "decrypted {} ({} blocks) -> {} ({} bytes)",
        args.input.display(),
        container.block_count,
        args.output.display(),
        plaintext.len()
    );
    if args.verbose {
        print_stream_stats(&stream, container.block_count);
    }
    Ok(0)
}

fn cmd_nist(args: &NistArgs) -> Result<u8, CliError> {
    let bytes = read_file(&args.input)?;
    let mut seq = BitSequence::from_bytes(&bytes);
    if let Some(bits) = args.bits {
        if bits > seq.len() {
            return Err(CliError::Args(format!(
                "--bits {bits} exceeds the {} bits in {}",
                seq.len(),
                args.input.display()
            )));
        }
        seq = seq.truncated(bits);
    }

    let report = if args.tests.is_empty() {
        run_suite(&seq)
    } else {
        let mut selected = Vec::new();
        for name in &args.tests {
            let test = TestId::from_name(name).ok_or_else(|| {
                CliError::Args(format!("unknown test {name:?}; names: {}", test_name_list()))
            })?;
            if !selected.contains(&test) {
                selected.push(test);
            }
        }
        run_selected(&selected, &seq)
    };

    let rendered = report.render();
    print!("{rendered}");
    if let Some(path) = &args.report {
        write_file(path, rendered.as_bytes())?;
    }

    // A healthy source may lose one of twelve tests to sampling luck, but a
    // run that passes nothing it could score is a rejection.
    let reject = report.rejections() > 1 || (report.rejections() > 0 && report.passes() == 0);
    println!("verdict: {}", if reject { "reject" } else { "pass" });
    Ok(u8::from(reject))
}

fn cmd_bench(args: &BenchArgs) -> Result<u8, CliError> {
    if args.sizes.is_empty() {
        return Err(CliError::Args("--sizes needs at least one size".into()));
    }
    if args.reps == 0 {
        return Err(CliError::Args("--reps must be at least 1".into()));
    }
    let config = BenchConfig {
        key_size: parse_key_bits(args.key_size)?,
        key_mode: args.key_mode.into(),
        channel: args.channel.to_config()?,
        repetitions: args.reps,
        warmups: args.warmups,
    };
    let records = run_benchmark(&args.sizes, &config)?;
    write_file(&args.out, records_to_csv(&records).as_bytes())?;

    println!("size_kb  aes_median_us  qaes_median_us");
    for &size in &args.sizes {
        let aes = median_total(&records, BenchAlgorithm::Aes, size);
        let qaes = median_total(&records, BenchAlgorithm::Qaes, size);
        println!(
            "{size:>7}  {:>13.1}  {:>14.1}",
            aes.as_secs_f64() * 1e6,
            qaes.as_secs_f64() * 1e6
        );
    }
    println!("csv: {} ({} rows)", args.out.display(), records.len());
    Ok(0)
}

fn cmd_profile(args: &ProfileArgs) -> Result<u8, CliError> {
    if args.budgets.is_empty() || args.noises.is_empty() {
        return Err(CliError::Args(
            "--budgets and --noises each need at least one value".into(),
        ));
    }
    let rows = keygen_profile(&args.budgets, &args.noises, args.eve.flags(), args.seed);
    let table = profile_to_table(&rows);
    print!("{table}");
    if let Some(path) = &args.out {
        write_file(path, table.as_bytes())?;
    }
    Ok(0)
}

fn parse_key_bits(bits: usize) -> Result<KeySize, CliError> {
    KeySize::from_bits(bits).map_err(|_| {
        CliError::Args(format!("unsupported key size {bits}; choose 128, 192, or 256"))
    })
}

/// Decodes a hex string into a cipher key, validating its length.
fn parse_hex_key(hex_str: &str) -> Result<CipherKey, String> {
    let bytes = hex::decode(hex_str).map_err(|e| format!("bad hex key: {e}"))?;
    CipherKey::new(bytes).map_err(|e| e.to_string())
}

/// Reads a key file: the first non-empty line, hex-decoded.
fn read_key_file(path: &Path) -> Result<CipherKey, CliError> {
    let text = String::from_utf8(read_file(path)?)
        .map_err(|_| CliError::Args(format!("{}: key file is not text", path.display())))?;
    let line = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .ok_or_else(|| CliError::Args(format!("{}: key file is empty", path.display())))?;
    parse_hex_key(line).map_err(|msg| CliError::Args(format!("{}: {msg}", path.display())))
}

fn write_hex_key(path: &Path, key_bytes: &[u8]) -> Result<(), CliError> {
    let mut line = hex::encode(key_bytes);
    line.push('\n');
    write_file(path, line.as_bytes())
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

fn print_stream_stats(stream: &KeyStream, blocks: u64) {
    let provider = match stream.provider_kind() {
        ProviderKind::LiveBB84 => "live-bb84",
        ProviderKind::DerivedFromMaster => "derived-from-master",
        ProviderKind::Fixed => "fixed",
    };
    println!("key stream provider: {provider}");
    println!("block keys issued:   {}", stream.keys_issued());
    if blocks > 0 && stream.chunks_issued() > 0 {
        println!(
            "round chunks issued: {} ({} per block)",
            stream.chunks_issued(),
            stream.chunks_issued() / blocks
        );
    } else {
        println!("round chunks issued: {}", stream.chunks_issued());
    }
    println!("key bytes drawn:     {}", stream.bytes_drawn());
}

fn test_name_list() -> String {
    TestId::ALL
        .iter()
        .map(|t| t.name())
        .collect::<Vec<_>>()
        .join(", ")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arg_definitions_are_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn error_classes_map_to_distinct_codes() {
        let cases = [
            (CliError::Key(Bb84Error::QberAbort { qber: 0.25, threshold: 0.11 }), 3),
            (CliError::Cipher(QaesError::BadPadding), 4),
            (
                CliError::Cipher(QaesError::HeaderMismatch { detail: "bad magic".into() }),
                5,
            ),
            (CliError::Cipher(QaesError::KeyStreamExhausted), 6),
            (
                CliError::Key(Bb84Error::ExhaustionLimit { pulses_pumped: 500, budget: 500 }),
                6,
            ),
            (
                CliError::Io {
                    path: PathBuf::from("missing.bin"),
                    source: std::io::Error::from(std::io::ErrorKind::NotFound),
                },
                7,
            ),
            (CliError::Args("bad".into()), 8),
            (CliError::Key(Bb84Error::InvalidNoiseLevel(2.0)), 8),
        ];
        for (err, code) in cases {
            assert_eq!(err.exit_code(), code, "{err}");
        }
    }

    #[test]
    fn abort_errors_mention_the_error_rate() {
        let err = CliError::Key(Bb84Error::QberAbort { qber: 0.248, threshold: 0.11 });
        assert!(err.to_string().contains("QBER"));
    }

    #[test]
    fn key_bits_parse_only_supported_sizes() {
        assert_eq!(parse_key_bits(128).unwrap(), KeySize::Bits128);
        assert_eq!(parse_key_bits(192).unwrap(), KeySize::Bits192);
        assert_eq!(parse_key_bits(256).unwrap(), KeySize::Bits256);
        assert!(parse_key_bits(64).is_err());
        assert!(parse_key_bits(0).is_err());
    }

    #[test]
    fn hex_keys_round_trip() {
        let key = parse_hex_key("000102030405060708090a0b0c0d0e0f").unwrap();
        assert_eq!(key.size(), KeySize::Bits128);
        assert!(parse_hex_key("0001").is_err());
        assert!(parse_hex_key("zz0102030405060708090a0b0c0d0e0f").is_err());
    }
}
