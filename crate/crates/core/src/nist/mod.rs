//! Statistical randomness test suite.
//!
//! Twelve tests, each reducing a [`BitSequence`] to one or more p-values
//! under the null hypothesis that the bits are independent fair coin
//! flips. A test passes when every one of its p-values is at least
//! [`ALPHA`]. Each test family exposes an ungated function taking
//! explicit parameters plus a `run_`-prefixed wrapper that applies the
//! conventional defaults and minimum-length gates; [`run_suite`] runs all
//! twelve wrappers and collects a [`SuiteReport`].
//!
//! A single rejection among twelve tests is routine for genuinely random
//! input at the 1% level, so callers judging a generator should allow at
//! least one failure (see [`SuiteReport::rejections`]) or average over
//! many sequences.

pub mod bits;
mod cusum;
mod entropy;
mod frequency;
mod rank;
mod runs;
mod special;
mod spectral;
mod templates;
mod universal;

use std::error::Error;
use std::fmt;
use std::fmt::Write as _;

pub use bits::BitSequence;
pub use cusum::{cumulative_sums_test, run_cumulative_sums, CUMULATIVE_SUMS_MIN_BITS};
pub use entropy::{
    approximate_entropy_test, run_approximate_entropy, run_serial, serial_test,
    APPROXIMATE_ENTROPY_BLOCK_BITS, APPROXIMATE_ENTROPY_MIN_BITS, SERIAL_BLOCK_BITS,
    SERIAL_MIN_BITS,
};
pub use frequency::{
    block_frequency_test, frequency_test, run_block_frequency, run_frequency,
    BLOCK_FREQUENCY_BLOCK_BITS, FREQUENCY_MIN_BITS,
};
pub use rank::{rank_test, run_rank, MATRIX_DIM, RANK_MIN_BITS};
pub use runs::{longest_run_test, run_longest_run, run_runs, runs_test, LONGEST_RUN_MIN_BITS, RUNS_MIN_BITS};
pub use spectral::{run_spectral, spectral_test, SPECTRAL_MIN_BITS};
pub use templates::{
    non_overlapping_template_test, overlapping_template_test, run_non_overlapping_template,
    run_overlapping_template, DEFAULT_TEMPLATE, NON_OVERLAPPING_BLOCKS, NON_OVERLAPPING_MIN_BITS,
    OVERLAPPING_BLOCK_BITS, OVERLAPPING_MIN_BITS, OVERLAPPING_TEMPLATE_BITS,
};
pub use universal::{run_universal, universal_test, UNIVERSAL_MIN_BITS};

/// Significance level: a p-value below this rejects the test.
pub const ALPHA: f64 = 0.01;

/// The twelve suite tests, in canonical report order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TestId {
    Frequency,
    BlockFrequency,
    CumulativeSums,
    Runs,
    LongestRun,
    Rank,
    Spectral,
    NonOverlappingTemplate,
    OverlappingTemplate,
    Universal,
    ApproximateEntropy,
    Serial,
}

impl TestId {
    pub const ALL: [TestId; 12] = [
        TestId::Frequency,
        TestId::BlockFrequency,
        TestId::CumulativeSums,
        TestId::Runs,
        TestId::LongestRun,
        TestId::Rank,
        TestId::Spectral,
        TestId::NonOverlappingTemplate,
        TestId::OverlappingTemplate,
        TestId::Universal,
        TestId::ApproximateEntropy,
        TestId::Serial,
    ];

    /// Parses a kebab-case name as printed by [`name`](Self::name).
    pub fn from_name(name: &str) -> Option<TestId> {
        TestId::ALL.iter().copied().find(|t| t.name() == name)
    }

    /// Stable kebab-case name used in reports and on the command line.
    pub fn name(self) -> &'static str {
        match self {
            TestId::Frequency => "frequency",
            TestId::BlockFrequency => "block-frequency",
            TestId::CumulativeSums => "cumulative-sums",
            TestId::Runs => "runs",
            TestId::LongestRun => "longest-run",
            TestId::Rank => "rank",
            TestId::Spectral => "spectral",
            TestId::NonOverlappingTemplate => "non-overlapping-template",
            TestId::OverlappingTemplate => "overlapping-template",
            TestId::Universal => "universal",
            TestId::ApproximateEntropy => "approximate-entropy",
            TestId::Serial => "serial",
        }
    }
}

impl fmt::Display for TestId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Outcome of one test on one sequence.
#[derive(Clone, Debug)]
pub struct TestResult {
    pub test: TestId,
    /// Named intermediate statistics, for reports and assertions.
    pub statistics: Vec<(&'static str, f64)>,
    /// One entry per p-value the test produces; most tests produce one.
    pub p_values: Vec<f64>,
    /// True when every p-value is at least [`ALPHA`].
    pub passed: bool,
}

impl TestResult {
    fn new(test: TestId, statistics: Vec<(&'static str, f64)>, p_values: Vec<f64>) -> Self {
        let passed = p_values.iter().all(|&p| p >= ALPHA);
        TestResult {
            test,
            statistics,
            p_values,
            passed,
        }
    }

    /// The smallest p-value, the one that decides pass or fail.
    pub fn min_p(&self) -> f64 {
        self.p_values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Why a test produced no p-value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NistError {
    /// The sequence is shorter than the test's minimum; the test did not
    /// run and says nothing about the data.
    SequenceTooShort {
        test: TestId,
        needed: usize,
        got: usize,
    },
    /// A distributional precondition failed; this is itself evidence of
    /// non-randomness and reports count it as a rejection.
    PrerequisiteFailed { test: TestId, detail: String },
}

impl fmt::Display for NistError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NistError::SequenceTooShort { test, needed, got } => {
                write!(f, "{test} needs at least {needed} bits, got {got}")
            }
            NistError::PrerequisiteFailed { test, detail } => {
                write!(f, "{test} prerequisite failed: {detail}")
            }
        }
    }
}

impl Error for NistError {}

/// Results of running the full suite on one sequence.
#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub bit_len: usize,
    /// One entry per suite test, in [`TestId::ALL`] order.
    pub results: Vec<(TestId, Result<TestResult, NistError>)>,
}

impl SuiteReport {
    /// Tests that ran and passed.
    pub fn passes(&self) -> usize {
        self.results
            .iter()
            .filter(|(_, r)| matches!(r, Ok(t) if t.passed))
            .count()
    }

    /// Tests that judged the data non-random: a p-value below [`ALPHA`]
    /// or a failed distributional prerequisite.
    pub fn rejections(&self) -> usize {
        self.results
            .iter()
            .filter(|(_, r)| match r {
                Ok(t) => !t.passed,
                Err(NistError::PrerequisiteFailed { .. }) => true,
                Err(NistError::SequenceTooShort { .. }) => false,
            })
            .count()
    }

    /// Tests skipped because the sequence is too short for them.
    pub fn skipped(&self) -> usize {
        self.results.len() - self.passes() - self.rejections()
    }

    /// Plain-text table: one line per test plus a summary line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "randomness suite over {} bits (reject below p = {ALPHA})",
            self.bit_len
        );
        for (test, result) in &self.results {
            let name = test.name();
            match result {
                Ok(r) => {
                    let verdict = if r.passed { "pass" } else { "FAIL" };
                    let ps = r
                        .p_values
                        .iter()
                        .map(|p| format!("{p:.6}"))
                        .collect::<Vec<_>>()
                        .join(", ");
                    let _ = writeln!(out, "  {name:<26} {verdict:<5} p = {ps}");
                }
                Err(NistError::PrerequisiteFailed { detail, .. }) => {
                    let _ = writeln!(out, "  {name:<26} FAIL  {detail}");
                }
                Err(NistError::SequenceTooShort { needed, got, .. }) => {
                    let _ = writeln!(out, "  {name:<26} skip  needs {needed} bits, got {got}");
                }
            }
        }
        let _ = writeln!(
            out,
            "summary: {} pass, {} reject, {} skipped",
            self.passes(),
            self.rejections(),
            self.skipped()
        );
        out
    }
}

/// Runs one suite test by id, with its default parameters and gate.
pub fn run_single(test: TestId, seq: &BitSequence) -> Result<TestResult, NistError> {
    match test {
        TestId::Frequency => run_frequency(seq),
        TestId::BlockFrequency => run_block_frequency(seq),
        TestId::CumulativeSums => run_cumulative_sums(seq),
        TestId::Runs => run_runs(seq),
        TestId::LongestRun => run_longest_run(seq),
        TestId::Rank => run_rank(seq),
        TestId::Spectral => run_spectral(seq),
        TestId::NonOverlappingTemplate => run_non_overlapping_template(seq),
        TestId::OverlappingTemplate => run_overlapping_template(seq),
        TestId::Universal => run_universal(seq),
        TestId::ApproximateEntropy => run_approximate_entropy(seq),
        TestId::Serial => run_serial(seq),
    }
}

/// Runs all twelve tests with their default parameters and length gates.
pub fn run_suite(seq: &BitSequence) -> SuiteReport {
    run_selected(&TestId::ALL, seq)
}

/// Runs the given tests in the given order; the report's counts and
/// verdict helpers then speak only for this selection.
pub fn run_selected(tests: &[TestId], seq: &BitSequence) -> SuiteReport {
    SuiteReport {
        bit_len: seq.len(),
        results: tests
            .iter()
            .map(|&test| (test, run_single(test, seq)))
            .collect(),
    }
}
