//! Random-walk excursion test: maximum absolute partial sum of the
//! +/-1 sequence, scanned from each end.

use super::bits::BitSequence;
use super::frequency::gate;
use super::special::normal_cdf;
use super::{NistError, TestId, TestResult};

/// Minimum length for the default settings.
pub const CUMULATIVE_SUMS_MIN_BITS: usize = 100;

/// Maximum |partial sum| of the +/-1 walk taken in index order.
fn max_excursion<I: Iterator<Item = u8>>(bits: I) -> u64 {
    let mut sum: i64 = 0;
    let mut max_abs: i64 = 0;
    for b in bits {
        sum += if b == 1 { 1 } else { -1 };
        max_abs = max_abs.max(sum.abs());
    }
    max_abs as u64
}

/// Probability that a random walk of length n stays within +/-z,
/// complemented. The k ranges follow the reflection argument for the
/// walk's maximum; terms outside them underflow to zero anyway.
fn excursion_p_value(z: u64, n: usize) -> f64 {
    let ni = n as i64;
    let zi = z as i64;
    let sqrt_n = (n as f64).sqrt();
    let zf = z as f64;
    let term = |k: i64, offset: f64| normal_cdf((4.0 * k as f64 + offset) * zf / sqrt_n);
    let mut sum1 = 0.0;
    for k in ((-ni / zi) + 1) / 4..=((ni / zi) - 1) / 4 {
        sum1 += term(k, 1.0) - term(k, -1.0);
    }
    let mut sum2 = 0.0;
    for k in ((-ni / zi) - 3) / 4..=((ni / zi) - 1) / 4 {
        sum2 += term(k, 3.0) - term(k, 1.0);
    }
    1.0 - sum1 + sum2
}

/// Scores the maximum excursion of the cumulative +/-1 walk, forward and
/// reversed, as two p-values. Drift in either direction drives one of
/// the maxima (and both p-values' z statistics) up.
pub fn cumulative_sums_test(seq: &BitSequence) -> Result<TestResult, NistError> {
    let n = seq.len();
    if n == 0 {
        return Err(NistError::SequenceTooShort {
            test: TestId::CumulativeSums,
            needed: 1,
            got: 0,
        });
    }
    let z_forward = max_excursion((0..n).map(|i| seq.bit(i)));
    let z_reverse = max_excursion((0..n).rev().map(|i| seq.bit(i)));
    // an excursion of zero is impossible for n >= 1 (the first step
    // already moves the walk), so the division in the p-value is safe
    let p_forward = excursion_p_value(z_forward, n);
    let p_reverse = excursion_p_value(z_reverse, n);
    Ok(TestResult::new(
        TestId::CumulativeSums,
        vec![
            ("z_forward", z_forward as f64),
            ("z_reverse", z_reverse as f64),
        ],
        vec![p_forward, p_reverse],
    ))
}

/// [`cumulative_sums_test`] gated to the recommended minimum length.
pub fn run_cumulative_sums(seq: &BitSequence) -> Result<TestResult, NistError> {
    gate(TestId::CumulativeSums, seq.len(), CUMULATIVE_SUMS_MIN_BITS)?;
    cumulative_sums_test(seq)
}
