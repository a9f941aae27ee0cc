//! Periodicity test: discrete Fourier transform of the +/-1 sequence,
//! counting how many low-frequency peaks stay under the 95% threshold.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::bits::BitSequence;
use super::frequency::gate;
use super::special::erfc;
use super::{NistError, TestId, TestResult};

/// Minimum length at which the normal approximation for the peak count
/// is considered usable.
pub const SPECTRAL_MIN_BITS: usize = 1000;

/// Transforms bits to +/-1, takes the DFT, and compares the number of
/// magnitude peaks below the threshold sqrt(n ln 20) in the first n/2
/// bins (DC included, Nyquist excluded) against the expected 95%.
pub fn spectral_test(seq: &BitSequence) -> Result<TestResult, NistError> {
    let n = seq.len();
    if n < 2 {
        return Err(NistError::SequenceTooShort {
            test: TestId::Spectral,
            needed: 2,
            got: n,
        });
    }
    let mut buf: Vec<Complex<f64>> = (0..n)
        .map(|i| Complex::new(2.0 * f64::from(seq.bit(i)) - 1.0, 0.0))
        .collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let nf = n as f64;
    let threshold = (nf * 20.0f64.ln()).sqrt();
    let below = buf[..n / 2]
        .iter()
        .filter(|c| c.norm() < threshold)
        .count();
    let expected = 0.95 * nf / 2.0;
    let d = (below as f64 - expected) / (nf * 0.95 * 0.05 / 4.0).sqrt();
    let p = erfc(d.abs() / std::f64::consts::SQRT_2);
    Ok(TestResult::new(
        TestId::Spectral,
        vec![
            ("threshold", threshold),
            ("below_threshold", below as f64),
            ("d", d),
        ],
        vec![p],
    ))
}

/// [`spectral_test`] gated to the recommended minimum length.
pub fn run_spectral(seq: &BitSequence) -> Result<TestResult, NistError> {
    gate(TestId::Spectral, seq.len(), SPECTRAL_MIN_BITS)?;
    spectral_test(seq)
}
