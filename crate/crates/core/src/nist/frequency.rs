//! Bit-balance tests: proportion of ones over the whole sequence and
//! within fixed-size blocks.

use super::bits::BitSequence;
use super::special::{erfc, igamc};
use super::{NistError, TestId, TestResult};

/// Minimum length for the whole-sequence test at the default settings.
pub const FREQUENCY_MIN_BITS: usize = 100;
/// Default block length for the blockwise test.
pub const BLOCK_FREQUENCY_BLOCK_BITS: usize = 128;

/// Whole-sequence balance: are ones and zeros equally common?
///
/// The statistic is |#ones - #zeros| / sqrt(n), standard normal under the
/// null, so p = erfc(s / sqrt(2)).
pub fn frequency_test(seq: &BitSequence) -> Result<TestResult, NistError> {
    let n = seq.len();
    if n == 0 {
        return Err(NistError::SequenceTooShort {
            test: TestId::Frequency,
            needed: 1,
            got: 0,
        });
    }
    let s = 2 * seq.ones() as i64 - n as i64;
    let s_obs = (s.abs() as f64) / (n as f64).sqrt();
    let p = erfc(s_obs / std::f64::consts::SQRT_2);
    Ok(TestResult::new(
        TestId::Frequency,
        vec![("partial_sum", s as f64), ("s_obs", s_obs)],
        vec![p],
    ))
}

/// [`frequency_test`] gated to the recommended minimum length.
pub fn run_frequency(seq: &BitSequence) -> Result<TestResult, NistError> {
    gate(TestId::Frequency, seq.len(), FREQUENCY_MIN_BITS)?;
    frequency_test(seq)
}

/// Blockwise balance: the ones fraction of each `block_bits`-wide block,
/// scored as a chi-squared with one term per block. Trailing bits that do
/// not fill a block are discarded.
pub fn block_frequency_test(
    seq: &BitSequence,
    block_bits: usize,
) -> Result<TestResult, NistError> {
    assert!(block_bits > 0, "block length must be positive");
    let n = seq.len();
    let blocks = n / block_bits;
    if blocks == 0 {
        return Err(NistError::SequenceTooShort {
            test: TestId::BlockFrequency,
            needed: block_bits,
            got: n,
        });
    }
    let mut chi2 = 0.0;
    for b in 0..blocks {
        let ones: u32 = (0..block_bits).map(|i| seq.bit(b * block_bits + i) as u32).sum();
        let pi = f64::from(ones) / block_bits as f64;
        chi2 += (pi - 0.5) * (pi - 0.5);
    }
    chi2 *= 4.0 * block_bits as f64;
    let p = igamc(blocks as f64 / 2.0, chi2 / 2.0);
    Ok(TestResult::new(
        TestId::BlockFrequency,
        vec![("chi_squared", chi2), ("blocks", blocks as f64)],
        vec![p],
    ))
}

/// [`block_frequency_test`] with the default 128-bit blocks.
pub fn run_block_frequency(seq: &BitSequence) -> Result<TestResult, NistError> {
    gate(TestId::BlockFrequency, seq.len(), BLOCK_FREQUENCY_BLOCK_BITS)?;
    block_frequency_test(seq, BLOCK_FREQUENCY_BLOCK_BITS)
}

pub(super) fn gate(test: TestId, got: usize, needed: usize) -> Result<(), NistError> {
    if got < needed {
        Err(NistError::SequenceTooShort { test, needed, got })
    } else {
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::bits::fixture_megabit;
    use super::super::tests::{assert_p, PI_100};
    use super::*;

    #[test]
    fn frequency_short_example() {
        let r = frequency_test(&BitSequence::from_bit_text("1011010101")).unwrap();
        assert_p(r.p_values[0], 0.527_089_256_865_538);
        assert!(r.passed);
    }

    #[test]
    fn frequency_on_pi_bits() {
        let r = frequency_test(&BitSequence::from_bit_text(PI_100)).unwrap();
        assert_p(r.p_values[0], 0.109_598_583_399_116);
    }

    #[test]
    fn frequency_fixture_value() {
        let r = run_frequency(&fixture_megabit()).unwrap();
        assert_eq!(r.statistics[0].1, 786.0);
        assert_p(r.p_values[0], 0.431_867_487_137_95);
        assert!(r.passed);
    }

    #[test]
    fn frequency_rejects_constant_input() {
        let r = frequency_test(&BitSequence::from_bits(&[0; 200])).unwrap();
        assert!(r.p_values[0] < 1e-10);
        assert!(!r.passed);
    }

    #[test]
    fn block_frequency_short_examples() {
        let r = block_frequency_test(&BitSequence::from_bit_text("0110011010"), 3).unwrap();
        assert_p(r.p_values[0], 0.801_251_956_901_201);
        let r = block_frequency_test(&BitSequence::from_bit_text(PI_100), 10).unwrap();
        assert_p(r.p_values[0], 0.706_438_449_641_281);
    }

    #[test]
    fn block_frequency_fixture_value() {
        let r = run_block_frequency(&fixture_megabit()).unwrap();
        assert_eq!(r.statistics[1].1, 7812.0);
        assert_p(r.statistics[0].1, 7767.906_25);
        assert_p(r.p_values[0], 0.636_114_129_706_728);
    }

    #[test]
    fn gates_report_needed_lengths() {
        match run_frequency(&BitSequence::from_bits(&[1; 99])) {
            Err(NistError::SequenceTooShort { needed: 100, got: 99, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(run_block_frequency(&BitSequence::from_bits(&[1; 127])).is_err());
    }
}
