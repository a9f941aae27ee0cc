//! Run-structure tests: total number of runs, and the distribution of the
//! longest run of ones inside fixed blocks.

use super::bits::BitSequence;
use super::frequency::gate;
use super::special::{erfc, igamc};
use super::{NistError, TestId, TestResult};

/// Minimum length for the runs test at the default settings.
pub const RUNS_MIN_BITS: usize = 100;
/// Minimum length for the smallest longest-run block configuration.
pub const LONGEST_RUN_MIN_BITS: usize = 128;

/// Total-runs test: counts maximal blocks of identical bits.
///
/// Valid only when the ones fraction is already near 1/2; when it is not,
/// the oscillation statistic says nothing new, so the result is
/// [`NistError::PrerequisiteFailed`] rather than a p-value.
pub fn runs_test(seq: &BitSequence) -> Result<TestResult, NistError> {
    let n = seq.len();
    if n < 2 {
        return Err(NistError::SequenceTooShort {
            test: TestId::Runs,
            needed: 2,
            got: n,
        });
    }
    let nf = n as f64;
    let pi = seq.ones() as f64 / nf;
    let tau = 2.0 / nf.sqrt();
    if (pi - 0.5).abs() >= tau {
        return Err(NistError::PrerequisiteFailed {
            test: TestId::Runs,
            detail: format!("ones fraction {pi:.4} is outside 0.5 +/- {tau:.4}"),
        });
    }
    let mut v: u64 = 1;
    for i in 0..n - 1 {
        if seq.bit(i) != seq.bit(i + 1) {
            v += 1;
        }
    }
    let expected = 2.0 * nf * pi * (1.0 - pi);
    let p = erfc((v as f64 - expected).abs() / (2.0 * (2.0 * nf).sqrt() * pi * (1.0 - pi)));
    Ok(TestResult::new(
        TestId::Runs,
        vec![("ones_fraction", pi), ("v_obs", v as f64)],
        vec![p],
    ))
}

/// [`runs_test`] gated to the recommended minimum length.
pub fn run_runs(seq: &BitSequence) -> Result<TestResult, NistError> {
    gate(TestId::Runs, seq.len(), RUNS_MIN_BITS)?;
    runs_test(seq)
}

/// One block-length tier of the longest-run test: block width, the class
/// boundaries for the longest run observed per block, and the reference
/// probabilities of those classes.
struct Tier {
    block_bits: usize,
    min_bits: usize,
    lowest_class: u32,
    probabilities: &'static [f64],
}

/// Tiers are tried longest block first; each `min_bits` bound keeps enough
/// blocks for the chi-squared approximation at that width.
const TIERS: [Tier; 3] = [
    Tier {
        block_bits: 10_000,
        min_bits: 750_000,
        lowest_class: 10,
        probabilities: &[0.0882, 0.2092, 0.2483, 0.1933, 0.1208, 0.0675, 0.0727],
    },
    Tier {
        block_bits: 128,
        min_bits: 6272,
        lowest_class: 4,
        probabilities: &[
            0.117_403_578_8,
            0.242_955_959,
            0.249_363_483,
            0.175_177_06,
            0.102_701_071,
            0.112_398_847,
        ],
    },
    Tier {
        block_bits: 8,
        min_bits: 128,
        lowest_class: 1,
        probabilities: &[0.214_843_75, 0.367_187_5, 0.230_468_75, 0.187_5],
    },
];

/// Longest run of ones per block, binned into tier-specific classes and
/// scored as a chi-squared against the tier's reference distribution.
/// The block width scales with the sequence length (8, 128, or 10^4 bits).
pub fn longest_run_test(seq: &BitSequence) -> Result<TestResult, NistError> {
    let n = seq.len();
    let tier = TIERS
        .iter()
        .find(|t| n >= t.min_bits)
        .ok_or(NistError::SequenceTooShort {
            test: TestId::LongestRun,
            needed: LONGEST_RUN_MIN_BITS,
            got: n,
        })?;
    let m = tier.block_bits;
    let classes = tier.probabilities.len();
    let blocks = n / m;
    let mut counts = vec![0u64; classes];
    for b in 0..blocks {
        let mut longest: u32 = 0;
        let mut current: u32 = 0;
        for i in 0..m {
            if seq.bit(b * m + i) == 1 {
                current += 1;
                longest = longest.max(current);
            } else {
                current = 0;
            }
        }
        let class = longest
            .saturating_sub(tier.lowest_class)
            .min(classes as u32 - 1) as usize;
        counts[class] += 1;
    }
    let mut chi2 = 0.0;
    for (i, &p) in tier.probabilities.iter().enumerate() {
        let expected = blocks as f64 * p;
        let diff = counts[i] as f64 - expected;
        chi2 += diff * diff / expected;
    }
    let p = igamc((classes as f64 - 1.0) / 2.0, chi2 / 2.0);
    Ok(TestResult::new(
        TestId::LongestRun,
        vec![
            ("chi_squared", chi2),
            ("block_bits", m as f64),
            ("blocks", blocks as f64),
        ],
        vec![p],
    ))
}

/// [`longest_run_test`] under its canonical name; the tier choice already
/// embeds the length gate.
pub fn run_longest_run(seq: &BitSequence) -> Result<TestResult, NistError> {
    longest_run_test(seq)
}

#[cfg(test)]
mod tests {
    use super::super::bits::fixture_megabit;
    use super::super::tests::{assert_p, PI_100};
    use super::*;

    #[test]
    fn runs_short_example() {
        let r = runs_test(&BitSequence::from_bit_text("1001101011")).unwrap();
        assert_eq!(r.statistics[0].1, 0.6);
        assert_eq!(r.statistics[1].1, 7.0);
        assert_p(r.p_values[0], 0.147_232_255_363_666);
    }

    #[test]
    fn runs_on_pi_bits() {
        let r = runs_test(&BitSequence::from_bit_text(PI_100)).unwrap();
        assert_p(r.p_values[0], 0.500_797_917_887_089);
    }

    #[test]
    fn runs_fixture_value() {
        let r = run_runs(&fixture_megabit()).unwrap();
        assert_eq!(r.statistics[1].1, 499_940.0);
        assert_p(r.p_values[0], 0.904_972_501_180_685);
        assert!(r.passed);
    }

    #[test]
    fn runs_prerequisite_rejects_biased_input() {
        let mut bits = vec![0u8; 100];
        for b in bits.iter_mut().take(20) {
            *b = 1;
        }
        match runs_test(&BitSequence::from_bits(&bits)) {
            Err(NistError::PrerequisiteFailed { test: TestId::Runs, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn longest_run_doc_example_128_bits() {
        let text = "11001100000101010110110001001100\
                    11100000000000100100110101010001\
                    00010011110101101000000011010111\
                    1100110011100110110110001011 0010";
        let r = longest_run_test(&BitSequence::from_bit_text(text)).unwrap();
        assert_p(r.statistics[0].1, 4.882_457_463_200_341);
        assert_p(r.p_values[0], 0.180_609_318_239_712);
    }

    #[test]
    fn longest_run_fixture_value() {
        let r = run_longest_run(&fixture_megabit()).unwrap();
        assert_eq!(r.statistics[1].1, 10_000.0);
        assert_p(r.statistics[0].1, 10.055_677_340_986_9);
        assert_p(r.p_values[0], 0.122_326_823_136_672);
    }

    #[test]
    fn longest_run_tier_selection_follows_length() {
        let short = BitSequence::from_bits(&vec![1; 6272]);
        let r = longest_run_test(&short).unwrap();
        assert_eq!(r.statistics[1].1, 128.0);
        assert!(longest_run_test(&BitSequence::from_bits(&[1; 127])).is_err());
    }
}
