//! Template-occurrence tests: counts of a fixed bit pattern per block,
//! with non-overlapping and overlapping occurrence conventions.

use super::bits::BitSequence;
use super::special::igamc;
use super::{NistError, TestId, TestResult};

/// Default template for the non-overlapping test: eight zeros then a one.
pub const DEFAULT_TEMPLATE: [u8; 9] = [0, 0, 0, 0, 0, 0, 0, 0, 1];
/// Default block count for the non-overlapping test.
pub const NON_OVERLAPPING_BLOCKS: usize = 8;
/// Minimum length so each default block expects at least five matches.
pub const NON_OVERLAPPING_MIN_BITS: usize = NON_OVERLAPPING_BLOCKS * (5 * 512 + 8);

/// Template length for the overlapping test (all ones).
pub const OVERLAPPING_TEMPLATE_BITS: usize = 9;
/// Block length for the overlapping test.
pub const OVERLAPPING_BLOCK_BITS: usize = 1032;
/// Recommended minimum length for the overlapping test.
pub const OVERLAPPING_MIN_BITS: usize = 1_000_000;

/// Occurrence-count classes 0..=4 and ">= 5" for one 1032-bit block,
/// template of nine ones.
const OVERLAPPING_CLASS_PROBS: [f64; 6] = [
    0.364_091, 0.185_659, 0.139_381, 0.100_571, 0.070_432, 0.139_865,
];

fn matches_at(seq: &BitSequence, start: usize, template: &[u8]) -> bool {
    template
        .iter()
        .enumerate()
        .all(|(j, &t)| seq.bit(start + j) == t)
}

/// Splits the sequence into `blocks` equal blocks and counts
/// non-overlapping occurrences of `template` in each (the scan resumes
/// after the end of a match). The counts are chi-squared against the
/// count distribution for an aperiodic template in random bits.
pub fn non_overlapping_template_test(
    seq: &BitSequence,
    template: &[u8],
    blocks: usize,
) -> Result<TestResult, NistError> {
    let m = template.len();
    assert!(m >= 2, "template must be at least 2 bits");
    assert!(template.iter().all(|&b| b <= 1), "template bits must be 0 or 1");
    assert!(blocks >= 1, "need at least one block");
    let n = seq.len();
    let block_bits = n / blocks;
    if block_bits < m {
        return Err(NistError::SequenceTooShort {
            test: TestId::NonOverlappingTemplate,
            needed: blocks * m,
            got: n,
        });
    }
    let positions = (block_bits - m + 1) as f64;
    let two_m = (1u64 << m) as f64;
    let mean = positions / two_m;
    let variance = block_bits as f64 * (1.0 / two_m - (2.0 * m as f64 - 1.0) / (two_m * two_m));
    let mut chi2 = 0.0;
    let mut counts = Vec::with_capacity(blocks);
    for b in 0..blocks {
        let base = b * block_bits;
        let mut w = 0u64;
        let mut i = 0;
        while i + m <= block_bits {
            if matches_at(seq, base + i, template) {
                w += 1;
                i += m;
            } else {
                i += 1;
            }
        }
        counts.push(w);
        chi2 += (w as f64 - mean) * (w as f64 - mean) / variance;
    }
    let p = igamc(blocks as f64 / 2.0, chi2 / 2.0);
    let mut statistics = vec![("chi_squared", chi2), ("mean", mean)];
    if let Some(&max) = counts.iter().max() {
        statistics.push(("max_block_count", max as f64));
    }
    Ok(TestResult::new(
        TestId::NonOverlappingTemplate,
        statistics,
        vec![p],
    ))
}

/// [`non_overlapping_template_test`] with the default nine-bit template
/// and eight blocks.
pub fn run_non_overlapping_template(seq: &BitSequence) -> Result<TestResult, NistError> {
    if seq.len() < NON_OVERLAPPING_MIN_BITS {
        return Err(NistError::SequenceTooShort {
            test: TestId::NonOverlappingTemplate,
            needed: NON_OVERLAPPING_MIN_BITS,
            got: seq.len(),
        });
    }
    non_overlapping_template_test(seq, &DEFAULT_TEMPLATE, NON_OVERLAPPING_BLOCKS)
}

/// Counts overlapping occurrences of the nine-ones template in each
/// 1032-bit block (the scan always advances one position), bins the
/// per-block counts into classes 0..=4 and ">= 5", and chi-squares them
/// against the reference class probabilities. Trailing bits that do not
/// fill a block are discarded.
pub fn overlapping_template_test(seq: &BitSequence) -> Result<TestResult, NistError> {
    let m = OVERLAPPING_TEMPLATE_BITS;
    let block_bits = OVERLAPPING_BLOCK_BITS;
    let n = seq.len();
    let blocks = n / block_bits;
    if blocks == 0 {
        return Err(NistError::SequenceTooShort {
            test: TestId::OverlappingTemplate,
            needed: block_bits,
            got: n,
        });
    }
    let mut class_counts = [0u64; 6];
    for b in 0..blocks {
        let base = b * block_bits;
        let mut w = 0usize;
        for i in 0..=(block_bits - m) {
            if (0..m).all(|j| seq.bit(base + i + j) == 1) {
                w += 1;
            }
        }
        class_counts[w.min(5)] += 1;
    }
    let nf = blocks as f64;
    let mut chi2 = 0.0;
    for (i, &prob) in OVERLAPPING_CLASS_PROBS.iter().enumerate() {
        let expected = nf * prob;
        let diff = class_counts[i] as f64 - expected;
        chi2 += diff * diff / expected;
    }
    let p = igamc(
        (OVERLAPPING_CLASS_PROBS.len() as f64 - 1.0) / 2.0,
        chi2 / 2.0,
    );
    Ok(TestResult::new(
        TestId::OverlappingTemplate,
        vec![("chi_squared", chi2), ("blocks", nf)],
        vec![p],
    ))
}

/// [`overlapping_template_test`] gated to the recommended minimum length.
pub fn run_overlapping_template(seq: &BitSequence) -> Result<TestResult, NistError> {
    if seq.len() < OVERLAPPING_MIN_BITS {
        return Err(NistError::SequenceTooShort {
            test: TestId::OverlappingTemplate,
            needed: OVERLAPPING_MIN_BITS,
            got: seq.len(),
        });
    }
    overlapping_template_test(seq)
}
