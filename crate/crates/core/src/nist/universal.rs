//! Compressibility test: mean log-distance between repeats of L-bit
//! blocks, compared with its expectation for random bits.

use super::bits::BitSequence;
use super::special::erfc;
use super::{NistError, TestId, TestResult};

/// Smallest length the default parameter table covers (L = 6).
pub const UNIVERSAL_MIN_BITS: usize = 387_840;

/// Expected statistic value indexed by block length L (index 0 unused).
const EXPECTED: [f64; 17] = [
    0.0,
    0.732_649_48,
    1.537_438_3,
    2.401_606_81,
    3.311_224_72,
    4.253_426_59,
    5.217_705_2,
    6.196_250_7,
    7.183_665_6,
    8.176_424_8,
    9.172_324_3,
    10.170_032,
    11.168_765,
    12.168_070,
    13.167_693,
    14.167_488,
    15.167_379,
];

/// Statistic variance indexed by block length L (index 0 unused).
const VARIANCE: [f64; 17] = [
    0.0, 0.690, 1.338, 1.901, 2.358, 2.705, 2.954, 3.125, 3.238, 3.311, 3.356, 3.384, 3.401,
    3.410, 3.416, 3.419, 3.421,
];

/// Smallest sequence length for each block length L, indices 6..=16.
/// Each bound provides ten initialization blocks per pattern plus a test
/// segment long enough for the variance model.
const LENGTH_FLOOR: [(usize, usize); 11] = [
    (6, 387_840),
    (7, 904_960),
    (8, 2_068_480),
    (9, 4_654_080),
    (10, 10_342_400),
    (11, 22_753_280),
    (12, 49_643_520),
    (13, 107_560_960),
    (14, 231_669_760),
    (15, 496_435_200),
    (16, 1_059_061_760),
];

/// Mean log2 gap between repeats of L-bit blocks.
///
/// The first `init_blocks` blocks prime a last-seen table; the remaining
/// blocks contribute log2 of the distance to the previous occurrence of
/// their pattern. A pattern never seen before scores the distance from
/// position zero.
pub fn universal_test(
    seq: &BitSequence,
    block_bits: usize,
    init_blocks: usize,
) -> Result<TestResult, NistError> {
    assert!(
        (1..=16).contains(&block_bits),
        "block length {block_bits} outside 1..=16"
    );
    assert!(init_blocks >= 1, "need at least one initialization block");
    let n = seq.len();
    let total_blocks = n / block_bits;
    if total_blocks <= init_blocks {
        return Err(NistError::SequenceTooShort {
            test: TestId::Universal,
            needed: (init_blocks + 1) * block_bits,
            got: n,
        });
    }
    let test_blocks = total_blocks - init_blocks;
    let mut last_seen = vec![0usize; 1 << block_bits];
    let block_value = |b: usize| -> usize {
        let mut v = 0usize;
        for j in 0..block_bits {
            v = (v << 1) | seq.bit(b * block_bits + j) as usize;
        }
        v
    };
    for b in 1..=init_blocks {
        last_seen[block_value(b - 1)] = b;
    }
    let mut sum = 0.0;
    for b in init_blocks + 1..=total_blocks {
        let v = block_value(b - 1);
        sum += ((b - last_seen[v]) as f64).log2();
        last_seen[v] = b;
    }
    let f_n = sum / test_blocks as f64;
    let expected = EXPECTED[block_bits];
    let variance = VARIANCE[block_bits];
    let l = block_bits as f64;
    let k = test_blocks as f64;
    // finite-K correction to the asymptotic standard deviation
    let c = 0.7 - 0.8 / l + (4.0 + 32.0 / l) * k.powf(-3.0 / l) / 15.0;
    let sigma = c * (variance / k).sqrt();
    let p = erfc((f_n - expected).abs() / (std::f64::consts::SQRT_2 * sigma));
    Ok(TestResult::new(
        TestId::Universal,
        vec![
            ("f_n", f_n),
            ("block_bits", l),
            ("init_blocks", init_blocks as f64),
            ("test_blocks", k),
        ],
        vec![p],
    ))
}

/// [`universal_test`] with the block length the sequence can afford
/// (largest L whose length floor is met) and ten initialization blocks
/// per pattern.
pub fn run_universal(seq: &BitSequence) -> Result<TestResult, NistError> {
    let n = seq.len();
    let block_bits = LENGTH_FLOOR
        .iter()
        .rev()
        .find(|&&(_, floor)| n >= floor)
        .map(|&(l, _)| l)
        .ok_or(NistError::SequenceTooShort {
            test: TestId::Universal,
            needed: UNIVERSAL_MIN_BITS,
            got: n,
        })?;
    universal_test(seq, block_bits, 10 << block_bits)
}
