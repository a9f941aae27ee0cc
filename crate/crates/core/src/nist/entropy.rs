//! Pattern-frequency tests over all m-bit windows (with wraparound):
//! approximate entropy and the serial test. Both compare the observed
//! m-bit pattern distribution against uniform, differing in how they
//! combine adjacent window widths.

use super::bits::BitSequence;
use super::frequency::gate;
use super::special::igamc;
use super::{NistError, TestId, TestResult};

/// Default window width for approximate entropy.
pub const APPROXIMATE_ENTROPY_BLOCK_BITS: usize = 10;
/// Length floor keeping the default width well under log2(n) - 5.
pub const APPROXIMATE_ENTROPY_MIN_BITS: usize = 65_536;

/// Default window width for the serial test.
pub const SERIAL_BLOCK_BITS: usize = 16;
/// Length floor keeping the default width well under log2(n) - 2.
pub const SERIAL_MIN_BITS: usize = 524_288;

/// Occurrence counts of every `width`-bit pattern over the circular
/// sequence; every one of the n window positions contributes.
fn pattern_counts(bits: &[u8], width: usize) -> Vec<u32> {
    let n = bits.len();
    let mask = (1usize << width) - 1;
    let mut counts = vec![0u32; 1 << width];
    let mut window = 0usize;
    for &b in bits.iter().take(width - 1) {
        window = (window << 1) | b as usize;
    }
    for i in 0..n {
        let next = bits[(i + width - 1) % n] as usize;
        window = ((window << 1) | next) & mask;
        counts[window] += 1;
    }
    counts
}

/// Sum over patterns of (count/n) ln(count/n); zero-count patterns
/// contribute nothing.
fn phi(bits: &[u8], width: usize) -> f64 {
    let n = bits.len() as f64;
    pattern_counts(bits, width)
        .into_iter()
        .filter(|&c| c > 0)
        .map(|c| {
            let frac = f64::from(c) / n;
            frac * frac.ln()
        })
        .sum()
}

/// (2^width / n) * sum of squared counts, minus n. Zero when every
/// pattern is equally common.
fn psi_squared(bits: &[u8], width: usize) -> f64 {
    if width == 0 {
        return 0.0;
    }
    let n = bits.len() as f64;
    let sum_sq: f64 = pattern_counts(bits, width)
        .into_iter()
        .map(|c| f64::from(c) * f64::from(c))
        .sum();
    (1u64 << width) as f64 / n * sum_sq - n
}

/// Approximate entropy: phi(m) - phi(m+1), which for random bits
/// approaches ln 2. The statistic 2n(ln 2 - ApEn) is chi-squared with
/// 2^m degrees of freedom.
pub fn approximate_entropy_test(
    seq: &BitSequence,
    block_bits: usize,
) -> Result<TestResult, NistError> {
    assert!(block_bits >= 1, "window width must be at least 1");
    let n = seq.len();
    if n < block_bits + 1 {
        return Err(NistError::SequenceTooShort {
            test: TestId::ApproximateEntropy,
            needed: block_bits + 1,
            got: n,
        });
    }
    let bits = seq.unpack();
    let ap_en = phi(&bits, block_bits) - phi(&bits, block_bits + 1);
    let chi2 = 2.0 * n as f64 * (std::f64::consts::LN_2 - ap_en);
    let p = igamc((1u64 << (block_bits - 1)) as f64, chi2 / 2.0);
    Ok(TestResult::new(
        TestId::ApproximateEntropy,
        vec![("ap_en", ap_en), ("chi_squared", chi2)],
        vec![p],
    ))
}

/// [`approximate_entropy_test`] with the default width, gated so the
/// width stays in the range where the chi-squared approximation holds.
pub fn run_approximate_entropy(seq: &BitSequence) -> Result<TestResult, NistError> {
    gate(
        TestId::ApproximateEntropy,
        seq.len(),
        APPROXIMATE_ENTROPY_MIN_BITS,
    )?;
    approximate_entropy_test(seq, APPROXIMATE_ENTROPY_BLOCK_BITS)
}

/// Serial test: first and second differences of psi-squared across
/// window widths m, m-1, m-2, each chi-squared distributed for random
/// bits. Produces two p-values; both must clear the threshold.
pub fn serial_test(seq: &BitSequence, block_bits: usize) -> Result<TestResult, NistError> {
    assert!(block_bits >= 2, "window width must be at least 2");
    let n = seq.len();
    if n < block_bits + 1 {
        return Err(NistError::SequenceTooShort {
            test: TestId::Serial,
            needed: block_bits + 1,
            got: n,
        });
    }
    let bits = seq.unpack();
    let psi_m = psi_squared(&bits, block_bits);
    let psi_m1 = psi_squared(&bits, block_bits - 1);
    let psi_m2 = psi_squared(&bits, block_bits - 2);
    let del1 = psi_m - psi_m1;
    let del2 = psi_m - 2.0 * psi_m1 + psi_m2;
    // degrees of freedom 2^(m-2) and 2^(m-3); the latter is fractional
    // only at the minimum width m = 2
    let p1 = igamc(2f64.powi(block_bits as i32 - 2), del1 / 2.0);
    let p2 = igamc(2f64.powi(block_bits as i32 - 3), del2 / 2.0);
    Ok(TestResult::new(
        TestId::Serial,
        vec![("psi2_m", psi_m), ("del1", del1), ("del2", del2)],
        vec![p1, p2],
    ))
}

/// [`serial_test`] with the default width, gated so the width stays in
/// the range where the chi-squared approximation holds.
pub fn run_serial(seq: &BitSequence) -> Result<TestResult, NistError> {
    gate(TestId::Serial, seq.len(), SERIAL_MIN_BITS)?;
    serial_test(seq, SERIAL_BLOCK_BITS)
}

#[cfg(test)]
mod tests {
    use super::super::bits::fixture_megabit;
    use super::super::tests::{assert_p, assert_p_within, PI_100};
    use super::*;

    #[test]
    fn pattern_counts_wrap_around() {
        // 011 circular: windows 01, 11, and the wrapped .0 giving 10
        let counts = pattern_counts(&[0, 1, 1], 2);
        assert_eq!(counts, vec![0, 1, 1, 1]);
        let counts = pattern_counts(&[1, 0, 0, 1], 1);
        assert_eq!(counts, vec![2, 2]);
    }

    #[test]
    fn approximate_entropy_short_example() {
        let r = approximate_entropy_test(&BitSequence::from_bit_text("0100110101"), 3).unwrap();
        assert_p(r.statistics[0].1, 0.190_954_250_488_444);
        assert_p(r.p_values[0], 0.261_961_104_881_665);
    }

    #[test]
    fn approximate_entropy_on_pi_bits() {
        let r = approximate_entropy_test(&BitSequence::from_bit_text(PI_100), 2).unwrap();
        assert_p(r.p_values[0], 0.235_300_745_858_983);
    }

    #[test]
    fn approximate_entropy_fixture_value() {
        let r = run_approximate_entropy(&fixture_megabit()).unwrap();
        assert_p(r.statistics[1].1, 1_087.479_285_141_9);
        assert_p_within(r.p_values[0], 0.082_357_943_904_006_6, 1e-7);
        assert!(r.passed);
    }

    #[test]
    fn serial_short_example() {
        let r = serial_test(&BitSequence::from_bit_text("0011011101"), 3).unwrap();
        assert_p(r.statistics[1].1, 1.6);
        assert_p(r.statistics[2].1, 0.8);
        assert_p(r.p_values[0], 0.808_792_135_410_999);
        assert_p(r.p_values[1], 0.670_320_046_035_639);
    }

    #[test]
    fn serial_fixture_value() {
        let r = run_serial(&fixture_megabit()).unwrap();
        assert_p(r.statistics[0].1, 65_603.694_592);
        assert_p(r.statistics[1].1, 32_960.806_912);
        assert_p(r.statistics[2].1, 16_633.921_536);
        assert_p(r.p_values[0], 0.225_339_725_046_888);
        assert_p(r.p_values[1], 0.084_201_348_896_269_1);
    }

    #[test]
    fn entropy_tests_reject_periodic_input() {
        let bits: Vec<u8> = (0..70_000).map(|i| (i % 2) as u8).collect();
        let seq = BitSequence::from_bits(&bits);
        assert!(!run_approximate_entropy(&seq).unwrap().passed);
        let bits: Vec<u8> = (0..600_000).map(|i| (i % 3 == 0) as u8).collect();
        assert!(!run_serial(&BitSequence::from_bits(&bits)).unwrap().passed);
    }
}
