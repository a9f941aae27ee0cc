//! Linear-dependence test: ranks of 32x32 bit matrices cut from the
//! sequence, compared with the rank distribution of uniform random
//! matrices over GF(2).

use super::bits::BitSequence;
use super::frequency::gate;
use super::special::igamc;
use super::{NistError, TestId, TestResult};

/// Matrix side length; each matrix consumes 1024 bits.
pub const MATRIX_DIM: usize = 32;
/// Recommended minimum: 38 whole matrices.
pub const RANK_MIN_BITS: usize = 38 * MATRIX_DIM * MATRIX_DIM;

/// Probability that a uniform 32x32 GF(2) matrix has full rank,
const P_FULL: f64 = 0.288_788_095_153_841;
/// rank 31,
const P_MINUS_ONE: f64 = 0.577_576_190_173_205;
/// or rank 30 and below.
const P_REST: f64 = 0.133_635_714_672_954;

/// Rank of a 32x32 bit matrix, one u32 per row. Consumes the rows.
fn binary_rank(rows: &mut [u32; MATRIX_DIM]) -> usize {
    let mut rank = 0;
    for col in 0..MATRIX_DIM {
        let mask = 1u32 << (MATRIX_DIM - 1 - col);
        if let Some(pivot) = (rank..MATRIX_DIM).find(|&r| rows[r] & mask != 0) {
            rows.swap(rank, pivot);
            for r in 0..MATRIX_DIM {
                if r != rank && rows[r] & mask != 0 {
                    rows[r] ^= rows[rank];
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Splits the sequence into 1024-bit chunks, fills one matrix per chunk
/// row-major, and chi-squares the rank classes {32, 31, <=30}. Trailing
/// bits that do not fill a matrix are discarded.
pub fn rank_test(seq: &BitSequence) -> Result<TestResult, NistError> {
    let bits_per_matrix = MATRIX_DIM * MATRIX_DIM;
    let n = seq.len();
    let matrices = n / bits_per_matrix;
    if matrices == 0 {
        return Err(NistError::SequenceTooShort {
            test: TestId::Rank,
            needed: bits_per_matrix,
            got: n,
        });
    }
    let mut full = 0u64;
    let mut minus_one = 0u64;
    for m in 0..matrices {
        let base = m * bits_per_matrix;
        let mut rows = [0u32; MATRIX_DIM];
        for (r, row) in rows.iter_mut().enumerate() {
            for c in 0..MATRIX_DIM {
                *row = (*row << 1) | u32::from(seq.bit(base + r * MATRIX_DIM + c));
            }
        }
        match binary_rank(&mut rows) {
            32 => full += 1,
            31 => minus_one += 1,
            _ => {}
        }
    }
    let nf = matrices as f64;
    let rest = matrices - full as usize - minus_one as usize;
    let mut chi2 = 0.0;
    for (observed, probability) in [
        (full as f64, P_FULL),
        (minus_one as f64, P_MINUS_ONE),
        (rest as f64, P_REST),
    ] {
        let expected = nf * probability;
        chi2 += (observed - expected) * (observed - expected) / expected;
    }
    let p = igamc(1.0, chi2 / 2.0);
    Ok(TestResult::new(
        TestId::Rank,
        vec![
            ("chi_squared", chi2),
            ("matrices", nf),
            ("full_rank", full as f64),
            ("rank_minus_one", minus_one as f64),
        ],
        vec![p],
    ))
}

/// [`rank_test`] gated to the recommended minimum number of matrices.
pub fn run_rank(seq: &BitSequence) -> Result<TestResult, NistError> {
    gate(TestId::Rank, seq.len(), RANK_MIN_BITS)?;
    rank_test(seq)
}

#[cfg(test)]
mod tests {
    use super::super::bits::fixture_megabit;
    use super::super::tests::assert_p;
    use super::*;

    #[test]
    fn rank_of_identity_is_full() {
        let mut rows = [0u32; 32];
        for (i, row) in rows.iter_mut().enumerate() {
            *row = 1 << (31 - i);
        }
        assert_eq!(binary_rank(&mut rows), 32);
    }

    #[test]
    fn rank_counts_independent_rows_only() {
        let mut rows = [0u32; 32];
        assert_eq!(binary_rank(&mut rows), 0);
        let mut rows = [0xFFFF_FFFFu32; 32];
        assert_eq!(binary_rank(&mut rows), 1);
        // two distinct rows, all others copies of their sum
        let mut rows = [0b11u32; 32];
        rows[0] = 0b01;
        rows[1] = 0b10;
        assert_eq!(binary_rank(&mut rows), 2);
    }

    #[test]
    fn rank_class_probabilities_sum_to_one() {
        assert!((P_FULL + P_MINUS_ONE + P_REST - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rank_fixture_value() {
        let r = run_rank(&fixture_megabit()).unwrap();
        assert_eq!(r.statistics[1].1, 976.0);
        assert_eq!(r.statistics[2].1, 264.0);
        assert_eq!(r.statistics[3].1, 585.0);
        assert_p(r.statistics[0].1, 2.025_207_628_649_23);
        assert_p(r.p_values[0], 0.363_271_854_579_143);
    }

    #[test]
    fn rank_rejects_constant_input() {
        let r = rank_test(&BitSequence::from_bytes(&vec![0xAA; 128 * 40])).unwrap();
        assert!(!r.passed);
    }

    #[test]
    fn rank_gate_needs_38_matrices() {
        match run_rank(&BitSequence::from_bytes(&[0; 128])) {
            Err(NistError::SequenceTooShort { needed, .. }) => assert_eq!(needed, 38_912),
            other => panic!("unexpected {other:?}"),
        }
    }
}
