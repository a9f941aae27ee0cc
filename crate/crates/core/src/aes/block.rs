//! The block transformations: one 16-byte block in, one out.
//!
//! The state is kept as a flat `[u8; 16]` in column-major order
//! (index = 4*column + row), which is exactly the byte order of the input
//! block and of each expanded round key, so loading and key addition are
//! plain array operations.

use super::sbox::{INV_SBOX, SBOX};
use super::RoundKeySchedule;

/// Multiplication in GF(2^8) modulo x^8 + x^4 + x^3 + x + 1.
fn gmul(mut a: u8, mut b: u8) -> u8 {
    let mut r = 0u8;
    for _ in 0..8 {
        if b & 1 != 0 {
            r ^= a;
        }
        let carry = a & 0x80 != 0;
        a <<= 1;
        if carry {
            a ^= 0x1b;
        }
        b >>= 1;
    }
    r
}

fn add_round_key(state: &mut [u8; 16], rk: &[u8; 16]) {
    for (s, k) in state.iter_mut().zip(rk.iter()) {
        *s ^= k;
    }
}

fn sub_bytes(state: &mut [u8; 16]) {
    for s in state.iter_mut() {
        *s = SBOX[*s as usize];
    }
}

fn inv_sub_bytes(state: &mut [u8; 16]) {
    for s in state.iter_mut() {
        *s = INV_SBOX[*s as usize];
    }
}

/// Row r rotates left by r positions; row bytes live at indices r, r+4, r+8, r+12.
fn shift_rows(state: &mut [u8; 16]) {
    let old = *state;
    for r in 1..4 {
        for c in 0..4 {
            state[4 * c + r] = old[4 * ((c + r) % 4) + r];
        }
    }
}

fn inv_shift_rows(state: &mut [u8; 16]) {
    let old = *state;
    for r in 1..4 {
        for c in 0..4 {
            state[4 * ((c + r) % 4) + r] = old[4 * c + r];
        }
    }
}

fn mix_columns(state: &mut [u8; 16]) {
    for c in 0..4 {
        let col = [state[4 * c], state[4 * c + 1], state[4 * c + 2], state[4 * c + 3]];
        state[4 * c] = gmul(col[0], 2) ^ gmul(col[1], 3) ^ col[2] ^ col[3];
        state[4 * c + 1] = col[0] ^ gmul(col[1], 2) ^ gmul(col[2], 3) ^ col[3];
        state[4 * c + 2] = col[0] ^ col[1] ^ gmul(col[2], 2) ^ gmul(col[3], 3);
        state[4 * c + 3] = gmul(col[0], 3) ^ col[1] ^ col[2] ^ gmul(col[3], 2);
    }
}

fn inv_mix_columns(state: &mut [u8; 16]) {
    for c in 0..4 {
        let col = [state[4 * c], state[4 * c + 1], state[4 * c + 2], state[4 * c + 3]];
        state[4 * c] = gmul(col[0], 14) ^ gmul(col[1], 11) ^ gmul(col[2], 13) ^ gmul(col[3], 9);
        state[4 * c + 1] = gmul(col[0], 9) ^ gmul(col[1], 14) ^ gmul(col[2], 11) ^ gmul(col[3], 13);
        state[4 * c + 2] = gmul(col[0], 13) ^ gmul(col[1], 9) ^ gmul(col[2], 14) ^ gmul(col[3], 11);
        state[4 * c + 3] = gmul(col[0], 11) ^ gmul(col[1], 13) ^ gmul(col[2], 9) ^ gmul(col[3], 14);
    }
}

/// Encrypts one block under the given schedule. Rounds 1..Nr-1 apply
/// SubBytes, ShiftRows, MixColumns, AddRoundKey; the final round omits
/// MixColumns. Bijective for a fixed schedule.
pub fn encrypt_block(block: &[u8; 16], schedule: &RoundKeySchedule) -> [u8; 16] {
    let rks = schedule.round_keys();
    let nr = schedule.rounds();
    let mut state = *block;

    add_round_key(&mut state, &rks[0]);
    for round in 1..nr {
        sub_bytes(&mut state);
        shift_rows(&mut state);
        mix_columns(&mut state);
        add_round_key(&mut state, &rks[round]);
    }
    sub_bytes(&mut state);
    shift_rows(&mut state);
    add_round_key(&mut state, &rks[nr]);

    state
}

/// Exact inverse of [`encrypt_block`]: inverse transformations, round keys
/// in reverse order.
pub fn decrypt_block(block: &[u8; 16], schedule: &RoundKeySchedule) -> [u8; 16] {
    let rks = schedule.round_keys();
    let nr = schedule.rounds();
    let mut state = *block;

    add_round_key(&mut state, &rks[nr]);
    inv_shift_rows(&mut state);
    inv_sub_bytes(&mut state);
    for round in (1..nr).rev() {
        add_round_key(&mut state, &rks[round]);
        inv_mix_columns(&mut state);
        inv_shift_rows(&mut state);
        inv_sub_bytes(&mut state);
    }
    add_round_key(&mut state, &rks[0]);

    state
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aes::{key_expansion, CipherKey};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn schedule_for(key_hex: &str) -> RoundKeySchedule {
        key_expansion(&CipherKey::new(hex::decode(key_hex).unwrap()).unwrap())
    }

    fn block(hex_str: &str) -> [u8; 16] {
        let v = hex::decode(hex_str).unwrap();
        let mut b = [0u8; 16];
        b.copy_from_slice(&v);
        b
    }

    const PLAIN: &str = "00112233445566778899aabbccddeeff";

    #[test]
    fn known_answer_128() {
        let s = schedule_for("000102030405060708090a0b0c0d0e0f");
        let c = encrypt_block(&block(PLAIN), &s);
        assert_eq!(hex::encode(c), "69c4e0d86a7b0430d8cdb78070b4c55a");
        assert_eq!(decrypt_block(&c, &s), block(PLAIN));
    }

    #[test]
    fn known_answer_192() {
        let s = schedule_for("000102030405060708090a0b0c0d0e0f1011121314151617");
        let c = encrypt_block(&block(PLAIN), &s);
        assert_eq!(hex::encode(c), "dda97ca4864cdfe06eaf70a0ec0d7191");
        assert_eq!(decrypt_block(&c, &s), block(PLAIN));
    }

    #[test]
    fn known_answer_256() {
        let s = schedule_for("000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f");
        let c = encrypt_block(&block(PLAIN), &s);
        assert_eq!(hex::encode(c), "8ea2b7ca516745bfeafc49904b496089");
        assert_eq!(decrypt_block(&c, &s), block(PLAIN));
    }

    #[test]
    fn zero_key_zero_block() {
        let s = schedule_for("00000000000000000000000000000000");
        let c = encrypt_block(&[0u8; 16], &s);
        assert_eq!(hex::encode(c), "66e94bd4ef8a2c3b884cfa59ca342b2e");
        assert_eq!(decrypt_block(&c, &s), [0u8; 16]);
    }

    #[test]
    fn round_trip_random_blocks_all_key_sizes() {
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        for key_len in [16usize, 24, 32] {
            let mut key = vec![0u8; key_len];
            rng.fill(&mut key[..]);
            let s = key_expansion(&CipherKey::new(key).unwrap());
            for _ in 0..200 {
                let mut b = [0u8; 16];
                rng.fill(&mut b);
                assert_eq!(decrypt_block(&encrypt_block(&b, &s), &s), b);
            }
        }
    }

    #[test]
    fn gmul_spot_checks() {
        // 0x57 * 0x13 = 0xfe is the classic worked multiplication
        assert_eq!(gmul(0x57, 0x13), 0xfe);
        assert_eq!(gmul(0x57, 0x02), 0xae);
        assert_eq!(gmul(0x80, 0x02), 0x1b);
        for a in 0u8..=255 {
            assert_eq!(gmul(a, 1), a);
            assert_eq!(gmul(a, 0), 0);
        }
    }

    #[test]
    fn shift_rows_inverts() {
        let mut s: [u8; 16] = core::array::from_fn(|i| i as u8);
        let orig = s;
        shift_rows(&mut s);
        // row 0 untouched, row 1 rotated: state[1] was column 1's row-1 byte (index 5)
        assert_eq!(s[0], 0);
        assert_eq!(s[1], 5);
        inv_shift_rows(&mut s);
        assert_eq!(s, orig);
    }

    #[test]
    fn mix_columns_inverts() {
        let mut s: [u8; 16] = core::array::from_fn(|i| (i as u8).wrapping_mul(17).wrapping_add(3));
        let orig = s;
        mix_columns(&mut s);
        assert_ne!(s, orig);
        inv_mix_columns(&mut s);
        assert_eq!(s, orig);
    }

    #[test]
    fn single_plaintext_bit_flip_avalanches() {
        // mean ciphertext Hamming distance for 1-bit plaintext changes
        // should sit near 64 of 128 bits
        let s = schedule_for("000102030405060708090a0b0c0d0e0f");
        let mut rng = ChaCha12Rng::seed_from_u64(2);
        let mut total = 0u64;
        let trials = 1000;
        for _ in 0..trials {
            let mut b = [0u8; 16];
            rng.fill(&mut b);
            let c0 = encrypt_block(&b, &s);
            let bit = rng.gen_range(0..128);
            b[bit / 8] ^= 1 << (bit % 8);
            let c1 = encrypt_block(&b, &s);
            total += c0
                .iter()
                .zip(c1.iter())
                .map(|(x, y)| (x ^ y).count_ones() as u64)
                .sum::<u64>();
        }
        let mean = total as f64 / trials as f64;
        assert!((56.0..=72.0).contains(&mean), "avalanche mean {mean}");
    }
}
