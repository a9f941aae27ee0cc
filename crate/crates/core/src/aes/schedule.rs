//! Key expansion: a cipher key becomes Nr+1 round keys.

use super::sbox::SBOX;
use super::{CipherKey, RoundKeySchedule, ScheduleSource};

/// Round constants for the first byte of each Rcon word; index 0 unused.
const RCON: [u8; 11] = [
    0x00, 0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1b, 0x36,
];

fn sub_word(w: [u8; 4]) -> [u8; 4] {
    [
        SBOX[w[0] as usize],
        SBOX[w[1] as usize],
        SBOX[w[2] as usize],
        SBOX[w[3] as usize],
    ]
}

fn rot_word(w: [u8; 4]) -> [u8; 4] {
    [w[1], w[2], w[3], w[0]]
}

fn xor_words(a: [u8; 4], b: [u8; 4]) -> [u8; 4] {
    [a[0] ^ b[0], a[1] ^ b[1], a[2] ^ b[2], a[3] ^ b[3]]
}

/// Expands `key` into the standard schedule of Nr+1 sixteen-byte round keys.
///
/// Round key 0 is always the first 16 key bytes; each expanded word is a
/// 4-byte column of the round-key grid, so the concatenated words are already
/// in the column-major order the block operations consume.
pub fn key_expansion(key: &CipherKey) -> RoundKeySchedule {
    let nk = key.bytes().len() / 4;
    let nr = key.rounds();
    let total_words = 4 * (nr + 1);

    let mut words: Vec<[u8; 4]> = Vec::with_capacity(total_words);
    for chunk in key.bytes().chunks_exact(4) {
        words.push([chunk[0], chunk[1], chunk[2], chunk[3]]);
    }
    for i in nk..total_words {
        let mut temp = words[i - 1];
        if i % nk == 0 {
            temp = sub_word(rot_word(temp));
            temp[0] ^= RCON[i / nk];
        } else if nk > 6 && i % nk == 4 {
            temp = sub_word(temp);
        }
        words.push(xor_words(words[i - nk], temp));
    }

    let round_keys: Vec<[u8; 16]> = words
        .chunks_exact(4)
        .map(|quad| {
            let mut rk = [0u8; 16];
            for (i, w) in quad.iter().enumerate() {
                rk[4 * i..4 * i + 4].copy_from_slice(w);
            }
            rk
        })
        .collect();

    // key length was validated by CipherKey, so the count is always legal
    RoundKeySchedule::from_round_keys(round_keys, ScheduleSource::Expanded).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(hex_str: &str) -> CipherKey {
        CipherKey::new(hex::decode(hex_str).unwrap()).unwrap()
    }

    fn word_at(schedule: &RoundKeySchedule, i: usize) -> [u8; 4] {
        let rk = schedule.round_keys()[i / 4];
        let mut w = [0u8; 4];
        w.copy_from_slice(&rk[4 * (i % 4)..4 * (i % 4) + 4]);
        w
    }

    #[test]
    fn round_key_zero_is_the_key_prefix() {
        let k = key("2b7e151628aed2a6abf7158809cf4f3c");
        let schedule = key_expansion(&k);
        assert_eq!(&schedule.round_keys()[0][..], k.bytes());
        assert_eq!(schedule.rounds(), 10);
        assert_eq!(schedule.source(), ScheduleSource::Expanded);
    }

    #[test]
    fn walkthrough_key_expansion_words() {
        // 128-bit expansion of 2b7e1516...: words 4..8 and the final word,
        // frozen from an independent word-level expansion
        let schedule = key_expansion(&key("2b7e151628aed2a6abf7158809cf4f3c"));
        assert_eq!(word_at(&schedule, 4), [0xa0, 0xfa, 0xfe, 0x17]);
        assert_eq!(word_at(&schedule, 5), [0x88, 0x54, 0x2c, 0xb1]);
        assert_eq!(word_at(&schedule, 6), [0x23, 0xa3, 0x39, 0x39]);
        assert_eq!(word_at(&schedule, 7), [0x2a, 0x6c, 0x76, 0x05]);
        assert_eq!(word_at(&schedule, 43), [0xb6, 0x63, 0x0c, 0xa6]);
    }

    #[test]
    fn zero_key_expansion_words() {
        // all-zero 128-bit key: w4 = SubWord(RotWord(0))^Rcon1 = 62636363,
        // and w5..w7 each XOR a zero word into w4, so all four words match
        let schedule = key_expansion(&key("00000000000000000000000000000000"));
        for i in 4..8 {
            assert_eq!(word_at(&schedule, i), [0x62, 0x63, 0x63, 0x63]);
        }
    }

    #[test]
    fn schedule_lengths_per_key_size() {
        assert_eq!(key_expansion(&key(&"00".repeat(16))).round_keys().len(), 11);
        assert_eq!(key_expansion(&key(&"00".repeat(24))).round_keys().len(), 13);
        assert_eq!(key_expansion(&key(&"00".repeat(32))).round_keys().len(), 15);
    }
}
