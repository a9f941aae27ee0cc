//! Packed bit sequence the statistical tests operate on.

/// An immutable sequence of bits packed MSB-first into bytes.
///
/// Bit `i` lives in byte `i / 8` at position `7 - i % 8`, so a sequence
/// built from bytes reads each byte high bit first. Unused trailing bits
/// in the last byte are always zero, which lets [`ones`](Self::ones)
/// popcount whole bytes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitSequence {
    bytes: Vec<u8>,
    bit_len: usize,
}

impl BitSequence {
    /// Wraps whole bytes; the sequence length is `8 * bytes.len()`.
    pub fn from_bytes(bytes: &[u8]) -> Self {
        BitSequence {
            bytes: bytes.to_vec(),
            bit_len: bytes.len() * 8,
        }
    }

    /// Packs a slice of bit values, each 0 or 1.
    ///
    /// Panics if any element is neither 0 nor 1.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut bytes = vec![0u8; (bits.len() + 7) / 8];
        for (i, &b) in bits.iter().enumerate() {
            assert!(b <= 1, "bit value {b} at index {i} is not 0 or 1");
            bytes[i / 8] |= b << (7 - i % 8);
        }
        BitSequence {
            bytes,
            bit_len: bits.len(),
        }
    }

    /// Parses a string of '0' and '1' characters, ignoring ASCII whitespace.
    ///
    /// Panics on any other character. Intended for short literal sequences
    /// in tests and examples.
    pub fn from_bit_text(text: &str) -> Self {
        let bits: Vec<u8> = text
            .chars()
            .filter(|c| !c.is_ascii_whitespace())
            .map(|c| match c {
                '0' => 0u8,
                '1' => 1u8,
                other => panic!("character {other:?} is not a bit"),
            })
            .collect();
        Self::from_bits(&bits)
    }

    /// Number of bits in the sequence.
    pub fn len(&self) -> usize {
        self.bit_len
    }

    pub fn is_empty(&self) -> bool {
        self.bit_len == 0
    }

    /// The bit at position `i`, as 0 or 1. Panics if out of range.
    pub fn bit(&self, i: usize) -> u8 {
        assert!(i < self.bit_len, "bit index {i} out of range {}", self.bit_len);
        (self.bytes[i / 8] >> (7 - i % 8)) & 1
    }

    /// Count of one bits in the whole sequence.
    pub fn ones(&self) -> usize {
        self.bytes.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// The backing bytes. Trailing bits beyond [`len`](Self::len) are zero.
    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    /// A copy of the first `bit_len` bits. Panics when asked for more
    /// bits than the sequence holds.
    pub fn truncated(&self, bit_len: usize) -> BitSequence {
        assert!(
            bit_len <= self.bit_len,
            "cannot truncate {} bits to {bit_len}",
            self.bit_len
        );
        let mut bytes = self.bytes[..(bit_len + 7) / 8].to_vec();
        if bit_len % 8 != 0 {
            // keep the tail-bits-are-zero invariant
            let last = bytes.len() - 1;
            bytes[last] &= 0xFFu8 << (8 - bit_len % 8);
        }
        BitSequence { bytes, bit_len }
    }

    /// Unpacks to one byte per bit, each 0 or 1.
    pub fn unpack(&self) -> Vec<u8> {
        (0..self.bit_len).map(|i| self.bit(i)).collect()
    }
}

/// One million deterministic bits shared by the frozen expected values in
/// this module's tests. Derived from a fixed splitmix64 stream so the
/// fixture never depends on any other crate code changing.
#[cfg(test)]
pub(crate) fn fixture_megabit() -> BitSequence {
    let mut state: u64 = 20_260_819;
    let mut bytes = Vec::with_capacity(125_000);
    while bytes.len() < 125_000 {
        bytes.extend_from_slice(&crate::rng::splitmix64(&mut state).to_be_bytes());
    }
    assert_eq!(hex::encode(&bytes[..16]), "fbef8d8855dc9e846d2e73b78af37120");
    assert_eq!(hex::encode(&bytes[125_000 - 8..]), "f82864df9c5748e4");
    BitSequence::from_bytes(&bytes)
}
