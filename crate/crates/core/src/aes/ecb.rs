//! ECB mode with PKCS#7 padding.
//!
//! The baseline the quantum-keyed mode is measured against. ECB leaks
//! equal-block structure by design; that leak is the comparison point, so
//! the usual "never use ECB" advice is beside the point here (and the
//! whole crate is simulation-grade anyway).

use super::{
    decrypt_block, encrypt_block, key_expansion, AesError, CipherKey, BLOCK_BYTES,
};

/// Appends k bytes of value k, k in 1..=16. Always grows the input, so an
/// exact multiple of 16 gains a full padding block.
pub fn pkcs7_pad(data: &[u8]) -> Vec<u8> {
    let k = BLOCK_BYTES - data.len() % BLOCK_BYTES;
    let mut out = Vec::with_capacity(data.len() + k);
    out.extend_from_slice(data);
    out.extend(std::iter::repeat(k as u8).take(k));
    out
}

/// Strips PKCS#7 padding, rejecting anything malformed.
pub fn pkcs7_unpad(data: &[u8]) -> Result<Vec<u8>, AesError> {
    if data.is_empty() || data.len() % BLOCK_BYTES != 0 {
        return Err(AesError::BadPadding);
    }
    let k = *data.last().unwrap() as usize;
    if k == 0 || k > BLOCK_BYTES || k > data.len() {
        return Err(AesError::BadPadding);
    }
    if data[data.len() - k..].iter().any(|&b| b as usize != k) {
        return Err(AesError::BadPadding);
    }
    Ok(data[..data.len() - k].to_vec())
}

/// Pads and encrypts under a single expanded key.
pub fn ecb_encrypt(plaintext: &[u8], key: &CipherKey) -> Vec<u8> {
    let schedule = key_expansion(key);
    let padded = pkcs7_pad(plaintext);
    let mut out = Vec::with_capacity(padded.len());
    for chunk in padded.chunks_exact(BLOCK_BYTES) {
        let mut block = [0u8; 16];
        block.copy_from_slice(chunk);
        out.extend_from_slice(&encrypt_block(&block, &schedule));
    }
    out
}

/// Inverse of [`ecb_encrypt`] including padding removal.
pub fn ecb_decrypt(ciphertext: &[u8], key: &CipherKey) -> Result<Vec<u8>, AesError> {
    if ciphertext.is_empty() || ciphertext.len() % BLOCK_BYTES != 0 {
        return Err(AesError::CiphertextNotBlockAligned(ciphertext.len()));
    }
    let schedule = key_expansion(key);
    let mut out = Vec::with_capacity(ciphertext.len());
    for chunk in ciphertext.chunks_exact(BLOCK_BYTES) {
        let mut block = [0u8; 16];
        block.copy_from_slice(chunk);
        out.extend_from_slice(&decrypt_block(&block, &schedule));
    }
    pkcs7_unpad(&out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;

    fn key128() -> CipherKey {
        CipherKey::new(hex::decode("000102030405060708090a0b0c0d0e0f").unwrap()).unwrap()
    }

    #[test]
    fn padding_lengths() {
        assert_eq!(pkcs7_pad(b"").len(), 16);
        assert_eq!(pkcs7_pad(b"").as_slice(), &[16u8; 16]);
        assert_eq!(pkcs7_pad(&[0; 15]).last(), Some(&1u8));
        assert_eq!(pkcs7_pad(&[0; 16]).len(), 32);
        assert_eq!(pkcs7_pad(&[0; 17]).last(), Some(&15u8));
    }

    #[test]
    fn unpad_round_trips() {
        for n in 0..64 {
            let data: Vec<u8> = (0..n).map(|i| i as u8).collect();
            assert_eq!(pkcs7_unpad(&pkcs7_pad(&data)).unwrap(), data);
        }
    }

    #[test]
    fn unpad_rejects_malformed() {
        assert_eq!(pkcs7_unpad(&[]), Err(AesError::BadPadding));
        // value 0 and value > 16 are both illegal
        let mut b = [5u8; 16];
        b[15] = 0;
        assert_eq!(pkcs7_unpad(&b), Err(AesError::BadPadding));
        b[15] = 17;
        assert_eq!(pkcs7_unpad(&b), Err(AesError::BadPadding));
        // inconsistent filler bytes
        b[15] = 3;
        b[14] = 3;
        b[13] = 2;
        assert_eq!(pkcs7_unpad(&b), Err(AesError::BadPadding));
    }

    #[test]
    fn ecb_round_trip_various_lengths() {
        let key = key128();
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for n in [0usize, 1, 15, 16, 17, 31, 32, 1000] {
            let mut data = vec![0u8; n];
            rng.fill(&mut data[..]);
            let ct = ecb_encrypt(&data, &key);
            assert_eq!(ct.len() % 16, 0);
            assert_eq!(ct.len(), (n / 16 + 1) * 16);
            assert_eq!(ecb_decrypt(&ct, &key).unwrap(), data);
        }
    }

    #[test]
    fn ecb_leaks_equal_blocks() {
        // two identical plaintext blocks give two identical ciphertext
        // blocks; this is the structural leak the per-block keying removes
        let key = key128();
        let pt = [0xabu8; 32];
        let ct = ecb_encrypt(&pt, &key);
        assert_eq!(ct[0..16], ct[16..32]);
    }

    #[test]
    fn decrypt_with_wrong_key_fails_padding() {
        let ct = ecb_encrypt(b"attack at dawn", &key128());
        let wrong = CipherKey::new(vec![0x42; 16]).unwrap();
        assert_eq!(ecb_decrypt(&ct, &wrong), Err(AesError::BadPadding));
    }

    #[test]
    fn decrypt_rejects_unaligned_input() {
        assert_eq!(
            ecb_decrypt(&[0u8; 15], &key128()),
            Err(AesError::CiphertextNotBlockAligned(15))
        );
        assert_eq!(
            ecb_decrypt(&[], &key128()),
            Err(AesError::CiphertextNotBlockAligned(0))
        );
    }
}
