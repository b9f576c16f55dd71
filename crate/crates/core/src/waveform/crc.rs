//! CRC-11 used to validate polar list-decoder candidates.
//!
//! Generator x^11 + x^10 + x^9 + x^5 + 1, processed MSB first over one bit per
//! byte. The register starts at all ones so the all-zero word is not a valid
//! codeword; an erased block can therefore never pass the check.

pub const CRC11_LEN: usize = 11;
const CRC11_POLY: u16 = 0x621;
const CRC11_INIT: u16 = 0x7ff;
const CRC11_MASK: u16 = 0x7ff;

/// Computes the 11 parity bits of `bits` (one bit per element, values 0/1).
pub fn crc11(bits: &[u8]) -> [u8; CRC11_LEN] {
    let mut reg = CRC11_INIT;
    for &b in bits {
        let top = ((reg >> 10) & 1) as u8;
        reg = (reg << 1) & CRC11_MASK;
        if top ^ (b & 1) == 1 {
            reg ^= CRC11_POLY;
        }
    }
    let mut out = [0u8; CRC11_LEN];
    for (i, o) in out.iter_mut().enumerate() {
        *o = ((reg >> (CRC11_LEN - 1 - i)) & 1) as u8;
    }
    out
}

/// True when the last 11 bits of `word` are the CRC of the rest.
pub fn crc11_check(word: &[u8]) -> bool {
    if word.len() < CRC11_LEN {
        return false;
    }
    let (payload, parity) = word.split_at(word.len() - CRC11_LEN);
    crc11(payload) == parity
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn appended_crc_checks() {
        let payload: Vec<u8> = (0..100).map(|i| ((i * 7 + 3) % 5 % 2) as u8).collect();
        let mut word = payload.clone();
        word.extend_from_slice(&crc11(&payload));
        assert!(crc11_check(&word));
        for i in 0..word.len() {
            let mut bad = word.clone();
            bad[i] ^= 1;
            assert!(!crc11_check(&bad), "single flip at {i} undetected");
        }
    }

    #[test]
    fn all_zero_word_is_invalid() {
        assert!(!crc11_check(&[0u8; 64]));
    }
}
