//! Extended binary Golay code (24, 12, 8).
//!
//! Built by systematically encoding the cyclic (23, 12, 7) code and
//! appending an overall parity bit. Codewords are stored as 24-bit masks,
//! coordinate `j` in bit `j`: message bits occupy bits 11..=22, the cyclic
//! check bits 0..=10 and the extended parity bit 23.
//!
//! All 4096 codewords are precomputed once; the table is the only lookup
//! table in the crate and is shared process-wide through [`code`].

use std::sync::OnceLock;

/// Generator polynomial of the (23, 12) cyclic Golay code,
/// x^11 + x^9 + x^7 + x^6 + x^5 + x + 1.
const GENERATOR_POLY: u32 = 0b1010_1110_0011;
const GENERATOR_DEG: u32 = 11;

/// The extended Golay code with its full codeword table.
pub struct GolayCode {
    codewords: Vec<u32>,
    octads: Vec<[usize; 8]>,
}

fn poly_rem(value: u32) -> u32 {
    let mut v = value;
    let mut bit = 31 - v.leading_zeros().min(31);
    while v != 0 && bit >= GENERATOR_DEG {
        if v & (1 << bit) != 0 {
            v ^= GENERATOR_POLY << (bit - GENERATOR_DEG);
        }
        if bit == 0 {
            break;
        }
        bit -= 1;
    }
    v
}

impl GolayCode {
    pub fn new() -> Self {
        let mut codewords = Vec::with_capacity(4096);
        for message in 0u32..4096 {
            codewords.push(Self::encode_message(message as u16));
        }
        let mut octads = Vec::with_capacity(759);
        for &cw in &codewords {
            if cw.count_ones() == 8 {
                let mut positions = [0usize; 8];
                let mut k = 0;
                for j in 0..24 {
                    if cw & (1 << j) != 0 {
                        positions[k] = j;
                        k += 1;
                    }
                }
                octads.push(positions);
            }
        }
        Self { codewords, octads }
    }

    /// Systematic encoding of a 12-bit message into a 24-bit codeword.
    pub fn encode_message(message: u16) -> u32 {
        let data = (message as u32) & 0xfff;
        let shifted = data << GENERATOR_DEG;
        let c23 = shifted | poly_rem(shifted);
        let parity = c23.count_ones() & 1;
        c23 | (parity << 23)
    }

    /// All 4096 codewords as 24-bit masks, indexed by message value.
    pub fn codewords(&self) -> &[u32] {
        &self.codewords
    }

    /// The 759 weight-8 codewords, as sorted coordinate lists.
    pub fn octads(&self) -> &[[usize; 8]] {
        &self.octads
    }

    /// Membership test for an arbitrary 24-bit word.
    pub fn contains(&self, word: u32) -> bool {
        let message = ((word >> GENERATOR_DEG) & 0xfff) as u16;
        Self::encode_message(message) == word & 0xff_ffff
    }
}

impl Default for GolayCode {
    fn default() -> Self {
        Self::new()
    }
}

/// Shared code instance (the table is immutable after construction).
pub fn code() -> &'static GolayCode {
    static CODE: OnceLock<GolayCode> = OnceLock::new();
    CODE.get_or_init(GolayCode::new)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weight_distribution() {
        let code = GolayCode::new();
        let mut hist = [0usize; 25];
        for &cw in code.codewords() {
            hist[cw.count_ones() as usize] += 1;
        }
        assert_eq!(hist[0], 1);
        assert_eq!(hist[8], 759);
        assert_eq!(hist[12], 2576);
        assert_eq!(hist[16], 759);
        assert_eq!(hist[24], 1);
        let other: usize = (0..25)
            .filter(|w| ![0, 8, 12, 16, 24].contains(w))
            .map(|w| hist[w])
            .sum();
        assert_eq!(other, 0, "all weights must be 0, 8, 12, 16 or 24");
    }

    #[test]
    fn linearity_and_membership() {
        let code = GolayCode::new();
        let words = code.codewords();
        assert_eq!(words.len(), 4096);
        // Closed under XOR on a sample of pairs.
        for i in (0..4096).step_by(97) {
            for j in (0..4096).step_by(211) {
                assert!(code.contains(words[i] ^ words[j]));
            }
        }
        assert!(code.contains(0));
        assert!(code.contains(0xff_ffff), "all-ones word is a codeword");
        assert!(!code.contains(1));
        assert!(!code.contains(0b1111_1111));
    }

    #[test]
    fn octad_count() {
        let code = GolayCode::new();
        assert_eq!(code.octads().len(), 759);
    }

    #[test]
    fn minimum_distance_is_eight() {
        let code = GolayCode::new();
        let min = code
            .codewords()
            .iter()
            .filter(|&&cw| cw != 0)
            .map(|cw| cw.count_ones())
            .min()
            .unwrap();
        assert_eq!(min, 8);
    }
}
