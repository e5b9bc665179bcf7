//! Bitstring helpers.
//!
//! Basis index `x` and bit vectors are related by `bits[i] = (x >> i) & 1`, so
//! qubit 0 is the least-significant bit. Rendered strings list qubit 0 first:
//! the portfolio picking only asset 0 of three prints as `"100"`.

pub fn index_to_bits(index: usize, width: usize) -> Vec<u8> {
    (0..width).map(|i| ((index >> i) & 1) as u8).collect()
}

pub fn bits_to_index(bits: &[u8]) -> usize {
    bits.iter().enumerate().fold(0, |acc, (i, &b)| acc | ((b as usize & 1) << i))
}

pub fn format_bits(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 0 { '0' } else { '1' }).collect()
}

pub fn format_index(index: usize, width: usize) -> String {
    format_bits(&index_to_bits(index, width))
}

/// Parses a string of `0`/`1` characters; `None` on any other character.
pub fn parse_bits(s: &str) -> Option<Vec<u8>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(0),
            '1' => Some(1),
            _ => None,
        })
        .collect()
}
