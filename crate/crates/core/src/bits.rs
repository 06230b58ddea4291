//! Basis-index convention shared by every module.
//!
//! Variable `x₁` (slice position 0) is the most significant bit of the basis
//! index, so `[1, 0, 0]` is index 4 and the SVP cost `x₁ + 2x₂ + 5x₃ + 2x₂x₃`
//! has diagonal `(0, 5, 2, 9, 1, 6, 3, 10)`.

use crate::error::{Error, Result};

/// Largest register the dense engine will allocate.
pub const QUBIT_CAP: usize = 24;

/// Basis index of a bit vector.
pub fn index_of(bits: &[u8]) -> usize {
    bits.iter()
        .fold(0usize, |acc, &b| (acc << 1) | (b as usize & 1))
}

/// Bit vector of length `n` encoded by `index`.
pub fn bits_of(index: usize, n: usize) -> Vec<u8> {
    (0..n).map(|q| bit(index, n, q)).collect()
}

/// Value of variable `q` (0-based) in the basis state `index`.
#[inline]
pub fn bit(index: usize, n: usize, q: usize) -> u8 {
    ((index >> (n - 1 - q)) & 1) as u8
}

/// Mask selecting variable `q` inside a basis index.
#[inline]
pub fn mask(n: usize, q: usize) -> usize {
    1usize << (n - 1 - q)
}

pub fn bitstring(index: usize, n: usize) -> String {
    (0..n)
        .map(|q| if bit(index, n, q) == 1 { '1' } else { '0' })
        .collect()
}

pub(crate) fn validate_bits(bits: &[u8], n: usize) -> Result<()> {
    if bits.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: bits.len(),
        });
    }
    if let Some(b) = bits.iter().find(|&&b| b > 1) {
        return Err(Error::Input(format!("bit value {b} is not 0 or 1")));
    }
    Ok(())
}

pub(crate) fn check_cap(n: usize) -> Result<()> {
    if n > QUBIT_CAP {
        return Err(Error::QubitCap {
            requested: n,
            cap: QUBIT_CAP,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn msb_convention() {
        assert_eq!(index_of(&[1, 0, 0]), 4);
        assert_eq!(index_of(&[0, 0, 1]), 1);
        assert_eq!(bits_of(6, 3), vec![1, 1, 0]);
        assert_eq!(bitstring(9, 4), "1001");
        for j in 0..64 {
            assert_eq!(index_of(&bits_of(j, 6)), j);
        }
    }
}
