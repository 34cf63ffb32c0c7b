//! Bit blocks and the polar transform.

use alloc::vec::Vec;

use crate::error::{invalid, Result};

/// Ordering of synthesized bit-channels.
///
/// Index `j` (zero-based) written in binary with `log2 n` digits reads, from
/// the most significant digit down, the branch taken at each polarization
/// level: `0` for the degraded ("minus", check-node) branch and `1` for the
/// upgraded ("plus", variable-node) branch. The transform, the profile
/// recursions, the enumeration oracle, the encoders and the SC decoder all
/// follow this order, so no bit-reversal permutation appears anywhere.
pub const INDEX_ORDER: &str = "msb-first";

/// Returns `log2 n`, or an error if `n` is not a positive power of two.
pub fn log2_len(n: usize) -> Result<u32> {
    if n == 0 || !n.is_power_of_two() {
        return Err(invalid!("block length {n} is not a power of two"));
    }
    Ok(n.trailing_zeros())
}

/// A binary block of power-of-two length.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitBlock {
    bits: Vec<u8>,
}

impl BitBlock {
    /// Wraps `bits`, checking the length and that each entry is 0 or 1.
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        log2_len(bits.len())?;
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(invalid!("symbol {} at position {pos} is not a bit", bits[pos]));
        }
        Ok(Self { bits })
    }

    /// The all-zero block of length `n`.
    pub fn zeros(n: usize) -> Result<Self> {
        log2_len(n)?;
        Ok(Self { bits: alloc::vec![0; n] })
    }

    pub(crate) fn from_raw(bits: Vec<u8>) -> Self {
        debug_assert!(bits.len().is_power_of_two() && bits.iter().all(|&b| b <= 1));
        Self { bits }
    }

    /// Block length.
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    /// Always false; blocks hold at least one bit.
    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// The bits as a slice.
    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    /// Consumes the block.
    pub fn into_bits(self) -> Vec<u8> {
        self.bits
    }

    /// Element-wise XOR.
    pub fn xor(&self, other: &BitBlock) -> Result<BitBlock> {
        if self.len() != other.len() {
            return Err(invalid!("length mismatch: {} vs {}", self.len(), other.len()));
        }
        let bits = self.bits.iter().zip(&other.bits).map(|(a, b)| a ^ b).collect();
        Ok(Self { bits })
    }
}

/// In-place transform `x <- x G_n` on a power-of-two slice.
pub(crate) fn transform_in_place(x: &mut [u8]) {
    let n = x.len();
    let mut half = 1;
    while half < n {
        for block in x.chunks_exact_mut(2 * half) {
            let (a, b) = block.split_at_mut(half);
            for (ai, bi) in a.iter_mut().zip(b.iter()) {
                *ai ^= *bi;
            }
        }
        half *= 2;
    }
}

/// Computes `u = x G_n` with `G_n = [1 0; 1 1]^{⊗ log2 n}`.
///
/// The transform is its own inverse.
pub fn polar_transform(x: &BitBlock) -> BitBlock {
    let mut bits = x.bits.clone();
    transform_in_place(&mut bits);
    BitBlock { bits }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use proptest::prelude::*;

    // Dense matrix product against the explicit Kronecker power.
    fn reference(x: &[u8]) -> Vec<u8> {
        let n = x.len();
        let mut g = vec![vec![1u8]];
        while g.len() < n {
            let m = g.len();
            let mut next = vec![vec![0u8; 2 * m]; 2 * m];
            for r in 0..m {
                for c in 0..m {
                    next[r][c] = g[r][c];
                    next[m + r][c] = g[r][c];
                    next[m + r][m + c] = g[r][c];
                }
            }
            g = next;
        }
        (0..n).map(|c| (0..n).fold(0, |acc, r| acc ^ (x[r] & g[r][c]))).collect()
    }

    #[test]
    fn two_by_two_kernel() {
        let x = BitBlock::new(vec![1, 1]).unwrap();
        assert_eq!(polar_transform(&x).bits(), &[0, 1]);
    }

    #[test]
    fn zero_block_is_fixed() {
        for n in [1, 2, 64, 4096] {
            let z = BitBlock::zeros(n).unwrap();
            assert_eq!(polar_transform(&z), z);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(BitBlock::new(vec![0, 1, 0]).is_err());
        assert!(BitBlock::new(vec![]).is_err());
        assert!(BitBlock::new(vec![0, 2]).is_err());
    }

    proptest! {
        #[test]
        fn matches_kronecker_matrix(bits in prop::collection::vec(0u8..2, 16)) {
            let x = BitBlock::new(bits.clone()).unwrap();
            prop_assert_eq!(polar_transform(&x).into_bits(), reference(&bits));
        }

        #[test]
        fn involution(log_n in 0u32..11, seed in any::<u64>()) {
            let n = 1usize << log_n;
            let bits: Vec<u8> = (0..n).map(|i| ((seed.rotate_left(i as u32 % 64) ^ i as u64) & 1) as u8).collect();
            let x = BitBlock::new(bits).unwrap();
            prop_assert_eq!(polar_transform(&polar_transform(&x)), x);
        }

        #[test]
        fn linear(a in prop::collection::vec(0u8..2, 32), b in prop::collection::vec(0u8..2, 32)) {
            let a = BitBlock::new(a).unwrap();
            let b = BitBlock::new(b).unwrap();
            let lhs = polar_transform(&a.xor(&b).unwrap());
            let rhs = polar_transform(&a).xor(&polar_transform(&b)).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }
}
