//! Successive-cancellation machinery over the polar butterfly.
//!
//! A node of size `m` receives the LLRs of its sub-codeword `x = [s_a ⊕ s_b, s_b]`
//! and splits into the check-node child (`s_a`, LLR `f(L_a, L_b)`) and the
//! variable-node child (`s_b`, LLR `L_b + (1 − 2 s_a) L_a`). Leaves are visited
//! in increasing index order, which is the [`INDEX_ORDER`] convention.
//!
//! [`INDEX_ORDER`]: crate::transform::INDEX_ORDER

use alloc::vec;
use alloc::vec::Vec;

use crate::math::boxplus;

/// Synthesized-channel LLRs when every `u(j)` is 0.
///
/// This is the genie-aided pass used by Monte-Carlo construction: with the
/// all-zero input every partial sum is 0, so the variable-node update reduces
/// to `L_a + L_b` and the whole pass runs in place.
pub fn polarize_zero(llrs: &mut [f64]) {
    let n = llrs.len();
    debug_assert!(n.is_power_of_two());
    let mut half = n / 2;
    while half >= 1 {
        for block in llrs.chunks_exact_mut(2 * half) {
            let (a, b) = block.split_at_mut(half);
            for (la, lb) in a.iter_mut().zip(b.iter_mut()) {
                let (x, y) = (*la, *lb);
                *la = boxplus(x, y);
                *lb = x + y;
            }
        }
        half /= 2;
    }
}

/// Reusable SC pass with one or two LLR lanes.
///
/// Every lane is propagated through the same tree with the same decisions; a
/// decision callback sees the leaf LLR of each lane. Two lanes let a decoder
/// track the prior `p(u | prefix, v)` next to the joint `p(u | prefix, v, y)`.
#[derive(Debug, Clone)]
pub struct ScPass {
    n: usize,
    lanes: usize,
    llr: Vec<f64>,
    bits: Vec<u8>,
}

impl ScPass {
    /// Allocates buffers for blocklength `n` and `lanes` ∈ {1, 2}.
    pub fn new(n: usize, lanes: usize) -> Self {
        assert!(n.is_power_of_two(), "block length must be a power of two");
        assert!((1..=2).contains(&lanes), "one or two lanes supported");
        Self { n, lanes, llr: vec![0.0; 2 * n * lanes], bits: vec![0; 2 * n] }
    }

    /// Blocklength.
    pub fn len(&self) -> usize {
        self.n
    }

    /// Always false.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Runs the pass on the channel LLRs of each lane.
    ///
    /// `decide(j, leaf_llrs)` returns `u(j)`. The decisions are written to
    /// `u`, and the re-encoded codeword `u G_n` is returned as a slice.
    pub fn run<F>(&mut self, channel: &[&[f64]], u: &mut [u8], mut decide: F) -> &[u8]
    where
        F: FnMut(usize, &[f64]) -> u8,
    {
        let n = self.n;
        assert_eq!(channel.len(), self.lanes);
        assert_eq!(u.len(), n);
        for (lane, ch) in channel.iter().enumerate() {
            assert_eq!(ch.len(), n);
            self.llr[lane * 2 * n + n..lane * 2 * n + 2 * n].copy_from_slice(ch);
        }
        self.node(n, 0, u, &mut decide);
        &self.bits[n..2 * n]
    }

    fn node<F>(&mut self, m: usize, offset: usize, u: &mut [u8], decide: &mut F)
    where
        F: FnMut(usize, &[f64]) -> u8,
    {
        let stride = 2 * self.n;
        if m == 1 {
            let mut leaf = [0.0; 2];
            for (lane, slot) in leaf.iter_mut().enumerate().take(self.lanes) {
                *slot = self.llr[lane * stride + 1];
            }
            let bit = decide(offset, &leaf[..self.lanes]);
            debug_assert!(bit <= 1);
            u[offset] = bit;
            self.bits[1] = bit;
            return;
        }
        let h = m / 2;
        for lane in 0..self.lanes {
            let base = lane * stride;
            let (child, parent) = self.llr[base..base + 2 * m].split_at_mut(m);
            let (la, lb) = parent.split_at(h);
            for ((c, &a), &b) in child[h..].iter_mut().zip(la).zip(lb) {
                *c = boxplus(a, b);
            }
        }
        self.node(h, offset, u, decide);
        self.bits.copy_within(h..2 * h, m);
        for lane in 0..self.lanes {
            let base = lane * stride;
            let (child, parent) = self.llr[base..base + 2 * m].split_at_mut(m);
            let (la, lb) = parent.split_at(h);
            let sa = &self.bits[m..m + h];
            for (((c, &a), &b), &s) in child[h..].iter_mut().zip(la).zip(lb).zip(sa) {
                *c = if s == 0 { b + a } else { b - a };
            }
        }
        self.node(h, offset + h, u, decide);
        let (low, high) = self.bits.split_at_mut(m);
        let sb = &low[h..2 * h];
        let (xa, xb) = high[..m].split_at_mut(h);
        for ((a, b), &s) in xa.iter_mut().zip(xb.iter_mut()).zip(sb) {
            *a ^= s;
            *b = s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::{polar_transform, BitBlock};

    #[test]
    fn zero_pass_matches_tree() {
        let ch: Vec<f64> = (0..16).map(|i| 0.3 * i as f64 - 1.7).collect();
        let mut fast = ch.clone();
        polarize_zero(&mut fast);
        let mut pass = ScPass::new(16, 1);
        let mut u = vec![0; 16];
        let mut seen = vec![0.0; 16];
        pass.run(&[&ch], &mut u, |j, l| {
            seen[j] = l[0];
            0
        });
        for (a, b) in fast.iter().zip(&seen) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn reencoding_matches_transform() {
        let n = 64;
        let ch = vec![0.0; n];
        let target: Vec<u8> = (0..n).map(|i| ((i * 7 + 3) % 5 < 2) as u8).collect();
        let mut pass = ScPass::new(n, 1);
        let mut u = vec![0; n];
        let x = pass.run(&[&ch], &mut u, |j, _| target[j]).to_vec();
        assert_eq!(u, target);
        assert_eq!(x, polar_transform(&BitBlock::new(target).unwrap()).into_bits());
    }

    #[test]
    fn noiseless_llrs_recover_u() {
        let n = 32;
        let u0: Vec<u8> = (0..n).map(|i| (i % 3 == 1) as u8).collect();
        let x = polar_transform(&BitBlock::new(u0.clone()).unwrap());
        let ch: Vec<f64> = x.bits().iter().map(|&b| if b == 0 { 40.0 } else { -40.0 }).collect();
        let mut pass = ScPass::new(n, 2);
        let mut u = vec![0; n];
        pass.run(&[&ch, &ch], &mut u, |_, l| {
            assert_eq!(l[0], l[1]);
            (l[0] < 0.0) as u8
        });
        assert_eq!(u, u0);
    }

    #[test]
    fn minus_branch_comes_first() {
        // n = 2: u(0) sees the check node, u(1) the variable node.
        let mut l = [1.0, 2.0];
        polarize_zero(&mut l);
        assert!((l[0] - boxplus(1.0, 2.0)).abs() < 1e-15);
        assert_eq!(l[1], 3.0);
    }
}
