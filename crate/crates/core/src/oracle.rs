//! Brute-force conditional entropies for tiny blocklengths.
//!
//! Sums the joint law of `(U^n, side info^n)` over every input and every
//! output sequence. Exponential in `n`; meant only to validate the recursions
//! and the Monte-Carlo estimator.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::channel::{BroadcastChannelSpec, Conditioning, ObservationChannel, Symbol};
use crate::error::{Error, Result};
use crate::math::h2;
use crate::profile::{Metric, PolarizationProfile};
use crate::transform::{log2_len, transform_in_place};

/// Largest blocklength the oracle accepts.
pub const MAX_ORACLE_N: usize = 16;

/// Cap on `|outputs| · 2^n`, the number of joint-probability terms.
pub const ORACLE_WORK_LIMIT: f64 = 4.0e9;

/// Exact per-index entropies and Bhattacharyya parameters, uniform input.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactConditionalTable {
    /// `H(U(j) | U^{1:j-1}, side info^n)`.
    pub entropies: Vec<f64>,
    /// `Z(U(j) | U^{1:j-1}, side info^n)`.
    pub bhattacharyya: Vec<f64>,
}

impl ExactConditionalTable {
    /// Blocklength.
    pub fn len(&self) -> usize {
        self.entropies.len()
    }

    /// Always false.
    pub fn is_empty(&self) -> bool {
        self.entropies.is_empty()
    }

    /// The entropies as a profile.
    pub fn entropy_profile(&self) -> PolarizationProfile {
        PolarizationProfile::from_values(Metric::Entropy, self.entropies.clone()).expect("entropies lie in [0, 1]")
    }
}

/// Oracle on the observation channel selected by `cond`.
pub fn enumerate_exact_conditionals(
    spec: &BroadcastChannelSpec,
    cond: Conditioning,
    n: usize,
) -> Result<ExactConditionalTable> {
    enumerate_for_channel(&spec.observation(cond)?, n)
}

/// Oracle on an explicit observation channel.
pub fn enumerate_for_channel(channel: &ObservationChannel, n: usize) -> Result<ExactConditionalTable> {
    log2_len(n)?;
    if n > MAX_ORACLE_N {
        return Err(Error::ResourceLimit(format!("exact enumeration needs n <= {MAX_ORACLE_N}, got {n}")));
    }
    // Joint output alphabet of one channel use.
    let mut letters: Vec<Vec<Symbol>> = vec![vec![]];
    for part in channel.parts() {
        letters = letters
            .iter()
            .flat_map(|prefix| {
                part.alphabet().iter().map(move |&s| {
                    let mut l = prefix.clone();
                    l.push(s);
                    l
                })
            })
            .collect();
    }
    // Per-letter likelihoods p(letter | x) for x = 0, 1.
    let like: Vec<[f64; 2]> = letters
        .iter()
        .map(|l| {
            let p = |x: u8| channel.parts().iter().zip(l).map(|(c, &s)| c.transition(x, s)).product::<f64>();
            [p(0), p(1)]
        })
        .collect();
    let work = libm::pow(like.len() as f64, n as f64) * (1u64 << n) as f64;
    if work > ORACLE_WORK_LIMIT {
        return Err(Error::ResourceLimit(format!("exact enumeration would need {work:.3e} terms")));
    }

    // u index encodes u(0) as the most significant bit, so summing adjacent
    // pairs marginalizes the last remaining index.
    let size = 1usize << n;
    let x_of_u: Vec<usize> = (0..size)
        .map(|u| {
            let mut bits: Vec<u8> = (0..n).map(|j| ((u >> (n - 1 - j)) & 1) as u8).collect();
            transform_in_place(&mut bits);
            bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize)
        })
        .collect();
    let weight = 1.0 / size as f64;
    let mut entropies = vec![0.0; n];
    let mut bhatt = vec![0.0; n];
    let mut px = vec![0.0; size];
    let mut joint = vec![0.0; size];
    let mut y = vec![0usize; n];
    loop {
        for (x, slot) in px.iter_mut().enumerate() {
            let mut p = weight;
            for (j, &letter) in y.iter().enumerate() {
                p *= like[letter][(x >> (n - 1 - j)) & 1];
            }
            *slot = p;
        }
        if px.iter().any(|&p| p > 0.0) {
            for (u, slot) in joint.iter_mut().enumerate() {
                *slot = px[x_of_u[u]];
            }
            // After this loop `len` entries hold P(u^{1:j+1}, y).
            let mut len = size;
            for j in (0..n).rev() {
                for k in 0..len / 2 {
                    let (p0, p1) = (joint[2 * k], joint[2 * k + 1]);
                    let total = p0 + p1;
                    if total > 0.0 {
                        entropies[j] += total * h2(p0 / total);
                        bhatt[j] += 2.0 * libm::sqrt(p0 * p1);
                    }
                    joint[k] = total;
                }
                len /= 2;
            }
        }
        // Next output sequence.
        let mut pos = 0;
        loop {
            if pos == n {
                let clamp = |v: Vec<f64>| v.into_iter().map(|x| x.clamp(0.0, 1.0)).collect();
                return Ok(ExactConditionalTable { entropies: clamp(entropies), bhattacharyya: clamp(bhatt) });
            }
            y[pos] += 1;
            if y[pos] < like.len() {
                break;
            }
            y[pos] = 0;
            pos += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Component;
    use crate::profile::bec_bhattacharyya_profile;

    fn bsc(a: f64) -> ObservationChannel {
        ObservationChannel::new(vec![Component::Crossover(a)])
    }

    #[test]
    fn noiseless_and_useless() {
        let t = enumerate_for_channel(&bsc(0.0), 8).unwrap();
        assert!(t.entropies.iter().all(|&h| h.abs() < 1e-12));
        let t = enumerate_for_channel(&bsc(0.5), 8).unwrap();
        assert!(t.entropies.iter().all(|&h| (h - 1.0).abs() < 1e-12));
    }

    #[test]
    fn erasure_matches_recursion() {
        for n in [2, 4, 8] {
            for eps in [0.1, 0.35, 0.5] {
                let ch = ObservationChannel::new(vec![Component::Erasure(eps)]);
                let t = enumerate_for_channel(&ch, n).unwrap();
                let r = bec_bhattacharyya_profile(eps, n).unwrap();
                for j in 0..n {
                    assert!((t.entropies[j] - r.values()[j]).abs() < 1e-10);
                    assert!((t.bhattacharyya[j] - r.values()[j]).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn chain_rule_holds() {
        // Σ_j H(U_j | U^{j-1}, Y^n) = H(U^n | Y^n) = n h2(α) for a uniform input.
        let t = enumerate_for_channel(&bsc(0.11), 8).unwrap();
        let total: f64 = t.entropies.iter().sum();
        assert!((total - 8.0 * h2(0.11)).abs() < 1e-10);
    }

    #[test]
    fn n_one_is_the_channel_itself() {
        let t = enumerate_for_channel(&bsc(0.2), 1).unwrap();
        assert!((t.entropies[0] - h2(0.2)).abs() < 1e-14);
        assert!((t.bhattacharyya[0] - 2.0 * libm::sqrt(0.16)).abs() < 1e-14);
    }

    #[test]
    fn refuses_large_n() {
        assert!(matches!(enumerate_for_channel(&bsc(0.1), 32), Err(Error::ResourceLimit(_))));
        let wide = ObservationChannel::new(vec![Component::Erasure(0.1), Component::Erasure(0.2)]);
        assert!(matches!(enumerate_for_channel(&wide, 16), Err(Error::ResourceLimit(_))));
    }
}
