//! End-to-end simulation campaigns.
//!
//! A trial draws fresh key material, then transmits `B` blocks. The common
//! randomness `F` stays fixed across the blocks of a trial; messages, local
//! randomness, Φ keys and channel noise are fresh per block.

use alloc::vec;
use alloc::vec::Vec;

use crate::channel::{sample_broadcast, BroadcastChannelSpec};
use crate::codec::{decode_ldnls, decode_nldls, encode_ldnls, encode_nldls, KeyMaterial, MessageSet};
use crate::error::{invalid, Result};
use crate::math::{normal_sf, sqrt};
use crate::partition::{IndexPartition, LayeredPartition};
use crate::rng::{substream, Tag};

/// The code under test.
#[derive(Debug, Clone, Copy)]
pub enum Code<'a> {
    /// Non-layered decoding, layered secrecy.
    NldLs(&'a IndexPartition),
    /// Layered decoding, non-layered secrecy.
    LdNls(&'a LayeredPartition),
}

impl Code<'_> {
    fn blocks(&self) -> Vec<&IndexPartition> {
        match self {
            Code::NldLs(p) => vec![*p],
            Code::LdNls(p) => p.layers.iter().collect(),
        }
    }
}

/// Error counts of one receiver.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ErrorCounts {
    /// Wrong message bits.
    pub message_bit_errors: u64,
    /// Message bits sent.
    pub message_bits: u64,
    /// Blocks with at least one wrong message bit.
    pub block_errors: u64,
    /// Blocks sent.
    pub blocks: u64,
    /// Wrong estimates on each layer's decoded set.
    pub decoded_bit_errors: Vec<u64>,
    /// Size of each layer's decoded set, summed over blocks.
    pub decoded_bits: Vec<u64>,
}

impl ErrorCounts {
    fn add(&mut self, other: &ErrorCounts) {
        self.message_bit_errors += other.message_bit_errors;
        self.message_bits += other.message_bits;
        self.block_errors += other.block_errors;
        self.blocks += other.blocks;
        if self.decoded_bits.len() < other.decoded_bits.len() {
            self.decoded_bits.resize(other.decoded_bits.len(), 0);
            self.decoded_bit_errors.resize(other.decoded_bits.len(), 0);
        }
        for (i, (e, b)) in other.decoded_bit_errors.iter().zip(&other.decoded_bits).enumerate() {
            self.decoded_bit_errors[i] += e;
            self.decoded_bits[i] += b;
        }
    }

    /// Message bit error rate.
    pub fn message_ber(&self) -> f64 {
        ratio(self.message_bit_errors, self.message_bits)
    }

    /// Block error rate.
    pub fn block_error_rate(&self) -> f64 {
        ratio(self.block_errors, self.blocks)
    }

    /// Error rate on the decoded set of `layer` (zero-based).
    pub fn decoded_ber(&self, layer: usize) -> f64 {
        ratio(self.decoded_bit_errors[layer], self.decoded_bits[layer])
    }

    /// Sum of the per-layer decoded-set error rates, the quantity the
    /// reliability bounds control.
    pub fn decoded_ber_total(&self) -> f64 {
        (0..self.decoded_bits.len()).map(|l| self.decoded_ber(l)).sum()
    }
}

fn ratio(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Outcome of one trial: counts per block, then per receiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrialOutcome {
    /// `per_block[b][k]`.
    pub per_block: Vec<Vec<ErrorCounts>>,
}

fn count_bits(sent: &[u8], got: &[u8]) -> u64 {
    sent.iter().zip(got).filter(|(a, b)| a != b).count() as u64
}

/// Runs trial `trial` of a campaign.
pub fn run_trial(
    spec: &BroadcastChannelSpec,
    code: Code<'_>,
    blocks: usize,
    seed: u64,
    trial: u64,
) -> Result<TrialOutcome> {
    let mut rng = substream(seed, Tag::Campaign, trial);
    let parts = code.blocks();
    let mut keys = KeyMaterial::random(&parts, &mut rng);
    let k_total = spec.num_receivers();
    let mut per_block = Vec::with_capacity(blocks);
    for _ in 0..blocks {
        keys.refresh_phi_keys(&mut rng);
        let mut counts = vec![ErrorCounts::default(); k_total];
        match code {
            Code::NldLs(p) => {
                let msgs = MessageSet::random(&MessageSet::sizes_nldls(p), &mut rng);
                let enc = encode_nldls(p, &msgs, &keys, &mut rng)?;
                let trace = sample_broadcast(spec, &enc.x, &mut rng);
                let decoded = p.decoder_indices();
                for (k, c) in counts.iter_mut().enumerate() {
                    let dec = decode_nldls(spec, &trace, p, &keys, &enc.layers[0].masked_phi, k + 1)?;
                    tally(c, &msgs.messages, &dec.messages.messages);
                    let u = dec.u[0].bits();
                    c.decoded_bit_errors = vec![decoded.iter().filter(|&&j| u[j] != enc.layers[0].u[j]).count() as u64];
                    c.decoded_bits = vec![decoded.len() as u64];
                }
            }
            Code::LdNls(p) => {
                let msgs = MessageSet::random(&MessageSet::sizes_ldnls(p), &mut rng);
                let enc = encode_ldnls(p, &msgs, &keys, spec, &mut rng)?;
                let trace = sample_broadcast(spec, &enc.x, &mut rng);
                let phis: Vec<Vec<u8>> = enc.layers.iter().map(|l| l.masked_phi.clone()).collect();
                for (k, c) in counts.iter_mut().enumerate() {
                    let dec = decode_ldnls(spec, &trace, p, &keys, &phis, k + 1)?;
                    tally(c, &msgs.messages[..=k], &dec.messages.messages);
                    for (layer, u) in dec.u.iter().enumerate() {
                        let decoded = p.layers[layer].decoder_indices();
                        let sent = &enc.layers[layer].u;
                        c.decoded_bit_errors.push(decoded.iter().filter(|&&j| u.bits()[j] != sent[j]).count() as u64);
                        c.decoded_bits.push(decoded.len() as u64);
                    }
                }
            }
        }
        per_block.push(counts);
    }
    Ok(TrialOutcome { per_block })
}

fn tally(c: &mut ErrorCounts, sent: &[Vec<u8>], got: &[Vec<u8>]) {
    let errors: u64 = sent.iter().zip(got).map(|(s, g)| count_bits(s, g)).sum();
    c.message_bit_errors = errors;
    c.message_bits = sent.iter().map(|m| m.len() as u64).sum();
    c.block_errors = (errors > 0) as u64;
    c.blocks = 1;
}

/// Aggregated campaign statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CampaignResult {
    /// Number of trials.
    pub trials: u64,
    /// Blocks per trial.
    pub blocks: usize,
    /// Totals per receiver.
    pub receivers: Vec<ErrorCounts>,
    /// Totals per block position, then per receiver.
    pub per_block: Vec<Vec<ErrorCounts>>,
}

impl CampaignResult {
    /// Folds trial outcomes, in order.
    pub fn from_outcomes<I: IntoIterator<Item = TrialOutcome>>(receivers: usize, blocks: usize, outcomes: I) -> Self {
        let mut per_block = vec![vec![ErrorCounts::default(); receivers]; blocks];
        let mut totals = vec![ErrorCounts::default(); receivers];
        let mut trials = 0;
        for outcome in outcomes {
            trials += 1;
            for (b, counts) in outcome.per_block.iter().enumerate() {
                for (k, c) in counts.iter().enumerate() {
                    per_block[b][k].add(c);
                    totals[k].add(c);
                }
            }
        }
        Self { trials, blocks, receivers: totals, per_block }
    }
}

/// Runs `trials` independent trials of `blocks` blocks each.
pub fn run_campaign(
    spec: &BroadcastChannelSpec,
    code: Code<'_>,
    trials: u64,
    blocks: usize,
    seed: u64,
) -> Result<CampaignResult> {
    check_campaign_args(trials, blocks)?;
    let outcomes = (0..trials).map(|t| run_trial(spec, code, blocks, seed, t)).collect::<Result<Vec<_>>>()?;
    Ok(CampaignResult::from_outcomes(spec.num_receivers(), blocks, outcomes))
}

/// Validates campaign sizes.
pub fn check_campaign_args(trials: u64, blocks: usize) -> Result<()> {
    if trials == 0 || blocks == 0 {
        return Err(invalid!("trials and blocks must be positive"));
    }
    Ok(())
}

/// Wilson score interval for `successes` out of `n` at normal quantile `z`.
pub fn wilson_interval(successes: u64, n: u64, z: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let centre = (p + z2 / (2.0 * nf)) / denom;
    let radius = z * sqrt(p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)) / denom;
    ((centre - radius).max(0.0), (centre + radius).min(1.0))
}

/// Normal quantile for a two-sided 95% interval.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Two-sided p-value of the pooled two-proportion z-test.
pub fn two_proportion_p_value(x1: u64, n1: u64, x2: u64, n2: u64) -> f64 {
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    let pooled = (x1 + x2) as f64 / (n1f + n2f);
    let var = pooled * (1.0 - pooled) * (1.0 / n1f + 1.0 / n2f);
    if var <= 0.0 {
        return 1.0;
    }
    let z = (x1 as f64 / n1f - x2 as f64 / n2f).abs() / sqrt(var);
    (2.0 * normal_sf(z)).min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{partition_nldls, scaled_rates, CodeParameters, NldlsProfiles};
    use crate::profile::bec_bhattacharyya_profile;

    #[test]
    fn wilson_examples() {
        let (lo, hi) = wilson_interval(0, 100, Z95);
        assert!(lo.abs() < 1e-15);
        assert!((hi - 0.036_995).abs() < 1e-5);
        let (lo, hi) = wilson_interval(50, 100, Z95);
        assert!((lo - 0.403_8).abs() < 1e-3 && (hi - 0.596_2).abs() < 1e-3);
    }

    #[test]
    fn two_proportion_examples() {
        assert_eq!(two_proportion_p_value(0, 10, 0, 10), 1.0);
        assert!((two_proportion_p_value(30, 100, 50, 100) - 0.003_6).abs() < 5e-4);
        assert!(two_proportion_p_value(10, 100, 11, 100) > 0.5);
    }

    #[test]
    fn noiseless_campaign_is_error_free() {
        let n = 256;
        let (y1, z1, z2) = (
            bec_bhattacharyya_profile(0.04, n).unwrap(),
            bec_bhattacharyya_profile(0.35, n).unwrap(),
            bec_bhattacharyya_profile(0.2, n).unwrap(),
        );
        let params = CodeParameters::nldls(n, 0.16, 0.30, scaled_rates(&[0.15, 0.16], 0.9)).unwrap();
        let p = partition_nldls(&NldlsProfiles { receiver: &y1, eavesdroppers: &[&z1, &z2] }, &params).unwrap();
        let spec = BroadcastChannelSpec::erasure(vec![0.0, 0.0], vec![0.0, 0.0]).unwrap();
        let r = run_campaign(&spec, Code::NldLs(&p), 5, 3, 1).unwrap();
        assert_eq!(r.trials, 5);
        assert!(r.receivers.iter().all(|c| c.message_bit_errors == 0 && c.blocks == 15));
        assert!(run_campaign(&spec, Code::NldLs(&p), 0, 1, 1).is_err());
    }
}
