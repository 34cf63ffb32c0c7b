//! Encoders and SC decoders for both schemes.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use crate::channel::{BroadcastChannelSpec, ChannelKind, Component, Symbol, TransmissionTrace};
use crate::error::{invalid, Error, Result};
use crate::math::{conv, prob_zero, LLR_CLAMP};
use crate::partition::{IndexPartition, LayeredPartition, Role};
use crate::sc::ScPass;
use crate::transform::{transform_in_place, BitBlock};

fn random_bits<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<u8> {
    (0..len).map(|_| rng.gen::<bool>() as u8).collect()
}

fn xor(a: &[u8], b: &[u8]) -> Vec<u8> {
    a.iter().zip(b).map(|(x, y)| x ^ y).collect()
}

/// Common randomness and Φ keys, one entry per polar block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyMaterial {
    /// Public common randomness on each block's `F` set.
    pub common: Vec<Vec<u8>>,
    /// Secret one-time pads for each block's Φ.
    pub phi_key: Vec<Vec<u8>>,
}

impl KeyMaterial {
    /// Fresh uniform key material sized for `blocks`.
    pub fn random<R: Rng + ?Sized>(blocks: &[&IndexPartition], rng: &mut R) -> Self {
        let common = blocks.iter().map(|p| random_bits(p.common_indices().len(), rng)).collect();
        let phi_key = blocks.iter().map(|p| random_bits(p.phi_indices().len(), rng)).collect();
        Self { common, phi_key }
    }

    /// Replaces the Φ keys with fresh ones, keeping the common randomness.
    pub fn refresh_phi_keys<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        for key in self.phi_key.iter_mut() {
            *key = random_bits(key.len(), rng);
        }
    }

    fn check(&self, blocks: &[&IndexPartition]) -> Result<()> {
        if self.common.len() != blocks.len() || self.phi_key.len() != blocks.len() {
            return Err(invalid!("key material covers {} blocks, expected {}", self.common.len(), blocks.len()));
        }
        for (i, p) in blocks.iter().enumerate() {
            let (f, phi) = (p.common_indices().len(), p.phi_indices().len());
            if self.common[i].len() != f || self.phi_key[i].len() != phi {
                return Err(invalid!(
                    "block {}: key lengths ({}, {}) do not match |F| = {f}, |Φ| = {phi}",
                    i + 1,
                    self.common[i].len(),
                    self.phi_key[i].len()
                ));
            }
        }
        Ok(())
    }
}

/// Message bits: one sequence per message (NLD-LS) or per layer (LD-NLS).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MessageSet {
    /// The messages.
    pub messages: Vec<Vec<u8>>,
}

impl MessageSet {
    /// Uniform messages with the given lengths.
    pub fn random<R: Rng + ?Sized>(sizes: &[usize], rng: &mut R) -> Self {
        Self { messages: sizes.iter().map(|&k| random_bits(k, rng)).collect() }
    }

    /// Message sizes of a non-layered code.
    pub fn sizes_nldls(p: &IndexPartition) -> Vec<usize> {
        p.message_sizes().to_vec()
    }

    /// Message sizes of a layered code, one per layer.
    pub fn sizes_ldnls(p: &LayeredPartition) -> Vec<usize> {
        p.layers.iter().map(|l| l.message_sizes().first().copied().unwrap_or(0)).collect()
    }
}

/// The encoding rule that produced an index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Copied from a message.
    Message,
    /// Copied from local randomness.
    Local,
    /// Copied from common randomness.
    Common,
    /// Drawn from the design conditional distribution.
    Random,
    /// Most likely value under the design conditional distribution.
    Argmax,
}

/// Everything one polar block's encoder produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerEncoding {
    /// `u^n`.
    pub u: Vec<u8>,
    /// `u^n G_n`.
    pub codeword: BitBlock,
    /// Φ in clear.
    pub phi: Vec<u8>,
    /// Φ masked with its key.
    pub masked_phi: Vec<u8>,
    /// Local randomness `C`.
    pub local: Vec<u8>,
    /// Rule used at each index.
    pub branches: Vec<Branch>,
}

/// Encoder output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EncodeResult {
    /// Channel input.
    pub x: BitBlock,
    /// Per-block details, layer 1 first.
    pub layers: Vec<LayerEncoding>,
}

/// Unmasks (or masks) Φ: the one-time pad is its own inverse.
pub fn apply_phi_key(phi: &[u8], key: &[u8]) -> Result<Vec<u8>> {
    if phi.len() != key.len() {
        return Err(invalid!("Φ has {} bits but the key {}", phi.len(), key.len()));
    }
    Ok(xor(phi, key))
}

/// LLRs of the top-layer codeword given the superposition layer `v`.
pub fn superposition_llrs(v: &[u8], alpha_xv: f64) -> Vec<f64> {
    let l = clamp(Component::Crossover(alpha_xv).llr(Symbol::Zero));
    v.iter().map(|&b| if b == 0 { l } else { -l }).collect()
}

fn clamp(l: f64) -> f64 {
    l.clamp(-LLR_CLAMP, LLR_CLAMP)
}

fn encode_block<R: Rng + ?Sized>(
    p: &IndexPartition,
    messages: &[&[u8]],
    common: &[u8],
    phi_key: &[u8],
    prior: Option<&[f64]>,
    rng: &mut R,
) -> Result<LayerEncoding> {
    let n = p.len();
    for (m, msg) in messages.iter().enumerate() {
        let expected = p.message_sizes().get(m).copied().unwrap_or(0);
        if msg.len() != expected {
            return Err(invalid!("message {} has {} bits, partition expects {expected}", m + 1, msg.len()));
        }
    }
    if messages.len() < p.message_sizes().len() {
        return Err(invalid!("{} messages given, partition has {}", messages.len(), p.message_sizes().len()));
    }
    let local = random_bits(p.local_indices().len(), rng);
    let mut next_msg = vec![0usize; messages.len()];
    let (mut next_local, mut next_common) = (0, 0);
    let mut fixed: Vec<Option<u8>> = vec![None; n];
    let mut branches = vec![Branch::Random; n];
    for (j, role) in p.roles().iter().enumerate() {
        let (bit, branch) = match *role {
            Role::Message(m) => {
                next_msg[m] += 1;
                (messages[m][next_msg[m] - 1], Branch::Message)
            }
            Role::Local => {
                next_local += 1;
                (local[next_local - 1], Branch::Local)
            }
            Role::Common => {
                next_common += 1;
                (common[next_common - 1], Branch::Common)
            }
            Role::Transition => {
                branches[j] = if p.is_argmax(j) { Branch::Argmax } else { Branch::Random };
                continue;
            }
        };
        fixed[j] = Some(bit);
        branches[j] = branch;
    }
    let (u, codeword) = if fixed.iter().all(Option::is_some) {
        let u: Vec<u8> = fixed.iter().map(|b| b.unwrap()).collect();
        let mut x = u.clone();
        transform_in_place(&mut x);
        (u, x)
    } else {
        let prior = prior.ok_or_else(|| invalid!("transition indices need the design distribution"))?;
        let mut pass = ScPass::new(n, 1);
        let mut u = vec![0; n];
        let x = pass
            .run(&[prior], &mut u, |j, l| match fixed[j] {
                Some(b) => b,
                None if p.is_argmax(j) => (l[0] < 0.0) as u8,
                None => (rng.gen::<f64>() >= prob_zero(l[0])) as u8,
            })
            .to_vec();
        (u, x)
    };
    let phi: Vec<u8> = p.phi_indices().iter().map(|&j| u[j]).collect();
    let masked_phi = apply_phi_key(&phi, phi_key)?;
    Ok(LayerEncoding { u, codeword: BitBlock::from_raw(codeword), phi, masked_phi, local, branches })
}

/// Non-layered-decoding encoder.
///
/// Copies message, local and common bits into their index sets. The input
/// distribution is uniform, so no index is sampled or decided by argmax.
pub fn encode_nldls<R: Rng + ?Sized>(
    p: &IndexPartition,
    messages: &MessageSet,
    keys: &KeyMaterial,
    rng: &mut R,
) -> Result<EncodeResult> {
    keys.check(&[p])?;
    let msgs: Vec<&[u8]> = messages.messages.iter().map(Vec::as_slice).collect();
    let layer = encode_block(p, &msgs, &keys.common[0], &keys.phi_key[0], None, rng)?;
    Ok(EncodeResult { x: layer.codeword.clone(), layers: vec![layer] })
}

fn superposition_alpha(spec: &BroadcastChannelSpec) -> Result<f64> {
    match (spec.kind(), spec.superposition()) {
        (ChannelKind::Symmetric, Some(a)) => Ok(a),
        _ => Err(Error::UnsupportedChannel("layered decoding needs a symmetric broadcast channel".to_string())),
    }
}

/// Layered-decoding encoder for two layers.
///
/// Layer 1 copies its inputs; its codeword `v` drives layer 2, whose
/// transition indices are sampled from, or decided by argmax on,
/// `p(u_2(j) | u_2^{1:j−1}, v^n)`.
pub fn encode_ldnls<R: Rng + ?Sized>(
    p: &LayeredPartition,
    messages: &MessageSet,
    keys: &KeyMaterial,
    spec: &BroadcastChannelSpec,
    rng: &mut R,
) -> Result<EncodeResult> {
    let alpha = superposition_alpha(spec)?;
    let blocks: Vec<&IndexPartition> = p.layers.iter().collect();
    keys.check(&blocks)?;
    if messages.messages.len() != blocks.len() {
        return Err(invalid!("need one message per layer"));
    }
    let first = encode_block(blocks[0], &[&messages.messages[0]], &keys.common[0], &keys.phi_key[0], None, rng)?;
    let prior = superposition_llrs(first.codeword.bits(), alpha);
    let second =
        encode_block(blocks[1], &[&messages.messages[1]], &keys.common[1], &keys.phi_key[1], Some(&prior), rng)?;
    Ok(EncodeResult { x: second.codeword.clone(), layers: vec![first, second] })
}

/// Values the decoder knows in advance, `None` on the indices it estimates.
pub fn known_bits(p: &IndexPartition, common: &[u8], phi: &[u8]) -> Result<Vec<Option<u8>>> {
    let f = p.common_indices();
    let phi_idx = p.phi_indices();
    if f.len() != common.len() || phi_idx.len() != phi.len() {
        return Err(invalid!("known bits do not match |F| = {} and |Φ| = {}", f.len(), phi_idx.len()));
    }
    let mut known = vec![None; p.len()];
    for (&j, &b) in f.iter().zip(common).chain(phi_idx.iter().zip(phi)) {
        known[j] = Some(b);
    }
    Ok(known)
}

/// Side information of one SC pass.
#[derive(Debug, Clone, Copy)]
pub struct SideInfo<'a> {
    /// LLRs of the codeword given every observation.
    pub joint: &'a [f64],
    /// LLRs given the superposition layer alone, needed to repeat the
    /// encoder's argmax decisions.
    pub prior: Option<&'a [f64]>,
}

/// SC decoding with side information.
///
/// Known indices are copied; argmax indices repeat the encoder's rule on the
/// prior lane; all other indices take the hard decision on the joint lane
/// (ties go to 0).
pub fn sc_decode_with_side_info(p: &IndexPartition, known: &[Option<u8>], side: SideInfo<'_>) -> Result<BitBlock> {
    let n = p.len();
    if known.len() != n || side.joint.len() != n {
        return Err(invalid!("decoder inputs must have length {n}"));
    }
    for (j, k) in known.iter().enumerate() {
        if k.is_none() && !p.is_decoded(j) {
            return Err(invalid!("index {j} is neither known nor estimated"));
        }
    }
    let needs_prior = (0..n).any(|j| known[j].is_none() && p.is_argmax(j));
    let mut u = vec![0; n];
    match (needs_prior, side.prior) {
        (true, Some(prior)) => {
            let mut pass = ScPass::new(n, 2);
            pass.run(&[side.joint, prior], &mut u, |j, l| match known[j] {
                Some(b) => b,
                None if p.is_argmax(j) => (l[1] < 0.0) as u8,
                None => (l[0] < 0.0) as u8,
            });
        }
        (true, None) => return Err(invalid!("argmax indices need the prior lane")),
        (false, _) => {
            let mut pass = ScPass::new(n, 1);
            pass.run(&[side.joint], &mut u, |j, l| known[j].unwrap_or((l[0] < 0.0) as u8));
        }
    }
    Ok(BitBlock::from_raw(u))
}

/// One receiver's estimate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoded {
    /// `û` of each decoded block, layer 1 first.
    pub u: Vec<BitBlock>,
    /// Message estimates: all messages (NLD-LS) or layers `1..=k` (LD-NLS).
    pub messages: MessageSet,
}

fn extract(p: &IndexPartition, u: &BitBlock) -> Vec<Vec<u8>> {
    (0..p.message_sizes().len()).map(|m| p.message_indices(m).iter().map(|&j| u.bits()[j]).collect()).collect()
}

fn symbol_llrs(c: Component, ys: &[Symbol]) -> Vec<f64> {
    ys.iter().map(|&y| clamp(c.llr(y))).collect()
}

fn receiver_output(trace: &TransmissionTrace, k: usize) -> Result<&[Symbol]> {
    trace.receivers.get(k.wrapping_sub(1)).map(Vec::as_slice).ok_or_else(|| invalid!("no receiver {k}"))
}

/// Non-layered decoder at receiver `k`.
pub fn decode_nldls(
    spec: &BroadcastChannelSpec,
    trace: &TransmissionTrace,
    p: &IndexPartition,
    keys: &KeyMaterial,
    masked_phi: &[u8],
    k: usize,
) -> Result<Decoded> {
    keys.check(&[p])?;
    let ys = receiver_output(trace, k)?;
    let param = spec.receivers()[k - 1];
    let component = match spec.kind() {
        ChannelKind::Erasure => Component::Erasure(param),
        ChannelKind::Symmetric => Component::Crossover(param),
    };
    let phi = apply_phi_key(masked_phi, &keys.phi_key[0])?;
    let known = known_bits(p, &keys.common[0], &phi)?;
    let llrs = symbol_llrs(component, ys);
    let u = sc_decode_with_side_info(p, &known, SideInfo { joint: &llrs, prior: None })?;
    let messages = MessageSet { messages: extract(p, &u) };
    Ok(Decoded { u: vec![u], messages })
}

/// Layered decoder at receiver `k`: decodes layers `1..=k` in order,
/// re-encoding each estimate to serve as side information for the next.
pub fn decode_ldnls(
    spec: &BroadcastChannelSpec,
    trace: &TransmissionTrace,
    p: &LayeredPartition,
    keys: &KeyMaterial,
    masked_phi: &[Vec<u8>],
    k: usize,
) -> Result<Decoded> {
    let alpha = superposition_alpha(spec)?;
    let blocks: Vec<&IndexPartition> = p.layers.iter().collect();
    keys.check(&blocks)?;
    if k == 0 || k > blocks.len() || masked_phi.len() != blocks.len() {
        return Err(invalid!("receiver {k} and {} Φ sequences for {} layers", masked_phi.len(), blocks.len()));
    }
    let ys = receiver_output(trace, k)?;
    let alpha_y = spec.receivers()[k - 1];
    let mut us = Vec::new();
    let mut messages = Vec::new();
    let mut v: Option<Vec<u8>> = None;
    for (layer, block) in blocks.iter().enumerate().take(k) {
        let phi = apply_phi_key(&masked_phi[layer], &keys.phi_key[layer])?;
        let known = known_bits(block, &keys.common[layer], &phi)?;
        let u = match &v {
            None => {
                let llrs = symbol_llrs(Component::Crossover(conv(alpha, alpha_y)), ys);
                sc_decode_with_side_info(block, &known, SideInfo { joint: &llrs, prior: None })?
            }
            Some(v) => {
                let prior = superposition_llrs(v, alpha);
                let from_y = symbol_llrs(Component::Crossover(alpha_y), ys);
                let joint: Vec<f64> = prior.iter().zip(&from_y).map(|(a, b)| a + b).collect();
                sc_decode_with_side_info(block, &known, SideInfo { joint: &joint, prior: Some(&prior) })?
            }
        };
        let mut codeword = u.bits().to_vec();
        transform_in_place(&mut codeword);
        v = Some(codeword);
        messages.push(extract(block, &u).pop().unwrap_or_default());
        us.push(u);
    }
    Ok(Decoded { u: us, messages: MessageSet { messages } })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::sample_broadcast;
    use crate::partition::{partition_nldls, scaled_rates, CodeParameters, NldlsProfiles};
    use crate::profile::bec_bhattacharyya_profile;
    use crate::rng::{substream, Tag};
    use crate::transform::polar_transform;

    fn nldls_code(n: usize, rho: f64) -> IndexPartition {
        let (y1, z1, z2) = (
            bec_bhattacharyya_profile(0.04, n).unwrap(),
            bec_bhattacharyya_profile(0.35, n).unwrap(),
            bec_bhattacharyya_profile(0.2, n).unwrap(),
        );
        let params = CodeParameters::nldls(n, 0.16, 0.30, scaled_rates(&[0.15, 0.16], rho)).unwrap();
        partition_nldls(&NldlsProfiles { receiver: &y1, eavesdroppers: &[&z1, &z2] }, &params).unwrap()
    }

    #[test]
    fn copy_branches_and_transform() {
        let p = nldls_code(256, 0.9);
        let mut rng = substream(1, Tag::Keys, 0);
        let keys = KeyMaterial::random(&[&p], &mut rng);
        let msgs = MessageSet::random(&MessageSet::sizes_nldls(&p), &mut rng);
        let enc = encode_nldls(&p, &msgs, &keys, &mut rng).unwrap();
        let layer = &enc.layers[0];
        for m in 0..2 {
            let got: Vec<u8> = p.message_indices(m).iter().map(|&j| layer.u[j]).collect();
            assert_eq!(got, msgs.messages[m]);
        }
        let got: Vec<u8> = p.common_indices().iter().map(|&j| layer.u[j]).collect();
        assert_eq!(got, keys.common[0]);
        let got: Vec<u8> = p.local_indices().iter().map(|&j| layer.u[j]).collect();
        assert_eq!(got, layer.local);
        assert_eq!(enc.x, polar_transform(&BitBlock::new(layer.u.clone()).unwrap()));
        assert_eq!(apply_phi_key(&layer.masked_phi, &keys.phi_key[0]).unwrap(), layer.phi);
        assert!(layer.branches.iter().all(|b| !matches!(b, Branch::Random | Branch::Argmax)));
    }

    #[test]
    fn rejects_wrong_lengths() {
        let p = nldls_code(256, 0.9);
        let mut rng = substream(2, Tag::Keys, 0);
        let keys = KeyMaterial::random(&[&p], &mut rng);
        let mut msgs = MessageSet::random(&MessageSet::sizes_nldls(&p), &mut rng);
        msgs.messages[0].pop();
        assert!(encode_nldls(&p, &msgs, &keys, &mut rng).is_err());
    }

    #[test]
    fn noiseless_round_trip() {
        let n = 1024;
        let p = nldls_code(n, 0.9);
        let spec = BroadcastChannelSpec::erasure(vec![0.0, 0.0], vec![0.0, 0.0]).unwrap();
        let mut rng = substream(3, Tag::Keys, 0);
        let keys = KeyMaterial::random(&[&p], &mut rng);
        let msgs = MessageSet::random(&MessageSet::sizes_nldls(&p), &mut rng);
        let enc = encode_nldls(&p, &msgs, &keys, &mut rng).unwrap();
        let trace = sample_broadcast(&spec, &enc.x, &mut rng);
        for k in 1..=2 {
            let dec = decode_nldls(&spec, &trace, &p, &keys, &enc.layers[0].masked_phi, k).unwrap();
            assert_eq!(dec.messages, msgs);
            assert_eq!(dec.u[0].bits(), enc.layers[0].u.as_slice());
        }
    }

    #[test]
    fn all_known_ignores_observations() {
        let p = nldls_code(64, 0.9);
        let known: Vec<Option<u8>> = (0..64).map(|j| Some((j % 2) as u8)).collect();
        let junk = vec![-5.0; 64];
        let u = sc_decode_with_side_info(&p, &known, SideInfo { joint: &junk, prior: None }).unwrap();
        assert!(u.bits().iter().enumerate().all(|(j, &b)| b == (j % 2) as u8));
        let mut missing = known.clone();
        let j = (0..64).find(|&j| !p.is_decoded(j)).unwrap();
        missing[j] = None;
        assert!(sc_decode_with_side_info(&p, &missing, SideInfo { joint: &junk, prior: None }).is_err());
    }
}
