//! Finite-length reliability, leakage and total-variation bounds.

use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use crate::channel::BroadcastChannelSpec;
use crate::codec::superposition_llrs;
use crate::error::{invalid, Error, Result};
use crate::math::{ln, prob_zero, sqrt, xlog2x};
use crate::partition::{IndexPartition, LayeredPartition, Role, Scheme};
use crate::profile::{Metric, PolarizationProfile};
use crate::rng::{substream, Tag};
use crate::sc::ScPass;

fn check_profile(p: &IndexPartition, prof: &PolarizationProfile) -> Result<()> {
    if p.len() != prof.len() {
        return Err(invalid!("profile length {} does not match partition length {}", prof.len(), p.len()));
    }
    Ok(())
}

fn require(prof: &PolarizationProfile, metric: Metric, what: &str) -> Result<()> {
    if prof.metric() != metric {
        return Err(invalid!("{what} needs a {metric:?} profile"));
    }
    Ok(())
}

fn mean_over(indices: &[usize], f: impl Fn(usize) -> f64, what: &str) -> Result<f64> {
    if indices.is_empty() {
        return Err(Error::UndefinedBound(format!("{what}: the low-entropy set is empty")));
    }
    Ok(indices.iter().map(|&j| f(j)).sum::<f64>() / indices.len() as f64)
}

/// Average of `Z(U(j) | U^{1:j−1}, Y^n)` over the receiver's decoded set.
///
/// With the weakest receiver's profile this is the non-layered scheme's
/// bit-error bound; a better receiver's profile bounds that receiver.
pub fn pb_ub_nldls(p: &IndexPartition, receiver: &PolarizationProfile) -> Result<f64> {
    check_profile(p, receiver)?;
    require(receiver, Metric::Bhattacharyya, "the non-layered reliability bound")?;
    mean_over(&p.receiver_low_indices(), |j| receiver.values()[j], "P_b bound")
}

/// Leakage bound against eavesdropper `m` (one-based):
/// `Σ_{j ∈ I_m ∪ … ∪ I_M ∪ F} (1 − Z(U(j) | U^{1:j−1}, Z_m^n)²)`.
pub fn leakage_ub_nldls(p: &IndexPartition, eavesdropper: &PolarizationProfile, m: usize) -> Result<f64> {
    check_profile(p, eavesdropper)?;
    require(eavesdropper, Metric::Bhattacharyya, "the non-layered leakage bound")?;
    if m == 0 {
        return Err(invalid!("eavesdroppers are numbered from 1"));
    }
    let (z, c) = (eavesdropper.values(), eavesdropper.complements());
    let total = p
        .roles()
        .iter()
        .enumerate()
        .filter(|(_, r)| match r {
            Role::Message(i) => *i + 1 >= m,
            Role::Common => true,
            _ => false,
        })
        .map(|(j, _)| c[j] * (1.0 + z[j]))
        .sum::<f64>();
    debug_assert!(total >= 0.0);
    Ok(total)
}

/// Rate of the secret sequence, `|cand ∖ L| / n`.
pub fn phi_rate(p: &IndexPartition) -> f64 {
    p.phi_rate_count() as f64 / p.len() as f64
}

/// Overall Φ rate of a layered code, summed over layers.
pub fn phi_rate_layered(p: &LayeredPartition) -> f64 {
    p.layers.iter().map(phi_rate).sum()
}

fn layer2(p: &IndexPartition) -> Result<()> {
    if p.scheme() != (Scheme::LdNls { layer: 2 }) {
        return Err(invalid!("expected a layer-2 partition, got {}", p.scheme()));
    }
    Ok(())
}

/// Pinsker term over the high-entropy set of the superposed layer:
/// `sqrt(2 ln 2 · Σ_{j ∈ H_{X|V}} (1 − H(U_2(j) | U_2^{1:j−1}, V^n)))`.
pub fn dtv_ub_h(prior: &PolarizationProfile, p: &IndexPartition) -> Result<f64> {
    layer2(p)?;
    check_profile(p, prior)?;
    require(prior, Metric::Entropy, "the Pinsker term")?;
    let gap: f64 = p
        .roles()
        .iter()
        .enumerate()
        .filter(|(_, r)| **r != Role::Transition)
        .map(|(j, _)| prior.complements()[j])
        .sum();
    Ok(sqrt(2.0 * ln(2.0) * gap))
}

/// Monte-Carlo estimate of the argmax penalty
/// `E[Σ_{j ∈ L_{X|V}} (1 − max_u p(u | ǔ^{1:j−1}, v̌))]` under the check
/// encoder: `v̌` uniform, `ǔ(j)` uniform on `H_{X|V}` and drawn from the
/// design conditional elsewhere.
pub fn dtv_ub_l(spec: &BroadcastChannelSpec, p: &IndexPartition, trials: u64, seed: u64) -> Result<f64> {
    layer2(p)?;
    let alpha = spec
        .superposition()
        .ok_or_else(|| Error::UnsupportedChannel("the argmax penalty needs a superposition layer".to_string()))?;
    if trials == 0 {
        return Err(invalid!("trial count must be positive"));
    }
    let n = p.len();
    if p.argmax_indices().is_empty() {
        return Ok(0.0);
    }
    let uniform: Vec<bool> = p.roles().iter().map(|r| *r != Role::Transition).collect();
    let mut pass = ScPass::new(n, 1);
    let mut u = vec![0; n];
    let mut total = 0.0;
    for t in 0..trials {
        let mut rng = substream(seed, Tag::CheckEncoder, t);
        let v: Vec<u8> = (0..n).map(|_| rng.gen::<bool>() as u8).collect();
        let prior = superposition_llrs(&v, alpha);
        let mut penalty = 0.0;
        pass.run(&[&prior], &mut u, |j, l| {
            if uniform[j] {
                return rng.gen::<bool>() as u8;
            }
            let p0 = prob_zero(l[0]);
            if p.is_argmax(j) {
                penalty += p0.min(1.0 - p0);
            }
            (rng.gen::<f64>() >= p0) as u8
        });
        total += penalty;
    }
    Ok(total / trials as f64)
}

/// Profiles entering the layered-decoding bounds.
#[derive(Debug, Clone, Copy)]
pub struct LdnlsBoundProfiles<'a> {
    /// Layer 1 given `Y_1`.
    pub layer1_y1: &'a PolarizationProfile,
    /// Layer 1 given `Y_2`.
    pub layer1_y2: &'a PolarizationProfile,
    /// Layer 2 given `(V, Y_2)`.
    pub layer2_y2: &'a PolarizationProfile,
    /// Layer 1 given `Z_M`.
    pub layer1_z: &'a PolarizationProfile,
    /// Layer 2 given `(V, Z_M)`.
    pub layer2_z: &'a PolarizationProfile,
}

/// Reliability bound of the layered scheme at receiver `k ∈ {1, 2}`,
/// bounding Bhattacharyya parameters by `sqrt(H)`.
pub fn pb_ub_ldnls(p: &LayeredPartition, prof: &LdnlsBoundProfiles<'_>, dtv: f64, k: usize) -> Result<f64> {
    if p.layers.len() != 2 {
        return Err(Error::UnsupportedConfiguration("layered bounds are implemented for K = 2".to_string()));
    }
    let (l1, l2) = (&p.layers[0], &p.layers[1]);
    let low1 = l1.receiver_low_indices();
    match k {
        1 => {
            check_profile(l1, prof.layer1_y1)?;
            let h = prof.layer1_y1.values();
            Ok(dtv + mean_over(&low1, |j| sqrt(h[j]), "receiver 1")?)
        }
        2 => {
            check_profile(l1, prof.layer1_y2)?;
            check_profile(l2, prof.layer2_y2)?;
            let (h1, h2) = (prof.layer1_y2.values(), prof.layer2_y2.values());
            let first = mean_over(&low1, |j| sqrt(h1[j]), "receiver 2, layer 1")?;
            let second = mean_over(&l2.receiver_low_indices(), |j| sqrt(h2[j]), "receiver 2, layer 2")?;
            Ok(2.0 * dtv + 2.0 * first + second)
        }
        _ => Err(invalid!("receiver {k} outside 1..=2")),
    }
}

/// Leakage bound of the layered scheme against the strongest eavesdropper:
/// `4n d − 2 d log2 d + Σ_ℓ |I_ℓ ∪ F_ℓ| − Σ_ℓ Σ_{j ∈ I_ℓ ∪ F_ℓ} H(U_ℓ(j) | ·)`.
pub fn leakage_ub_ldnls(p: &LayeredPartition, prof: &LdnlsBoundProfiles<'_>, dtv: f64) -> Result<f64> {
    if p.layers.len() != 2 {
        return Err(Error::UnsupportedConfiguration("layered bounds are implemented for K = 2".to_string()));
    }
    if dtv < 0.0 {
        return Err(invalid!("total-variation bound must be nonnegative"));
    }
    let n = p.len() as f64;
    let mut total = 4.0 * n * dtv - 2.0 * xlog2x(dtv);
    for (layer, z) in p.layers.iter().zip([prof.layer1_z, prof.layer2_z]) {
        check_profile(layer, z)?;
        total += layer
            .roles()
            .iter()
            .enumerate()
            .filter(|(_, r)| matches!(r, Role::Message(_) | Role::Common))
            .map(|(j, _)| z.complements()[j])
            .sum::<f64>();
    }
    Ok(total)
}

/// Bound values for one code.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    /// Scheme of the code (layer number ignored).
    pub scheme: Scheme,
    /// Blocklength.
    pub n: usize,
    /// Reliability bound per receiver, `Y_1` first.
    pub pb: Vec<f64>,
    /// Leakage bound per eavesdropper (NLD-LS) or against the strongest one (LD-NLS).
    pub leakage: Vec<f64>,
    /// Φ rate.
    pub phi_rate: f64,
    /// Argmax term of the total-variation bound.
    pub dtv_l: f64,
    /// Pinsker term of the total-variation bound.
    pub dtv_h: f64,
}

impl BoundReport {
    /// Total-variation bound `d_TV^(L) + d_TV^(H)`.
    pub fn dtv(&self) -> f64 {
        self.dtv_l + self.dtv_h
    }

    /// Bounds of a non-layered code from exact profiles given each receiver
    /// (`Y_1` first) and each eavesdropper (`Z_1` first).
    pub fn nldls(
        p: &IndexPartition,
        receivers: &[&PolarizationProfile],
        eavesdroppers: &[&PolarizationProfile],
    ) -> Result<Self> {
        let pb = receivers.iter().map(|r| pb_ub_nldls(p, r)).collect::<Result<Vec<_>>>()?;
        let leakage =
            eavesdroppers.iter().enumerate().map(|(m, z)| leakage_ub_nldls(p, z, m + 1)).collect::<Result<Vec<_>>>()?;
        Ok(Self { scheme: Scheme::NldLs, n: p.len(), pb, leakage, phi_rate: phi_rate(p), dtv_l: 0.0, dtv_h: 0.0 })
    }

    /// Bounds of a layered code. With `include_dtv` false the
    /// total-variation terms are set to zero in the reliability and leakage
    /// bounds but still reported.
    pub fn ldnls(
        p: &LayeredPartition,
        prof: &LdnlsBoundProfiles<'_>,
        dtv_l: f64,
        dtv_h: f64,
        include_dtv: bool,
    ) -> Result<Self> {
        let d = if include_dtv { dtv_l + dtv_h } else { 0.0 };
        let pb = vec![pb_ub_ldnls(p, prof, d, 1)?, pb_ub_ldnls(p, prof, d, 2)?];
        let leakage = vec![leakage_ub_ldnls(p, prof, d)?];
        Ok(Self {
            scheme: Scheme::LdNls { layer: 0 },
            n: p.len(),
            pb,
            leakage,
            phi_rate: phi_rate_layered(p),
            dtv_l,
            dtv_h,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::{partition_nldls, scaled_rates, CodeParameters, NldlsProfiles};
    use crate::profile::bec_bhattacharyya_profile;

    fn setup(n: usize, rho: f64) -> (IndexPartition, [PolarizationProfile; 4]) {
        let profs = [0.04, 0.01, 0.35, 0.2].map(|e| bec_bhattacharyya_profile(e, n).unwrap());
        let params = CodeParameters::nldls(n, 0.16, 0.30, scaled_rates(&[0.15, 0.16], rho)).unwrap();
        let p =
            partition_nldls(&NldlsProfiles { receiver: &profs[0], eavesdroppers: &[&profs[2], &profs[3]] }, &params)
                .unwrap();
        (p, profs)
    }

    #[test]
    fn pb_is_mean_over_low_set() {
        let n = 8;
        let prof = bec_bhattacharyya_profile(0.25, n).unwrap();
        let mut sorted = prof.values().to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // Pick β so that exactly three indices fall below δ^(r).
        let dr = (sorted[2] + sorted[3]) / 2.0;
        let beta = libm::log2(-libm::log2(dr)) / 3.0;
        let z1 = bec_bhattacharyya_profile(0.9, n).unwrap();
        let params = CodeParameters::nldls(n, beta, 0.5, vec![0.0]).unwrap();
        let p = partition_nldls(&NldlsProfiles { receiver: &prof, eavesdroppers: &[&z1] }, &params).unwrap();
        assert_eq!(p.receiver_low_indices().len(), 3);
        let expect = (sorted[0] + sorted[1] + sorted[2]) / 3.0;
        assert!((pb_ub_nldls(&p, &prof).unwrap() - expect).abs() < 1e-15);
    }

    #[test]
    fn perfect_receiver_has_zero_bound() {
        let (p, _) = setup(512, 0.9);
        let perfect = bec_bhattacharyya_profile(0.0, 512).unwrap();
        assert_eq!(pb_ub_nldls(&p, &perfect).unwrap(), 0.0);
    }

    #[test]
    fn leakage_is_bounded_by_set_size() {
        let (p, profs) = setup(1024, 0.9);
        for m in 1..=2 {
            let l = leakage_ub_nldls(&p, &profs[1 + m], m).unwrap();
            let size = p.common_indices().len() + (m - 1..2).map(|i| p.message_indices(i).len()).sum::<usize>();
            assert!(l >= 0.0 && l <= size as f64);
        }
    }

    #[test]
    fn leakage_of_empty_sets_is_zero() {
        let n = 64;
        let y = bec_bhattacharyya_profile(0.0, n).unwrap();
        let z = bec_bhattacharyya_profile(0.5, n).unwrap();
        let params = CodeParameters::nldls(n, 0.16, 0.30, vec![0.0]).unwrap();
        let p = partition_nldls(&NldlsProfiles { receiver: &y, eavesdroppers: &[&z] }, &params).unwrap();
        assert!(p.common_indices().is_empty());
        assert_eq!(leakage_ub_nldls(&p, &z, 1).unwrap(), 0.0);
    }

    #[test]
    fn phi_rate_vanishes_without_gap() {
        let n = 256;
        let y =
            PolarizationProfile::from_values(Metric::Bhattacharyya, (0..n).map(|j| (j % 2) as f64).collect()).unwrap();
        let params = CodeParameters::nldls(n, 0.16, 0.30, vec![0.0]).unwrap();
        let p = partition_nldls(&NldlsProfiles { receiver: &y, eavesdroppers: &[&y] }, &params).unwrap();
        assert_eq!(phi_rate(&p), 0.0);
    }

    #[test]
    fn entropy_profiles_are_rejected_by_bec_bounds() {
        let (p, _) = setup(256, 0.9);
        let h = PolarizationProfile::from_values(Metric::Entropy, vec![0.5; 256]).unwrap();
        assert!(pb_ub_nldls(&p, &h).is_err());
    }
}
