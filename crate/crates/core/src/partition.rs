//! Index partitions for both schemes.
//!
//! Every index of a polar block gets exactly one [`Role`]: a message bit, a
//! local-randomness bit (`C`), a common-randomness bit (`F`) or a transition
//! bit (`T`, drawn by the encoder from the design distribution). Decoder-side
//! sets are stored as masks next to the roles.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{invalid, Error, Result};
use crate::profile::PolarizationProfile;
use crate::transform::log2_len;

/// `δ_n = 2^{−n^β}`.
pub fn delta(n: usize, beta: f64) -> f64 {
    libm::exp2(-libm::pow(n as f64, beta))
}

/// `⌈n R⌉`, the number of indices a rate `R` occupies.
pub fn set_size(n: usize, rate: f64) -> usize {
    libm::ceil(n as f64 * rate) as usize
}

/// Target rates `ρ R*_m` for a normalized budget `ρ`.
pub fn scaled_rates(corner: &[f64], rho: f64) -> Vec<f64> {
    corner.iter().map(|r| rho * r).collect()
}

/// δ exponents of one polar block.
///
/// `r` and `s` set the reliability and secrecy thresholds; `low` and `high`
/// set the polarization thresholds of the encoder's own distribution and are
/// only used by superposition layers with a non-uniform conditional law.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Betas {
    /// Reliability exponent `β^(r)`.
    pub r: f64,
    /// Secrecy exponent `β^(s)`.
    pub s: f64,
    /// Exponent for the low-entropy set of the encoder distribution.
    pub low: f64,
    /// Exponent for the high-entropy set of the encoder distribution.
    pub high: f64,
}

impl Betas {
    /// Exponents for a block whose encoder distribution is uniform.
    pub fn new(r: f64, s: f64) -> Self {
        Self { r, s, low: s, high: s }
    }
}

/// Blocklength, δ exponents and target rates.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeParameters {
    /// Blocklength.
    pub n: usize,
    /// One entry per polar block: a single one for NLD-LS, one per layer for LD-NLS.
    pub layers: Vec<Betas>,
    /// Target rates `R'`: one per eavesdropper (NLD-LS) or per layer (LD-NLS).
    pub rates: Vec<f64>,
}

impl CodeParameters {
    /// Parameters of the non-layered-decoding scheme.
    pub fn nldls(n: usize, beta_r: f64, beta_s: f64, rates: Vec<f64>) -> Result<Self> {
        let p = Self { n, layers: vec![Betas::new(beta_r, beta_s)], rates };
        p.validate()?;
        Ok(p)
    }

    /// Parameters of the layered-decoding scheme, one [`Betas`] per layer.
    pub fn ldnls(n: usize, layers: Vec<Betas>, rates: Vec<f64>) -> Result<Self> {
        if layers.len() != rates.len() {
            return Err(invalid!("{} layers but {} rates", layers.len(), rates.len()));
        }
        let p = Self { n, layers, rates };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        log2_len(self.n)?;
        for b in &self.layers {
            for beta in [b.r, b.s, b.low, b.high] {
                if !(beta > 0.0 && beta < 1.0) {
                    return Err(invalid!("δ exponent {beta} outside (0, 1)"));
                }
            }
        }
        if self.rates.iter().any(|r| !(0.0..=1.0).contains(r)) {
            return Err(invalid!("target rates must lie in [0, 1], got {:?}", self.rates));
        }
        Ok(())
    }

    /// `|I_m| = ⌈n R'_m⌉` for every target rate.
    pub fn message_sizes(&self) -> Vec<usize> {
        self.rates.iter().map(|&r| set_size(self.n, r)).collect()
    }
}

/// Which scheme (and layer) a partition belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Non-layered decoding, layered secrecy.
    NldLs,
    /// Layered decoding, non-layered secrecy; `layer` is one-based.
    LdNls {
        /// Layer number.
        layer: usize,
    },
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::NldLs => write!(f, "nldls"),
            Scheme::LdNls { layer } => write!(f, "ldnls-{layer}"),
        }
    }
}

/// How the encoder fills an index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    /// Bit of message `m` (zero-based within the block).
    Message(usize),
    /// Local randomness `C`.
    Local,
    /// Common randomness `F`.
    Common,
    /// Transition index `T`: sampled or argmax-decided by the encoder.
    Transition,
}

/// The partition of one polar block.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexPartition {
    scheme: Scheme,
    roles: Vec<Role>,
    message_sizes: Vec<usize>,
    candidates: Vec<bool>,
    receiver_low: Vec<bool>,
    decoder: Vec<bool>,
    encoder_low: Vec<bool>,
}

impl IndexPartition {
    /// Assembles a partition from its masks and checks every invariant.
    ///
    /// * `roles` — encoder role of each index;
    /// * `candidates` — the complement of the receiver's high-entropy set;
    /// * `receiver_low` — the receiver's low-entropy set `L`;
    /// * `decoder` — indices the receiver estimates (all others are known to it);
    /// * `encoder_low` — transition indices the encoder decides by argmax.
    pub fn from_parts(
        scheme: Scheme,
        roles: Vec<Role>,
        candidates: Vec<bool>,
        receiver_low: Vec<bool>,
        decoder: Vec<bool>,
        encoder_low: Vec<bool>,
    ) -> Result<Self> {
        let n = roles.len();
        log2_len(n)?;
        if [candidates.len(), receiver_low.len(), decoder.len(), encoder_low.len()].iter().any(|&l| l != n) {
            return Err(invalid!("partition masks must all have length {n}"));
        }
        let messages = roles
            .iter()
            .filter_map(|r| match r {
                Role::Message(m) => Some(m + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let mut message_sizes = vec![0; messages];
        for r in &roles {
            if let Role::Message(m) = r {
                message_sizes[*m] += 1;
            }
        }
        let p = Self { scheme, roles, message_sizes, candidates, receiver_low, decoder, encoder_low };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<()> {
        for j in 0..self.len() {
            let role = self.roles[j];
            if self.encoder_low[j] && role != Role::Transition {
                return Err(invalid!("index {j}: argmax index must be a transition index"));
            }
            if role == Role::Common && self.decoder[j] {
                return Err(invalid!("index {j}: common randomness must not be estimated"));
            }
            if matches!(role, Role::Message(_) | Role::Local) && !self.candidates[j] {
                return Err(invalid!("index {j}: message or local bit outside the candidate set"));
            }
        }
        Ok(())
    }

    /// Scheme tag.
    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// Blocklength.
    pub fn len(&self) -> usize {
        self.roles.len()
    }

    /// Always false.
    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
    }

    /// Role of every index.
    pub fn roles(&self) -> &[Role] {
        &self.roles
    }

    /// `|I_m|` for each message.
    pub fn message_sizes(&self) -> &[usize] {
        &self.message_sizes
    }

    fn collect(&self, pred: impl Fn(usize) -> bool) -> Vec<usize> {
        (0..self.len()).filter(|&j| pred(j)).collect()
    }

    /// Indices of message `m`.
    pub fn message_indices(&self, m: usize) -> Vec<usize> {
        self.collect(|j| self.roles[j] == Role::Message(m))
    }

    /// Indices of the local randomness `C`.
    pub fn local_indices(&self) -> Vec<usize> {
        self.collect(|j| self.roles[j] == Role::Local)
    }

    /// Indices of the common randomness `F`.
    pub fn common_indices(&self) -> Vec<usize> {
        self.collect(|j| self.roles[j] == Role::Common)
    }

    /// Transition indices `T`.
    pub fn transition_indices(&self) -> Vec<usize> {
        self.collect(|j| self.roles[j] == Role::Transition)
    }

    /// Whether the encoder decides index `j` by argmax.
    pub fn is_argmax(&self, j: usize) -> bool {
        self.encoder_low[j]
    }

    /// Transition indices decided by argmax.
    pub fn argmax_indices(&self) -> Vec<usize> {
        self.collect(|j| self.encoder_low[j])
    }

    /// Transition indices drawn at random.
    pub fn random_indices(&self) -> Vec<usize> {
        self.collect(|j| self.roles[j] == Role::Transition && !self.encoder_low[j])
    }

    /// The receiver's candidate set, the complement of its high-entropy set.
    pub fn candidate_indices(&self) -> Vec<usize> {
        self.collect(|j| self.candidates[j])
    }

    /// The receiver's low-entropy set `L`.
    pub fn receiver_low_indices(&self) -> Vec<usize> {
        self.collect(|j| self.receiver_low[j])
    }

    /// Whether the receiver estimates index `j`.
    pub fn is_decoded(&self, j: usize) -> bool {
        self.decoder[j]
    }

    /// Indices the receiver estimates.
    pub fn decoder_indices(&self) -> Vec<usize> {
        self.collect(|j| self.decoder[j])
    }

    /// Indices carried by the secret sequence Φ: everything the receiver
    /// neither estimates nor gets from the common randomness.
    pub fn phi_indices(&self) -> Vec<usize> {
        self.collect(|j| !self.decoder[j] && self.roles[j] != Role::Common)
    }

    /// `|cand ∖ L|`, the Φ size counted by the rate formulas.
    pub fn phi_rate_count(&self) -> usize {
        (0..self.len()).filter(|&j| self.candidates[j] && !self.receiver_low[j]).count()
    }
}

/// Profiles needed by the non-layered-decoding partition.
#[derive(Debug, Clone, Copy)]
pub struct NldlsProfiles<'a> {
    /// Profile given the weakest receiver `Y_1`.
    pub receiver: &'a PolarizationProfile,
    /// Profiles given `Z_1, …, Z_M`.
    pub eavesdroppers: &'a [&'a PolarizationProfile],
}

fn check_len(n: usize, profiles: &[&PolarizationProfile]) -> Result<()> {
    if let Some(p) = profiles.iter().find(|p| p.len() != n) {
        return Err(invalid!("profile has length {}, expected {n}", p.len()));
    }
    Ok(())
}

/// Picks the `k` free indices ranked highest by `profile`, marking them taken.
fn take_top(profile: &PolarizationProfile, free: &mut [bool], k: usize) -> Vec<usize> {
    let mut pool: Vec<usize> = (0..free.len()).filter(|&j| free[j]).collect();
    debug_assert!(pool.len() >= k);
    if k < pool.len() {
        pool.select_nth_unstable_by(k, |&a, &b| profile.cmp_desc(a, b));
    }
    pool.truncate(k);
    pool.sort_unstable();
    for &j in &pool {
        free[j] = false;
    }
    pool
}

/// Fills message roles from the last eavesdropper down to the first and
/// gives the rest of the candidate set to local randomness.
fn assign_messages(
    roles: &mut [Role],
    candidates: &[bool],
    eavesdroppers: &[&PolarizationProfile],
    sizes: &[usize],
    first_message: usize,
    context: &str,
) -> Result<()> {
    let available = candidates.iter().filter(|&&c| c).count();
    let needed: usize = sizes.iter().sum();
    if needed > available {
        return Err(Error::InfeasibleRate { needed, available, context: context.to_string() });
    }
    let mut free = candidates.to_vec();
    for m in (0..sizes.len()).rev() {
        for j in take_top(eavesdroppers[m], &mut free, sizes[m]) {
            roles[j] = Role::Message(first_message + m);
        }
    }
    for (j, f) in free.iter().enumerate() {
        if *f {
            roles[j] = Role::Local;
        }
    }
    Ok(())
}

/// Partition of the non-layered-decoding scheme with uniform input.
///
/// The candidate set is `{j : H_{Y_1}(j) ≤ 1 − δ^(s)}`. `I_M` takes the
/// `⌈n R'_M⌉` candidates with the largest values given `Z_M`, then `I_{M−1}`
/// the largest given `Z_{M−1}` among the rest, and so on; the remaining
/// candidates form `C` and everything else is `F`. The receiver estimates
/// `L = {j : H_{Y_1}(j) ≤ δ^(r)}`.
pub fn partition_nldls(profiles: &NldlsProfiles<'_>, params: &CodeParameters) -> Result<IndexPartition> {
    let n = params.n;
    let m = profiles.eavesdroppers.len();
    if params.layers.len() != 1 || params.rates.len() != m {
        return Err(invalid!("NLD-LS needs one δ pair and {m} rates"));
    }
    check_len(n, &[profiles.receiver])?;
    check_len(n, profiles.eavesdroppers)?;
    let b = params.layers[0];
    let (dr, ds) = (delta(n, b.r), delta(n, b.s));
    let y = profiles.receiver;
    let candidates: Vec<bool> = (0..n).map(|j| !y.is_high(j, ds)).collect();
    let receiver_low: Vec<bool> = (0..n).map(|j| y.is_low(j, dr)).collect();
    let mut roles = vec![Role::Common; n];
    assign_messages(&mut roles, &candidates, profiles.eavesdroppers, &params.message_sizes(), 0, "NLD-LS")?;
    let decoder = receiver_low.clone();
    IndexPartition::from_parts(Scheme::NldLs, roles, candidates, receiver_low, decoder, vec![false; n])
}

/// Profiles of the first (uniform) layer of the layered-decoding scheme.
#[derive(Debug, Clone, Copy)]
pub struct Layer1Profiles<'a> {
    /// `H(U_1(j) | ·, Y_1^n)`.
    pub receiver: &'a PolarizationProfile,
    /// `H(U_1(j) | ·, Z_M^n)`.
    pub eavesdropper: &'a PolarizationProfile,
}

/// Profiles of the second (superposed) layer.
#[derive(Debug, Clone, Copy)]
pub struct Layer2Profiles<'a> {
    /// `H(U_2(j) | ·, V^n)`.
    pub prior: &'a PolarizationProfile,
    /// `H(U_2(j) | ·, V^n, Y_2^n)`.
    pub receiver: &'a PolarizationProfile,
    /// `H(U_2(j) | ·, V^n, Z_M^n)`.
    pub eavesdropper: &'a PolarizationProfile,
}

/// First layer: as the non-layered partition with a single message ranked
/// against the strongest eavesdropper.
pub fn partition_ldnls_layer1(p: &Layer1Profiles<'_>, n: usize, betas: Betas, rate: f64) -> Result<IndexPartition> {
    check_len(n, &[p.receiver, p.eavesdropper])?;
    let (dr, ds) = (delta(n, betas.r), delta(n, betas.s));
    let candidates: Vec<bool> = (0..n).map(|j| !p.receiver.is_high(j, ds)).collect();
    let receiver_low: Vec<bool> = (0..n).map(|j| p.receiver.is_low(j, dr)).collect();
    let mut roles = vec![Role::Common; n];
    assign_messages(&mut roles, &candidates, &[p.eavesdropper], &[set_size(n, rate)], 0, "LD-NLS layer 1")?;
    let decoder = receiver_low.clone();
    IndexPartition::from_parts(Scheme::LdNls { layer: 1 }, roles, candidates, receiver_low, decoder, vec![false; n])
}

/// Second layer, superposed on the first.
///
/// `H_{X|V} = {prior ≥ 1 − δ^(2,H)}` and `L_{X|V} = {prior ≤ δ^(2,L)}`. The
/// candidates are the members of `H_{X|V}` with `H_{(V,Y_2)} ≤ 1 − δ^(2,s)`;
/// the message is ranked against `(V, Z_M)`. `F` is the rest of `H_{X|V}`,
/// `T` its complement. The receiver estimates `L_{X|VY_2}` by hard decision
/// and `L_{X|V}` by repeating the encoder's argmax; the remaining indices
/// outside `F` travel in Φ.
pub fn partition_ldnls_layer2(p: &Layer2Profiles<'_>, n: usize, betas: Betas, rate: f64) -> Result<IndexPartition> {
    check_len(n, &[p.prior, p.receiver, p.eavesdropper])?;
    let (dr, ds) = (delta(n, betas.r), delta(n, betas.s));
    let (dl, dh) = (delta(n, betas.low), delta(n, betas.high));
    let high: Vec<bool> = (0..n).map(|j| p.prior.is_high(j, dh)).collect();
    let encoder_low: Vec<bool> = (0..n).map(|j| p.prior.is_low(j, dl) && !high[j]).collect();
    let candidates: Vec<bool> = (0..n).map(|j| high[j] && !p.receiver.is_high(j, ds)).collect();
    let receiver_low: Vec<bool> = (0..n).map(|j| p.receiver.is_low(j, dr)).collect();
    let mut roles: Vec<Role> = high.iter().map(|&h| if h { Role::Common } else { Role::Transition }).collect();
    assign_messages(&mut roles, &candidates, &[p.eavesdropper], &[set_size(n, rate)], 0, "LD-NLS layer 2")?;
    let decoder: Vec<bool> = (0..n).map(|j| roles[j] != Role::Common && (receiver_low[j] || encoder_low[j])).collect();
    IndexPartition::from_parts(Scheme::LdNls { layer: 2 }, roles, candidates, receiver_low, decoder, encoder_low)
}

/// Both layers of a two-receiver layered-decoding code.
#[derive(Debug, Clone, PartialEq)]
pub struct LayeredPartition {
    /// Layer partitions, layer 1 first.
    pub layers: Vec<IndexPartition>,
}

impl LayeredPartition {
    /// Blocklength.
    pub fn len(&self) -> usize {
        self.layers[0].len()
    }

    /// Always false.
    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Builds both layers of a two-receiver layered-decoding code.
pub fn partition_ldnls(
    l1: &Layer1Profiles<'_>,
    l2: &Layer2Profiles<'_>,
    params: &CodeParameters,
) -> Result<LayeredPartition> {
    if params.layers.len() != 2 {
        return Err(Error::UnsupportedConfiguration("layered decoding is implemented for K = 2".to_string()));
    }
    let first = partition_ldnls_layer1(l1, params.n, params.layers[0], params.rates[0])?;
    let second = partition_ldnls_layer2(l2, params.n, params.layers[1], params.rates[1])?;
    Ok(LayeredPartition { layers: vec![first, second] })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::{bec_bhattacharyya_profile, Metric};

    fn bec(eps: f64, n: usize) -> PolarizationProfile {
        bec_bhattacharyya_profile(eps, n).unwrap()
    }

    fn nldls(n: usize, br: f64, bs: f64, rho: f64) -> Result<IndexPartition> {
        let (y1, z1, z2) = (bec(0.04, n), bec(0.35, n), bec(0.2, n));
        let params = CodeParameters::nldls(n, br, bs, scaled_rates(&[0.15, 0.16], rho))?;
        partition_nldls(&NldlsProfiles { receiver: &y1, eavesdroppers: &[&z1, &z2] }, &params)
    }

    #[test]
    fn delta_values() {
        assert_eq!(delta(1, 0.5), 0.5);
        assert!((delta(1024, 0.3) - libm::exp2(-libm::pow(1024.0, 0.3))).abs() < 1e-18);
    }

    #[test]
    fn message_sizes_use_ceiling() {
        let p = nldls(1024, 0.16, 0.30, 0.9).unwrap();
        assert_eq!(p.message_sizes(), &[139, 148]);
    }

    #[test]
    fn selection_matches_sort_oracle() {
        let n = 1024;
        let p = nldls(n, 0.16, 0.30, 0.9).unwrap();
        let (y1, z1, z2) = (bec(0.04, n), bec(0.35, n), bec(0.2, n));
        let ds = delta(n, 0.30);
        let cand: Vec<usize> = (0..n).filter(|&j| y1.values()[j] <= 1.0 - ds).collect();
        let mut by_z2 = cand.clone();
        by_z2.sort_by(|&a, &b| z2.values()[b].partial_cmp(&z2.values()[a]).unwrap().then(a.cmp(&b)));
        let mut i2: Vec<usize> = by_z2[..148].to_vec();
        i2.sort();
        let mut rest: Vec<usize> = cand.iter().copied().filter(|j| !i2.contains(j)).collect();
        rest.sort_by(|&a, &b| z1.values()[b].partial_cmp(&z1.values()[a]).unwrap().then(a.cmp(&b)));
        let mut i1 = rest[..139].to_vec();
        i1.sort();
        assert_eq!(p.message_indices(1), i2);
        assert_eq!(p.message_indices(0), i1);
    }

    #[test]
    fn phi_rate_first_point() {
        let p = nldls(256, 0.16, 0.30, 0.9).unwrap();
        assert_eq!(p.phi_indices().len(), 12);
        assert_eq!(p.phi_rate_count(), 12);
    }

    #[test]
    fn zero_rate_makes_everything_local() {
        let p = nldls(512, 0.16, 0.30, 0.0).unwrap();
        assert!(p.message_indices(0).is_empty() && p.message_indices(1).is_empty());
        assert_eq!(p.local_indices(), p.candidate_indices());
    }

    #[test]
    fn sets_cover_and_are_disjoint() {
        let p = nldls(2048, 0.16, 0.30, 0.8).unwrap();
        let mut count = vec![0; p.len()];
        let sets =
            [p.message_indices(0), p.message_indices(1), p.local_indices(), p.common_indices(), p.transition_indices()];
        for s in &sets {
            for &j in s {
                count[j] += 1;
            }
        }
        assert!(count.iter().all(|&c| c == 1));
        let phi = p.phi_indices();
        assert!(phi.iter().all(|&j| p.roles()[j] != Role::Common && !p.is_decoded(j)));
    }

    #[test]
    fn infeasible_rates_are_reported() {
        let (y1, z1, z2) = (bec(0.04, 16), bec(0.35, 16), bec(0.2, 16));
        let params = CodeParameters::nldls(16, 0.16, 0.30, vec![0.6, 0.6]).unwrap();
        let err = partition_nldls(&NldlsProfiles { receiver: &y1, eavesdroppers: &[&z1, &z2] }, &params).unwrap_err();
        assert!(matches!(err, Error::InfeasibleRate { .. }), "{err:?}");
    }

    #[test]
    fn larger_budget_extends_selection() {
        let small = nldls(1024, 0.16, 0.30, 0.5).unwrap();
        let large = nldls(1024, 0.16, 0.30, 0.9).unwrap();
        let s = small.message_indices(1);
        let l = large.message_indices(1);
        assert!(s.iter().all(|j| l.contains(j)));
    }

    #[test]
    fn degenerate_superposition_layer() {
        let n = 64;
        let zeros = PolarizationProfile::from_values(Metric::Entropy, vec![0.0; n]).unwrap();
        let l2 = Layer2Profiles { prior: &zeros, receiver: &zeros, eavesdropper: &zeros };
        let p = partition_ldnls_layer2(&l2, n, Betas { r: 0.24, s: 0.36, low: 0.36, high: 0.36 }, 0.0).unwrap();
        assert_eq!(p.transition_indices().len(), n);
        assert_eq!(p.argmax_indices().len(), n);
        assert!(p.phi_indices().is_empty());
        let ones = PolarizationProfile::from_values(Metric::Entropy, vec![1.0; n]).unwrap();
        let l2 = Layer2Profiles { prior: &ones, receiver: &ones, eavesdropper: &ones };
        let p = partition_ldnls_layer2(&l2, n, Betas { r: 0.24, s: 0.36, low: 0.36, high: 0.36 }, 0.0).unwrap();
        assert!(p.transition_indices().is_empty());
        assert_eq!(p.common_indices().len(), n);
    }
}
