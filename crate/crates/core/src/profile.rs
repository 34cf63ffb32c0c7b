//! Polarization profiles: one reliability value per synthesized bit-channel.

use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::channel::{BroadcastChannelSpec, Conditioning, ObservationChannel};
use crate::error::{invalid, Result};
use crate::math::entropy_from_llr;
use crate::rng::{substream, Tag};
use crate::sc::polarize_zero;
use crate::transform::log2_len;

/// Which reliability metric a profile holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// Bhattacharyya parameter (equal to the entropy on erasure channels).
    Bhattacharyya,
    /// Conditional entropy in bits.
    Entropy,
}

/// Per-index values of `Z(U(j) | U^{1:j-1}, side info)` or
/// `H(U(j) | U^{1:j-1}, side info)`.
///
/// Next to each value the profile keeps its complement `1 − value`, computed
/// without cancellation, so that thresholds like `value ≥ 1 − δ` stay exact
/// when `δ` is far below machine epsilon.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationProfile {
    metric: Metric,
    values: Vec<f64>,
    complements: Vec<f64>,
    std_errors: Option<Vec<f64>>,
    trials: u64,
    clamped: usize,
}

impl PolarizationProfile {
    /// Builds a profile from values and complements.
    pub fn from_parts(metric: Metric, values: Vec<f64>, complements: Vec<f64>) -> Result<Self> {
        log2_len(values.len())?;
        if values.len() != complements.len() {
            return Err(invalid!("{} values but {} complements", values.len(), complements.len()));
        }
        let bad = |v: &f64| !(0.0..=1.0).contains(v);
        if values.iter().any(bad) || complements.iter().any(bad) {
            return Err(invalid!("profile entries must lie in [0, 1]"));
        }
        Ok(Self { metric, values, complements, std_errors: None, trials: 0, clamped: 0 })
    }

    /// Builds a profile from values alone; complements are `1 − value`.
    pub fn from_values(metric: Metric, values: Vec<f64>) -> Result<Self> {
        let complements = values.iter().map(|v| 1.0 - v).collect();
        Self::from_parts(metric, values, complements)
    }

    /// Attaches Monte-Carlo diagnostics.
    pub fn with_diagnostics(mut self, std_errors: Option<Vec<f64>>, trials: u64, clamped: usize) -> Self {
        self.std_errors = std_errors;
        self.trials = trials;
        self.clamped = clamped;
        self
    }

    /// Blocklength.
    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Metric tag.
    pub fn metric(&self) -> Metric {
        self.metric
    }

    /// Values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Complements `1 − value`.
    pub fn complements(&self) -> &[f64] {
        &self.complements
    }

    /// Monte-Carlo standard errors, if estimated.
    pub fn std_errors(&self) -> Option<&[f64]> {
        self.std_errors.as_deref()
    }

    /// Number of Monte-Carlo trials (0 for exact profiles).
    pub fn trials(&self) -> u64 {
        self.trials
    }

    /// How many entries had to be clamped into `[0, 1]`.
    pub fn clamped(&self) -> usize {
        self.clamped
    }

    /// `value(j) ≥ 1 − δ`, evaluated as `complement(j) ≤ δ`.
    #[inline]
    pub fn is_high(&self, j: usize, delta: f64) -> bool {
        self.complements[j] <= delta
    }

    /// `value(j) ≤ δ`.
    #[inline]
    pub fn is_low(&self, j: usize, delta: f64) -> bool {
        self.values[j] <= delta
    }

    /// Orders indices by decreasing value, ties broken by ascending index.
    ///
    /// Near 1 the complements carry the resolution, so they decide there.
    pub fn cmp_desc(&self, a: usize, b: usize) -> Ordering {
        let (va, vb) = (self.values[a], self.values[b]);
        let primary = if va >= 0.5 && vb >= 0.5 {
            self.complements[a].total_cmp(&self.complements[b])
        } else {
            vb.total_cmp(&va)
        };
        primary.then(a.cmp(&b))
    }
}

/// Exact Bhattacharyya (= entropy) profile of an erasure channel.
///
/// Applies `z⁻ = 2z − z²` and `z⁺ = z²` once per level, most significant
/// level first, tracking `1 − z` alongside (`c⁻ = c²`, `c⁺ = c(1 + z)`).
pub fn bec_bhattacharyya_profile(epsilon: f64, n: usize) -> Result<PolarizationProfile> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(invalid!("erasure probability {epsilon} outside [0, 1]"));
    }
    let levels = log2_len(n)?;
    let mut z = vec![epsilon];
    let mut c = vec![1.0 - epsilon];
    for _ in 0..levels {
        let mut nz = Vec::with_capacity(2 * z.len());
        let mut nc = Vec::with_capacity(2 * z.len());
        for (&zi, &ci) in z.iter().zip(&c) {
            nz.push(zi * (2.0 - zi));
            nc.push(ci * ci);
            nz.push(zi * zi);
            nc.push((ci * (1.0 + zi)).min(1.0));
        }
        z = nz;
        c = nc;
    }
    Ok(PolarizationProfile {
        metric: Metric::Bhattacharyya,
        values: z,
        complements: c,
        std_errors: None,
        trials: 0,
        clamped: 0,
    })
}

/// Trials per deterministic Monte-Carlo chunk.
pub const MC_CHUNK: u64 = 256;

/// Running sums of per-index entropies over a batch of trials.
#[derive(Debug, Clone, PartialEq)]
pub struct McAccumulator {
    trials: u64,
    sum: Vec<f64>,
    sum_complement: Vec<f64>,
    sum_sq: Vec<f64>,
}

impl McAccumulator {
    /// Empty accumulator for blocklength `n`.
    pub fn new(n: usize) -> Self {
        Self { trials: 0, sum: vec![0.0; n], sum_complement: vec![0.0; n], sum_sq: vec![0.0; n] }
    }

    /// Trials accumulated.
    pub fn trials(&self) -> u64 {
        self.trials
    }

    /// Adds the other accumulator's sums.
    pub fn merge(mut self, other: &McAccumulator) -> Self {
        self.trials += other.trials;
        for (a, b) in self.sum.iter_mut().zip(&other.sum) {
            *a += b;
        }
        for (a, b) in self.sum_complement.iter_mut().zip(&other.sum_complement) {
            *a += b;
        }
        for (a, b) in self.sum_sq.iter_mut().zip(&other.sum_sq) {
            *a += b;
        }
        self
    }

    /// Means, clamped into `[0, 1]`, with standard errors.
    pub fn finish(self) -> PolarizationProfile {
        let t = self.trials as f64;
        let mut clamped = 0;
        let mut clamp = |x: f64| {
            if !(0.0..=1.0).contains(&x) {
                clamped += 1;
            }
            x.clamp(0.0, 1.0)
        };
        let values: Vec<f64> = self.sum.iter().map(|s| clamp(s / t)).collect();
        let complements: Vec<f64> = self.sum_complement.iter().map(|s| clamp(s / t)).collect();
        let std_errors = self
            .sum_sq
            .iter()
            .zip(&values)
            .map(|(sq, m)| {
                let var = (sq / t - m * m).max(0.0);
                libm::sqrt(var / t)
            })
            .collect();
        PolarizationProfile {
            metric: Metric::Entropy,
            values,
            complements,
            std_errors: Some(std_errors),
            trials: self.trials,
            clamped,
        }
    }
}

/// Number of chunks needed for `trials` trials.
pub fn mc_chunks(trials: u64) -> u64 {
    trials.div_ceil(MC_CHUNK)
}

/// Runs chunk `chunk` of a Monte-Carlo entropy estimate.
///
/// Trial `t` draws its channel noise from substream `(seed, Profile, t)`,
/// so the union of chunks is independent of how they are scheduled.
pub fn mc_chunk(channel: &ObservationChannel, n: usize, trials: u64, seed: u64, chunk: u64) -> McAccumulator {
    let mut acc = McAccumulator::new(n);
    let mut llrs = vec![0.0; n];
    let start = chunk * MC_CHUNK;
    let end = (start + MC_CHUNK).min(trials);
    for t in start..end {
        let mut rng = substream(seed, Tag::Profile, t);
        for l in llrs.iter_mut() {
            *l = channel.sample_llr_zero(&mut rng);
        }
        polarize_zero(&mut llrs);
        for (j, &l) in llrs.iter().enumerate() {
            let (h, c) = entropy_from_llr(l);
            acc.sum[j] += h;
            acc.sum_complement[j] += c;
            acc.sum_sq[j] += h * h;
        }
        acc.trials += 1;
    }
    acc
}

/// Merges chunk accumulators pairwise in order, so the floating-point
/// result does not depend on the order in which chunks were computed.
pub fn combine_chunks(mut parts: Vec<McAccumulator>) -> Option<McAccumulator> {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => a.merge(&b),
                None => a,
            });
        }
        parts = next;
    }
    parts.pop()
}

/// Checks the Monte-Carlo arguments shared by the sequential and parallel drivers.
pub fn check_mc_args(n: usize, trials: u64) -> Result<()> {
    log2_len(n)?;
    if trials == 0 {
        return Err(invalid!("Monte-Carlo trial count must be positive"));
    }
    Ok(())
}

/// Monte-Carlo entropy profile for an explicit observation channel.
pub fn mc_entropy_profile_for(
    channel: &ObservationChannel,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<PolarizationProfile> {
    check_mc_args(n, trials)?;
    let parts = (0..mc_chunks(trials)).map(|c| mc_chunk(channel, n, trials, seed, c)).collect();
    Ok(combine_chunks(parts).expect("at least one chunk").finish())
}

/// Monte-Carlo estimate of `H(U(j) | U^{1:j-1}, side info)` for every `j`.
///
/// Each trial transmits the all-zero block (valid because every supported
/// observation channel is symmetric), runs the LLR butterfly and averages
/// `h2(p(0 | ·))`.
pub fn mc_entropy_profile(
    spec: &BroadcastChannelSpec,
    cond: Conditioning,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<PolarizationProfile> {
    let channel = spec.observation(cond)?;
    mc_entropy_profile_for(&channel, n, trials, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::Component;

    #[test]
    fn bec_recursion_examples() {
        assert_eq!(bec_bhattacharyya_profile(0.3, 1).unwrap().values(), &[0.3]);
        assert_eq!(bec_bhattacharyya_profile(0.5, 2).unwrap().values(), &[0.75, 0.25]);
        assert!(bec_bhattacharyya_profile(0.0, 256).unwrap().values().iter().all(|&z| z == 0.0));
        assert!(bec_bhattacharyya_profile(1.2, 4).is_err());
        assert!(bec_bhattacharyya_profile(0.2, 6).is_err());
    }

    #[test]
    fn bec_mean_is_preserved() {
        for &eps in &[0.01, 0.2, 0.35, 0.5, 0.93] {
            let p = bec_bhattacharyya_profile(eps, 1 << 20).unwrap();
            let mean = p.values().iter().sum::<f64>() / p.len() as f64;
            assert!((mean - eps).abs() < 1e-12, "{eps}: {mean}");
        }
    }

    #[test]
    fn complements_are_consistent() {
        let p = bec_bhattacharyya_profile(0.35, 1 << 12).unwrap();
        for (v, c) in p.values().iter().zip(p.complements()) {
            assert!((v + c - 1.0).abs() < 1e-12);
        }
        // Far into the polarized tail the complement keeps resolution.
        let p = bec_bhattacharyya_profile(0.35, 1 << 20).unwrap();
        assert!(p.complements().iter().any(|&c| c > 0.0 && c < 1e-20));
    }

    #[test]
    fn ranking_breaks_ties_by_index() {
        let p = PolarizationProfile::from_values(Metric::Entropy, vec![0.2, 0.9, 0.2, 0.9]).unwrap();
        let mut idx: Vec<usize> = (0..4).collect();
        idx.sort_by(|&a, &b| p.cmp_desc(a, b));
        assert_eq!(idx, vec![1, 3, 0, 2]);
    }

    #[test]
    fn mc_degenerate_channels() {
        let clean = ObservationChannel::new(vec![Component::Crossover(0.0)]);
        let p = mc_entropy_profile_for(&clean, 16, 100, 1).unwrap();
        assert!(p.values().iter().all(|&h| h == 0.0));
        let useless = ObservationChannel::new(vec![Component::Crossover(0.5)]);
        let p = mc_entropy_profile_for(&useless, 16, 100, 1).unwrap();
        assert!(p.values().iter().all(|&h| (h - 1.0).abs() < 1e-12));
        assert!(mc_entropy_profile_for(&clean, 16, 0, 1).is_err());
    }

    #[test]
    fn mc_is_chunking_independent() {
        let ch = ObservationChannel::new(vec![Component::Crossover(0.1)]);
        let a = mc_entropy_profile_for(&ch, 32, 700, 9).unwrap();
        let b = mc_entropy_profile_for(&ch, 32, 700, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.trials(), 700);
    }

    #[test]
    fn mc_tracks_bec_recursion() {
        let ch = ObservationChannel::new(vec![Component::Erasure(0.4)]);
        let mc = mc_entropy_profile_for(&ch, 64, 20_000, 3).unwrap();
        let exact = bec_bhattacharyya_profile(0.4, 64).unwrap();
        for (j, (a, b)) in mc.values().iter().zip(exact.values()).enumerate() {
            // Each trial's entropy is 0 or 1, so the estimate is binomial.
            let se = libm::sqrt(b * (1.0 - b) / 20_000.0);
            assert!((a - b).abs() <= 5.0 * se + 1e-4, "index {j}: {a} vs {b}");
        }
    }
}
