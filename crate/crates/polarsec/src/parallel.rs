//! Multi-threaded drivers whose output does not depend on the thread count.

use rayon::prelude::*;

use polarsec_core::campaign::{check_campaign_args, run_trial, CampaignResult, Code, TrialOutcome};
use polarsec_core::channel::{BroadcastChannelSpec, Conditioning, ObservationChannel};
use polarsec_core::profile::{check_mc_args, combine_chunks, mc_chunk, mc_chunks, PolarizationProfile};
use polarsec_core::Result;

/// Parallel [`polarsec_core::profile::mc_entropy_profile_for`]; bit-identical to it.
pub fn mc_entropy_profile_for(
    channel: &ObservationChannel,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<PolarizationProfile> {
    check_mc_args(n, trials)?;
    let parts: Vec<_> = (0..mc_chunks(trials)).into_par_iter().map(|c| mc_chunk(channel, n, trials, seed, c)).collect();
    Ok(combine_chunks(parts).expect("at least one chunk").finish())
}

/// Parallel [`polarsec_core::profile::mc_entropy_profile`].
pub fn mc_entropy_profile(
    spec: &BroadcastChannelSpec,
    cond: Conditioning,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<PolarizationProfile> {
    mc_entropy_profile_for(&spec.observation(cond)?, n, trials, seed)
}

/// Runs every trial of a campaign in parallel and returns the outcomes in trial order.
pub fn run_trials(
    spec: &BroadcastChannelSpec,
    code: Code<'_>,
    trials: u64,
    blocks: usize,
    seed: u64,
) -> Result<Vec<TrialOutcome>> {
    check_campaign_args(trials, blocks)?;
    (0..trials).into_par_iter().map(|t| run_trial(spec, code, blocks, seed, t)).collect()
}

/// Parallel [`polarsec_core::campaign::run_campaign`]; identical result.
pub fn run_campaign(
    spec: &BroadcastChannelSpec,
    code: Code<'_>,
    trials: u64,
    blocks: usize,
    seed: u64,
) -> Result<CampaignResult> {
    let outcomes = run_trials(spec, code, trials, blocks, seed)?;
    Ok(CampaignResult::from_outcomes(spec.num_receivers(), blocks, outcomes))
}
