//! Presets regenerating the published performance curves.
//!
//! Every preset returns raw rows and, for each series, a `*_smoothed` copy
//! passed through a centred five-point moving average whose span shrinks
//! to three and one point at the ends of the sweep. The published curves
//! are smoothed that way, so the smoothed rows are the ones to compare.

use polarsec_core::bounds::{dtv_ub_h, dtv_ub_l, leakage_ub_ldnls, pb_ub_ldnls, phi_rate_layered, LdnlsBoundProfiles};
use polarsec_core::channel::{secrecy_rates_ldnls, secrecy_rates_nldls, BroadcastChannelSpec};
use polarsec_core::math::smooth5;
use polarsec_core::partition::{scaled_rates, Betas, CodeParameters};
use polarsec_core::rng::derive_seed;
use polarsec_core::Error;

use crate::config::{ExperimentConfig, RateTarget, SchemeKind};
use crate::error::{CliError, Result};
use crate::pipeline::{build_partition, build_profiles, evaluate, Partition};
use crate::report::BoundRow;

/// Largest exponent a Monte-Carlo preset runs without `allow_large`.
pub const MC_PRESET_CAP: u32 = 13;

/// Erasure receivers `(Y_1, Y_2)` of the non-layered example.
pub const BEBC_RECEIVERS: [f64; 2] = [0.04, 0.01];
/// Erasure eavesdroppers `(Z_1, Z_2)`.
pub const BEBC_EAVESDROPPERS: [f64; 2] = [0.35, 0.2];
/// Crossover receivers `(Y_1, Y_2)` of the layered example.
pub const BSBC_RECEIVERS: [f64; 2] = [0.04, 0.01];
/// Crossover eavesdroppers `(Z_1, Z_2)`.
pub const BSBC_EAVESDROPPERS: [f64; 2] = [0.35, 0.2];
/// Superposition crossover of the layered example.
pub const BSBC_ALPHA_XV: f64 = 0.1084;
/// δ exponents of the layered example, layer 1 then layer 2.
pub const BSBC_BETAS: [Betas; 2] =
    [Betas { r: 0.24, s: 0.30, low: 0.30, high: 0.30 }, Betas { r: 0.24, s: 0.36, low: 0.36, high: 0.36 }];

/// Options shared by the presets.
#[derive(Debug, Clone, PartialEq)]
pub struct FigureOptions {
    /// Blocklength exponents; `None` picks the preset default.
    pub log2n: Option<Vec<u32>>,
    /// Allow Monte-Carlo presets beyond [`MC_PRESET_CAP`].
    pub allow_large: bool,
    /// Profile trials; `None` picks the preset default.
    pub n_tau: Option<u64>,
    /// Check-encoder trials.
    pub n_tau_check: u64,
    /// Master seed.
    pub seed: u64,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self { log2n: None, allow_large: false, n_tau: None, n_tau_check: 1000, seed: 1 }
    }
}

/// One curve of an erasure preset.
#[derive(Debug, Clone, Copy)]
struct Curve {
    beta_r: f64,
    beta_s: f64,
    rho: f64,
}

fn bebc_config(seed: u64) -> Result<ExperimentConfig> {
    Ok(ExperimentConfig {
        scheme: SchemeKind::NldLs,
        channel: BroadcastChannelSpec::erasure(BEBC_RECEIVERS.to_vec(), BEBC_EAVESDROPPERS.to_vec())?,
        log2n: Vec::new(),
        betas: vec![Betas::new(0.16, 0.30)],
        rates: RateTarget::Normalized(0.9),
        n_tau: 1,
        n_tau_check: 1,
        trials: 1,
        blocks: 1,
        seed,
        output: None,
    })
}

/// Appends `*_smoothed` rows for every `(curve, metric)` group of `raw`.
///
/// Rows of a group must be consecutive and ordered by `n`. NaN points are
/// left out of the average.
fn with_smoothed(raw: Vec<BoundRow>) -> Vec<BoundRow> {
    let mut out = Vec::with_capacity(raw.len() * 2);
    let mut start = 0;
    while start < raw.len() {
        let key = |r: &BoundRow| (r.metric.clone(), r.beta_r.to_bits(), r.beta_s.to_bits(), r.rho.map(f64::to_bits));
        let k = key(&raw[start]);
        let mut end = start;
        while end < raw.len() && key(&raw[end]) == k {
            end += 1;
        }
        let group = &raw[start..end];
        out.extend_from_slice(group);
        let finite: Vec<&BoundRow> = group.iter().filter(|r| r.value.is_finite()).collect();
        let smooth = smooth5(&finite.iter().map(|r| r.value).collect::<Vec<_>>());
        for (r, v) in finite.into_iter().zip(smooth) {
            out.push(BoundRow { metric: format!("{}_smoothed", r.metric), value: v, ..r.clone() });
        }
        start = end;
    }
    out
}

fn bebc_figure(curves: &[Curve], metrics: &[&str], sweep: &[u32], seed: u64) -> Result<Vec<BoundRow>> {
    let cfg = bebc_config(seed)?;
    let corner = secrecy_rates_nldls(&cfg.channel)?;
    // values[curve][metric][x]
    let mut values = vec![vec![Vec::with_capacity(sweep.len()); metrics.len()]; curves.len()];
    for &x in sweep {
        let n = 1usize << x;
        let prof = build_profiles(&cfg, x)?;
        for (c, curve) in curves.iter().enumerate() {
            let params = CodeParameters::nldls(n, curve.beta_r, curve.beta_s, scaled_rates(&corner, curve.rho))?;
            let bounds = match build_partition(&cfg, &prof, &params) {
                Ok(part) => Some(evaluate(&cfg, x, &prof, &part)?),
                Err(CliError::Core(Error::InfeasibleRate { .. })) => None,
                Err(e) => return Err(e),
            };
            for (m, metric) in metrics.iter().enumerate() {
                values[c][m].push(bounds.as_ref().and_then(|b| b.get(metric)).unwrap_or(f64::NAN));
            }
        }
    }
    let mut raw = Vec::new();
    for (c, curve) in curves.iter().enumerate() {
        for (m, metric) in metrics.iter().enumerate() {
            for (i, &x) in sweep.iter().enumerate() {
                raw.push(BoundRow {
                    scheme: "nldls".into(),
                    n: 1 << x,
                    beta_r: curve.beta_r,
                    beta_s: curve.beta_s,
                    rho: Some(curve.rho),
                    metric: metric.to_string(),
                    value: values[c][m][i],
                    n_tau: None,
                    seed,
                });
            }
        }
    }
    Ok(with_smoothed(raw))
}

fn curves(beta_r: &[f64], beta_s: &[f64], rho: &[f64]) -> Vec<Curve> {
    let mut out = Vec::new();
    for &r in beta_r {
        for &s in beta_s {
            for &p in rho {
                out.push(Curve { beta_r: r, beta_s: s, rho: p });
            }
        }
    }
    out
}

fn bsbc_figure(sweep: &[u32], opts: &FigureOptions) -> Result<Vec<BoundRow>> {
    let n_tau = opts.n_tau.unwrap_or(20_000);
    let mut cfg = bebc_config(opts.seed)?;
    cfg.scheme = SchemeKind::LdNls;
    cfg.channel = BroadcastChannelSpec::symmetric(BSBC_RECEIVERS.to_vec(), BSBC_EAVESDROPPERS.to_vec(), BSBC_ALPHA_XV)?;
    cfg.betas = BSBC_BETAS.to_vec();
    cfg.n_tau = n_tau;
    cfg.n_tau_check = opts.n_tau_check;
    let corner = secrecy_rates_ldnls(&cfg.channel)?;
    let rhos = [0.9, 0.8, 0.7];
    let fixed = ["pb0_ub_1", "pb0_ub_2", "phi_rate", "dtv_h", "dtv_l"];
    let mut fixed_vals = vec![Vec::new(); fixed.len()];
    let mut leak = vec![Vec::new(); rhos.len()];
    for &x in sweep {
        let n = 1usize << x;
        let prof = build_profiles(&cfg, x)?;
        let bp = LdnlsBoundProfiles {
            layer1_y1: prof.get("y1")?,
            layer1_y2: prof.get("y2")?,
            layer2_y2: prof.get("vy2")?,
            layer1_z: prof.get("z")?,
            layer2_z: prof.get("vz")?,
        };
        // Reliability, Φ rate and the total-variation terms do not depend on
        // the message sizes, so a zero-rate code gives them at every n.
        let params = CodeParameters::ldnls(n, cfg.betas.clone(), vec![0.0, 0.0])?;
        let Partition::LdNls(p) = build_partition(&cfg, &prof, &params)? else { unreachable!() };
        let undefined = |r: polarsec_core::Result<f64>| match r {
            Err(Error::UndefinedBound(_)) => Ok(f64::NAN),
            r => r,
        };
        let seed = derive_seed(opts.seed, ((x as u64) << 8) | 0xff);
        let row = [
            undefined(pb_ub_ldnls(&p, &bp, 0.0, 1))?,
            undefined(pb_ub_ldnls(&p, &bp, 0.0, 2))?,
            phi_rate_layered(&p),
            dtv_ub_h(prof.get("v")?, &p.layers[1])?,
            dtv_ub_l(&cfg.channel, &p.layers[1], opts.n_tau_check, seed)?,
        ];
        for (v, r) in fixed_vals.iter_mut().zip(row) {
            v.push(r);
        }
        for (i, &rho) in rhos.iter().enumerate() {
            let params = CodeParameters::ldnls(n, cfg.betas.clone(), scaled_rates(&corner, rho))?;
            let v = match build_partition(&cfg, &prof, &params) {
                Ok(Partition::LdNls(p)) => leakage_ub_ldnls(&p, &bp, 0.0)?,
                Ok(_) => unreachable!(),
                Err(CliError::Core(Error::InfeasibleRate { needed, available, context })) => {
                    eprintln!("n = {n}, rho = {rho}: {context} needs {needed} indices, {available} available; skipped");
                    f64::NAN
                }
                Err(e) => return Err(e),
            };
            leak[i].push(v);
        }
    }
    let row = |rho: Option<f64>, metric: &str, x: u32, value: f64| BoundRow {
        scheme: "ldnls".into(),
        n: 1 << x,
        beta_r: BSBC_BETAS[0].r,
        beta_s: BSBC_BETAS[0].s,
        rho,
        metric: metric.to_string(),
        value,
        n_tau: Some(n_tau),
        seed: opts.seed,
    };
    let mut raw = Vec::new();
    for (i, &rho) in rhos.iter().enumerate() {
        raw.extend(sweep.iter().zip(&leak[i]).map(|(&x, &v)| row(Some(rho), "leakage0_ub", x, v)));
    }
    for (m, metric) in fixed.iter().enumerate() {
        raw.extend(sweep.iter().zip(&fixed_vals[m]).map(|(&x, &v)| row(None, metric, x, v)));
    }
    Ok(with_smoothed(raw))
}

/// Default sweep of a preset.
pub fn default_sweep(figure: u8) -> Vec<u32> {
    match figure {
        9 => (7..=MC_PRESET_CAP).collect(),
        _ => (8..=20).collect(),
    }
}

/// Runs the preset for figure 5, 6, 7, 8 or 9.
///
/// * 5: leakage bounds for both eavesdroppers, `ρ ∈ {0.94, 0.9, 0.8, 0.7}`.
/// * 6: the same for `β^(s) ∈ {0.1, 0.2, 0.3}` at `ρ = 0.9`.
/// * 7: receiver-1 reliability bound for `β^(r) ∈ {0.08, 0.16, 0.26, 0.36}`.
/// * 8: Φ rate for the `β^(s)` family and then the `β^(r)` family.
/// * 9: the layered example on the crossover channel: leakage at zero
///   total variation for `ρ ∈ {0.9, 0.8, 0.7}`, both reliability bounds at
///   zero total variation, the overall Φ rate and both total-variation terms.
pub fn reproduce(figure: u8, opts: &FigureOptions) -> Result<Vec<BoundRow>> {
    let sweep = opts.log2n.clone().unwrap_or_else(|| default_sweep(figure));
    let leak = ["leakage_ub_1", "leakage_ub_2"];
    match figure {
        5 => bebc_figure(&curves(&[0.16], &[0.30], &[0.94, 0.9, 0.8, 0.7]), &leak, &sweep, opts.seed),
        6 => bebc_figure(&curves(&[0.16], &[0.10, 0.20, 0.30], &[0.9]), &leak, &sweep, opts.seed),
        7 => bebc_figure(&curves(&[0.08, 0.16, 0.26, 0.36], &[0.30], &[0.9]), &["pb_ub_1"], &sweep, opts.seed),
        8 => {
            let mut family = curves(&[0.16], &[0.10, 0.20, 0.30], &[0.9]);
            family.extend(curves(&[0.08, 0.16, 0.26, 0.36], &[0.30], &[0.9]));
            bebc_figure(&family, &["phi_rate"], &sweep, opts.seed)
        }
        9 => {
            if let Some(&x) = sweep.iter().find(|&&x| x > MC_PRESET_CAP) {
                if !opts.allow_large {
                    return Err(crate::config::ConfigError::BadValue {
                        key: "log2n".into(),
                        msg: format!("2^{x} exceeds the Monte-Carlo preset cap 2^{MC_PRESET_CAP}; pass --allow-large"),
                    }
                    .into());
                }
            }
            bsbc_figure(&sweep, opts)
        }
        _ => Err(crate::config::ConfigError::BadValue {
            key: "figure".into(),
            msg: format!("no preset for figure {figure}"),
        }
        .into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pick<'a>(rows: &'a [BoundRow], metric: &str, beta_r: f64, beta_s: f64, rho: f64, n: usize) -> &'a BoundRow {
        rows.iter()
            .find(|r| r.metric == metric && r.beta_r == beta_r && r.beta_s == beta_s && r.rho == Some(rho) && r.n == n)
            .unwrap()
    }

    #[test]
    fn fig8_first_point() {
        let opts = FigureOptions { log2n: Some(vec![8, 9, 10]), ..Default::default() };
        let rows = reproduce(8, &opts).unwrap();
        assert_eq!(pick(&rows, "phi_rate", 0.16, 0.30, 0.9, 256).value, 0.046875);
        assert_eq!(pick(&rows, "phi_rate_smoothed", 0.16, 0.30, 0.9, 256).value, 0.046875);
        // 7 families × 3 points, raw and smoothed.
        assert_eq!(rows.len(), 7 * 3 * 2);
    }

    #[test]
    fn smoothing_groups_and_skips_nan() {
        let base = BoundRow {
            scheme: "nldls".into(),
            n: 0,
            beta_r: 0.1,
            beta_s: 0.2,
            rho: Some(0.9),
            metric: "m".into(),
            value: 0.0,
            n_tau: None,
            seed: 1,
        };
        let vals = [1.0, f64::NAN, 3.0, 5.0];
        let raw: Vec<BoundRow> =
            vals.iter().enumerate().map(|(i, &v)| BoundRow { n: 1 << i, value: v, ..base.clone() }).collect();
        let out = with_smoothed(raw);
        let smoothed: Vec<f64> = out.iter().filter(|r| r.metric == "m_smoothed").map(|r| r.value).collect();
        assert_eq!(smoothed, vec![1.0, 3.0, 5.0]);
    }

    #[test]
    fn mc_preset_is_capped() {
        let opts = FigureOptions { log2n: Some(vec![14]), ..Default::default() };
        assert!(matches!(reproduce(9, &opts), Err(CliError::Config(_))));
        assert!(reproduce(4, &FigureOptions::default()).is_err());
    }

    #[test]
    fn empty_sweep_gives_no_rows() {
        let opts = FigureOptions { log2n: Some(vec![]), ..Default::default() };
        assert!(reproduce(7, &opts).unwrap().is_empty());
        assert!(reproduce(9, &opts).unwrap().is_empty());
    }
}
