//! Construction and bound evaluation for one blocklength of an experiment.

use std::path::{Path, PathBuf};

use polarsec_core::bounds::{dtv_ub_h, dtv_ub_l, BoundReport, LdnlsBoundProfiles};
use polarsec_core::channel::{ChannelKind, Conditioning};
use polarsec_core::partition::{
    partition_ldnls, partition_nldls, CodeParameters, IndexPartition, Layer1Profiles, Layer2Profiles, LayeredPartition,
    NldlsProfiles,
};
use polarsec_core::profile::{bec_bhattacharyya_profile, PolarizationProfile};
use polarsec_core::rng::derive_seed;
use polarsec_core::Error;

use crate::config::{ExperimentConfig, SchemeKind};
use crate::error::{CliError, Result};
use crate::format::{self, Section};
use crate::parallel::mc_entropy_profile;

/// Labelled profiles of one blocklength.
#[derive(Debug, Clone, PartialEq)]
pub struct Profiles {
    /// Blocklength.
    pub n: usize,
    /// `(label, profile)` pairs in a fixed order.
    pub entries: Vec<(String, PolarizationProfile)>,
}

impl Profiles {
    /// The profile called `label`.
    pub fn get(&self, label: &str) -> Result<&PolarizationProfile> {
        self.entries
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, p)| p)
            .ok_or_else(|| CliError::Core(Error::InvalidArgument(format!("no profile labelled {label}"))))
    }
}

/// Labels used by the layered-decoding scheme, with their conditionings
/// (`z` and `vz` refer to the strongest eavesdropper).
fn ldnls_conditionings(m: usize) -> [(&'static str, Conditioning); 6] {
    [
        ("y1", Conditioning::Receiver(1)),
        ("y2", Conditioning::Receiver(2)),
        ("z", Conditioning::Eavesdropper(m)),
        ("v", Conditioning::LayerPrior),
        ("vy2", Conditioning::LayerReceiver(2)),
        ("vz", Conditioning::LayerEavesdropper(m)),
    ]
}

/// Computes every profile the configured scheme needs at `n = 2^log2n`.
///
/// Erasure channels use the exact recursion; symmetric channels use the
/// Monte-Carlo estimator with `cfg.n_tau` trials and a seed derived from
/// the master seed, the blocklength and the profile slot.
pub fn build_profiles(cfg: &ExperimentConfig, log2n: u32) -> Result<Profiles> {
    let n = 1usize << log2n;
    let spec = &cfg.channel;
    let mut entries = Vec::new();
    match (cfg.scheme, spec.kind()) {
        (SchemeKind::NldLs, ChannelKind::Erasure) => {
            for (k, &e) in spec.receivers().iter().enumerate() {
                entries.push((format!("y{}", k + 1), bec_bhattacharyya_profile(e, n)?));
            }
            for (m, &e) in spec.eavesdroppers().iter().enumerate() {
                entries.push((format!("z{}", m + 1), bec_bhattacharyya_profile(e, n)?));
            }
        }
        (SchemeKind::LdNls, ChannelKind::Symmetric) => {
            if spec.num_receivers() != 2 {
                return Err(Error::UnsupportedConfiguration("layered decoding is implemented for K = 2".into()).into());
            }
            for (slot, (label, cond)) in ldnls_conditionings(spec.num_eavesdroppers()).into_iter().enumerate() {
                let seed = derive_seed(cfg.seed, ((log2n as u64) << 8) | slot as u64);
                entries.push((label.to_string(), mc_entropy_profile(spec, cond, n, cfg.n_tau, seed)?));
            }
        }
        (SchemeKind::NldLs, _) => {
            return Err(Error::UnsupportedChannel(
                "the non-layered-decoding scheme is built on erasure channels".into(),
            )
            .into())
        }
        (SchemeKind::LdNls, _) => {
            return Err(
                Error::UnsupportedChannel("the layered-decoding scheme is built on symmetric channels".into()).into()
            )
        }
    }
    Ok(Profiles { n, entries })
}

/// A constructed code.
#[derive(Debug, Clone, PartialEq)]
pub enum Partition {
    /// Non-layered decoding.
    NldLs(IndexPartition),
    /// Layered decoding.
    LdNls(LayeredPartition),
}

impl Partition {
    /// Per-layer partitions.
    pub fn layers(&self) -> Vec<&IndexPartition> {
        match self {
            Partition::NldLs(p) => vec![p],
            Partition::LdNls(p) => p.layers.iter().collect(),
        }
    }

    /// The code as seen by the campaign runner.
    pub fn code(&self) -> polarsec_core::campaign::Code<'_> {
        match self {
            Partition::NldLs(p) => polarsec_core::campaign::Code::NldLs(p),
            Partition::LdNls(p) => polarsec_core::campaign::Code::LdNls(p),
        }
    }

    fn from_layers(mut layers: Vec<IndexPartition>) -> Result<Self> {
        match layers.len() {
            1 => Ok(Partition::NldLs(layers.remove(0))),
            2 => Ok(Partition::LdNls(LayeredPartition { layers })),
            k => Err(Error::InvalidArgument(format!("expected one or two partitions, found {k}")).into()),
        }
    }
}

fn eavesdropper_profiles<'a>(cfg: &ExperimentConfig, prof: &'a Profiles) -> Result<Vec<&'a PolarizationProfile>> {
    (1..=cfg.channel.num_eavesdroppers()).map(|m| prof.get(&format!("z{m}"))).collect()
}

/// Partitions `[n]` for the given parameters.
pub fn build_partition(cfg: &ExperimentConfig, prof: &Profiles, params: &CodeParameters) -> Result<Partition> {
    Ok(match cfg.scheme {
        SchemeKind::NldLs => {
            let z = eavesdropper_profiles(cfg, prof)?;
            Partition::NldLs(partition_nldls(&NldlsProfiles { receiver: prof.get("y1")?, eavesdroppers: &z }, params)?)
        }
        SchemeKind::LdNls => Partition::LdNls(partition_ldnls(
            &Layer1Profiles { receiver: prof.get("y1")?, eavesdropper: prof.get("z")? },
            &Layer2Profiles { prior: prof.get("v")?, receiver: prof.get("vy2")?, eavesdropper: prof.get("vz")? },
            params,
        )?),
    })
}

/// Named bound values of one code.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    /// `(metric, value)` pairs. Undefined bounds are NaN.
    pub values: Vec<(String, f64)>,
}

impl Bounds {
    /// Value of `metric`, if present.
    pub fn get(&self, metric: &str) -> Option<f64> {
        self.values.iter().find(|(m, _)| m == metric).map(|(_, v)| *v)
    }
}

fn defined(r: polarsec_core::Result<f64>) -> Result<f64> {
    match r {
        Ok(v) => Ok(v),
        Err(Error::UndefinedBound(_)) => Ok(f64::NAN),
        Err(e) => Err(e.into()),
    }
}

/// Evaluates every bound of a constructed code.
///
/// Layered codes report each reliability and leakage bound twice: with the
/// total-variation term (`pb_ub_k`, `leakage_ub`) and with it set to zero
/// (`pb0_ub_k`, `leakage0_ub`).
pub fn evaluate(cfg: &ExperimentConfig, log2n: u32, prof: &Profiles, part: &Partition) -> Result<Bounds> {
    let mut values = Vec::new();
    match part {
        Partition::NldLs(p) => {
            for k in 1..=cfg.channel.num_receivers() {
                let y = prof.get(&format!("y{k}"))?;
                values.push((format!("pb_ub_{k}"), defined(polarsec_core::bounds::pb_ub_nldls(p, y))?));
            }
            let z = eavesdropper_profiles(cfg, prof)?;
            let report = BoundReport::nldls(p, &[], &z)?;
            for (m, v) in report.leakage.iter().enumerate() {
                values.push((format!("leakage_ub_{}", m + 1), *v));
            }
            values.push(("phi_rate".into(), report.phi_rate));
        }
        Partition::LdNls(p) => {
            let bp = LdnlsBoundProfiles {
                layer1_y1: prof.get("y1")?,
                layer1_y2: prof.get("y2")?,
                layer2_y2: prof.get("vy2")?,
                layer1_z: prof.get("z")?,
                layer2_z: prof.get("vz")?,
            };
            let dtv_h = dtv_ub_h(prof.get("v")?, &p.layers[1])?;
            let seed = derive_seed(cfg.seed, ((log2n as u64) << 8) | 0xff);
            let dtv_l = dtv_ub_l(&cfg.channel, &p.layers[1], cfg.n_tau_check, seed)?;
            let dtv = dtv_l + dtv_h;
            values.push(("dtv_l".into(), dtv_l));
            values.push(("dtv_h".into(), dtv_h));
            values.push(("dtv".into(), dtv));
            for (prefix, d) in [("pb0", 0.0), ("pb", dtv)] {
                for k in 1..=2 {
                    values
                        .push((format!("{prefix}_ub_{k}"), defined(polarsec_core::bounds::pb_ub_ldnls(p, &bp, d, k))?));
                }
            }
            values.push(("leakage0_ub".into(), polarsec_core::bounds::leakage_ub_ldnls(p, &bp, 0.0)?));
            values.push(("leakage_ub".into(), polarsec_core::bounds::leakage_ub_ldnls(p, &bp, dtv)?));
            values.push(("phi_rate".into(), polarsec_core::bounds::phi_rate_layered(p)));
        }
    }
    Ok(Bounds { values })
}

/// Path of the construction file for `n = 2^log2n` inside `dir`.
pub fn construction_path(dir: &Path, log2n: u32) -> PathBuf {
    dir.join(format!("construct_n{}.txt", 1u64 << log2n))
}

/// Serializes profiles and partition, headed by a `@run` section.
pub fn construction_sections(cfg: &ExperimentConfig, log2n: u32, prof: &Profiles, part: &Partition) -> Vec<Section> {
    let scheme = match cfg.scheme {
        SchemeKind::NldLs => "nldls",
        SchemeKind::LdNls => "ldnls",
    };
    let mut out = vec![Section::new(
        "run",
        &[
            ("scheme", scheme.to_string()),
            ("log2n", log2n.to_string()),
            ("seed", cfg.seed.to_string()),
            ("n_tau", cfg.n_tau.to_string()),
        ],
    )];
    out.extend(prof.entries.iter().map(|(l, p)| format::profile_section(l, p)));
    out.extend(part.layers().into_iter().map(format::partition_section));
    out
}

/// Reads a construction file written by [`construction_sections`].
pub fn read_construction(cfg: &ExperimentConfig, dir: &Path, log2n: u32) -> Result<(Profiles, Partition)> {
    let path = construction_path(dir, log2n);
    if !path.exists() {
        return Err(CliError::MissingConstruction(path.display().to_string()));
    }
    let text = std::fs::read_to_string(&path).map_err(CliError::io(&path))?;
    let wrap = |source| CliError::Format { path: path.display().to_string(), source };
    let sections = format::parse(&text).map_err(wrap)?;
    let mut entries = Vec::new();
    for s in sections.iter().filter(|s| s.kind == "profile") {
        let label = s.attr("label").map_err(wrap)?.to_string();
        entries.push((label, format::read_profile(s).map_err(wrap)?));
    }
    let part = Partition::from_layers(format::read_partitions(&sections).map_err(wrap)?)?;
    let n = 1usize << log2n;
    if part.layers()[0].len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} holds a code of length {}",
            path.display(),
            part.layers()[0].len()
        ))
        .into());
    }
    let expected = matches!(
        (cfg.scheme, &part),
        (SchemeKind::NldLs, Partition::NldLs(_)) | (SchemeKind::LdNls, Partition::LdNls(_))
    );
    if !expected {
        return Err(Error::InvalidArgument(format!("{} was built for the other scheme", path.display())).into());
    }
    Ok((Profiles { n, entries }, part))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RawConfig;

    fn cfg(text: &str) -> ExperimentConfig {
        RawConfig::parse(text).unwrap().build().unwrap()
    }

    #[test]
    fn erasure_bounds_match_known_values() {
        let c =
            cfg("receivers = 0.04, 0.01\neavesdroppers = 0.35, 0.2\nlog2n = 8\nbeta_r = 0.16\nbeta_s = 0.3\nrho = 0.9");
        let prof = build_profiles(&c, 8).unwrap();
        let part = build_partition(&c, &prof, &c.params(256).unwrap()).unwrap();
        let b = evaluate(&c, 8, &prof, &part).unwrap();
        assert_eq!(b.get("phi_rate"), Some(0.046875));
        assert!(b.get("pb_ub_1").unwrap() > b.get("pb_ub_2").unwrap());
    }

    #[test]
    fn construction_round_trips_through_files() {
        let c = cfg("receivers = 0.04, 0.01\neavesdroppers = 0.35, 0.2\nlog2n = 6");
        let prof = build_profiles(&c, 6).unwrap();
        let part = build_partition(&c, &prof, &c.params(64).unwrap()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = construction_path(dir.path(), 6);
        std::fs::write(&path, format::render(&construction_sections(&c, 6, &prof, &part))).unwrap();
        let (p2, part2) = read_construction(&c, dir.path(), 6).unwrap();
        assert_eq!(prof, p2);
        assert_eq!(part, part2);
        assert!(matches!(read_construction(&c, dir.path(), 7), Err(CliError::MissingConstruction(_))));
    }

    #[test]
    fn scheme_and_channel_must_agree() {
        let c = cfg("scheme = ldnls\nchannel = erasure\nreceivers = 0.04, 0.01\neavesdroppers = 0.35, 0.2\nrates = 0.1, 0.1\nlog2n=");
        assert!(build_profiles(&c, 4).is_err());
    }
}
