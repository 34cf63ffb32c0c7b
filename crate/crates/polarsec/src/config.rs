//! Experiment configuration: flat `key = value` text.
//!
//! Blank lines and `#` comments are ignored; unknown keys are rejected.
//!
//! ```text
//! scheme = nldls
//! channel = erasure
//! receivers = 0.04, 0.01      # Y_1 first
//! eavesdroppers = 0.35, 0.2   # Z_1 first
//! log2n = 8..12
//! beta_r = 0.16
//! beta_s = 0.30
//! rho = 0.9
//! ```

use std::collections::BTreeMap;

use polarsec_core::channel::{secrecy_rates_ldnls, secrecy_rates_nldls, BroadcastChannelSpec};
use polarsec_core::partition::{scaled_rates, Betas, CodeParameters};
use thiserror::Error;

/// Configuration problems (exit code 2).
#[derive(Debug, Error)]
pub enum ConfigError {
    /// A line is not `key = value`.
    #[error("line {0}: expected key = value")]
    Syntax(usize),
    /// The key is not recognised.
    #[error("unknown key {0:?}")]
    UnknownKey(String),
    /// The value does not parse or is out of range.
    #[error("bad value for {key}: {msg}")]
    BadValue {
        /// Offending key.
        key: String,
        /// Explanation.
        msg: String,
    },
    /// A required key is absent.
    #[error("missing key {0}")]
    Missing(&'static str),
    /// The library rejected the resulting parameters.
    #[error(transparent)]
    Invalid(#[from] polarsec_core::Error),
}

type Result<T> = std::result::Result<T, ConfigError>;

/// Recognised keys.
pub const KEYS: &[&str] = &[
    "scheme",
    "channel",
    "receivers",
    "eavesdroppers",
    "alpha_xv",
    "log2n",
    "beta_r",
    "beta_s",
    "beta_1r",
    "beta_1s",
    "beta_2r",
    "beta_2s",
    "beta_2l",
    "beta_2h",
    "rho",
    "rates",
    "n_tau",
    "n_tau_check",
    "trials",
    "blocks",
    "seed",
    "output",
];

/// Coding scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    /// Non-layered decoding, layered secrecy.
    NldLs,
    /// Layered decoding, non-layered secrecy.
    LdNls,
}

/// Rate targets: normalized or explicit.
#[derive(Debug, Clone, PartialEq)]
pub enum RateTarget {
    /// `ρ` times the corner point.
    Normalized(f64),
    /// Explicit `R'` values.
    Explicit(Vec<f64>),
}

/// A validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// Scheme.
    pub scheme: SchemeKind,
    /// Broadcast channel.
    pub channel: BroadcastChannelSpec,
    /// Blocklength exponents to sweep.
    pub log2n: Vec<u32>,
    /// δ exponents per polar block.
    pub betas: Vec<Betas>,
    /// Rate targets.
    pub rates: RateTarget,
    /// Monte-Carlo trials per profile.
    pub n_tau: u64,
    /// Check-encoder trials.
    pub n_tau_check: u64,
    /// Simulation trials.
    pub trials: u64,
    /// Blocks per trial.
    pub blocks: usize,
    /// Master seed.
    pub seed: u64,
    /// Output path, if any.
    pub output: Option<String>,
}

/// Raw key/value pairs, later entries overriding earlier ones.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig(pub BTreeMap<String, String>);

impl RawConfig {
    /// Parses config text.
    pub fn parse(text: &str) -> Result<Self> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax(i + 1))?;
            raw.set(k.trim(), v.trim())?;
        }
        Ok(raw)
    }

    /// Sets one key, rejecting unknown ones.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KEYS.contains(&key) {
            return Err(ConfigError::UnknownKey(key.to_string()));
        }
        self.0.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair.split_once('=').ok_or(ConfigError::Syntax(0))?;
        self.set(k.trim(), v.trim())
    }

    fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    fn num<T: std::str::FromStr>(&self, key: &'static str, default: Option<T>) -> Result<T> {
        match self.get(key) {
            Some(v) => v.parse().map_err(|_| bad(key, format!("cannot parse {v:?}"))),
            None => default.ok_or(ConfigError::Missing(key)),
        }
    }

    fn list(&self, key: &'static str) -> Result<Vec<f64>> {
        let v = self.get(key).ok_or(ConfigError::Missing(key))?;
        v.split(',').map(|x| x.trim().parse().map_err(|_| bad(key, format!("cannot parse {x:?}")))).collect()
    }

    /// Validates into an [`ExperimentConfig`].
    pub fn build(&self) -> Result<ExperimentConfig> {
        let scheme = match self.get("scheme").unwrap_or("nldls") {
            "nldls" => SchemeKind::NldLs,
            "ldnls" => SchemeKind::LdNls,
            other => return Err(bad("scheme", format!("expected nldls or ldnls, got {other}"))),
        };
        let receivers = self.list("receivers")?;
        let eavesdroppers = self.list("eavesdroppers")?;
        let channel = match self.get("channel").unwrap_or(match scheme {
            SchemeKind::NldLs => "erasure",
            SchemeKind::LdNls => "symmetric",
        }) {
            "erasure" => BroadcastChannelSpec::erasure(receivers, eavesdroppers)?,
            "symmetric" => BroadcastChannelSpec::symmetric(receivers, eavesdroppers, self.num("alpha_xv", None)?)?,
            other => return Err(bad("channel", format!("expected erasure or symmetric, got {other}"))),
        };
        let log2n = parse_sweep(self.get("log2n").unwrap_or("10"))?;
        let betas = match scheme {
            SchemeKind::NldLs => vec![Betas::new(self.num("beta_r", Some(0.16))?, self.num("beta_s", Some(0.30))?)],
            SchemeKind::LdNls => vec![
                Betas::new(self.num("beta_1r", Some(0.24))?, self.num("beta_1s", Some(0.30))?),
                Betas {
                    r: self.num("beta_2r", Some(0.24))?,
                    s: self.num("beta_2s", Some(0.36))?,
                    low: self.num("beta_2l", Some(0.36))?,
                    high: self.num("beta_2h", Some(0.36))?,
                },
            ],
        };
        let rates = match (self.get("rates"), self.get("rho")) {
            (Some(_), Some(_)) => return Err(bad("rates", "give either rho or rates, not both".into())),
            (Some(_), None) => RateTarget::Explicit(self.list("rates")?),
            (None, _) => {
                let rho: f64 = self.num("rho", Some(0.9))?;
                if !(0.0..=1.0).contains(&rho) {
                    return Err(bad("rho", format!("{rho} outside [0, 1]")));
                }
                RateTarget::Normalized(rho)
            }
        };
        let trials: u64 = self.num("trials", Some(1000))?;
        let blocks: usize = self.num("blocks", Some(1))?;
        let n_tau: u64 = self.num("n_tau", Some(10_000))?;
        let n_tau_check: u64 = self.num("n_tau_check", Some(1000))?;
        for (key, v) in [("trials", trials), ("blocks", blocks as u64), ("n_tau", n_tau), ("n_tau_check", n_tau_check)]
        {
            if v == 0 {
                return Err(bad(key, "must be positive".into()));
            }
        }
        let cfg = ExperimentConfig {
            scheme,
            channel,
            log2n,
            betas,
            rates,
            n_tau,
            n_tau_check,
            trials,
            blocks,
            seed: self.num("seed", Some(1))?,
            output: self.get("output").map(str::to_string),
        };
        for &x in &cfg.log2n {
            cfg.params(1 << x)?;
        }
        Ok(cfg)
    }
}

fn bad(key: &str, msg: String) -> ConfigError {
    ConfigError::BadValue { key: key.to_string(), msg }
}

/// Parses `a..b` (inclusive), a comma list, or an empty string.
pub fn parse_sweep(s: &str) -> Result<Vec<u32>> {
    let s = s.trim();
    let out: Vec<u32> = if s.is_empty() {
        Vec::new()
    } else if let Some((a, b)) = s.split_once("..") {
        let a: u32 = a.trim().parse().map_err(|_| bad("log2n", format!("bad range {s:?}")))?;
        let b: u32 = b.trim().parse().map_err(|_| bad("log2n", format!("bad range {s:?}")))?;
        (a..=b).collect()
    } else {
        s.split(',')
            .map(|x| x.trim().parse().map_err(|_| bad("log2n", format!("bad entry {x:?}"))))
            .collect::<Result<_>>()?
    };
    if out.iter().any(|&x| x > 30) {
        return Err(bad("log2n", "exponents above 30 are not supported".into()));
    }
    Ok(out)
}

impl ExperimentConfig {
    /// Corner point of the configured scheme.
    pub fn corner(&self) -> Result<Vec<f64>> {
        Ok(match self.scheme {
            SchemeKind::NldLs => secrecy_rates_nldls(&self.channel)?,
            SchemeKind::LdNls => secrecy_rates_ldnls(&self.channel)?,
        })
    }

    /// Target rates `R'`.
    pub fn target_rates(&self) -> Result<Vec<f64>> {
        match &self.rates {
            RateTarget::Normalized(rho) => Ok(scaled_rates(&self.corner()?, *rho)),
            RateTarget::Explicit(r) => Ok(r.clone()),
        }
    }

    /// Normalized budget, if configured that way.
    pub fn rho(&self) -> Option<f64> {
        match self.rates {
            RateTarget::Normalized(r) => Some(r),
            RateTarget::Explicit(_) => None,
        }
    }

    /// Code parameters at blocklength `n`.
    pub fn params(&self, n: usize) -> Result<CodeParameters> {
        let rates = self.target_rates()?;
        Ok(match self.scheme {
            SchemeKind::NldLs => CodeParameters::nldls(n, self.betas[0].r, self.betas[0].s, rates)?,
            SchemeKind::LdNls => CodeParameters::ldnls(n, self.betas.clone(), rates)?,
        })
    }
}
