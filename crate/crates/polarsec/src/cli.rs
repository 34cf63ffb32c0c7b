//! Command-line front end.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use polarsec_core::campaign::{wilson_interval, ErrorCounts, Z95};
use polarsec_core::channel::sample_broadcast;
use polarsec_core::codec::{decode_ldnls, decode_nldls, encode_ldnls, encode_nldls, KeyMaterial, MessageSet};
use polarsec_core::rng::{substream, Tag};
use polarsec_core::transform::BitBlock;

use crate::config::{parse_sweep, ExperimentConfig, RawConfig, SchemeKind};
use crate::error::{CliError, Result};
use crate::figures::{reproduce, FigureOptions};
use crate::format::{self, Section};
use crate::pipeline::{self, Partition};
use crate::report::{write_bound_rows, write_sim_rows, BoundRow, SimRow};

/// Strong-secrecy polar codes for degraded broadcast channels.
#[derive(Debug, Parser)]
#[command(name = "polarsec", version)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build profiles and partitions, one file per blocklength.
    Construct {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Directory for construction files.
        #[arg(long, default_value = "construction")]
        dir: PathBuf,
    },
    /// Evaluate bounds on constructed codes and write CSV.
    Bounds {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Directory holding construction files.
        #[arg(long, default_value = "construction")]
        dir: PathBuf,
    },
    /// Encode one random block with a constructed code.
    Encode {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Directory holding construction files.
        #[arg(long, default_value = "construction")]
        dir: PathBuf,
        /// Output file for messages, keys, Φ and the codeword.
        #[arg(long)]
        out: PathBuf,
    },
    /// Pass an encoded block through the channel and decode it.
    Decode {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Directory holding construction files.
        #[arg(long, default_value = "construction")]
        dir: PathBuf,
        /// File written by `encode`.
        #[arg(long)]
        input: PathBuf,
        /// Receiver, 1 = weakest.
        #[arg(long, default_value_t = 1)]
        receiver: usize,
    },
    /// Run an encode/transmit/decode campaign and write CSV.
    Simulate {
        #[command(flatten)]
        cfg: ConfigArgs,
        /// Omit per-trial rows.
        #[arg(long)]
        summary_only: bool,
    },
    /// Regenerate the data of one published figure (5 to 9).
    ReproduceFig {
        /// Figure number.
        figure: u8,
        /// Blocklength exponents, `a..b` or a comma list.
        #[arg(long)]
        log2n: Option<String>,
        /// Allow Monte-Carlo presets beyond 2^13.
        #[arg(long)]
        allow_large: bool,
        /// Profile trials.
        #[arg(long)]
        n_tau: Option<u64>,
        /// Check-encoder trials.
        #[arg(long, default_value_t = 1000)]
        n_tau_check: u64,
        /// Master seed.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// CSV path; stdout if absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Configuration sources, applied in order: file, `--set`, direct flags.
#[derive(Debug, Args)]
struct ConfigArgs {
    /// Config file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override one key.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Blocklength exponents, `a..b` or a comma list.
    #[arg(long)]
    log2n: Option<String>,
    /// Normalized target rate.
    #[arg(long)]
    rho: Option<String>,
    /// Master seed.
    #[arg(long)]
    seed: Option<String>,
    /// Profile trials.
    #[arg(long)]
    n_tau: Option<String>,
    /// Simulation trials.
    #[arg(long)]
    trials: Option<String>,
    /// Blocks per trial.
    #[arg(long)]
    blocks: Option<String>,
    /// Output path.
    #[arg(long)]
    output: Option<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<ExperimentConfig> {
        let mut raw = match &self.config {
            Some(path) => RawConfig::parse(&fs::read_to_string(path).map_err(CliError::io(path))?)?,
            None => RawConfig::default(),
        };
        for pair in &self.set {
            raw.set_pair(pair)?;
        }
        let direct = [
            ("log2n", &self.log2n),
            ("rho", &self.rho),
            ("seed", &self.seed),
            ("n_tau", &self.n_tau),
            ("trials", &self.trials),
            ("blocks", &self.blocks),
            ("output", &self.output),
        ];
        for (key, value) in direct {
            if let Some(v) = value {
                raw.set(key, v)?;
            }
        }
        Ok(raw.build()?)
    }
}

fn writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(io::BufWriter::new(fs::File::create(p).map_err(CliError::io(p))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn scheme_name(cfg: &ExperimentConfig) -> &'static str {
    match cfg.scheme {
        SchemeKind::NldLs => "nldls",
        SchemeKind::LdNls => "ldnls",
    }
}

fn single_n(cfg: &ExperimentConfig) -> Result<u32> {
    match cfg.log2n.as_slice() {
        [x] => Ok(*x),
        _ => Err(crate::config::ConfigError::BadValue {
            key: "log2n".into(),
            msg: "this command needs a single blocklength".into(),
        }
        .into()),
    }
}

fn construct(cfg: &ExperimentConfig, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(CliError::io(dir))?;
    for &x in &cfg.log2n {
        let prof = pipeline::build_profiles(cfg, x)?;
        let part = pipeline::build_partition(cfg, &prof, &cfg.params(1 << x)?)?;
        let path = pipeline::construction_path(dir, x);
        let text = format::render(&pipeline::construction_sections(cfg, x, &prof, &part));
        fs::write(&path, text).map_err(CliError::io(&path))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

/// Bound rows for every blocklength of the sweep, read from `dir`.
pub fn bound_rows(cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<BoundRow>> {
    let mut rows = Vec::new();
    for &x in &cfg.log2n {
        let (prof, part) = pipeline::read_construction(cfg, dir, x)?;
        let b = pipeline::evaluate(cfg, x, &prof, &part)?;
        let n_tau = (cfg.scheme == SchemeKind::LdNls).then_some(cfg.n_tau);
        for (metric, value) in b.values {
            rows.push(BoundRow {
                scheme: scheme_name(cfg).into(),
                n: 1 << x,
                beta_r: cfg.betas[0].r,
                beta_s: cfg.betas[0].s,
                rho: cfg.rho(),
                metric,
                value,
                n_tau,
                seed: cfg.seed,
            });
        }
    }
    Ok(rows)
}

fn encode(cfg: &ExperimentConfig, dir: &Path, out: &Path) -> Result<()> {
    let x = single_n(cfg)?;
    let (_, part) = pipeline::read_construction(cfg, dir, x)?;
    let mut rng = substream(cfg.seed, Tag::Keys, 0);
    let keys = KeyMaterial::random(&part.layers(), &mut rng);
    let mut rng = substream(cfg.seed, Tag::Encoder, 0);
    let (msgs, enc) = match &part {
        Partition::NldLs(p) => {
            let msgs = MessageSet::random(&MessageSet::sizes_nldls(p), &mut rng);
            let enc = encode_nldls(p, &msgs, &keys, &mut rng)?;
            (msgs, enc)
        }
        Partition::LdNls(p) => {
            let msgs = MessageSet::random(&MessageSet::sizes_ldnls(p), &mut rng);
            let enc = encode_ldnls(p, &msgs, &keys, &cfg.channel, &mut rng)?;
            (msgs, enc)
        }
    };
    let mut sections = vec![Section::new("encoded", &[("log2n", x.to_string()), ("seed", cfg.seed.to_string())])];
    for (m, w) in msgs.messages.iter().enumerate() {
        sections.push(format::bits_section(&format!("message.{}", m + 1), w));
    }
    for (l, layer) in enc.layers.iter().enumerate() {
        sections.push(format::bits_section(&format!("common.{}", l + 1), &keys.common[l]));
        sections.push(format::bits_section(&format!("phikey.{}", l + 1), &keys.phi_key[l]));
        sections.push(format::bits_section(&format!("phi.{}", l + 1), &layer.masked_phi));
    }
    sections.push(format::bits_section("x", enc.x.bits()));
    fs::write(out, format::render(&sections)).map_err(CliError::io(out))?;
    Ok(())
}

/// Per-message error counts `(message, bits, errors)` of one decode.
pub fn decode(cfg: &ExperimentConfig, dir: &Path, input: &Path, receiver: usize) -> Result<Vec<(usize, usize, usize)>> {
    let x = single_n(cfg)?;
    let (_, part) = pipeline::read_construction(cfg, dir, x)?;
    let text = fs::read_to_string(input).map_err(CliError::io(input))?;
    let wrap = |source| CliError::Format { path: input.display().to_string(), source };
    let sections = format::parse(&text).map_err(wrap)?;
    let layers = part.layers().len();
    let mut keys = KeyMaterial { common: Vec::new(), phi_key: Vec::new() };
    let mut phis = Vec::new();
    for l in 1..=layers {
        keys.common.push(format::find_bits(&sections, &format!("common.{l}")).map_err(wrap)?);
        keys.phi_key.push(format::find_bits(&sections, &format!("phikey.{l}")).map_err(wrap)?);
        phis.push(format::find_bits(&sections, &format!("phi.{l}")).map_err(wrap)?);
    }
    let codeword = BitBlock::new(format::find_bits(&sections, "x").map_err(wrap)?)?;
    let mut rng = substream(cfg.seed, Tag::Channel, 0);
    let trace = sample_broadcast(&cfg.channel, &codeword, &mut rng);
    let decoded = match &part {
        Partition::NldLs(p) => decode_nldls(&cfg.channel, &trace, p, &keys, &phis[0], receiver)?,
        Partition::LdNls(p) => decode_ldnls(&cfg.channel, &trace, p, &keys, &phis, receiver)?,
    };
    let mut out = Vec::new();
    for (m, got) in decoded.messages.messages.iter().enumerate() {
        let sent = format::find_bits(&sections, &format!("message.{}", m + 1)).map_err(wrap)?;
        let errors = sent.iter().zip(got).filter(|(a, b)| a != b).count();
        out.push((m + 1, sent.len(), errors));
    }
    Ok(out)
}

/// Simulation rows for every blocklength of the sweep.
pub fn simulate(cfg: &ExperimentConfig, per_trial: bool) -> Result<Vec<SimRow>> {
    let mut rows = Vec::new();
    for &x in &cfg.log2n {
        let n = 1usize << x;
        let prof = pipeline::build_profiles(cfg, x)?;
        let part = pipeline::build_partition(cfg, &prof, &cfg.params(n)?)?;
        let bounds = pipeline::evaluate(cfg, x, &prof, &part)?;
        let outcomes = crate::parallel::run_trials(&cfg.channel, part.code(), cfg.trials, cfg.blocks, cfg.seed)?;
        let row = |trial: Option<u64>, block: Option<usize>, receiver: usize, metric: &str, value: f64| SimRow {
            scheme: scheme_name(cfg).into(),
            n,
            rho: cfg.rho(),
            trial,
            block,
            receiver,
            metric: metric.to_string(),
            value,
            seed: cfg.seed,
        };
        if per_trial {
            for (t, o) in outcomes.iter().enumerate() {
                for k in 0..cfg.channel.num_receivers() {
                    let errs: u64 = o.per_block.iter().map(|b| b[k].message_bit_errors).sum();
                    let blocks: u64 = o.per_block.iter().map(|b| b[k].block_errors).sum();
                    rows.push(row(Some(t as u64), None, k + 1, "message_bit_errors", errs as f64));
                    rows.push(row(Some(t as u64), None, k + 1, "block_errors", blocks as f64));
                }
            }
        }
        let result =
            polarsec_core::campaign::CampaignResult::from_outcomes(cfg.channel.num_receivers(), cfg.blocks, outcomes);
        let stats = |c: &ErrorCounts| {
            let (lo, hi) = wilson_interval(c.message_bit_errors, c.message_bits, Z95);
            let (blo, bhi) = wilson_interval(c.block_errors, c.blocks, Z95);
            [
                ("message_ber", c.message_ber()),
                ("message_ber_lo", lo),
                ("message_ber_hi", hi),
                ("block_error_rate", c.block_error_rate()),
                ("block_error_rate_lo", blo),
                ("block_error_rate_hi", bhi),
                ("decoded_ber", c.decoded_ber_total()),
            ]
        };
        for (k, c) in result.receivers.iter().enumerate() {
            for (metric, v) in stats(c) {
                rows.push(row(None, None, k + 1, metric, v));
            }
            if let Some(b) = bounds.get(&format!("pb_ub_{}", k + 1)) {
                rows.push(row(None, None, k + 1, "pb_ub", b));
            }
        }
        if cfg.blocks > 1 {
            for (b, per) in result.per_block.iter().enumerate() {
                for (k, c) in per.iter().enumerate() {
                    for (metric, v) in stats(c) {
                        rows.push(row(None, Some(b + 1), k + 1, metric, v));
                    }
                }
            }
        }
    }
    Ok(rows)
}

fn run_command(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Construct { cfg, dir } => construct(&cfg.load()?, &dir),
        Command::Bounds { cfg, dir } => {
            let cfg = cfg.load()?;
            let rows = bound_rows(&cfg, &dir)?;
            write_bound_rows(writer(cfg.output.as_deref().map(Path::new))?, &rows)
        }
        Command::Encode { cfg, dir, out } => encode(&cfg.load()?, &dir, &out),
        Command::Decode { cfg, dir, input, receiver } => {
            let cfg = cfg.load()?;
            let counts = decode(&cfg, &dir, &input, receiver)?;
            let mut w = csv::Writer::from_writer(writer(cfg.output.as_deref().map(Path::new))?);
            w.write_record(["message", "bits", "errors"])?;
            for (m, bits, errors) in counts {
                w.write_record([m.to_string(), bits.to_string(), errors.to_string()])?;
            }
            w.flush().map_err(CliError::io("output"))
        }
        Command::Simulate { cfg, summary_only } => {
            let cfg = cfg.load()?;
            let rows = simulate(&cfg, !summary_only)?;
            write_sim_rows(writer(cfg.output.as_deref().map(Path::new))?, &rows)
        }
        Command::ReproduceFig { figure, log2n, allow_large, n_tau, n_tau_check, seed, output } => {
            if n_tau == Some(0) || n_tau_check == 0 {
                return Err(crate::config::ConfigError::BadValue {
                    key: "n_tau".into(),
                    msg: "must be positive".into(),
                }
                .into());
            }
            let log2n = log2n.as_deref().map(parse_sweep).transpose()?;
            let opts = FigureOptions { log2n, allow_large, n_tau, n_tau_check, seed };
            let rows = reproduce(figure, &opts)?;
            write_bound_rows(writer(output.as_deref())?, &rows)
        }
    }
}

/// Parses arguments, runs the command and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_command(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
