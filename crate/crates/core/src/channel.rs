//! Degraded broadcast channel models.
//!
//! Receivers and eavesdroppers are listed worst-first: `receivers[0]` is
//! `Y_1`, `eavesdroppers[0]` is `Z_1`. Outputs are ordered by quality as
//! `Y_K ⪰ … ⪰ Y_1 ⪰ Z_M ⪰ … ⪰ Z_1`.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;
use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::math::{conv, h2};
use crate::transform::BitBlock;

/// Channel family.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelKind {
    /// Broadcast erasure channel; parameters are erasure probabilities.
    Erasure,
    /// Broadcast symmetric channel; parameters are crossover probabilities.
    Symmetric,
}

/// A channel output symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Symbol {
    /// Bit 0.
    Zero = 0,
    /// Bit 1.
    One = 1,
    /// Erasure.
    Erased = 2,
}

impl Symbol {
    /// The symbol for a bit value.
    #[inline]
    pub fn bit(b: u8) -> Self {
        if b == 0 {
            Symbol::Zero
        } else {
            Symbol::One
        }
    }

    #[inline]
    fn flip(self) -> Self {
        match self {
            Symbol::Zero => Symbol::One,
            Symbol::One => Symbol::Zero,
            Symbol::Erased => Symbol::Erased,
        }
    }
}

/// Parameters of a physically degraded broadcast channel.
#[derive(Debug, Clone, PartialEq)]
pub struct BroadcastChannelSpec {
    kind: ChannelKind,
    receivers: Vec<f64>,
    eavesdroppers: Vec<f64>,
    superposition: Option<f64>,
}

impl BroadcastChannelSpec {
    /// Broadcast erasure channel with erasure probabilities listed worst-first.
    pub fn erasure(receivers: Vec<f64>, eavesdroppers: Vec<f64>) -> Result<Self> {
        let spec = Self { kind: ChannelKind::Erasure, receivers, eavesdroppers, superposition: None };
        spec.validate()?;
        Ok(spec)
    }

    /// Broadcast symmetric channel with crossover probabilities listed
    /// worst-first and crossover `alpha_xv` for the superposition layer.
    pub fn symmetric(receivers: Vec<f64>, eavesdroppers: Vec<f64>, alpha_xv: f64) -> Result<Self> {
        let spec = Self { kind: ChannelKind::Symmetric, receivers, eavesdroppers, superposition: Some(alpha_xv) };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.receivers.is_empty() || self.eavesdroppers.is_empty() {
            return Err(invalid!("need at least one receiver and one eavesdropper"));
        }
        let upper = match self.kind {
            ChannelKind::Erasure => 1.0,
            ChannelKind::Symmetric => 0.5,
        };
        for &p in self.quality_chain().iter().chain(self.superposition.iter()) {
            if !(0.0..=upper).contains(&p) {
                return Err(invalid!("channel parameter {p} outside [0, {upper}]"));
            }
        }
        let chain = self.quality_chain();
        if chain.windows(2).any(|w| w[0] > w[1]) {
            return Err(invalid!("parameters must be ordered Y_K <= ... <= Y_1 <= Z_M <= ... <= Z_1, got {chain:?}"));
        }
        Ok(())
    }

    /// Parameters from the best output (`Y_K`) to the worst (`Z_1`).
    fn quality_chain(&self) -> Vec<f64> {
        self.receivers.iter().rev().chain(self.eavesdroppers.iter().rev()).copied().collect()
    }

    /// Channel family.
    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    /// Receiver parameters, `Y_1` first.
    pub fn receivers(&self) -> &[f64] {
        &self.receivers
    }

    /// Eavesdropper parameters, `Z_1` first.
    pub fn eavesdroppers(&self) -> &[f64] {
        &self.eavesdroppers
    }

    /// Superposition crossover `α_{X|V}` (symmetric channels only).
    pub fn superposition(&self) -> Option<f64> {
        self.superposition
    }

    /// Number of receivers `K`.
    pub fn num_receivers(&self) -> usize {
        self.receivers.len()
    }

    /// Number of eavesdroppers `M`.
    pub fn num_eavesdroppers(&self) -> usize {
        self.eavesdroppers.len()
    }

    /// Whether every output equals the input.
    pub fn is_noiseless(&self) -> bool {
        self.receivers.iter().all(|&p| p == 0.0)
    }

    /// The binary observation channel seen under `cond`.
    pub fn observation(&self, cond: Conditioning) -> Result<ObservationChannel> {
        let receiver = |k: usize| {
            self.receivers
                .get(k.wrapping_sub(1))
                .copied()
                .ok_or_else(|| invalid!("no receiver {k} (K = {})", self.receivers.len()))
        };
        let eavesdropper = |m: usize| {
            self.eavesdroppers
                .get(m.wrapping_sub(1))
                .copied()
                .ok_or_else(|| invalid!("no eavesdropper {m} (M = {})", self.eavesdroppers.len()))
        };
        match self.kind {
            ChannelKind::Erasure => match cond {
                Conditioning::None => Ok(ObservationChannel::new(vec![])),
                Conditioning::Receiver(k) => Ok(ObservationChannel::new(vec![Component::Erasure(receiver(k)?)])),
                Conditioning::Eavesdropper(m) => {
                    Ok(ObservationChannel::new(vec![Component::Erasure(eavesdropper(m)?)]))
                }
                _ => Err(Error::UnsupportedConfiguration(
                    "superposition conditionings need a symmetric broadcast channel".to_string(),
                )),
            },
            ChannelKind::Symmetric => {
                let a = self.superposition.unwrap_or(0.0);
                let single = |p: f64| ObservationChannel::new(vec![Component::Crossover(p)]);
                let pair = |p: f64| ObservationChannel::new(vec![Component::Crossover(a), Component::Crossover(p)]);
                Ok(match cond {
                    Conditioning::None => ObservationChannel::new(vec![]),
                    Conditioning::Receiver(k) => single(conv(a, receiver(k)?)),
                    Conditioning::Eavesdropper(m) => single(conv(a, eavesdropper(m)?)),
                    Conditioning::LayerPrior => single(a),
                    Conditioning::LayerReceiver(k) => pair(receiver(k)?),
                    Conditioning::LayerEavesdropper(m) => pair(eavesdropper(m)?),
                })
            }
        }
    }
}

/// Side information a polarization profile is conditioned on.
///
/// For a symmetric broadcast channel the plain `Receiver`/`Eavesdropper`
/// variants describe the superposition layer `V` seen through the cascade
/// `V → X → Y`, while the `Layer*` variants describe the top layer `X`
/// given `V` and, optionally, a channel output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Conditioning {
    /// No side information.
    None,
    /// Output of receiver `k` (one-based).
    Receiver(usize),
    /// Output of eavesdropper `m` (one-based).
    Eavesdropper(usize),
    /// The superposition layer `V` alone.
    LayerPrior,
    /// `V` together with the output of receiver `k`.
    LayerReceiver(usize),
    /// `V` together with the output of eavesdropper `m`.
    LayerEavesdropper(usize),
}

/// One binary-input memoryless observation of the bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Component {
    /// Erasure channel with the given erasure probability.
    Erasure(f64),
    /// Symmetric channel with the given crossover probability.
    Crossover(f64),
}

impl Component {
    /// Output alphabet.
    pub fn alphabet(&self) -> &'static [Symbol] {
        match self {
            Component::Erasure(_) => &[Symbol::Zero, Symbol::One, Symbol::Erased],
            Component::Crossover(_) => &[Symbol::Zero, Symbol::One],
        }
    }

    /// Transition probability `p(y | x)`.
    pub fn transition(&self, x: u8, y: Symbol) -> f64 {
        match (*self, y) {
            (Component::Erasure(e), Symbol::Erased) => e,
            (Component::Erasure(e), y) => {
                if y == Symbol::bit(x) {
                    1.0 - e
                } else {
                    0.0
                }
            }
            (Component::Crossover(_), Symbol::Erased) => 0.0,
            (Component::Crossover(a), y) => {
                if y == Symbol::bit(x) {
                    1.0 - a
                } else {
                    a
                }
            }
        }
    }

    /// Log-likelihood ratio of an output, possibly infinite.
    #[inline]
    pub fn llr(&self, y: Symbol) -> f64 {
        let magnitude = match *self {
            Component::Erasure(e) => {
                if y == Symbol::Erased || e >= 1.0 {
                    return 0.0;
                }
                f64::INFINITY
            }
            Component::Crossover(a) => {
                if a >= 0.5 {
                    return 0.0;
                }
                if a <= 0.0 {
                    f64::INFINITY
                } else {
                    libm::log((1.0 - a) / a)
                }
            }
        };
        match y {
            Symbol::Zero => magnitude,
            Symbol::One => -magnitude,
            Symbol::Erased => 0.0,
        }
    }

    /// Draws an output for input `x`.
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, x: u8, rng: &mut R) -> Symbol {
        match *self {
            Component::Erasure(e) => {
                if rng.gen::<f64>() < e {
                    Symbol::Erased
                } else {
                    Symbol::bit(x)
                }
            }
            Component::Crossover(a) => {
                if rng.gen::<f64>() < a {
                    Symbol::bit(x ^ 1)
                } else {
                    Symbol::bit(x)
                }
            }
        }
    }

    /// LLR of an output drawn for input 0, without materialising the symbol.
    #[inline]
    pub fn sample_llr_zero<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.llr(self.sample(0, rng))
    }
}

/// A product of independent binary-input observations of the same bit.
///
/// Every component is output-symmetric, hence so is the product; this is what
/// lets Monte-Carlo construction assume the all-zero input.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationChannel {
    parts: Vec<Component>,
}

impl ObservationChannel {
    /// Builds the product of `parts` (possibly empty: no side information).
    pub fn new(parts: Vec<Component>) -> Self {
        Self { parts }
    }

    /// The components.
    pub fn parts(&self) -> &[Component] {
        &self.parts
    }

    /// LLR of the joint output `ys` (one symbol per component).
    pub fn llr(&self, ys: &[Symbol]) -> f64 {
        self.parts.iter().zip(ys).map(|(c, &y)| c.llr(y)).sum()
    }

    /// LLR of one output drawn for input 0.
    #[inline]
    pub fn sample_llr_zero<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let mut l = 0.0;
        for c in &self.parts {
            l += c.sample_llr_zero(rng);
        }
        l
    }
}

/// Inputs and all outputs of one use of the broadcast channel over a block.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionTrace {
    /// Channel input.
    pub x: BitBlock,
    /// Receiver outputs, `Y_1` first.
    pub receivers: Vec<Vec<Symbol>>,
    /// Eavesdropper outputs, `Z_1` first.
    pub eavesdroppers: Vec<Vec<Symbol>>,
}

/// Transmits `x` over the broadcast channel.
///
/// Degradation is physical: the best output is drawn from `x` and every
/// worse output is obtained by passing the previous one through an extra
/// degrading stage.
pub fn sample_broadcast<R: Rng + ?Sized>(spec: &BroadcastChannelSpec, x: &BitBlock, rng: &mut R) -> TransmissionTrace {
    let chain = spec.quality_chain();
    let mut outputs: Vec<Vec<Symbol>> = Vec::with_capacity(chain.len());
    let mut current: Vec<Symbol> = x.bits().iter().map(|&b| Symbol::bit(b)).collect();
    let mut previous = 0.0;
    for &p in &chain {
        let stage = match spec.kind {
            ChannelKind::Erasure => {
                if previous >= 1.0 {
                    0.0
                } else {
                    (p - previous) / (1.0 - previous)
                }
            }
            ChannelKind::Symmetric => {
                if previous >= 0.5 {
                    0.0
                } else {
                    (p - previous) / (1.0 - 2.0 * previous)
                }
            }
        };
        if stage > 0.0 {
            for s in current.iter_mut() {
                if rng.gen::<f64>() < stage {
                    *s = match spec.kind {
                        ChannelKind::Erasure => Symbol::Erased,
                        ChannelKind::Symmetric => s.flip(),
                    };
                }
            }
        }
        outputs.push(current.clone());
        previous = p;
    }
    let k = spec.num_receivers();
    let mut eavesdroppers = outputs.split_off(k);
    let mut receivers = outputs;
    receivers.reverse();
    eavesdroppers.reverse();
    TransmissionTrace { x: x.clone(), receivers, eavesdroppers }
}

/// Secrecy-capacity corner point of the non-layered-decoding scheme on an
/// erasure broadcast channel: `R_m = ε_{Z_m} − ε_{Z_{m+1}}` and
/// `R_M = ε_{Z_M} − ε_{Y_1}`.
pub fn secrecy_rates_nldls(spec: &BroadcastChannelSpec) -> Result<Vec<f64>> {
    if spec.kind != ChannelKind::Erasure {
        return Err(Error::UnsupportedChannel("closed-form NLD-LS rates need an erasure channel".to_string()));
    }
    let z = &spec.eavesdroppers;
    let mut rates: Vec<f64> = z.windows(2).map(|w| w[0] - w[1]).collect();
    rates.push(z[z.len() - 1] - spec.receivers[0]);
    Ok(rates)
}

/// Secrecy-capacity corner point of the layered-decoding scheme on a
/// two-receiver symmetric broadcast channel with uniform `V` and symmetric
/// superposition.
pub fn secrecy_rates_ldnls(spec: &BroadcastChannelSpec) -> Result<Vec<f64>> {
    if spec.kind != ChannelKind::Symmetric {
        return Err(Error::UnsupportedChannel("closed-form LD-NLS rates need a symmetric channel".to_string()));
    }
    if spec.num_receivers() != 2 {
        return Err(Error::UnsupportedConfiguration("closed-form LD-NLS rates need K = 2".to_string()));
    }
    let a = spec.superposition.unwrap_or(0.0);
    let y1 = spec.receivers[0];
    let y2 = spec.receivers[1];
    let zm = spec.eavesdroppers[spec.eavesdroppers.len() - 1];
    let r1 = h2(conv(a, zm)) - h2(conv(a, y1));
    let r2 = (h2(conv(a, y2)) - h2(y2)) - (h2(conv(a, zm)) - h2(zm));
    Ok(vec![r1, r2])
}
