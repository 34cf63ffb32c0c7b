//! Scalar information-theoretic primitives.
//!
//! Everything here works in double precision. Log-likelihood ratios are
//! natural-log and oriented so that a positive value favours bit 0.

use crate::error::{invalid, Result};

const LN2: f64 = core::f64::consts::LN_2;

/// Largest LLR magnitude handed to a decision-making SC pass.
///
/// Beyond 40 nats the error probability is below `4.3e-18`, under anything a
/// simulation can observe; clamping keeps infinities out of the butterflies.
pub const LLR_CLAMP: f64 = 40.0;

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(invalid!("{name} = {p} is not a probability"))
    }
}

/// `x log2 x` with `0 log 0 = 0`.
#[inline]
pub fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * libm::log2(x)
    }
}

/// Binary entropy `h2(p)` in bits.
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_probability("p", p)?;
    Ok(h2(p))
}

/// Unchecked binary entropy for internal callers.
#[inline]
pub(crate) fn h2(p: f64) -> f64 {
    -xlog2x(p) - xlog2x(1.0 - p)
}

/// Crossover probability of two cascaded binary symmetric channels.
pub fn binary_convolution(a: f64, b: f64) -> Result<f64> {
    check_probability("a", a)?;
    check_probability("b", b)?;
    Ok(conv(a, b))
}

#[inline]
pub(crate) fn conv(a: f64, b: f64) -> f64 {
    a * (1.0 - b) + b * (1.0 - a)
}

/// `P(U = 0)` for a given LLR.
#[inline]
pub fn prob_zero(llr: f64) -> f64 {
    if llr >= 0.0 {
        1.0 / (1.0 + exp(-llr))
    } else {
        let t = exp(llr);
        t / (1.0 + t)
    }
}

/// Conditional entropy of a bit with the given LLR, and its complement.
///
/// Returns `(h, 1 - h)`, each computed without cancellation: `h` through the
/// minority probability and `1 - h` through a power series in
/// `tanh(|L|/2)` when the LLR is small.
pub fn entropy_from_llr(llr: f64) -> (f64, f64) {
    let a = libm::fabs(llr);
    if a.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    if a == f64::INFINITY {
        return (0.0, 1.0);
    }
    let t = exp(-a);
    let p = t / (1.0 + t);
    let h = (p * a + ln_1p(t)) / LN2;
    if a >= 0.25 {
        return (h, 1.0 - h);
    }
    // 1 - h2((1-d)/2) = sum_k d^(2k) / (k (2k-1)) / (2 ln 2)
    let d = libm::tanh(a / 2.0);
    let d2 = d * d;
    let mut pow = d2;
    let mut sum = 0.0;
    for k in 1..=12 {
        let kf = k as f64;
        sum += pow / (kf * (2.0 * kf - 1.0));
        pow *= d2;
    }
    (h, sum / (2.0 * LN2))
}

/// Exact check-node (box-plus) combination of two LLRs.
///
/// Computes `2 atanh(tanh(a/2) tanh(b/2))` in the overflow-free form
/// `sign · (min + ln((1 + e^{-(|a|+|b|)}) / (1 + e^{-||a|-|b||})))`,
/// dropping exponentials below `e^{-40}`.
#[inline]
pub fn boxplus(a: f64, b: f64) -> f64 {
    let (aa, ab) = (libm::fabs(a), libm::fabs(b));
    let negative = (a < 0.0) != (b < 0.0);
    let (small, big) = if aa < ab { (aa, ab) } else { (ab, aa) };
    let mut mag = small;
    let diff = big - small;
    if diff < 40.0 {
        let ed = exp(-diff);
        let sum = big + small;
        let es = if sum < 40.0 { exp(-sum) } else { 0.0 };
        mag += ln_1p((es - ed) / (1.0 + ed));
        if mag < 0.0 {
            mag = 0.0;
        }
    }
    if negative {
        -mag
    } else {
        mag
    }
}

/// Natural log.
#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    #[cfg(feature = "std")]
    return x.ln();
    #[cfg(not(feature = "std"))]
    return libm::log(x);
}

/// `e^x`.
#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    #[cfg(feature = "std")]
    return x.exp();
    #[cfg(not(feature = "std"))]
    return libm::exp(x);
}

/// `ln(1 + x)`.
#[inline]
pub(crate) fn ln_1p(x: f64) -> f64 {
    #[cfg(feature = "std")]
    return x.ln_1p();
    #[cfg(not(feature = "std"))]
    return libm::log1p(x);
}

/// Square root.
#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

/// Standard normal upper tail `P(N > z)`.
pub fn normal_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z / core::f64::consts::SQRT_2)
}

/// Centred moving average over a series with a 5-point span, shrinking the
/// span symmetrically to 3 and 1 points at the ends.
///
/// Used to turn a raw blocklength sweep into the smoothed curve that the
/// published figures show.
pub fn smooth5(values: &[f64]) -> alloc::vec::Vec<f64> {
    let n = values.len();
    (0..n)
        .map(|i| {
            let half = 2.min(i).min(n - 1 - i);
            let window = &values[i - half..=i + half];
            window.iter().sum::<f64>() / window.len() as f64
        })
        .collect()
}
