//! Robust volatility estimate for the normalization of V and C.
//!
//! The sample standard deviation is inflated by the large moves a bubble
//! produces. Returns further than three sample standard deviations from the
//! mean are discarded and the standard deviation is recomputed. For normal
//! data that truncated estimate is biased low by the factor `K`, the variance
//! of a standard normal conditioned on |x| ≤ 3, so the result is divided by √K.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal;
use crate::timeseries::ReturnSeries;

/// Truncation cutoff in units of the sample standard deviation.
pub const CUTOFF: f64 = 3.0;

/// Minimum number of returns accepted by [`estimate_sigma`].
pub const MIN_OBSERVATIONS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaEstimate {
    pub raw_std: f64,
    pub kept_count: usize,
    pub truncated_std: f64,
    pub k_factor: f64,
    pub corrected_sigma: f64,
}

/// K = 1 − 6·e^(−9/2) / (√(2π)·(2Φ(3) − 1)) ≈ 0.97334.
pub fn truncation_factor() -> f64 {
    let c = CUTOFF;
    let mass = 2.0 * normal::cdf(c) - 1.0;
    1.0 - 2.0 * c * normal::pdf(c) / mass
}

fn sample_std(xs: impl Iterator<Item = f64> + Clone) -> Option<(f64, usize)> {
    let (n, sum) = xs.clone().fold((0usize, 0.0), |(n, s), x| (n + 1, s + x));
    if n < 2 {
        return None;
    }
    let mean = sum / n as f64;
    let ss: f64 = xs.map(|x| (x - mean) * (x - mean)).sum();
    Some(((ss / (n - 1) as f64).sqrt(), n))
}

/// One pass of 3-sigma truncation followed by the √K correction.
pub fn estimate_sigma(returns: &ReturnSeries) -> Result<SigmaEstimate> {
    let xs = returns.values();
    if xs.len() < MIN_OBSERVATIONS {
        return Err(Error::InsufficientData {
            needed: MIN_OBSERVATIONS,
            actual: xs.len(),
        });
    }
    let mean = xs.iter().sum::<f64>() / xs.len() as f64;
    let (raw_std, _) = sample_std(xs.iter().copied()).expect("length checked");
    if raw_std == 0.0 || xs.iter().all(|&x| x == xs[0]) {
        return Err(Error::DegenerateSeries("zero variance"));
    }

    let bound = CUTOFF * raw_std;
    let kept = xs.iter().copied().filter(|r| (r - mean).abs() <= bound);
    let (truncated_std, kept_count) = sample_std(kept)
        .ok_or_else(|| Error::Estimation("fewer than two returns survive truncation".into()))?;
    if truncated_std == 0.0 {
        return Err(Error::Estimation(
            "truncated sample has zero variance".into(),
        ));
    }

    let k_factor = truncation_factor();
    Ok(SigmaEstimate {
        raw_std,
        kept_count,
        truncated_std,
        k_factor,
        corrected_sigma: truncated_std / k_factor.sqrt(),
    })
}
