//! Detection of asset-price bubbles from daily prices alone.
//!
//! The pipeline is: load closes ([`timeseries`]), estimate a robust return
//! volatility ([`sigma`]), compute the windowed U, V and C statistics and
//! their z-scores ([`stats`]), and extract periods where the z-scores leave
//! the confidence band ([`detector`]). [`montecarlo`] checks the null
//! distributions by simulation and [`synthetic`] produces test series with
//! known bubbles.

pub mod detector;
pub mod error;
pub mod montecarlo;
pub mod normal;
pub mod rng;
pub mod sigma;
pub mod stats;
pub mod synthetic;
pub mod timeseries;

pub use detector::{
    build_report, extract_periods, tail_p_value, two_sided_threshold, DetectionConfig,
    DetectionReport, Direction, ExceedancePeriod,
};
pub use error::{Error, Result};
pub use sigma::{estimate_sigma, truncation_factor, SigmaEstimate};
pub use stats::{
    rolling_statistics, RollingStatistics, StatisticKind, StatisticSeries, WindowConfig,
};
pub use timeseries::{
    compute_returns, load_prices, summary_stats, PriceSeries, ReturnMode, ReturnSeries,
};

/// Everything produced by one pass over a price series.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub returns: ReturnSeries,
    pub sigma: SigmaEstimate,
    pub statistics: RollingStatistics,
    pub report: DetectionReport,
}

/// Runs returns → sigma → rolling statistics → detection.
pub fn analyze(
    prices: &PriceSeries,
    mode: ReturnMode,
    window: &WindowConfig,
    detection: &DetectionConfig,
) -> Result<Analysis> {
    detection.validate()?;
    let returns = compute_returns(prices, mode);
    if returns.len() < window.n() {
        return Err(Error::InsufficientData {
            needed: window.n(),
            actual: returns.len(),
        });
    }
    let sigma = estimate_sigma(&returns)?;
    let statistics = rolling_statistics(&returns, window, sigma.corrected_sigma)?;
    let report = build_report(&statistics, &sigma, detection)?;
    Ok(Analysis {
        returns,
        sigma,
        statistics,
        report,
    })
}
