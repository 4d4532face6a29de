//! Exceedance periods of normalized statistics.
//!
//! A window center is flagged when its z-score lies outside the two-sided
//! band ±z(1 − α/2). Flagged centers are grouped into runs, nearby runs in
//! the same direction are merged, and each resulting period is summarized
//! by its extreme z-score and the one-sided tail probability of that value.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal;
use crate::sigma::SigmaEstimate;
use crate::stats::{RollingStatistics, StatisticKind, StatisticSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionConfig {
    /// Two-sided significance level.
    pub alpha: f64,
    /// Largest number of non-exceeding valid centers allowed between two
    /// same-direction runs that are merged into one period.
    pub merge_gap: usize,
    /// Minimum number of exceeding centers in a reported period.
    pub min_run: usize,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            merge_gap: 10,
            min_run: 1,
        }
    }
}

impl DetectionConfig {
    pub fn validate(&self) -> Result<()> {
        two_sided_threshold(self.alpha)?;
        if self.min_run == 0 {
            return Err(Error::Config("min_run must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Upper,
    Lower,
}

impl Direction {
    fn of(z: f64) -> Self {
        if z > 0.0 {
            Self::Upper
        } else {
            Self::Lower
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceedancePeriod {
    pub statistic: StatisticKind,
    pub direction: Direction,
    pub start_date: NaiveDate,
    pub end_date: NaiveDate,
    /// Index of the first and last window center in the return series.
    pub start_index: usize,
    pub end_index: usize,
    /// Number of centers inside the period that exceed the band.
    pub exceedances: usize,
    pub extremum_z: f64,
    pub p_value: f64,
}

impl ExceedancePeriod {
    pub fn overlaps(&self, start: usize, end: usize) -> bool {
        self.start_index <= end && start <= self.end_index
    }
}

/// z(1 − α/2).
pub fn two_sided_threshold(alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Config(format!(
            "alpha must lie strictly between 0 and 1, got {alpha}"
        )));
    }
    Ok(normal::quantile(1.0 - alpha / 2.0))
}

/// One-sided tail probability: 1 − Φ(z) for z ≥ 0, Φ(z) otherwise.
pub fn tail_p_value(z: f64) -> f64 {
    normal::upper_tail(z.abs())
}

struct Run {
    direction: Direction,
    first: usize,
    last: usize,
    // Position of `last` among valid centers.
    last_rank: usize,
    exceedances: usize,
    extremum: f64,
}

pub fn extract_periods(
    series: &StatisticSeries,
    cfg: &DetectionConfig,
) -> Result<Vec<ExceedancePeriod>> {
    let threshold = two_sided_threshold(cfg.alpha)?;

    let mut runs: Vec<Run> = Vec::new();
    let mut rank = 0usize;
    for (t, z) in series.normalized.iter().enumerate() {
        let Some(z) = *z else { continue };
        if !series.valid[t] {
            continue;
        }
        rank += 1;
        if z.abs() <= threshold {
            continue;
        }
        let direction = Direction::of(z);
        let mergeable = runs
            .last()
            .is_some_and(|r| r.direction == direction && rank - r.last_rank - 1 <= cfg.merge_gap);
        if mergeable {
            let run = runs.last_mut().expect("checked");
            run.last = t;
            run.last_rank = rank;
            run.exceedances += 1;
            if z.abs() > run.extremum.abs() {
                run.extremum = z;
            }
        } else {
            runs.push(Run {
                direction,
                first: t,
                last: t,
                last_rank: rank,
                exceedances: 1,
                extremum: z,
            });
        }
    }

    Ok(runs
        .into_iter()
        .filter(|r| r.exceedances >= cfg.min_run)
        .map(|r| ExceedancePeriod {
            statistic: series.kind,
            direction: r.direction,
            start_date: series.dates[r.first],
            end_date: series.dates[r.last],
            start_index: r.first,
            end_index: r.last,
            exceedances: r.exceedances,
            extremum_z: r.extremum,
            p_value: tail_p_value(r.extremum),
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticDiagnostics {
    pub valid_windows: usize,
    pub edge_windows: usize,
    pub degenerate_windows: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticReport {
    pub statistic: StatisticKind,
    pub periods: Vec<ExceedancePeriod>,
    pub diagnostics: StatisticDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub config: DetectionConfig,
    pub threshold: f64,
    pub window: usize,
    pub sigma: SigmaEstimate,
    pub statistics: Vec<StatisticReport>,
}

impl DetectionReport {
    pub fn periods(&self, kind: StatisticKind) -> &[ExceedancePeriod] {
        self.statistics
            .iter()
            .find(|s| s.statistic == kind)
            .map_or(&[], |s| &s.periods)
    }
}

pub fn build_report(
    stats: &RollingStatistics,
    sigma: &SigmaEstimate,
    cfg: &DetectionConfig,
) -> Result<DetectionReport> {
    cfg.validate()?;
    let len = stats.u.len();
    for kind in StatisticKind::ALL {
        let s = stats.get(kind);
        if s.kind != kind {
            return Err(Error::Inconsistent(format!(
                "expected {kind} series, found {}",
                s.kind
            )));
        }
        if s.len() != len
            || s.raw.len() != len
            || s.normalized.len() != len
            || s.dates.len() != len
            || s.dates != stats.u.dates
        {
            return Err(Error::Inconsistent(format!(
                "{kind} series does not share the index of the U series"
            )));
        }
    }

    let statistics = StatisticKind::ALL
        .iter()
        .map(|&kind| {
            let s = stats.get(kind);
            Ok(StatisticReport {
                statistic: kind,
                periods: extract_periods(s, cfg)?,
                diagnostics: StatisticDiagnostics {
                    valid_windows: s.valid_count(),
                    edge_windows: s.edge_windows,
                    degenerate_windows: s.degenerate_windows,
                },
            })
        })
        .collect::<Result<_>>()?;

    Ok(DetectionReport {
        config: *cfg,
        threshold: two_sided_threshold(cfg.alpha)?,
        window: stats.window.n(),
        sigma: *sigma,
        statistics,
    })
}
