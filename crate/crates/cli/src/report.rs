//! `report.json` layout.
//!
//! Dates are ISO-8601; z-scores, thresholds and p-values are rounded to four
//! decimals (ties to even). `schema_version` changes whenever a field is
//! renamed or removed.

use bubblescan::detector::{DetectionReport, Direction};
use bubblescan::{PriceSeries, SigmaEstimate, StatisticKind};
use serde::{Deserialize, Serialize};

use crate::format::round4;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema_version: u32,
    pub config: ConfigEcho,
    pub series: SeriesInfo,
    pub threshold: f64,
    pub sigma: SigmaEstimate,
    pub statistics: Vec<StatisticEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub input: String,
    pub window: usize,
    pub alpha: f64,
    pub merge_gap: usize,
    pub min_run: usize,
    pub returns: String,
    pub formats: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesInfo {
    pub prices: usize,
    pub returns: usize,
    pub first_date: String,
    pub last_date: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticEntry {
    pub statistic: StatisticKind,
    pub valid_windows: usize,
    pub edge_windows: usize,
    pub degenerate_windows: usize,
    pub periods: Vec<PeriodEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodEntry {
    pub start_date: String,
    pub end_date: String,
    pub direction: Direction,
    pub extremum_z: f64,
    pub p_value: f64,
    pub exceedances: usize,
    pub start_index: usize,
    pub end_index: usize,
}

impl ReportDocument {
    pub fn new(config: ConfigEcho, prices: &PriceSeries, report: &DetectionReport) -> Self {
        let dates = prices.dates();
        Self {
            schema_version: SCHEMA_VERSION,
            config,
            series: SeriesInfo {
                prices: prices.len(),
                returns: prices.len() - 1,
                first_date: dates[0].to_string(),
                last_date: dates[dates.len() - 1].to_string(),
            },
            threshold: round4(report.threshold),
            sigma: report.sigma,
            statistics: report
                .statistics
                .iter()
                .map(|s| StatisticEntry {
                    statistic: s.statistic,
                    valid_windows: s.diagnostics.valid_windows,
                    edge_windows: s.diagnostics.edge_windows,
                    degenerate_windows: s.diagnostics.degenerate_windows,
                    periods: s
                        .periods
                        .iter()
                        .map(|p| PeriodEntry {
                            start_date: p.start_date.to_string(),
                            end_date: p.end_date.to_string(),
                            direction: p.direction,
                            extremum_z: round4(p.extremum_z),
                            p_value: round4(p.p_value),
                            exceedances: p.exceedances,
                            start_index: p.start_index,
                            end_index: p.end_index,
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn periods(&self, kind: StatisticKind) -> &[PeriodEntry] {
        self.statistics
            .iter()
            .find(|s| s.statistic == kind)
            .map_or(&[], |s| &s.periods)
    }
}
