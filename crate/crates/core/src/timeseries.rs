//! Daily price ingestion, returns and descriptive statistics.

use std::io::{Read, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const DATE_FORMAT: &str = "%Y-%m-%d";

/// Ordered daily closing prices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    dates: Vec<NaiveDate>,
    closes: Vec<f64>,
}

impl PriceSeries {
    /// Builds a series from observations in any order. Rows are sorted by date.
    pub fn new(mut rows: Vec<(NaiveDate, f64)>) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::InsufficientData {
                needed: 2,
                actual: rows.len(),
            });
        }
        rows.sort_by_key(|&(d, _)| d);
        for pair in rows.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(Error::DuplicateDate(pair[0].0));
            }
        }
        for &(date, value) in &rows {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::NonPositiveClose { date, value });
            }
        }
        let (dates, closes) = rows.into_iter().unzip();
        Ok(Self { dates, closes })
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn closes(&self) -> &[f64] {
        &self.closes
    }

    pub fn len(&self) -> usize {
        self.closes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.closes.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReturnMode {
    /// (P[t+1] − P[t]) / P[t]
    #[default]
    Simple,
    /// ln(P[t+1] / P[t])
    Log,
}

impl std::str::FromStr for ReturnMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(Self::Simple),
            "log" => Ok(Self::Log),
            other => Err(Error::Config(format!(
                "unknown return mode {other:?} (expected simple or log)"
            ))),
        }
    }
}

impl std::fmt::Display for ReturnMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Simple => "simple",
            Self::Log => "log",
        })
    }
}

/// Daily returns. `returns[i]` comes from the price pair `(i, i + 1)` and is
/// dated by the later price.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    dates: Vec<NaiveDate>,
    returns: Vec<f64>,
}

impl ReturnSeries {
    pub fn new(dates: Vec<NaiveDate>, returns: Vec<f64>) -> Result<Self> {
        if dates.len() != returns.len() {
            return Err(Error::Inconsistent(format!(
                "{} dates for {} returns",
                dates.len(),
                returns.len()
            )));
        }
        if let Some(i) = returns.iter().position(|r| !r.is_finite()) {
            return Err(Error::Validation(format!("return {i} is not finite")));
        }
        Ok(Self { dates, returns })
    }

    /// Undated returns; dates are consecutive days from 2000-01-01.
    pub fn from_values(returns: Vec<f64>) -> Result<Self> {
        let epoch = NaiveDate::from_ymd_opt(2000, 1, 1).expect("valid epoch");
        let dates = epoch.iter_days().take(returns.len()).collect();
        Self::new(dates, returns)
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn values(&self) -> &[f64] {
        &self.returns
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }

    /// Drops days with an exactly zero return (stale quotes).
    pub fn without_zero_returns(&self) -> Self {
        let (dates, returns) = self
            .dates
            .iter()
            .zip(&self.returns)
            .filter(|(_, &r)| r != 0.0)
            .map(|(&d, &r)| (d, r))
            .unzip();
        Self { dates, returns }
    }
}

/// Reads `date,close` CSV text. Extra columns are ignored.
pub fn load_prices<R: Read>(source: R) -> Result<PriceSeries> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = reader.headers().map_err(csv_error)?.clone();
    let column = |name: &str| {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Parse {
                line: 1,
                message: format!("missing `{name}` column"),
            })
    };
    let date_col = column("date")?;
    let close_col = column("close")?;

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| {
            record.get(i).ok_or_else(|| Error::Parse {
                line,
                message: "missing field".into(),
            })
        };
        let date =
            NaiveDate::parse_from_str(field(date_col)?, DATE_FORMAT).map_err(|e| Error::Parse {
                line,
                message: format!("bad date: {e}"),
            })?;
        let close: f64 = field(close_col)?.parse().map_err(|e| Error::Parse {
            line,
            message: format!("bad close: {e}"),
        })?;
        rows.push((date, close));
    }
    PriceSeries::new(rows)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

/// Writes a series in the format [`load_prices`] reads.
pub fn write_prices<W: Write>(prices: &PriceSeries, mut out: W) -> Result<()> {
    writeln!(out, "date,close")?;
    for (date, close) in prices.dates.iter().zip(&prices.closes) {
        writeln!(out, "{},{}", date.format(DATE_FORMAT), close)?;
    }
    Ok(())
}

pub fn compute_returns(prices: &PriceSeries, mode: ReturnMode) -> ReturnSeries {
    let returns = prices
        .closes
        .windows(2)
        .map(|p| match mode {
            ReturnMode::Simple => (p[1] - p[0]) / p[0],
            ReturnMode::Log => (p[1] / p[0]).ln(),
        })
        .collect();
    ReturnSeries {
        dates: prices.dates[1..].to_vec(),
        returns,
    }
}

/// 1% critical value of the chi-square distribution with two degrees of freedom.
pub fn jb_critical_1pct() -> f64 {
    -2.0 * 0.01_f64.ln()
}

/// Jarque–Bera statistic from sample size, skewness and raw kurtosis.
pub fn jarque_bera(count: usize, skewness: f64, kurtosis: f64) -> f64 {
    let excess = kurtosis - 3.0;
    count as f64 / 6.0 * (skewness * skewness + excess * excess / 4.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (divisor L − 1).
    pub std_dev: f64,
    pub skewness: f64,
    /// Raw kurtosis; 3 for a normal sample.
    pub kurtosis: f64,
    pub jarque_bera: f64,
    pub jb_reject_at_1pct: bool,
}

pub fn summary_stats(returns: &ReturnSeries) -> Result<SummaryStats> {
    summarize(&returns.returns)
}

pub(crate) fn summarize(xs: &[f64]) -> Result<SummaryStats> {
    let count = xs.len();
    if count < 4 {
        return Err(Error::InsufficientData {
            needed: 4,
            actual: count,
        });
    }
    let n = count as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    if m2 == 0.0 || xs.iter().all(|&x| x == xs[0]) {
        return Err(Error::DegenerateSeries("zero variance"));
    }
    let std_dev = (m2 / (n - 1.0)).sqrt();
    let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
    let skewness = m3 / m2.powf(1.5);
    let kurtosis = m4 / (m2 * m2);
    let jb = jarque_bera(count, skewness, kurtosis);
    Ok(SummaryStats {
        count,
        mean,
        std_dev,
        skewness,
        kurtosis,
        jarque_bera: jb,
        jb_reject_at_1pct: jb > jb_critical_1pct(),
    })
}
