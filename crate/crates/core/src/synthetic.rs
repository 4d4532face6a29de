//! Synthetic price paths with injected bubbles.
//!
//! Prices are a fundamental component following a driftless geometric random
//! walk from 100 plus a bubble component that is zero outside its episode
//! and grows by the factor θ⁻¹ each period inside it. The bubble follows its
//! expected path deterministically; only the fundamental is random.

use chrono::{Datelike, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::StreamRng;
use crate::timeseries::PriceSeries;

pub const INITIAL_PRICE: f64 = 100.0;

/// How the bubble component leaves the price after its episode ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum BurstMode {
    /// The bubble stops growing and stays at its last level.
    None,
    /// The bubble vanishes on the first day after the episode.
    Instant,
    /// The bubble shrinks linearly to zero over `periods` days.
    Linear { periods: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BubbleEpisode {
    pub start: usize,
    /// Exclusive.
    pub end: usize,
    /// Bubble level at `start` as a fraction of the initial price.
    pub initial_bubble: f64,
    pub burst: BurstMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BubbleScenario {
    pub length: usize,
    pub base_sigma: f64,
    /// Per-period growth factor of the bubble component.
    pub theta_inv: f64,
    pub bubble_start: usize,
    /// Exclusive.
    pub bubble_end: usize,
    pub initial_bubble: f64,
    pub burst: BurstMode,
    pub seed: u64,
    /// Further episodes sharing `theta_inv`, in chronological order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_episodes: Vec<BubbleEpisode>,
}

impl BubbleScenario {
    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn episodes(&self) -> Vec<BubbleEpisode> {
        let mut all = vec![BubbleEpisode {
            start: self.bubble_start,
            end: self.bubble_end,
            initial_bubble: self.initial_bubble,
            burst: self.burst,
        }];
        all.extend(self.extra_episodes.iter().copied());
        all
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: String| Err(Error::Config(m));
        if self.length < 2 {
            return fail(format!("length must be at least 2, got {}", self.length));
        }
        if !(self.base_sigma.is_finite() && self.base_sigma > 0.0) {
            return fail(format!(
                "base_sigma must be positive, got {}",
                self.base_sigma
            ));
        }
        if !(self.theta_inv.is_finite() && self.theta_inv >= 1.0) {
            return fail(format!(
                "theta_inv must be at least 1, got {}",
                self.theta_inv
            ));
        }
        let mut previous_end = 0;
        for (i, e) in self.episodes().iter().enumerate() {
            if !(e.start < e.end && e.end <= self.length) {
                return fail(format!(
                    "episode {i}: need start < end <= length, got {}..{} with length {}",
                    e.start, e.end, self.length
                ));
            }
            if i > 0 && e.start < previous_end {
                return fail(format!("episode {i} overlaps the previous one"));
            }
            if !(e.initial_bubble.is_finite() && e.initial_bubble >= 0.0) {
                return fail(format!("episode {i}: initial_bubble must be non-negative"));
            }
            if let BurstMode::Linear { periods: 0 } = e.burst {
                return fail(format!(
                    "episode {i}: linear burst needs at least one period"
                ));
            }
            previous_end = e.end;
        }
        Ok(())
    }

    /// Bubble component for every observation.
    pub fn bubble_path(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let mut bubble = vec![0.0; self.length];
        for e in self.episodes() {
            let mut level = e.initial_bubble * INITIAL_PRICE;
            for b in &mut bubble[e.start..e.end] {
                *b = level;
                level *= self.theta_inv;
            }
            let peak = bubble[e.end - 1];
            let tail = &mut bubble[e.end..];
            match e.burst {
                BurstMode::None => tail.iter_mut().for_each(|b| *b = peak),
                BurstMode::Instant => {}
                BurstMode::Linear { periods } => {
                    for (j, b) in tail.iter_mut().take(periods - 1).enumerate() {
                        *b = peak * (1.0 - (j + 1) as f64 / periods as f64);
                    }
                }
            }
        }
        Ok(bubble)
    }
}

/// Consecutive weekdays starting on Monday 2000-01-03.
pub fn trading_days(count: usize) -> Vec<NaiveDate> {
    let epoch = NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid epoch");
    epoch
        .iter_days()
        .filter(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun))
        .take(count)
        .collect()
}

pub fn generate_series(scenario: &BubbleScenario) -> Result<PriceSeries> {
    let bubble = scenario.bubble_path()?;
    let mut rng = StreamRng::new(scenario.seed, 0);
    let mut fundamental = INITIAL_PRICE;
    let mut closes = Vec::with_capacity(scenario.length);
    for (t, b) in bubble.iter().enumerate() {
        if t > 0 {
            fundamental *= (scenario.base_sigma * rng.standard_normal()).exp();
        }
        closes.push(fundamental + b);
    }
    PriceSeries::new(
        trading_days(scenario.length)
            .into_iter()
            .zip(closes)
            .collect(),
    )
}

const LIBRARY: [&str; 4] = ["null", "bloom", "bloom-and-crash", "double-bubble"];

pub fn scenario_names() -> &'static [&'static str] {
    &LIBRARY
}

/// The named scenarios used by tests and demos.
pub fn scenario_library() -> Vec<(&'static str, BubbleScenario)> {
    LIBRARY
        .iter()
        .map(|&name| (name, scenario(name).expect("library name")))
        .collect()
}

pub fn scenario(name: &str) -> Option<BubbleScenario> {
    let bloom = BubbleScenario {
        length: 1_000,
        base_sigma: 0.01,
        theta_inv: 1.004,
        bubble_start: 350,
        bubble_end: 650,
        initial_bubble: 0.05,
        burst: BurstMode::None,
        seed: 42,
        extra_episodes: Vec::new(),
    };
    match name {
        "null" => Some(BubbleScenario {
            theta_inv: 1.0,
            initial_bubble: 0.0,
            seed: 1,
            ..bloom
        }),
        "bloom" => Some(bloom),
        "bloom-and-crash" => Some(BubbleScenario {
            burst: BurstMode::Instant,
            ..bloom
        }),
        "double-bubble" => Some(BubbleScenario {
            length: 1_600,
            bubble_start: 200,
            bubble_end: 500,
            burst: BurstMode::Instant,
            seed: 7,
            extra_episodes: vec![BubbleEpisode {
                start: 900,
                end: 1_200,
                initial_bubble: 0.05,
                burst: BurstMode::Linear { periods: 20 },
            }],
            ..bloom
        }),
        _ => None,
    }
}
