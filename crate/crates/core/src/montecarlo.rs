//! Simulation of U, V and C under the no-bubble null.
//!
//! Each replication draws one window of i.i.d. N(0, σ²) returns, evaluates
//! the three statistics and normalizes them with the analytic null moments
//! (σ known). Replication `i` draws from stream `i` of the seeded generator,
//! so results do not depend on thread scheduling.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal;
use crate::rng::StreamRng;
use crate::stats::{
    null_moments_c, null_moments_u, null_moments_v, StatisticKind, WindowDecomposition,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub window_n: usize,
    pub replications: usize,
    pub seed: u64,
    pub sigma: f64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            window_n: 100,
            replications: 10_000,
            seed: 0,
            sigma: 1.0,
        }
    }
}

impl SimulationConfig {
    pub const MIN_REPLICATIONS: usize = 100;

    pub fn validate(&self) -> Result<()> {
        if self.replications < Self::MIN_REPLICATIONS {
            return Err(Error::Config(format!(
                "at least {} replications required, got {}",
                Self::MIN_REPLICATIONS,
                self.replications
            )));
        }
        if self.window_n < 4 {
            return Err(Error::Config(format!(
                "window length must be at least 4, got {}",
                self.window_n
            )));
        }
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::Config(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampleSummary {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

impl SampleSummary {
    pub fn of(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        for &x in xs {
            let d = x - mean;
            let d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        let variance = m2 / (n - 1.0);
        let (m2, m3, m4) = (m2 / n, m3 / n, m4 / n);
        Self {
            mean,
            variance,
            skewness: m3 / m2.powf(1.5),
            excess_kurtosis: m4 / (m2 * m2) - 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullSample {
    pub kind: StatisticKind,
    /// Normalized draws, one per replication.
    pub draws: Vec<f64>,
    pub raw: Vec<f64>,
    /// Null variance the draw was normalized with.
    pub null_variance: Vec<f64>,
    pub summary: SampleSummary,
}

impl NullSample {
    fn new(kind: StatisticKind, raw: Vec<f64>, draws: Vec<f64>, null_variance: Vec<f64>) -> Self {
        let summary = SampleSummary::of(&draws);
        Self {
            kind,
            draws,
            raw,
            null_variance,
            summary,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullSimulation {
    pub config: SimulationConfig,
    pub u: NullSample,
    pub v: NullSample,
    pub c: NullSample,
    /// Windows redrawn because every return had the same sign.
    pub redraws: usize,
}

impl NullSimulation {
    pub fn get(&self, kind: StatisticKind) -> &NullSample {
        match kind {
            StatisticKind::U => &self.u,
            StatisticKind::V => &self.v,
            StatisticKind::C => &self.c,
        }
    }
}

struct Replication {
    raw: [f64; 3],
    z: [f64; 3],
    var: [f64; 3],
    redraws: usize,
}

fn replicate(cfg: &SimulationConfig, index: usize) -> Replication {
    let mut rng = StreamRng::new(cfg.seed, index as u64);
    let mut window = vec![0.0; cfg.window_n];
    let mut redraws = 0;
    let d = loop {
        for r in window.iter_mut() {
            *r = rng.normal(0.0, cfg.sigma);
        }
        let d = WindowDecomposition::of(&window);
        if !d.is_degenerate() {
            break d;
        }
        redraws += 1;
    };
    let mu = null_moments_u(cfg.window_n);
    let mv = null_moments_v(d.n_pos, d.n_neg, cfg.sigma).expect("non-degenerate");
    let mc = null_moments_c(d.n_pos, d.n_neg, cfg.sigma).expect("non-degenerate");
    let (u, v, c) = (
        d.u(),
        d.v().expect("non-degenerate"),
        d.c().expect("non-degenerate"),
    );
    Replication {
        raw: [u, v, c],
        z: [mu.z_score(u), mv.z_score(v), mc.z_score(c)],
        var: [mu.variance, mv.variance, mc.variance],
        redraws,
    }
}

pub fn simulate_null(cfg: &SimulationConfig) -> Result<NullSimulation> {
    cfg.validate()?;
    let reps: Vec<Replication> = (0..cfg.replications)
        .into_par_iter()
        .map(|i| replicate(cfg, i))
        .collect();

    let sample = |slot: usize, kind: StatisticKind| {
        NullSample::new(
            kind,
            reps.iter().map(|r| r.raw[slot]).collect(),
            reps.iter().map(|r| r.z[slot]).collect(),
            reps.iter().map(|r| r.var[slot]).collect(),
        )
    };
    Ok(NullSimulation {
        config: *cfg,
        u: sample(0, StatisticKind::U),
        v: sample(1, StatisticKind::V),
        c: sample(2, StatisticKind::C),
        redraws: reps.iter().map(|r| r.redraws).sum(),
    })
}

/// U, V and C of one window by literal summation; V and C are `None` when
/// either sign class is empty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowOracle {
    pub u: f64,
    pub v: Option<f64>,
    pub c: Option<f64>,
}

pub fn brute_force_window_oracle(window: &[f64]) -> WindowOracle {
    let n = window.len() as f64;
    let ups: Vec<f64> = window
        .iter()
        .map(|&r| if r > 0.0 { 1.0 } else { 0.0 })
        .collect();
    let u = ups.iter().sum::<f64>() / n;

    let positives: Vec<f64> = window.iter().copied().filter(|&r| r > 0.0).collect();
    let others: Vec<f64> = window.iter().copied().filter(|&r| r <= 0.0).collect();
    if positives.is_empty() || others.is_empty() {
        return WindowOracle {
            u,
            v: None,
            c: None,
        };
    }
    let pos_term = positives.iter().sum::<f64>() / positives.len() as f64;
    let neg_term = others.iter().sum::<f64>() / others.len() as f64;
    let v = pos_term + neg_term;

    let up_share = ups.iter().sum::<f64>() / n;
    let down_share = ups.iter().map(|x| 1.0 - x).sum::<f64>() / n;
    let c = pos_term * up_share + neg_term * down_share;
    WindowOracle {
        u,
        v: Some(v),
        c: Some(c),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub centers: Vec<f64>,
    pub densities: Vec<f64>,
    pub bin_width: f64,
}

/// Density-normalized histogram over the sample range.
///
/// A sample with a single distinct value gets unit-width bins centered on it.
pub fn histogram(draws: &[f64], bins: usize) -> Result<Histogram> {
    if bins < 2 {
        return Err(Error::Config(format!("need at least 2 bins, got {bins}")));
    }
    if draws.is_empty() {
        return Err(Error::InsufficientData {
            needed: 1,
            actual: 0,
        });
    }
    let lo = draws.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = draws.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, width) = if hi > lo {
        (lo, (hi - lo) / bins as f64)
    } else {
        (lo - bins as f64 / 2.0, 1.0)
    };

    let mut counts = vec![0usize; bins];
    for &x in draws {
        let k = (((x - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let total = draws.len() as f64;
    Ok(Histogram {
        centers: (0..bins).map(|k| lo + (k as f64 + 0.5) * width).collect(),
        densities: counts.iter().map(|&c| c as f64 / (total * width)).collect(),
        bin_width: width,
    })
}

/// Kolmogorov–Smirnov distance between the sample and N(0, 1).
pub fn ks_statistic(draws: &[f64]) -> f64 {
    let mut sorted = draws.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal::cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Asymptotic KS critical distance at significance `alpha` for `n` draws.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt() / (n as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    /// Deviation being tested; passes when `value <= limit`.
    pub value: f64,
    pub limit: f64,
    pub passed: bool,
}

impl Check {
    fn new(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self {
            name: name.into(),
            value,
            limit,
            passed: value <= limit,
        }
    }
}

/// Moment, normality and raw-variance checks of a null simulation.
pub fn validate_null(sim: &NullSimulation) -> Vec<Check> {
    let mut checks = Vec::new();
    let n = sim.config.replications;
    let ks_limit = ks_critical(n, 0.01);

    for kind in StatisticKind::ALL {
        let s = sim.get(kind);
        checks.push(Check::new(
            format!("{kind} z mean |m|"),
            s.summary.mean.abs(),
            0.05,
        ));
        checks.push(Check::new(
            format!("{kind} z variance |v - 1|"),
            (s.summary.variance - 1.0).abs(),
            0.1,
        ));
        if kind != StatisticKind::U {
            checks.push(Check::new(
                format!("{kind} KS distance"),
                ks_statistic(&s.draws),
                ks_limit,
            ));
        }

        let raw = SampleSummary::of(&s.raw);
        let target_var = s.null_variance.iter().sum::<f64>() / n as f64;
        let target_mean = if kind == StatisticKind::U { 0.5 } else { 0.0 };
        let limit = if kind == StatisticKind::U { 0.05 } else { 0.07 };
        checks.push(Check::new(
            format!("{kind} raw variance relative error"),
            (raw.variance / target_var - 1.0).abs(),
            limit,
        ));
        checks.push(Check::new(
            format!("{kind} raw mean standard errors"),
            (raw.mean - target_mean).abs() / (raw.variance / n as f64).sqrt(),
            3.0,
        ));
    }
    checks.push(Check::new(
        "C z skewness |s|",
        sim.c.summary.skewness.abs(),
        0.1,
    ));
    checks.push(Check::new(
        "C z excess kurtosis |k|",
        sim.c.summary.excess_kurtosis.abs(),
        0.2,
    ));
    checks
}

/// One row per replication: raw and normalized U, V, C.
pub fn write_draws_csv<W: Write>(sim: &NullSimulation, mut out: W) -> Result<()> {
    writeln!(out, "replication,U_raw,U_z,V_raw,V_z,C_raw,C_z")?;
    for i in 0..sim.config.replications {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            i,
            sim.u.raw[i],
            sim.u.draws[i],
            sim.v.raw[i],
            sim.v.draws[i],
            sim.c.raw[i],
            sim.c.draws[i]
        )?;
    }
    Ok(())
}

/// Long-format histogram of the normalized draws with the standard normal
/// density alongside for overlay.
pub fn write_histogram_csv<W: Write>(sim: &NullSimulation, bins: usize, mut out: W) -> Result<()> {
    writeln!(out, "statistic,bin_center,density,normal_pdf")?;
    for kind in StatisticKind::ALL {
        let h = histogram(&sim.get(kind).draws, bins)?;
        for (x, d) in h.centers.iter().zip(&h.densities) {
            writeln!(out, "{kind},{x},{d},{}", normal::pdf(*x))?;
        }
    }
    Ok(())
}
