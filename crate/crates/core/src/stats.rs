//! Window statistics U, V and C and their moments under the no-bubble null.
//!
//! For a window of N daily returns:
//!
//! * `U` is the fraction of strictly positive returns,
//! * `V` is the mean of the positive returns plus the mean of the
//!   non-positive returns,
//! * `C` weights those two means by `U` and `1 − U`.
//!
//! Under i.i.d. N(0, σ²) returns all three have known means and variances,
//! which turns each into a z-score. A window is centered on index `t` and
//! spans offsets `−⌊N/2⌋ ..= N − ⌊N/2⌋ − 1`.

use std::f64::consts::PI;
use std::ops::Range;

use chrono::NaiveDate;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::ReturnSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StatisticKind {
    U,
    V,
    C,
}

impl StatisticKind {
    pub const ALL: [StatisticKind; 3] = [Self::U, Self::V, Self::C];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::U => "U",
            Self::V => "V",
            Self::C => "C",
        }
    }
}

impl std::fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Centered window of `n` observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowConfig {
    n: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self { n: 100 }
    }
}

impl WindowConfig {
    pub const MIN_LEN: usize = 4;

    pub fn new(n: usize) -> Result<Self> {
        if n < Self::MIN_LEN {
            return Err(Error::Config(format!(
                "window length must be at least {}, got {n}",
                Self::MIN_LEN
            )));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of observations before the center, ⌊N/2⌋.
    pub fn lead(&self) -> usize {
        self.n / 2
    }

    /// Number of observations after the center, N − ⌊N/2⌋ − 1.
    pub fn trail(&self) -> usize {
        self.n - self.n / 2 - 1
    }

    /// Index range of the window centered at `center`, if it fits in `len`.
    pub fn span(&self, center: usize, len: usize) -> Option<Range<usize>> {
        let start = center.checked_sub(self.lead())?;
        let end = start + self.n;
        (end <= len).then_some(start..end)
    }
}

/// Indicator of a strictly positive return; zero counts as non-positive.
pub fn indicator_u(r: f64) -> u8 {
    u8::from(r > 0.0)
}

/// Split of a window into strictly positive and non-positive returns.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowDecomposition {
    pub n_pos: usize,
    pub n_neg: usize,
    /// Mean of the positive returns; `None` when there are none.
    pub mean_pos: Option<f64>,
    /// Mean of the non-positive returns; `None` when there are none.
    pub mean_neg: Option<f64>,
}

impl WindowDecomposition {
    pub fn of(window: &[f64]) -> Self {
        let (mut n_pos, mut sum_pos, mut sum_neg) = (0usize, 0.0, 0.0);
        for &r in window {
            if indicator_u(r) == 1 {
                n_pos += 1;
                sum_pos += r;
            } else {
                sum_neg += r;
            }
        }
        let n_neg = window.len() - n_pos;
        Self {
            n_pos,
            n_neg,
            mean_pos: (n_pos > 0).then(|| sum_pos / n_pos as f64),
            mean_neg: (n_neg > 0).then(|| sum_neg / n_neg as f64),
        }
    }

    pub fn n(&self) -> usize {
        self.n_pos + self.n_neg
    }

    pub fn is_degenerate(&self) -> bool {
        self.n_pos == 0 || self.n_neg == 0
    }

    pub fn u(&self) -> f64 {
        self.n_pos as f64 / self.n() as f64
    }

    fn means(&self) -> Result<(f64, f64)> {
        match (self.mean_pos, self.mean_neg) {
            (Some(p), Some(n)) => Ok((p, n)),
            _ => Err(Error::DegenerateWindow),
        }
    }

    pub fn v(&self) -> Result<f64> {
        let (pos, neg) = self.means()?;
        Ok(pos + neg)
    }

    pub fn c(&self) -> Result<f64> {
        let (pos, neg) = self.means()?;
        let u = self.u();
        Ok(pos * u + neg * (1.0 - u))
    }
}

fn window<'a>(returns: &'a ReturnSeries, t: usize, cfg: &WindowConfig) -> Result<&'a [f64]> {
    let values = returns.values();
    cfg.span(t, values.len())
        .map(|r| &values[r])
        .ok_or(Error::WindowBounds {
            center: t,
            window: cfg.n(),
            len: values.len(),
        })
}

pub fn decompose_window(
    returns: &ReturnSeries,
    t: usize,
    cfg: &WindowConfig,
) -> Result<WindowDecomposition> {
    window(returns, t, cfg).map(WindowDecomposition::of)
}

pub fn statistic_u(returns: &ReturnSeries, t: usize, cfg: &WindowConfig) -> Result<f64> {
    decompose_window(returns, t, cfg).map(|d| d.u())
}

pub fn statistic_v(returns: &ReturnSeries, t: usize, cfg: &WindowConfig) -> Result<f64> {
    decompose_window(returns, t, cfg)?.v()
}

pub fn statistic_c(returns: &ReturnSeries, t: usize, cfg: &WindowConfig) -> Result<f64> {
    decompose_window(returns, t, cfg)?.c()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullMoments {
    pub mean: f64,
    pub variance: f64,
}

impl NullMoments {
    pub fn z_score(&self, raw: f64) -> f64 {
        (raw - self.mean) / self.variance.sqrt()
    }
}

/// Variance of a half-normal return, (π − 2)/π · σ².
fn half_normal_variance(sigma: f64) -> f64 {
    (PI - 2.0) / PI * sigma * sigma
}

fn check_counts(n_pos: usize, n_neg: usize, sigma: f64) -> Result<()> {
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::DegenerateWindow);
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::Config(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    Ok(())
}

/// Mean 1/2, variance 1/(4N).
pub fn null_moments_u(n: usize) -> NullMoments {
    NullMoments {
        mean: 0.5,
        variance: 1.0 / (4.0 * n as f64),
    }
}

/// Mean 0, variance (1/N⁺ + 1/N⁻)·(π − 2)/π·σ².
pub fn null_moments_v(n_pos: usize, n_neg: usize, sigma: f64) -> Result<NullMoments> {
    check_counts(n_pos, n_neg, sigma)?;
    let inv = 1.0 / n_pos as f64 + 1.0 / n_neg as f64;
    Ok(NullMoments {
        mean: 0.0,
        variance: inv * half_normal_variance(sigma),
    })
}

/// Mean 0, variance [(π − 2)(N + 1)/(4π N⁺ N⁻) + 2/(Nπ)]·σ² with N = N⁺ + N⁻.
pub fn null_moments_c(n_pos: usize, n_neg: usize, sigma: f64) -> Result<NullMoments> {
    check_counts(n_pos, n_neg, sigma)?;
    let (p, q) = (n_pos as f64, n_neg as f64);
    let n = p + q;
    let factor = (PI - 2.0) * (n + 1.0) / (4.0 * PI * p * q) + 2.0 / (n * PI);
    Ok(NullMoments {
        mean: 0.0,
        variance: factor * sigma * sigma,
    })
}

/// Raw and normalized values of one statistic at every window center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatisticSeries {
    pub kind: StatisticKind,
    pub dates: Vec<NaiveDate>,
    pub raw: Vec<Option<f64>>,
    pub normalized: Vec<Option<f64>>,
    pub valid: Vec<bool>,
    /// Centers too close to either end for a full window.
    pub edge_windows: usize,
    /// Full windows where the statistic is undefined.
    pub degenerate_windows: usize,
}

impl StatisticSeries {
    pub fn len(&self) -> usize {
        self.valid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.valid.is_empty()
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RollingStatistics {
    pub window: WindowConfig,
    pub sigma: f64,
    pub u: StatisticSeries,
    pub v: StatisticSeries,
    pub c: StatisticSeries,
}

impl RollingStatistics {
    pub fn get(&self, kind: StatisticKind) -> &StatisticSeries {
        match kind {
            StatisticKind::U => &self.u,
            StatisticKind::V => &self.v,
            StatisticKind::C => &self.c,
        }
    }
}

#[derive(Clone, Copy)]
struct Cell {
    raw: Option<f64>,
    z: Option<f64>,
}

const EMPTY: Cell = Cell { raw: None, z: None };

/// Evaluates U, V and C at every center and normalizes them with the null
/// moments, using the per-window N⁺/N⁻ and one series-wide `sigma`.
pub fn rolling_statistics(
    returns: &ReturnSeries,
    cfg: &WindowConfig,
    sigma: f64,
) -> Result<RollingStatistics> {
    let len = returns.len();
    if len < cfg.n() {
        return Err(Error::InsufficientData {
            needed: cfg.n(),
            actual: len,
        });
    }
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(Error::Config(format!(
            "sigma must be positive, got {sigma}"
        )));
    }
    let values = returns.values();
    let u_moments = null_moments_u(cfg.n());

    let cells: Vec<[Cell; 3]> = (0..len)
        .into_par_iter()
        .map(|t| {
            let Some(span) = cfg.span(t, len) else {
                return [EMPTY; 3];
            };
            let d = WindowDecomposition::of(&values[span]);
            let u = d.u();
            let u_cell = Cell {
                raw: Some(u),
                z: Some(u_moments.z_score(u)),
            };
            let (Ok(v), Ok(c)) = (d.v(), d.c()) else {
                return [u_cell, EMPTY, EMPTY];
            };
            // Counts are nonzero and sigma positive here, so the moments exist.
            let mv = null_moments_v(d.n_pos, d.n_neg, sigma).expect("checked counts");
            let mc = null_moments_c(d.n_pos, d.n_neg, sigma).expect("checked counts");
            [
                u_cell,
                Cell {
                    raw: Some(v),
                    z: Some(mv.z_score(v)),
                },
                Cell {
                    raw: Some(c),
                    z: Some(mc.z_score(c)),
                },
            ]
        })
        .collect();

    let edge = len - (len - cfg.n() + 1);
    let build = |slot: usize, kind: StatisticKind| {
        let raw: Vec<Option<f64>> = cells.iter().map(|c| c[slot].raw).collect();
        let normalized: Vec<Option<f64>> = cells.iter().map(|c| c[slot].z).collect();
        let valid: Vec<bool> = normalized.iter().map(Option::is_some).collect();
        let valid_count = valid.iter().filter(|&&v| v).count();
        StatisticSeries {
            kind,
            dates: returns.dates().to_vec(),
            raw,
            normalized,
            valid,
            edge_windows: edge,
            degenerate_windows: len - edge - valid_count,
        }
    };

    Ok(RollingStatistics {
        window: *cfg,
        sigma,
        u: build(0, StatisticKind::U),
        v: build(1, StatisticKind::V),
        c: build(2, StatisticKind::C),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::brute_force_window_oracle;
    use crate::rng::StreamRng;
    use proptest::prelude::*;

    fn returns(values: &[f64]) -> ReturnSeries {
        ReturnSeries::from_values(values.to_vec()).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12
    }

    #[test]
    fn indicator_treats_zero_as_non_positive() {
        assert_eq!(indicator_u(0.013), 1);
        assert_eq!(indicator_u(0.0), 0);
        assert_eq!(indicator_u(-0.02), 0);
    }

    #[test]
    fn window_alignment() {
        let even = WindowConfig::new(100).unwrap();
        assert_eq!((even.lead(), even.trail()), (50, 49));
        assert_eq!(even.span(50, 100), Some(0..100));
        assert_eq!(even.span(49, 100), None);
        assert_eq!(even.span(51, 100), None);
        let odd = WindowConfig::new(5).unwrap();
        assert_eq!((odd.lead(), odd.trail()), (2, 2));
        assert_eq!(odd.span(2, 5), Some(0..5));
        assert!(WindowConfig::new(3).is_err());
    }

    #[test]
    fn decomposition_examples() {
        let d = WindowDecomposition::of(&[0.02, -0.01, 0.04, 0.0]);
        assert_eq!((d.n_pos, d.n_neg), (2, 2));
        assert!(close(d.mean_pos.unwrap(), 0.03));
        assert!(close(d.mean_neg.unwrap(), -0.005));

        let d = WindowDecomposition::of(&[0.01, 0.02, 0.03]);
        assert_eq!(d.n_neg, 0);
        assert!(d.mean_neg.is_none());

        let d = WindowDecomposition::of(&[-0.01, -0.02]);
        assert_eq!(d.n_pos, 0);
        assert!(d.mean_pos.is_none());
    }

    #[test]
    fn indexed_access_respects_bounds() {
        let r = returns(&[0.01, -0.02, 0.03, 0.0, 0.05]);
        let cfg = WindowConfig::new(4).unwrap();
        assert!(close(statistic_u(&r, 2, &cfg).unwrap(), 0.5));
        assert!(close(statistic_u(&r, 3, &cfg).unwrap(), 0.5));
        assert!(matches!(
            statistic_u(&r, 1, &cfg),
            Err(Error::WindowBounds { center: 1, .. })
        ));
        assert!(matches!(
            decompose_window(&r, 4, &cfg),
            Err(Error::WindowBounds { .. })
        ));
        let flat = returns(&[0.01, 0.02, 0.03, 0.04]);
        assert!(matches!(
            statistic_v(&flat, 2, &cfg),
            Err(Error::DegenerateWindow)
        ));
        assert!(matches!(
            statistic_c(&flat, 2, &cfg),
            Err(Error::DegenerateWindow)
        ));
    }

    #[test]
    fn u_examples() {
        assert!(close(
            WindowDecomposition::of(&[0.01, -0.02, 0.03, 0.0]).u(),
            0.5
        ));
        assert_eq!(WindowDecomposition::of(&[0.01, 0.02, 0.03, 0.04]).u(), 1.0);
        assert_eq!(WindowDecomposition::of(&[0.0, -0.02, 0.0, -0.04]).u(), 0.0);
    }

    #[test]
    fn v_examples() {
        assert!(close(
            WindowDecomposition::of(&[0.02, 0.04, -0.03]).v().unwrap(),
            0.0
        ));
        assert!(close(
            WindowDecomposition::of(&[0.03, -0.01]).v().unwrap(),
            0.02
        ));
        assert!(matches!(
            WindowDecomposition::of(&[0.01, 0.02]).v(),
            Err(Error::DegenerateWindow)
        ));
    }

    #[test]
    fn c_examples() {
        assert!(close(
            WindowDecomposition::of(&[0.03, -0.01]).c().unwrap(),
            0.01
        ));
        assert!(close(
            WindowDecomposition::of(&[0.05, -0.05]).c().unwrap(),
            0.0
        ));
        assert!(close(
            WindowDecomposition::of(&[0.02, 0.02, -0.02, -0.02])
                .c()
                .unwrap(),
            0.0
        ));
    }

    #[test]
    fn null_moment_values() {
        let m = null_moments_u(100);
        assert_eq!(m.mean, 0.5);
        assert!(close(m.variance, 0.0025));
        assert_eq!(null_moments_u(1).variance, 0.25);
        assert!(close(null_moments_u(400).variance, 0.000625));

        // (1/50 + 1/50)·(π − 2)/π·1e-4
        let v = null_moments_v(50, 50, 0.01).unwrap();
        assert_eq!(v.mean, 0.0);
        assert!(
            (v.variance - 1.453_520_910_529_674_7e-6).abs() < 1e-12,
            "{}",
            v.variance
        );
        let v = null_moments_v(1, 1, 1.0).unwrap();
        assert!((v.variance - 0.726_760_455_264_837).abs() < 1e-12);

        // (π − 2)·101/(4π·2500)·1e-4 + 2/(100π)·1e-4
        let c = null_moments_c(50, 50, 0.01).unwrap();
        assert_eq!(c.mean, 0.0);
        assert!(
            (c.variance - 1.003_633_802_276_324_2e-6).abs() < 1e-12,
            "{}",
            c.variance
        );
        let c2 = null_moments_c(50, 50, 0.02).unwrap();
        assert!(close(c2.variance, 4.0 * c.variance));

        assert!(matches!(
            null_moments_v(0, 5, 1.0),
            Err(Error::DegenerateWindow)
        ));
        assert!(matches!(
            null_moments_c(5, 0, 1.0),
            Err(Error::DegenerateWindow)
        ));
        assert!(null_moments_c(5, 5, 0.0).is_err());
    }

    #[test]
    fn rolling_on_exact_length_has_one_valid_center() {
        let mut rng = StreamRng::new(3, 0);
        let xs: Vec<f64> = (0..100).map(|_| rng.normal(0.0, 0.01)).collect();
        let s = rolling_statistics(&returns(&xs), &WindowConfig::default(), 0.01).unwrap();
        assert_eq!(s.u.valid_count(), 1);
        assert!(s.u.valid[50]);
        assert_eq!(s.u.edge_windows, 99);
        assert_eq!(s.u.degenerate_windows, 0);
    }

    #[test]
    fn rolling_rejects_short_series() {
        let r = returns(&[0.01; 99]);
        assert!(matches!(
            rolling_statistics(&r, &WindowConfig::default(), 0.01),
            Err(Error::InsufficientData {
                needed: 100,
                actual: 99
            })
        ));
    }

    #[test]
    fn constant_zero_returns() {
        let r = returns(&[0.0; 300]);
        let s = rolling_statistics(&r, &WindowConfig::default(), 0.01).unwrap();
        assert_eq!(s.v.valid_count(), 0);
        assert_eq!(s.c.valid_count(), 0);
        assert_eq!(s.v.degenerate_windows, 201);
        for t in 50..251 {
            assert_eq!(s.u.raw[t], Some(0.0));
            assert!((s.u.normalized[t].unwrap() + 10.0).abs() < 1e-9);
        }
        assert!(s.u.raw[49].is_none() && s.u.raw[251].is_none());
    }

    #[test]
    fn normalized_null_series_is_standard() {
        let sigma = 0.01;
        let mut rng = StreamRng::new(11, 0);
        let xs: Vec<f64> = (0..10_000).map(|_| rng.normal(0.0, sigma)).collect();
        let s = rolling_statistics(&returns(&xs), &WindowConfig::default(), sigma).unwrap();
        for kind in StatisticKind::ALL {
            let z: Vec<f64> = s.get(kind).normalized.iter().flatten().copied().collect();
            let n = z.len() as f64;
            let mean = z.iter().sum::<f64>() / n;
            let var = z.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
            assert!(mean.abs() <= 0.1, "{kind}: mean {mean}");
            assert!((0.85..=1.15).contains(&var), "{kind}: var {var}");
        }
    }

    #[test]
    fn parallel_matches_sequential() {
        let mut rng = StreamRng::new(5, 0);
        let xs: Vec<f64> = (0..2_000).map(|_| rng.normal(0.0, 0.01)).collect();
        let r = returns(&xs);
        let cfg = WindowConfig::new(60).unwrap();
        let par = rolling_statistics(&r, &cfg, 0.01).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let seq = pool.install(|| rolling_statistics(&r, &cfg, 0.01).unwrap());
        assert_eq!(par, seq);
    }

    #[test]
    fn u_equals_positive_fraction() {
        let mut rng = StreamRng::new(9, 0);
        let xs: Vec<f64> = (0..500).map(|_| rng.normal(0.0, 1.0)).collect();
        let cfg = WindowConfig::new(40).unwrap();
        let s = rolling_statistics(&returns(&xs), &cfg, 1.0).unwrap();
        for (t, raw) in s.u.raw.iter().enumerate() {
            if let Some(u) = raw {
                let span = cfg.span(t, xs.len()).unwrap();
                let pos = xs[span].iter().filter(|&&x| x > 0.0).count();
                assert_eq!(*u, pos as f64 / 40.0);
                assert!((0.0..=1.0).contains(u));
            }
        }
    }

    fn window_strategy() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(prop_oneof![4 => -0.05f64..0.05, 1 => Just(0.0)], 1..80)
    }

    proptest! {
        #[test]
        fn matches_literal_evaluation(w in window_strategy()) {
            let d = WindowDecomposition::of(&w);
            let oracle = brute_force_window_oracle(&w);
            prop_assert_eq!(d.u(), oracle.u);
            match (d.v(), oracle.v) {
                (Ok(a), Some(b)) => prop_assert!(close(a, b)),
                (Err(_), None) => {}
                other => prop_assert!(false, "mismatch {:?}", other),
            }
            match (d.c(), oracle.c) {
                (Ok(a), Some(b)) => prop_assert!(close(a, b)),
                (Err(_), None) => {}
                other => prop_assert!(false, "mismatch {:?}", other),
            }
        }

        #[test]
        fn permutation_invariant(w in window_strategy(), seed in any::<u64>()) {
            let mut shuffled = w.clone();
            let mut rng = StreamRng::new(seed, 0);
            for i in (1..shuffled.len()).rev() {
                let j = (rng.uniform() * (i + 1) as f64) as usize;
                shuffled.swap(i, j);
            }
            let (a, b) = (WindowDecomposition::of(&w), WindowDecomposition::of(&shuffled));
            prop_assert_eq!(a.u(), b.u());
            prop_assert_eq!(a.v().is_ok(), b.v().is_ok());
            if let (Ok(x), Ok(y)) = (a.v(), b.v()) { prop_assert!(close(x, y)); }
            if let (Ok(x), Ok(y)) = (a.c(), b.c()) { prop_assert!(close(x, y)); }
        }

        #[test]
        fn sign_flip_on_zero_free_windows(
            w in prop::collection::vec(
                prop_oneof![-0.05f64..-1e-6, 1e-6f64..0.05], 2..80)
        ) {
            let neg: Vec<f64> = w.iter().map(|x| -x).collect();
            let (a, b) = (WindowDecomposition::of(&w), WindowDecomposition::of(&neg));
            prop_assert!(close(b.u(), 1.0 - a.u()));
            if let (Ok(x), Ok(y)) = (a.v(), b.v()) { prop_assert!(close(x, -y)); }
            if let (Ok(x), Ok(y)) = (a.c(), b.c()) { prop_assert!(close(x, -y)); }
        }
    }
}
