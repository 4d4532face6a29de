//! Static SVG plots: the analysis overview and the null-density figure.

use std::fmt::Write;

use bubblescan::detector::{DetectionReport, Direction};
use bubblescan::montecarlo::{histogram, NullSimulation};
use bubblescan::normal;
use bubblescan::{PriceSeries, RollingStatistics, StatisticKind};

const WIDTH: f64 = 1000.0;
const PANEL: f64 = 240.0;
const MARGIN: f64 = 50.0;

struct Panel {
    top: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Panel {
    fn x(&self, i: f64) -> f64 {
        MARGIN + (WIDTH - 2.0 * MARGIN) * i / self.x_max.max(1.0)
    }

    fn y(&self, v: f64) -> f64 {
        let frac = (v - self.y_min) / (self.y_max - self.y_min);
        self.top + PANEL - frac.clamp(0.0, 1.0) * PANEL
    }

    fn frame(&self, svg: &mut String, title: &str) {
        let _ = writeln!(
            svg,
            r##"<rect x="{:.1}" y="{:.1}" width="{:.1}" height="{PANEL:.1}" fill="none" stroke="#888"/>"##,
            MARGIN,
            self.top,
            WIDTH - 2.0 * MARGIN
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="13">{title}</text>"#,
            MARGIN,
            self.top - 6.0
        );
        for v in [self.y_min, self.y_max] {
            let _ = writeln!(
                svg,
                r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="end">{v:.2}</text>"#,
                MARGIN - 4.0,
                self.y(v) + 3.0
            );
        }
    }

    fn rule(&self, svg: &mut String, v: f64, color: &str) {
        let _ = writeln!(
            svg,
            r#"<line x1="{:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="{color}" stroke-dasharray="4 3"/>"#,
            MARGIN,
            WIDTH - MARGIN,
            y = self.y(v)
        );
    }

    fn band(&self, svg: &mut String, start: usize, end: usize, color: &str) {
        let (x0, x1) = (self.x(start as f64), self.x(end as f64));
        let _ = writeln!(
            svg,
            r#"<rect x="{x0:.1}" y="{:.1}" width="{:.1}" height="{PANEL:.1}" fill="{color}" fill-opacity="0.18"/>"#,
            self.top,
            (x1 - x0).max(1.0)
        );
    }

    /// Polyline broken at missing values.
    fn series(&self, svg: &mut String, values: &[Option<f64>], color: &str) {
        let mut points = String::new();
        let flush = |points: &mut String, svg: &mut String| {
            if !points.is_empty() {
                let _ = writeln!(
                    svg,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="1" points="{}"/>"#,
                    points.trim_end()
                );
                points.clear();
            }
        };
        for (i, v) in values.iter().enumerate() {
            match v {
                Some(v) => {
                    let _ = write!(points, "{:.1},{:.1} ", self.x(i as f64), self.y(*v));
                }
                None => flush(&mut points, svg),
            }
        }
        flush(&mut points, svg);
    }
}

fn z_range(stats: &RollingStatistics, kinds: &[StatisticKind], threshold: f64) -> (f64, f64) {
    let bound = kinds
        .iter()
        .flat_map(|&k| stats.get(k).normalized.iter().flatten())
        .fold(threshold, |m, z| m.max(z.abs()));
    let bound = (bound * 1.1).ceil();
    (-bound, bound)
}

fn color(kind: StatisticKind) -> &'static str {
    match kind {
        StatisticKind::U => "#2a6fdb",
        StatisticKind::V => "#d63384",
        StatisticKind::C => "#6f42c1",
    }
}

/// Normalized U and V, normalized C, and the price, with the threshold band
/// and shaded exceedance periods.
pub fn overview(
    prices: &PriceSeries,
    stats: &RollingStatistics,
    report: &DetectionReport,
) -> String {
    let len = stats.u.len();
    let x_max = len.saturating_sub(1) as f64;
    let height = 3.0 * (PANEL + MARGIN) + MARGIN;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);

    let panels: [(&str, &[StatisticKind]); 2] = [
        ("normalized U and V", &[StatisticKind::U, StatisticKind::V]),
        ("normalized C", &[StatisticKind::C]),
    ];
    for (row, (title, kinds)) in panels.iter().enumerate() {
        let (y_min, y_max) = z_range(stats, kinds, report.threshold);
        let panel = Panel {
            top: MARGIN + row as f64 * (PANEL + MARGIN),
            x_max,
            y_min,
            y_max,
        };
        for &kind in *kinds {
            for p in report.periods(kind) {
                panel.band(&mut svg, p.start_index, p.end_index, color(kind));
            }
        }
        panel.frame(&mut svg, title);
        panel.rule(&mut svg, report.threshold, "#d62728");
        panel.rule(&mut svg, -report.threshold, "#d62728");
        panel.rule(&mut svg, 0.0, "#bbb");
        for &kind in *kinds {
            panel.series(&mut svg, &stats.get(kind).normalized, color(kind));
        }
    }

    // Price of the later day of each return pair, aligned with the statistics.
    let closes = &prices.closes()[1..];
    let lo = closes.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = closes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let pad = ((hi - lo) * 0.05).max(1e-9);
    let panel = Panel {
        top: MARGIN + 2.0 * (PANEL + MARGIN),
        x_max,
        y_min: lo - pad,
        y_max: hi + pad,
    };
    for kind in StatisticKind::ALL {
        for p in report.periods(kind) {
            if kind == StatisticKind::U || p.direction == Direction::Lower {
                panel.band(&mut svg, p.start_index, p.end_index, color(kind));
            }
        }
    }
    panel.frame(&mut svg, "price");
    let values: Vec<Option<f64>> = closes.iter().map(|&c| Some(c)).collect();
    panel.series(&mut svg, &values, "#222");
    if let (Some(first), Some(last)) = (stats.u.dates.first(), stats.u.dates.last()) {
        let y = panel.top + PANEL + 14.0;
        let _ = writeln!(
            svg,
            r#"<text x="{MARGIN:.1}" y="{y:.1}" font-size="10">{first}</text>"#
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{y:.1}" font-size="10" text-anchor="end">{last}</text>"#,
            WIDTH - MARGIN
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Densities of the simulated normalized statistics against N(0, 1).
pub fn null_densities(sim: &NullSimulation, bins: usize) -> String {
    let panel = Panel {
        top: MARGIN,
        x_max: 8.0,
        y_min: 0.0,
        y_max: 0.6,
    };
    let to_x = |z: f64| z + 4.0;
    let height = PANEL + 2.0 * MARGIN;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}" font-family="sans-serif">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    panel.frame(
        &mut svg,
        "density of normalized U, V, C under the null; red: N(0, 1)",
    );

    let line = |svg: &mut String, pts: &[(f64, f64)], color: &str| {
        let points: Vec<String> = pts
            .iter()
            .filter(|(z, _)| (-4.0..=4.0).contains(z))
            .map(|&(z, d)| format!("{:.1},{:.1}", panel.x(to_x(z)), panel.y(d)))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
            points.join(" ")
        );
    };
    let reference: Vec<(f64, f64)> = (0..=160)
        .map(|i| {
            let z = -4.0 + i as f64 * 0.05;
            (z, normal::pdf(z))
        })
        .collect();
    line(&mut svg, &reference, "#d62728");
    let colors = [
        ("#2ca02c", StatisticKind::U),
        ("#1f77b4", StatisticKind::V),
        ("#e377c2", StatisticKind::C),
    ];
    for (c, kind) in colors {
        if let Ok(h) = histogram(&sim.get(kind).draws, bins) {
            let pts: Vec<(f64, f64)> = h
                .centers
                .iter()
                .copied()
                .zip(h.densities.iter().copied())
                .collect();
            line(&mut svg, &pts, c);
        }
    }
    for z in [-4, -2, 0, 2, 4] {
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" font-size="10" text-anchor="middle">{z}</text>"#,
            panel.x(to_x(z as f64)),
            panel.top + PANEL + 14.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}
