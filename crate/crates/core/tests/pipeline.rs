use bubblescan::detector::Direction;
use bubblescan::synthetic::{generate_series, scenario, BubbleScenario};
use bubblescan::timeseries::{load_prices, write_prices};
use bubblescan::{analyze, DetectionConfig, Error, ReturnMode, StatisticKind, WindowConfig};

fn run(s: &BubbleScenario) -> bubblescan::Analysis {
    let prices = generate_series(s).unwrap();
    analyze(
        &prices,
        ReturnMode::Simple,
        &WindowConfig::default(),
        &DetectionConfig::default(),
    )
    .unwrap()
}

#[test]
fn bloom_library_scenario_flags_u_inside_the_bubble() {
    let s = scenario("bloom").unwrap();
    let a = run(&s);
    let (lo, hi) = (s.bubble_start - 1, s.bubble_end - 2);
    assert!(a
        .report
        .periods(StatisticKind::U)
        .iter()
        .any(|p| p.direction == Direction::Upper && p.overlaps(lo, hi)));
}

#[test]
fn large_bubbles_are_detected_by_u() {
    // Bubble equal to the initial price, growing 0.4% a day.
    let strong = BubbleScenario {
        initial_bubble: 1.0,
        ..scenario("bloom").unwrap()
    };
    let hits = (0..100)
        .filter(|&seed| {
            let s = strong.with_seed(seed);
            run(&s).report.periods(StatisticKind::U).iter().any(|p| {
                p.direction == Direction::Upper && p.overlaps(s.bubble_start - 1, s.bubble_end - 2)
            })
        })
        .count();
    assert!(hits >= 95, "{hits}/100");
}

#[test]
fn periods_are_disjoint_ordered_and_exceeding() {
    for name in ["bloom-and-crash", "double-bubble"] {
        let a = run(&scenario(name).unwrap());
        for kind in StatisticKind::ALL {
            let periods = a.report.periods(kind);
            let z = &a.statistics.get(kind).normalized;
            for w in periods.windows(2) {
                assert!(w[0].end_index < w[1].start_index);
                assert!(w[0].end_date < w[1].start_date);
            }
            for p in periods {
                assert!(p.start_date <= p.end_date);
                assert!(p.extremum_z.abs() > a.report.threshold);
                assert!((0.0..=0.5).contains(&p.p_value));
                let inside = z[p.start_index..=p.end_index]
                    .iter()
                    .flatten()
                    .filter(|v| v.abs() > a.report.threshold)
                    .count();
                assert_eq!(inside, p.exceedances);
            }
        }
    }
}

#[test]
fn csv_export_round_trips() {
    let prices = generate_series(&scenario("null").unwrap()).unwrap();
    let mut buf = Vec::new();
    write_prices(&prices, &mut buf).unwrap();
    let back = load_prices(buf.as_slice()).unwrap();
    assert_eq!(back.dates(), prices.dates());
    for (a, b) in back.closes().iter().zip(prices.closes()) {
        assert_eq!(a, b);
    }
}

#[test]
fn short_series_is_insufficient() {
    let s = BubbleScenario {
        length: 100,
        bubble_start: 10,
        bubble_end: 20,
        ..scenario("null").unwrap()
    };
    let prices = generate_series(&s).unwrap();
    let err = analyze(
        &prices,
        ReturnMode::Simple,
        &WindowConfig::default(),
        &DetectionConfig::default(),
    )
    .unwrap_err();
    assert!(matches!(
        err,
        Error::InsufficientData {
            needed: 100,
            actual: 99
        }
    ));
}

#[test]
fn log_returns_give_similar_detection_inputs() {
    let prices = generate_series(&scenario("null").unwrap()).unwrap();
    let cfg = (WindowConfig::default(), DetectionConfig::default());
    let simple = analyze(&prices, ReturnMode::Simple, &cfg.0, &cfg.1).unwrap();
    let log = analyze(&prices, ReturnMode::Log, &cfg.0, &cfg.1).unwrap();
    // Signs of returns agree, so U is identical.
    assert_eq!(simple.statistics.u, log.statistics.u);
    assert!((simple.sigma.corrected_sigma / log.sigma.corrected_sigma - 1.0).abs() < 0.01);
}
