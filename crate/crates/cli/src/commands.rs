use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use bubblescan::montecarlo::{
    simulate_null, validate_null, write_draws_csv, write_histogram_csv, Check, NullSimulation,
    SimulationConfig,
};
use bubblescan::synthetic::{self, generate_series, BubbleScenario};
use bubblescan::timeseries::{load_prices, write_prices};
use bubblescan::{
    build_report, compute_returns, estimate_sigma, rolling_statistics, DetectionConfig,
    DetectionReport, ReturnMode, RollingStatistics, StatisticKind, WindowConfig,
};

use crate::format::round4;
use crate::report::{ConfigEcho, ReportDocument};
use crate::{svg, table};

pub const HISTOGRAM_BINS: usize = 50;

/// Replication count below which `validate` warns about low power.
pub const LOW_POWER_REPS: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OutputFormat {
    Json,
    Csv,
    Svg,
}

impl OutputFormat {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Json => "json",
            Self::Csv => "csv",
            Self::Svg => "svg",
        }
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            "svg" => Ok(Self::Svg),
            other => Err(format!(
                "unknown format {other:?} (expected json, csv or svg)"
            )),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub input: PathBuf,
    pub window: usize,
    pub alpha: f64,
    pub merge_gap: usize,
    pub min_run: usize,
    pub returns: ReturnMode,
    pub out: PathBuf,
    pub formats: Vec<OutputFormat>,
}

impl RunConfig {
    pub fn new(input: impl Into<PathBuf>, out: impl Into<PathBuf>) -> Self {
        let detection = DetectionConfig::default();
        Self {
            input: input.into(),
            window: WindowConfig::default().n(),
            alpha: detection.alpha,
            merge_gap: detection.merge_gap,
            min_run: detection.min_run,
            returns: ReturnMode::Simple,
            out: out.into(),
            formats: vec![OutputFormat::Json, OutputFormat::Csv],
        }
    }

    fn wants(&self, f: OutputFormat) -> bool {
        self.formats.contains(&f)
    }
}

pub struct AnalyzeOutcome {
    pub report: DetectionReport,
    pub document: ReportDocument,
    pub statistics: RollingStatistics,
    pub written: Vec<PathBuf>,
}

impl AnalyzeOutcome {
    /// One line per statistic for standard output.
    pub fn summary_lines(&self) -> Vec<String> {
        StatisticKind::ALL
            .iter()
            .map(|&kind| {
                let periods = self.report.periods(kind);
                let strongest = periods
                    .iter()
                    .max_by(|a, b| a.extremum_z.abs().total_cmp(&b.extremum_z.abs()));
                match strongest {
                    Some(p) => format!(
                        "{kind}: {} period(s); strongest {} .. {} z={:.4} p={:.4}",
                        periods.len(),
                        p.start_date,
                        p.end_date,
                        round4(p.extremum_z),
                        round4(p.p_value)
                    ),
                    None => format!("{kind}: no exceedance"),
                }
            })
            .collect()
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file =
        File::create(path).with_context(|| format!("output: cannot create {}", path.display()))?;
    Ok(BufWriter::new(file))
}

pub fn cmd_analyze(cfg: &RunConfig) -> Result<AnalyzeOutcome> {
    let window = WindowConfig::new(cfg.window).context("config")?;
    let detection = DetectionConfig {
        alpha: cfg.alpha,
        merge_gap: cfg.merge_gap,
        min_run: cfg.min_run,
    };
    detection.validate().context("config")?;

    let file = File::open(&cfg.input)
        .with_context(|| format!("ingest: cannot open {}", cfg.input.display()))?;
    let prices = load_prices(file).with_context(|| format!("ingest: {}", cfg.input.display()))?;
    let returns = compute_returns(&prices, cfg.returns);
    if returns.len() < window.n() {
        bail!(
            "statistics: insufficient data: {} returns for a window of {}",
            returns.len(),
            window.n()
        );
    }
    let sigma = estimate_sigma(&returns).context("sigma")?;
    let statistics =
        rolling_statistics(&returns, &window, sigma.corrected_sigma).context("statistics")?;
    let report = build_report(&statistics, &sigma, &detection).context("detection")?;

    let echo = ConfigEcho {
        input: cfg.input.display().to_string(),
        window: window.n(),
        alpha: cfg.alpha,
        merge_gap: cfg.merge_gap,
        min_run: cfg.min_run,
        returns: cfg.returns.to_string(),
        formats: cfg.formats.iter().map(|f| f.as_str().to_string()).collect(),
    };
    let document = ReportDocument::new(echo, &prices, &report);

    fs::create_dir_all(&cfg.out)
        .with_context(|| format!("output: cannot create {}", cfg.out.display()))?;
    let mut written = Vec::new();
    if cfg.wants(OutputFormat::Json) {
        let path = cfg.out.join("report.json");
        let mut w = create(&path)?;
        serde_json::to_writer_pretty(&mut w, &document).context("output: report.json")?;
        w.write_all(b"\n")?;
        w.flush()?;
        written.push(path);
    }
    if cfg.wants(OutputFormat::Csv) {
        let path = cfg.out.join("statistics.csv");
        let mut w = create(&path)?;
        table::write_statistics_csv(&statistics, &mut w).context("output: statistics.csv")?;
        w.flush()?;
        written.push(path);
    }
    if cfg.wants(OutputFormat::Svg) {
        let path = cfg.out.join("overview.svg");
        fs::write(&path, svg::overview(&prices, &statistics, &report))
            .context("output: overview.svg")?;
        written.push(path);
    }

    Ok(AnalyzeOutcome {
        report,
        document,
        statistics,
        written,
    })
}

#[derive(Debug, Clone)]
pub struct ValidateConfig {
    pub window: usize,
    pub reps: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub svg: bool,
}

pub struct ValidateOutcome {
    pub simulation: NullSimulation,
    pub checks: Vec<Check>,
    pub low_power: bool,
    pub written: Vec<PathBuf>,
}

impl ValidateOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

pub fn cmd_validate(cfg: &ValidateConfig) -> Result<ValidateOutcome> {
    let sim_cfg = SimulationConfig {
        window_n: cfg.window,
        replications: cfg.reps,
        seed: cfg.seed,
        sigma: 1.0,
    };
    let simulation = simulate_null(&sim_cfg).context("simulation")?;
    let checks = validate_null(&simulation);

    fs::create_dir_all(&cfg.out)
        .with_context(|| format!("output: cannot create {}", cfg.out.display()))?;
    let mut written = Vec::new();

    let path = cfg.out.join("null_draws.csv");
    let mut w = create(&path)?;
    write_draws_csv(&simulation, &mut w).context("output: null_draws.csv")?;
    w.flush()?;
    written.push(path);

    let path = cfg.out.join("null_hist.csv");
    let mut w = create(&path)?;
    write_histogram_csv(&simulation, HISTOGRAM_BINS, &mut w).context("output: null_hist.csv")?;
    w.flush()?;
    written.push(path);

    if cfg.svg {
        let path = cfg.out.join("fig1.svg");
        fs::write(&path, svg::null_densities(&simulation, HISTOGRAM_BINS))
            .context("output: fig1.svg")?;
        written.push(path);
    }

    Ok(ValidateOutcome {
        simulation,
        checks,
        low_power: cfg.reps < LOW_POWER_REPS,
        written,
    })
}

/// Resolves a library name or a JSON scenario file.
pub fn resolve_scenario(spec: &str) -> Result<(String, BubbleScenario)> {
    if let Some(s) = synthetic::scenario(spec) {
        return Ok((spec.to_string(), s));
    }
    let path = Path::new(spec);
    if path.is_file() {
        let text = fs::read_to_string(path)
            .with_context(|| format!("scenario: cannot read {}", path.display()))?;
        let scenario: BubbleScenario = serde_json::from_str(&text)
            .with_context(|| format!("scenario: invalid scenario file {}", path.display()))?;
        let name = path.file_stem().map_or_else(
            || "scenario".to_string(),
            |s| s.to_string_lossy().into_owned(),
        );
        return Ok((name, scenario));
    }
    bail!(
        "scenario: unknown scenario {spec:?}; available: {}",
        synthetic::scenario_names().join(", ")
    )
}

#[derive(Debug, Clone)]
pub struct SimulateConfig {
    pub scenario: String,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

pub fn cmd_simulate(cfg: &SimulateConfig) -> Result<PathBuf> {
    let (name, mut scenario) = resolve_scenario(&cfg.scenario)?;
    if let Some(seed) = cfg.seed {
        scenario = scenario.with_seed(seed);
    }
    let prices = generate_series(&scenario).context("scenario")?;
    fs::create_dir_all(&cfg.out)
        .with_context(|| format!("output: cannot create {}", cfg.out.display()))?;
    let path = cfg.out.join(format!("{name}.csv"));
    let mut w = create(&path)?;
    write_prices(&prices, &mut w).context("output")?;
    w.flush()?;
    Ok(path)
}
