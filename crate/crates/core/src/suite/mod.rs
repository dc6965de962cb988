//! The verification suite: every identity checked by the library, run as
//! keyed rows and collected into a JSON report.

mod checks;

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mc::{z_score, MonteCarloEstimate, RngState};

pub use checks::catalog;

/// Version of the report layout.
pub const REPORT_FORMAT: u32 = 1;

/// Relative standard error above which a stochastic row carries an advisory.
pub const ADVISORY_RSE: f64 = 0.1;

/// Dimensions `(n, m, k, ℓ)` exercised by default in the theorem rows.
pub const DEFAULT_DIMS: [[usize; 4]; 6] = [
    [6, 2, 4, 2],
    [7, 1, 5, 2],
    [7, 2, 5, 1],
    [7, 2, 5, 2],
    [8, 2, 5, 2],
    [5, 2, 4, 3],
];

/// Inputs of one suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    pub dims: Vec<[usize; 4]>,
    pub z_cap: f64,
    /// Only rows whose id contains this substring are run.
    pub filter: Option<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            samples: 1_000_000,
            dims: DEFAULT_DIMS.to_vec(),
            z_cap: 3.0,
            filter: None,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 2 {
            return Err(Error::Domain(format!("samples must be at least 2, got {}", self.samples)));
        }
        if !(self.z_cap > 0.0) {
            return Err(Error::Domain(format!("z-cap must be positive, got {}", self.z_cap)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

/// What a row's `metric.value` measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    /// Standardized difference of two estimates.
    ZScore,
    /// Largest `|z|` over several compared quantities.
    MaxZScore,
    RelativeError,
    AbsoluteError,
    /// Number of sampled cases that break a property.
    Violations,
    /// Kolmogorov–Smirnov statistic over its 1% critical value.
    KsRatio,
    /// Largest factor by which standard errors deviate from `n^{−1/2}` scaling.
    ScalingFactor,
}

impl MetricKind {
    fn is_stochastic(self) -> bool {
        matches!(self, MetricKind::ZScore | MetricKind::MaxZScore)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub kind: MetricKind,
    pub value: f64,
    pub limit: f64,
}

impl Metric {
    pub fn passes(&self) -> bool {
        self.value.abs() <= self.limit
    }
}

/// The measured part of a row.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub config: String,
    pub lhs: Option<MonteCarloEstimate>,
    pub rhs: Option<MonteCarloEstimate>,
    pub metric: Metric,
}

impl Outcome {
    /// Two independent estimates of the same quantity.
    pub fn compare(config: impl Into<String>, lhs: MonteCarloEstimate, rhs: MonteCarloEstimate, cap: f64) -> Self {
        Self {
            config: config.into(),
            metric: Metric {
                kind: MetricKind::ZScore,
                value: z_score(&lhs, &rhs),
                limit: cap,
            },
            lhs: Some(lhs),
            rhs: Some(rhs),
        }
    }

    /// A deterministic value against its exact counterpart.
    pub fn relative(config: impl Into<String>, got: f64, exact: f64, tol: f64) -> Self {
        let err = if exact == 0.0 { got.abs() } else { (got / exact - 1.0).abs() };
        Self {
            config: config.into(),
            lhs: Some(MonteCarloEstimate::exact(got)),
            rhs: Some(MonteCarloEstimate::exact(exact)),
            metric: Metric {
                kind: MetricKind::RelativeError,
                value: err,
                limit: tol,
            },
        }
    }

    pub fn metric(config: impl Into<String>, kind: MetricKind, value: f64, limit: f64) -> Self {
        Self {
            config: config.into(),
            lhs: None,
            rhs: None,
            metric: Metric { kind, value, limit },
        }
    }

    pub fn with_sides(mut self, lhs: MonteCarloEstimate, rhs: MonteCarloEstimate) -> Self {
        self.lhs = Some(lhs);
        self.rhs = Some(rhs);
        self
    }
}

/// One line of the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub id: String,
    pub anchor: String,
    pub config: String,
    pub lhs: Option<MonteCarloEstimate>,
    pub rhs: Option<MonteCarloEstimate>,
    pub metric: Option<Metric>,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

/// Budget and randomness handed to a check.
#[derive(Debug, Clone)]
pub struct Context {
    pub rng: RngState,
    pub samples: usize,
    pub z_cap: f64,
}

type Runner = Box<dyn Fn(&Context) -> Result<Outcome> + Send + Sync>;

/// A named, anchored check.
pub struct Check {
    pub id: String,
    pub anchor: &'static str,
    run: Runner,
}

impl Check {
    pub fn new(
        id: impl Into<String>,
        anchor: &'static str,
        run: impl Fn(&Context) -> Result<Outcome> + Send + Sync + 'static,
    ) -> Self {
        Self {
            id: id.into(),
            anchor,
            run: Box::new(run),
        }
    }

    /// Runs the check with randomness derived from its id, so a row does
    /// not depend on which other rows run.
    pub fn run(&self, cfg: &SuiteConfig, timed: bool) -> ReportRow {
        let ctx = Context {
            rng: RngState::new(cfg.seed).derive(&self.id),
            samples: cfg.samples,
            z_cap: cfg.z_cap,
        };
        let start = Instant::now();
        let result = (self.run)(&ctx);
        let wall_ms = timed.then(|| start.elapsed().as_secs_f64() * 1e3);
        let mut row = ReportRow {
            id: self.id.clone(),
            anchor: self.anchor.to_string(),
            config: String::new(),
            lhs: None,
            rhs: None,
            metric: None,
            status: Status::Fail,
            note: None,
            wall_ms,
        };
        match result {
            Ok(out) => {
                row.status = if out.metric.passes() { Status::Pass } else { Status::Fail };
                if out.metric.kind.is_stochastic() {
                    let noisy = [&out.lhs, &out.rhs]
                        .into_iter()
                        .flatten()
                        .any(|e| e.relative_stderr() > ADVISORY_RSE);
                    if noisy {
                        row.note = Some("insufficient samples".into());
                    }
                }
                row.config = out.config;
                row.lhs = out.lhs;
                row.rhs = out.rhs;
                row.metric = Some(out.metric);
            }
            Err(Error::ConstraintViolation(reason)) => {
                row.status = Status::Skip;
                row.note = Some(format!("skip: {reason} constraint"));
            }
            Err(e) => row.note = Some(format!("error: {e}")),
        }
        row
    }
}

/// Runs every selected check and returns rows sorted by id.
pub fn run_suite(cfg: &SuiteConfig, timed: bool) -> Result<Vec<ReportRow>> {
    cfg.validate()?;
    let mut rows: Vec<ReportRow> = catalog(cfg)
        .iter()
        .filter(|c| cfg.filter.as_deref().is_none_or(|f| c.id.contains(f)))
        .map(|c| c.run(cfg, timed))
        .collect();
    rows.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(rows)
}

/// Metadata written ahead of the rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportHeader {
    pub format: u32,
    pub seed: u64,
    pub samples: usize,
    pub z_cap: f64,
    pub dims: Vec<[usize; 4]>,
    pub timestamp: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub header: ReportHeader,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn new(cfg: &SuiteConfig, timestamp: Option<String>, rows: Vec<ReportRow>) -> Self {
        Self {
            header: ReportHeader {
                format: REPORT_FORMAT,
                seed: cfg.seed,
                samples: cfg.samples,
                z_cap: cfg.z_cap,
                dims: cfg.dims.clone(),
                timestamp,
            },
            rows,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    pub fn count(&self, status: Status) -> usize {
        self.rows.iter().filter(|r| r.status == status).count()
    }

    /// Fixed-width table of the rows.
    pub fn summary(&self) -> String {
        let width = self.rows.iter().map(|r| r.id.len()).max().unwrap_or(2).max(2);
        let mut out = format!("{:<width$}  {:<6}  {:>12}  {:>10}  note\n", "id", "status", "metric", "limit");
        for r in &self.rows {
            let status = match r.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skip => "skip",
            };
            let (value, limit) = r
                .metric
                .map_or((String::from("-"), String::from("-")), |m| {
                    (format!("{:.3e}", m.value), format!("{:.1e}", m.limit))
                });
            out.push_str(&format!(
                "{:<width$}  {:<6}  {:>12}  {:>10}  {}\n",
                r.id,
                status,
                value,
                limit,
                r.note.as_deref().unwrap_or("")
            ));
        }
        out.push_str(&format!(
            "{} pass, {} fail, {} skip\n",
            self.count(Status::Pass),
            self.count(Status::Fail),
            self.count(Status::Skip)
        ));
        out
    }
}
