//! Configuration, verification driver and report output for the `supnorm` binary.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::Serialize;
use supnorm::suites::{select, PropertyOutcome, SuiteConfig};

pub const REPORT_VERSION: u32 = 1;
pub const CONFIG_ENV: &str = "SUPNORM_CONFIG";

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_RESOURCE: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("{0}")]
    Compute(#[from] supnorm::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Compute(supnorm::Error::Domain(_)) => EXIT_USAGE,
            CliError::Compute(supnorm::Error::ResourceCap { .. }) => EXIT_RESOURCE,
            _ => EXIT_FAILURE,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub seed: u64,
    pub box_cap: u128,
    pub time_budget: Option<Duration>,
    pub format: Format,
    pub output: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = SuiteConfig::default();
        Self { seed: s.seed, box_cap: s.box_cap, time_budget: None, format: Format::Json, output: None }
    }
}

impl RunConfig {
    /// Flat `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let bad = |what: &str| CliError::Usage(format!("bad value '{value}' for {key}: {what}"));
        match key {
            "seed" => self.seed = value.parse().map_err(|_| bad("expected an unsigned integer"))?,
            "box_cap" => {
                let cap: u128 = value.parse().map_err(|_| bad("expected a positive integer"))?;
                if cap == 0 {
                    return Err(bad("must be positive"));
                }
                self.box_cap = cap;
            }
            "time_budget" => {
                let secs: f64 = value.parse().map_err(|_| bad("expected seconds"))?;
                if secs.is_nan() || secs <= 0.0 || !secs.is_finite() {
                    return Err(bad("must be positive"));
                }
                self.time_budget = Some(Duration::from_secs_f64(secs));
            }
            "format" => {
                self.format = match value {
                    "json" => Format::Json,
                    "csv" => Format::Csv,
                    _ => return Err(bad("expected json or csv")),
                }
            }
            "output" => self.output = Some(PathBuf::from(value)),
            _ => return Err(CliError::Usage(format!("unknown config key '{key}'"))),
        }
        Ok(())
    }

    /// The file named by `explicit`, else by the environment variable, else defaults.
    pub fn load(explicit: Option<&Path>) -> Result<Self, CliError> {
        let path = explicit.map(Path::to_path_buf).or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        match path {
            Some(p) => {
                let text = std::fs::read_to_string(&p)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
                Self::parse(&text)
            }
            None => Ok(Self::default()),
        }
    }

    fn suite(&self) -> SuiteConfig {
        SuiteConfig { seed: self.seed, box_cap: self.box_cap }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub version: u32,
    pub seed: u64,
    pub selector: String,
    pub properties: Vec<PropertyOutcome>,
}

impl VerificationReport {
    pub fn exit_code(&self) -> u8 {
        if self.properties.iter().any(|p| p.resource_capped) {
            EXIT_RESOURCE
        } else if self.properties.iter().any(|p| !p.passed) {
            EXIT_FAILURE
        } else {
            EXIT_OK
        }
    }
}

/// Runs every property whose id matches `selector`, in registry order.
/// Once the time budget is spent, the remaining properties are recorded as capped.
pub fn run_verify(cfg: &RunConfig, selector: &str) -> VerificationReport {
    let suite = cfg.suite();
    let start = Instant::now();
    let properties = select(selector)
        .iter()
        .map(|p| match cfg.time_budget {
            Some(b) if start.elapsed() > b => PropertyOutcome {
                id: p.id.into(),
                anchor: p.anchor.into(),
                instances: 0,
                fitted_constant: None,
                limit: None,
                max_ratio: None,
                passed: false,
                resource_capped: true,
                errors: vec![format!("time budget of {:.1}s exhausted", b.as_secs_f64())],
            },
            _ => p.run(&suite),
        })
        .collect();
    VerificationReport { version: REPORT_VERSION, seed: cfg.seed, selector: selector.into(), properties }
}

pub const CSV_COLUMNS: [&str; 9] =
    ["id", "anchor", "instances", "fitted_constant", "limit", "max_ratio", "passed", "resource_capped", "errors"];

pub fn render(report: &VerificationReport, format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(report)? + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_COLUMNS)?;
            let num = |v: Option<f64>| v.map(|x| format!("{x:e}")).unwrap_or_default();
            for p in &report.properties {
                w.write_record([
                    p.id.clone(),
                    p.anchor.clone(),
                    p.instances.to_string(),
                    num(p.fitted_constant),
                    num(p.limit),
                    num(p.max_ratio),
                    p.passed.to_string(),
                    p.resource_capped.to_string(),
                    p.errors.join(" | "),
                ])?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
            Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
        }
    }
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

/// Renders the report and writes it to `path`, or returns it for stdout.
pub fn emit_report(report: &VerificationReport, format: Format, path: Option<&Path>) -> Result<String, CliError> {
    let text = render(report, format)?;
    if let Some(p) = path {
        write_atomic(p, &text)?;
    }
    Ok(text)
}

/// One-line-per-property summary for the terminal.
pub fn summary(report: &VerificationReport) -> String {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut out = String::new();
    for p in &report.properties {
        let status = if p.resource_capped {
            "CAPPED"
        } else if p.passed {
            "PASS"
        } else {
            "FAIL"
        };
        *counts.entry(status).or_default() += 1;
        let fit = match (p.fitted_constant, p.limit) {
            (Some(f), Some(l)) => format!(" {f:.3e} <= {l:.0e}"),
            _ => String::new(),
        };
        out.push_str(&format!("{status:6} {:40} n={}{fit}\n", p.id, p.instances));
    }
    let tally: Vec<String> = counts.iter().map(|(k, v)| format!("{v} {k}")).collect();
    out.push_str(&format!("{} properties: {}\n", report.properties.len(), tally.join(", ")));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let c = RunConfig::parse("# comment\nseed = 7\nbox_cap=1000 # inline\nformat = csv\n\ntime_budget = 2.5\n").unwrap();
        assert_eq!(c.seed, 7);
        assert_eq!(c.box_cap, 1000);
        assert_eq!(c.format, Format::Csv);
        assert_eq!(c.time_budget, Some(Duration::from_secs_f64(2.5)));
        assert!(RunConfig::parse("seed 7").is_err());
        assert!(RunConfig::parse("colour = red").is_err());
        assert!(RunConfig::parse("box_cap = 0").is_err());
        assert!(RunConfig::parse("time_budget = -1").is_err());
    }

    #[test]
    fn empty_selection_succeeds() {
        let r = run_verify(&RunConfig::default(), "no-such/*");
        assert!(r.properties.is_empty());
        assert_eq!(r.exit_code(), EXIT_OK);
        let csv = render(&r, Format::Csv).unwrap();
        assert_eq!(csv.lines().count(), 1);
    }

    #[test]
    fn exhausted_budget_is_a_cap() {
        let cfg = RunConfig { time_budget: Some(Duration::from_nanos(1)), ..RunConfig::default() };
        let r = run_verify(&cfg, "arith/*");
        assert_eq!(r.exit_code(), EXIT_RESOURCE);
    }

    #[test]
    fn error_codes() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), EXIT_USAGE);
        assert_eq!(CliError::Compute(supnorm::Error::Domain("x".into())).exit_code(), EXIT_USAGE);
        let cap = supnorm::Error::ResourceCap { what: "box".into(), needed: 2, cap: 1 };
        assert_eq!(CliError::Compute(cap).exit_code(), EXIT_RESOURCE);
        assert_eq!(CliError::Compute(supnorm::Error::Convergence("x".into())).exit_code(), EXIT_FAILURE);
    }
}
