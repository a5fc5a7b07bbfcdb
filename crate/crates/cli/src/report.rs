use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use hmap_core::GridSpec;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const SCHEMA: &str = "hmap-report-v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Everything a run depends on. Echoed verbatim into the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub maps: Vec<String>,
    pub grid: GridSpec,
    pub tolerance: f64,
    pub seed: Option<u64>,
    pub format: Format,
    pub output: Option<PathBuf>,
    /// Subcommand-specific flags.
    pub params: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub schema: String,
    pub config: RunConfig,
    pub results: Value,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_time_s: Option<f64>,
}

/// What a subcommand hands back to the driver.
pub struct Outcome {
    pub results: Value,
    pub pass: bool,
    pub csv: Option<String>,
}

impl Outcome {
    pub fn json(results: impl Serialize, pass: bool) -> Self {
        Self {
            results: serde_json::to_value(results).expect("reports serialize"),
            pass,
            csv: None,
        }
    }

    pub fn with_csv(mut self, csv: String) -> Self {
        self.csv = Some(csv);
        self
    }
}

pub fn emit(config: &RunConfig, outcome: Outcome, wall_time_s: Option<f64>) -> io::Result<()> {
    let text = match (config.format, outcome.csv) {
        (Format::Csv, Some(csv)) => csv,
        _ => {
            let env = ReportEnvelope {
                schema: SCHEMA.to_string(),
                config: config.clone(),
                results: outcome.results,
                pass: outcome.pass,
                wall_time_s,
            };
            let mut s = serde_json::to_string_pretty(&env).expect("reports serialize");
            s.push('\n');
            s
        }
    };
    match &config.output {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

pub fn csv_table(header: &str, rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}
