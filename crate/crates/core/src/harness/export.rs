//! Result export.
//!
//! CSV rows have the fixed columns of [`CSV_COLUMNS`]; optional values are
//! left empty. JSON output is the serialized `Vec<SweepRow>`.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::config::Algorithm;
use super::sweep::SweepRow;

pub const CSV_COLUMNS: [&str; 34] = [
    "index",
    "dataset",
    "seed",
    "direct",
    "alpha",
    "list_size",
    "cache_size",
    "quality",
    "algorithm",
    "bfs_width",
    "bfs_depth",
    "fairness_metric",
    "fairness_budget",
    "status",
    "error",
    "catalog_size",
    "chr_bs",
    "chr_nf",
    "gain",
    "f_max",
    "f_tv",
    "f_kl_raw",
    "f_kl_norm",
    "kl_exact",
    "bound_fmax",
    "bound_ftv",
    "bound_fkl",
    "rel_fmax",
    "rel_ftv",
    "rel_fkl",
    "qor_min",
    "qor_mean",
    "lp_max_violation",
    "duration_secs",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ExportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(Error::Config(format!("unknown export format `{other}`"))),
        }
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn record(row: &SweepRow) -> Vec<String> {
    let c = &row.config;
    let (width, depth) = match c.algorithm {
        Algorithm::Cabaret { width, depth } => (width.to_string(), depth.to_string()),
        _ => (String::new(), String::new()),
    };
    let (metric, budget) = match &c.algorithm {
        Algorithm::FairNfr { fairness } => (fairness.metric.name().to_string(), fairness.budget.to_string()),
        _ => (String::new(), String::new()),
    };
    let mut out = vec![
        row.index.to_string(),
        c.dataset.label(),
        c.seed.to_string(),
        c.direct.label(),
        c.alpha.to_string(),
        c.list_size.to_string(),
        c.cache_size.to_string(),
        c.quality.to_string(),
        c.algorithm.name().to_string(),
        width,
        depth,
        metric,
        budget,
        if row.is_ok() { "ok" } else { "failed" }.to_string(),
        row.error.clone().unwrap_or_default(),
    ];
    match &row.result {
        Some(r) => {
            let f = &r.report;
            out.extend([
                r.catalog_size.to_string(),
                f.chr_bs.to_string(),
                f.chr_nf.to_string(),
                f.gain.to_string(),
                f.f_max.to_string(),
                f.f_tv.to_string(),
                f.f_kl_raw.to_string(),
                f.f_kl_norm.to_string(),
                opt(f.kl_exact),
                f.bound_fmax.to_string(),
                f.bound_ftv.to_string(),
                opt(f.bound_fkl),
                opt(f.rel_fmax),
                opt(f.rel_ftv),
                opt(f.rel_fkl),
                r.qor_min.to_string(),
                r.qor_mean.to_string(),
                opt(r.lp.as_ref().map(|l| l.max_violation)),
                r.duration_secs.to_string(),
            ]);
        }
        None => out.extend(std::iter::repeat(String::new()).take(CSV_COLUMNS.len() - out.len())),
    }
    out
}

pub fn write_csv<W: Write>(rows: &[SweepRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(CSV_COLUMNS)?;
    for row in rows {
        w.write_record(record(row))?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn to_csv_string(rows: &[SweepRow]) -> Result<String> {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf)?;
    String::from_utf8(buf).map_err(|e| Error::Invariant(format!("non-UTF-8 CSV output: {e}")))
}

/// Writes `rows` to `path` in the given format.
pub fn export(rows: &[SweepRow], path: impl AsRef<Path>, format: ExportFormat) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = std::io::BufWriter::new(file);
    match format {
        ExportFormat::Csv => write_csv(rows, &mut writer)?,
        ExportFormat::Json => serde_json::to_writer_pretty(&mut writer, rows)?,
    }
    writer.flush().map_err(|e| Error::io(path, e))
}

pub fn read_json(path: impl AsRef<Path>) -> Result<Vec<SweepRow>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}
