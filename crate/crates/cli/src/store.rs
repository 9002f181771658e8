//! JSONL experiment store and the per-family scaling fit.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use shellsort_lab::analytics::{fit_exponent, ExperimentRecord, FitResult, TheoryTarget};
use shellsort_lab::Family;

use crate::CliError;

pub fn append_records(path: &Path, records: &[ExperimentRecord]) -> Result<(), CliError> {
    let io = |e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    };
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(io)?;
    let mut buf = Vec::new();
    for r in records {
        serde_json::to_writer(&mut buf, r).expect("records serialize");
        buf.push(b'\n');
    }
    file.write_all(&buf).map_err(io)
}

pub fn read_records(path: &Path) -> Result<Vec<ExperimentRecord>, CliError> {
    let io = |e| CliError::Io {
        path: path.display().to_string(),
        source: e,
    };
    let reader = BufReader::new(File::open(path).map_err(io)?);
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(io)?;
        if line.trim().is_empty() {
            continue;
        }
        let record = serde_json::from_str(&line).map_err(|e| {
            CliError::Input(format!(
                "{}:{}: not an experiment record: {e}",
                path.display(),
                i + 1
            ))
        })?;
        out.push(record);
    }
    Ok(out)
}

/// Trial-weighted mean per `n`, for one family.
pub fn grid_means(records: &[ExperimentRecord], family: Family) -> Vec<(usize, f64)> {
    let mut acc: BTreeMap<usize, (f64, f64)> = BTreeMap::new();
    for r in records.iter().filter(|r| r.family == family) {
        let e = acc.entry(r.n).or_default();
        e.0 += r.mean_t * r.trials as f64;
        e.1 += r.trials as f64;
    }
    acc.into_iter().map(|(n, (sum, w))| (n, sum / w)).collect()
}

pub struct FitRow {
    pub family: Family,
    pub grid: Vec<(usize, f64)>,
    pub fit: FitResult,
    pub target: Option<TheoryTarget>,
}

pub fn fit_family(records: &[ExperimentRecord], family: Family) -> Result<FitRow, CliError> {
    let grid = grid_means(records, family);
    let points: Vec<(f64, f64)> = grid.iter().map(|&(n, m)| (n as f64, m)).collect();
    let fit =
        fit_exponent(&points).map_err(|e| CliError::InsufficientData(format!("{family}: {e}")))?;
    Ok(FitRow {
        family,
        grid,
        fit,
        target: TheoryTarget::for_family(family),
    })
}

pub const CSV_HEADER: [&str; 10] = [
    "family",
    "points",
    "exponent",
    "log_coefficient",
    "residual",
    "target",
    "target_exponent",
    "grid",
    "mean_t",
    "ratio_series",
];

/// Writes fit rows as CSV. List-valued columns are `;`-separated; the ratio
/// series `mean_T / (n log2^c n)` is filled for polylog targets only.
pub fn write_csv<W: Write>(out: W, rows: &[FitRow]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| CliError::Input(format!("writing CSV: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for row in rows {
        let join = |values: Vec<String>| values.join(";");
        let ratios = match row.target {
            Some(t @ TheoryTarget::NLog { .. }) => join(
                row.grid
                    .iter()
                    .map(|&(n, m)| format!("{:.6}", m / t.scale(n as f64)))
                    .collect(),
            ),
            _ => String::new(),
        };
        w.write_record([
            row.family.to_string(),
            row.fit.points.to_string(),
            format!("{:.6}", row.fit.exponent),
            format!("{:.6}", row.fit.log_coefficient),
            format!("{:.6}", row.fit.residual),
            row.target.map(TheoryTarget::label).unwrap_or_default(),
            row.target
                .and_then(TheoryTarget::exponent)
                .map(|e| format!("{e:.6}"))
                .unwrap_or_default(),
            join(row.grid.iter().map(|(n, _)| n.to_string()).collect()),
            join(row.grid.iter().map(|(_, m)| format!("{m:.3}")).collect()),
            ratios,
        ])
        .map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Io {
        path: "<stdout>".into(),
        source: e,
    })
}
