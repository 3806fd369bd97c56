//! Result files. CSV: a `# base_seed=<u64>` comment, then a header of the
//! axis names followed by `mean,std,reps_ok,reps_failed,mean_runtime_ms`.
//! JSON: an array with one object per row holding the same keys plus
//! `base_seed`. Reals are written with 17 significant digits; an absent
//! mean or std is an empty CSV field or JSON `null`.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::generators::Seed;

use super::SweepRow;

const STAT_COLUMNS: [&str; 5] = ["mean", "std", "reps_ok", "reps_failed", "mean_runtime_ms"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::InvalidParameter(format!("unknown output format '{s}'"))),
        }
    }
}

/// Column layout and provenance of a result file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultsHeader {
    pub axes: Vec<String>,
    pub base_seed: Seed,
}

impl ResultsHeader {
    pub fn for_rows(rows: &[SweepRow], base_seed: Seed) -> Self {
        ResultsHeader {
            axes: rows.first().map_or_else(Vec::new, |r| r.params.iter().map(|(n, _)| n.clone()).collect()),
            base_seed,
        }
    }
}

fn real(v: f64) -> String {
    format!("{v:.16e}")
}

pub(crate) fn format_csv(rows: &[SweepRow], header: &ResultsHeader) -> String {
    let mut out = format!("# base_seed={}\n", header.base_seed.0);
    let cols: Vec<&str> = header.axes.iter().map(String::as_str).chain(STAT_COLUMNS).collect();
    out.push_str(&cols.join(","));
    out.push('\n');
    for row in rows {
        let mut fields: Vec<String> = header
            .axes
            .iter()
            .map(|a| row.param(a).map_or_else(String::new, real))
            .collect();
        fields.push(row.mean.map_or_else(String::new, real));
        fields.push(row.std.map_or_else(String::new, real));
        fields.push(row.reps_ok.to_string());
        fields.push(row.reps_failed.to_string());
        fields.push(real(row.mean_runtime_ms));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub(crate) fn format_json(rows: &[SweepRow], header: &ResultsHeader) -> String {
    let opt = |v: Option<f64>| v.map_or_else(|| "null".to_string(), real);
    let mut out = String::from("[");
    for (k, row) in rows.iter().enumerate() {
        out.push_str(if k == 0 { "\n  {" } else { ",\n  {" });
        for axis in &header.axes {
            let key = serde_json::to_string(axis).expect("string serialises");
            let _ = write!(out, "{key}: {}, ", opt(row.param(axis)));
        }
        let _ = write!(
            out,
            "\"mean\": {}, \"std\": {}, \"reps_ok\": {}, \"reps_failed\": {}, \"mean_runtime_ms\": {}, \"base_seed\": {}}}",
            opt(row.mean),
            opt(row.std),
            row.reps_ok,
            row.reps_failed,
            real(row.mean_runtime_ms),
            header.base_seed.0
        );
    }
    out.push_str(if rows.is_empty() { "]\n" } else { "\n]\n" });
    out
}

/// Renders rows in the requested format.
pub fn render_results(rows: &[SweepRow], header: &ResultsHeader, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => format_csv(rows, header),
        OutputFormat::Json => format_json(rows, header),
    }
}

pub fn write_results(rows: &[SweepRow], header: &ResultsHeader, path: impl AsRef<Path>, format: OutputFormat) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, render_results(rows, header, format))
        .map_err(|source| Error::WriteError { path: path.to_path_buf(), source })
}

/// Reads back a CSV written by [`write_results`].
pub fn parse_results_csv(text: &str) -> Result<(ResultsHeader, Vec<SweepRow>)> {
    let mut lines = text.lines().enumerate();
    let bad = |line: usize, msg: &str| Error::ParseError { line: line + 1, msg: msg.to_string() };
    let (_, seed_line) = lines.next().ok_or_else(|| bad(0, "empty file"))?;
    let base_seed = seed_line
        .strip_prefix("# base_seed=")
        .and_then(|s| s.trim().parse().ok())
        .map(Seed)
        .ok_or_else(|| bad(0, "missing base_seed comment"))?;
    let (hl, header) = lines.next().ok_or_else(|| bad(1, "missing header"))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < STAT_COLUMNS.len() || cols[cols.len() - STAT_COLUMNS.len()..] != STAT_COLUMNS {
        return Err(bad(hl, "header does not end with the statistics columns"));
    }
    let axes: Vec<String> = cols[..cols.len() - STAT_COLUMNS.len()].iter().map(|s| s.to_string()).collect();
    let mut rows = Vec::new();
    for (ln, line) in lines {
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != cols.len() {
            return Err(bad(ln, "wrong field count"));
        }
        let num = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                Ok(None)
            } else {
                s.parse().map(Some).map_err(|_| bad(ln, "bad number"))
            }
        };
        let int = |s: &str| -> Result<usize> { s.parse().map_err(|_| bad(ln, "bad count")) };
        let a = axes.len();
        let params = axes
            .iter()
            .zip(&f)
            .map(|(name, v)| Ok((name.clone(), num(v)?.ok_or_else(|| bad(ln, "empty axis value"))?)))
            .collect::<Result<Vec<_>>>()?;
        rows.push(SweepRow {
            params,
            mean: num(f[a])?,
            std: num(f[a + 1])?,
            reps_ok: int(f[a + 2])?,
            reps_failed: int(f[a + 3])?,
            mean_runtime_ms: num(f[a + 4])?.ok_or_else(|| bad(ln, "empty runtime"))?,
        });
    }
    Ok((ResultsHeader { axes, base_seed }, rows))
}
