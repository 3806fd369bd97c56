//! Readers and writers for the exchange formats, plus the preprocessing
//! steps that turn sensor data and images into graph signals.
//!
//! Formats:
//! - edge list CSV, header `src,dst[,weight]`, optionally preceded by a
//!   `# directed=<true|false>` pragma line;
//! - signal CSV, header `node,value`;
//! - images as PGM (P2/P5, maxval up to 65535) or a headerless CSV matrix;
//! - time series CSV, header `sensor,epoch_seconds,value`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::generators::Image;
use crate::graph::{build_grid8, Graph, GraphSignal, GridOrientation};

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::ReadError { path: path.to_path_buf(), source })
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::File::create(path)
        .and_then(|mut f| f.write_all(bytes))
        .map_err(|source| Error::WriteError { path: path.to_path_buf(), source })
}

fn parse_field<T: std::str::FromStr>(field: Option<&str>, line: usize, what: &str) -> Result<T> {
    let raw = field.ok_or_else(|| Error::ParseError { line, msg: format!("missing {what}") })?;
    raw.trim()
        .parse()
        .map_err(|_| Error::ParseError { line, msg: format!("bad {what} '{raw}'") })
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    Error::ParseError { line, msg: e.to_string() }
}

/// Splits off a leading `# directed=...` pragma. Returns the pragma value
/// and the number of lines consumed.
fn directed_pragma(text: &str) -> Result<(Option<bool>, &str, usize)> {
    let Some(first) = text.lines().next() else {
        return Ok((None, text, 0));
    };
    let Some(rest) = first.trim().strip_prefix('#') else {
        return Ok((None, text, 0));
    };
    let value = rest
        .trim()
        .strip_prefix("directed=")
        .ok_or_else(|| Error::ParseError { line: 1, msg: format!("unknown pragma '{first}'") })?;
    let directed = match value.trim() {
        "true" => true,
        "false" => false,
        other => {
            return Err(Error::ParseError { line: 1, msg: format!("bad directed value '{other}'") })
        }
    };
    let body = text.split_once('\n').map_or("", |(_, b)| b);
    Ok((Some(directed), body, 1))
}

/// Parses an edge list. `directed` overrides the file's pragma; with
/// neither, the graph is undirected. The node count is one past the
/// largest id seen.
pub fn parse_edge_list(text: &str, directed: Option<bool>) -> Result<Graph> {
    let (pragma, body, skipped) = directed_pragma(text)?;
    let directed = directed.or(pragma).unwrap_or(false);
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(body.as_bytes());
    let headers = reader.headers().map_err(csv_error)?.clone();
    let cols: Vec<&str> = headers.iter().collect();
    let weighted = match cols.as_slice() {
        ["src", "dst"] => false,
        ["src", "dst", "weight"] => true,
        _ => {
            return Err(Error::ParseError {
                line: skipped + 1,
                msg: format!("expected header src,dst[,weight], got '{}'", cols.join(",")),
            })
        }
    };
    let mut edges = Vec::new();
    let mut seen = BTreeMap::new();
    let mut n = 0;
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = skipped + record.position().map_or(0, |p| p.line() as usize);
        let src: usize = parse_field(record.get(0), line, "src")?;
        let dst: usize = parse_field(record.get(1), line, "dst")?;
        let w: f64 = if weighted { parse_field(record.get(2), line, "weight")? } else { 1.0 };
        if !(w > 0.0 && w.is_finite()) {
            return Err(Error::ParseError { line, msg: format!("weight must be positive, got {w}") });
        }
        if let Some((prev, _)) = seen.insert((src, dst), (line, w)) {
            return Err(Error::FormatError(format!(
                "duplicate edge ({src},{dst}) on lines {prev} and {line}"
            )));
        }
        if !directed {
            if let Some(&(_, other)) = seen.get(&(dst, src)) {
                if other != w {
                    return Err(Error::FormatError(format!(
                        "edge ({src},{dst}) has weight {w} but ({dst},{src}) has {other}"
                    )));
                }
            }
        }
        n = n.max(src + 1).max(dst + 1);
        edges.push((src, dst, w));
    }
    if n == 0 {
        return Err(Error::FormatError("edge list has no edges".into()));
    }
    Graph::from_edges(n, directed, edges).map_err(|e| Error::FormatError(e.to_string()))
}

pub fn read_edge_list(path: impl AsRef<Path>, directed: Option<bool>) -> Result<Graph> {
    parse_edge_list(&read_text(path.as_ref())?, directed)
}

/// Like [`read_edge_list`] but pads the graph to `n` nodes, for graphs whose
/// highest-numbered nodes have no edges.
pub fn read_edge_list_with_nodes(path: impl AsRef<Path>, directed: Option<bool>, n: usize) -> Result<Graph> {
    let g = read_edge_list(path, directed)?;
    if g.n() > n {
        return Err(Error::DimensionMismatch { expected: n, got: g.n() });
    }
    Graph::from_edges(n, g.is_directed(), g.edges())
}

/// Serialises a graph; undirected graphs list each pair once.
pub fn format_edge_list(graph: &Graph) -> String {
    let mut out = format!("# directed={}\nsrc,dst,weight\n", graph.is_directed());
    for (i, j, w) in graph.edges() {
        out.push_str(&format!("{i},{j},{w}\n"));
    }
    out
}

pub fn write_edge_list(graph: &Graph, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), format_edge_list(graph).as_bytes())
}

/// Parses a `node,value` table whose node ids must be exactly `0..n`.
pub fn parse_signal(text: &str) -> Result<GraphSignal> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(csv_error)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["node", "value"] {
        return Err(Error::ParseError { line: 1, msg: "expected header node,value".into() });
    }
    let mut values = BTreeMap::new();
    let mut last_line = 1;
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        last_line = line;
        let node: usize = parse_field(record.get(0), line, "node")?;
        let value: f64 = parse_field(record.get(1), line, "value")?;
        if !value.is_finite() {
            return Err(Error::ParseError { line, msg: format!("non-finite value for node {node}") });
        }
        if values.insert(node, value).is_some() {
            return Err(Error::ParseError { line, msg: format!("node {node} listed twice") });
        }
    }
    if let Some(missing) = (0..values.len()).find(|k| !values.contains_key(k)) {
        return Err(Error::ParseError {
            line: last_line,
            msg: format!("node ids must be 0..{}; node {missing} is missing", values.len()),
        });
    }
    GraphSignal::new(values.into_values().collect())
}

pub fn read_signal(path: impl AsRef<Path>) -> Result<GraphSignal> {
    parse_signal(&read_text(path.as_ref())?)
}

pub fn format_signal(signal: &GraphSignal) -> String {
    let mut out = String::from("node,value\n");
    for (i, v) in signal.values().iter().enumerate() {
        out.push_str(&format!("{i},{v}\n"));
    }
    out
}

pub fn write_signal(signal: &GraphSignal, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), format_signal(signal).as_bytes())
}

/// Reads a PGM (P2 or P5) or, when the file does not start with `P`, a
/// headerless comma-separated matrix.
pub fn read_image(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|source| Error::ReadError { path: path.to_path_buf(), source })?;
    parse_image(&bytes)
}

pub fn parse_image(bytes: &[u8]) -> Result<Image> {
    match bytes {
        [b'P', b'2', ..] | [b'P', b'5', ..] => parse_pgm(bytes),
        [b'P', magic, ..] => Err(Error::FormatError(format!(
            "unsupported magic number P{}",
            *magic as char
        ))),
        _ => {
            let text = std::str::from_utf8(bytes)
                .map_err(|_| Error::FormatError("image is neither PGM nor UTF-8 CSV".into()))?;
            parse_csv_matrix(text)
        }
    }
}

/// Reads the next whitespace-delimited header token, skipping `#` comments.
fn pgm_token(bytes: &[u8], pos: &mut usize) -> Result<usize> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    std::str::from_utf8(&bytes[start..*pos])
        .ok()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::FormatError(format!("bad PGM header token at byte {start}")))
}

fn parse_pgm(bytes: &[u8]) -> Result<Image> {
    let binary = bytes[1] == b'5';
    let mut pos = 2;
    let cols = pgm_token(bytes, &mut pos)?;
    let rows = pgm_token(bytes, &mut pos)?;
    let maxval = pgm_token(bytes, &mut pos)?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::FormatError(format!("PGM maxval {maxval} out of range")));
    }
    let count = rows * cols;
    let pixels: Vec<f64> = if binary {
        // exactly one whitespace byte separates the header from the raster
        pos += 1;
        let width = if maxval < 256 { 1 } else { 2 };
        let raster = bytes
            .get(pos..pos + count * width)
            .ok_or_else(|| Error::FormatError("PGM raster is truncated".into()))?;
        if width == 1 {
            raster.iter().map(|&b| b as f64).collect()
        } else {
            raster.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]]) as f64).collect()
        }
    } else {
        let mut v = Vec::with_capacity(count);
        for _ in 0..count {
            v.push(pgm_token(bytes, &mut pos)? as f64);
        }
        v
    };
    Image::new(rows, cols, pixels)
}

pub fn parse_csv_matrix(text: &str) -> Result<Image> {
    let mut pixels = Vec::new();
    let mut rows = 0;
    let mut cols = None;
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split(',')
            .map(|f| parse_field::<f64>(Some(f), k + 1, "pixel"))
            .collect::<Result<Vec<f64>>>()?;
        match cols {
            None => cols = Some(row.len()),
            Some(c) if c != row.len() => {
                return Err(Error::ParseError {
                    line: k + 1,
                    msg: format!("expected {c} columns, got {}", row.len()),
                })
            }
            _ => {}
        }
        pixels.extend(row);
        rows += 1;
    }
    let cols = cols.ok_or_else(|| Error::FormatError("empty image matrix".into()))?;
    Image::new(rows, cols, pixels)
}

pub fn format_csv_matrix(image: &Image) -> String {
    let mut out = String::new();
    for row in image.pixels().chunks(image.cols()) {
        let fields: Vec<String> = row.iter().map(f64::to_string).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn write_csv_matrix(image: &Image, path: impl AsRef<Path>) -> Result<()> {
    write_bytes(path.as_ref(), format_csv_matrix(image).as_bytes())
}

/// Pixels as a signal on the 8-neighbour grid, in row-major node order.
pub fn image_to_grid_signal(image: &Image, orientation: GridOrientation) -> Result<(Graph, GraphSignal)> {
    let graph = build_grid8(image.rows(), image.cols(), orientation)?;
    Ok((graph, GraphSignal::new(image.pixels().to_vec())?))
}

/// Non-overlapping `size x size` tiles in row-major tile order.
pub fn split_patches(image: &Image, size: usize) -> Result<Vec<Image>> {
    if size == 0 || !image.rows().is_multiple_of(size) || !image.cols().is_multiple_of(size) {
        return Err(Error::InvalidParameter(format!(
            "patch size {size} does not divide {}x{}",
            image.rows(),
            image.cols()
        )));
    }
    let mut patches = Vec::new();
    for tr in 0..image.rows() / size {
        for tc in 0..image.cols() / size {
            let mut px = Vec::with_capacity(size * size);
            for r in tr * size..(tr + 1) * size {
                for c in tc * size..(tc + 1) * size {
                    px.push(image.get(r, c));
                }
            }
            patches.push(Image::new(size, size, px)?);
        }
    }
    Ok(patches)
}

/// Undirected graph over points with Gaussian-kernel weights
/// `exp(-d^2 / (2 theta^2))`, keeping pairs whose weight is at least
/// `cutoff`. `theta` defaults to the mean pairwise distance.
pub fn gaussian_kernel_graph(coords: &[Vec<f64>], theta: Option<f64>, cutoff: f64) -> Result<Graph> {
    let n = coords.len();
    if n < 2 {
        return Err(Error::InvalidParameter("kernel graph needs at least 2 points".into()));
    }
    let dim = coords[0].len();
    if let Some(bad) = coords.iter().find(|c| c.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: bad.len() });
    }
    let dist = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
    let theta = match theta {
        Some(t) => t,
        None => {
            let pairs = (n * (n - 1) / 2) as f64;
            let total: f64 = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .map(|(i, j)| dist(&coords[i], &coords[j]))
                .sum();
            total / pairs
        }
    };
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::InvalidParameter(format!("theta must be positive, got {theta}")));
    }
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = dist(&coords[i], &coords[j]);
            let w = (-d * d / (2.0 * theta * theta)).exp();
            if w > 0.0 && w >= cutoff {
                edges.push((i, j, w));
            }
        }
    }
    if edges.is_empty() {
        return Err(Error::EmptyGraph);
    }
    Graph::from_edges(n, false, edges)
}

/// Raw `(sensor, epoch_seconds, value)` observations.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TimeSeriesTable {
    series: BTreeMap<String, Vec<(i64, f64)>>,
}

impl TimeSeriesTable {
    /// Groups rows by sensor and sorts by time. Repeated timestamps of one
    /// sensor collapse to the mean of their values.
    pub fn from_rows<I, S>(rows: I) -> Self
    where
        I: IntoIterator<Item = (S, i64, f64)>,
        S: Into<String>,
    {
        let mut grouped: BTreeMap<String, BTreeMap<i64, (f64, usize)>> = BTreeMap::new();
        for (sensor, t, v) in rows {
            let slot = grouped.entry(sensor.into()).or_default().entry(t).or_insert((0.0, 0));
            slot.0 += v;
            slot.1 += 1;
        }
        let series = grouped
            .into_iter()
            .map(|(s, pts)| (s, pts.into_iter().map(|(t, (sum, k))| (t, sum / k as f64)).collect()))
            .collect();
        TimeSeriesTable { series }
    }

    pub fn sensors(&self) -> impl Iterator<Item = &str> {
        self.series.keys().map(String::as_str)
    }

    pub fn samples(&self, sensor: &str) -> Option<&[(i64, f64)]> {
        self.series.get(sensor).map(Vec::as_slice)
    }

    /// Observation count per sensor.
    pub fn counts(&self) -> BTreeMap<String, usize> {
        self.series.iter().map(|(s, v)| (s.clone(), v.len())).collect()
    }

    /// Keeps only the listed sensors.
    pub fn retain(&self, sensors: &[String]) -> Self {
        TimeSeriesTable {
            series: self
                .series
                .iter()
                .filter(|(s, _)| sensors.contains(s))
                .map(|(s, v)| (s.clone(), v.clone()))
                .collect(),
        }
    }
}

pub fn parse_time_series(text: &str) -> Result<TimeSeriesTable> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let headers = reader.headers().map_err(csv_error)?.clone();
    if headers.iter().collect::<Vec<_>>() != ["sensor", "epoch_seconds", "value"] {
        return Err(Error::ParseError {
            line: 1,
            msg: "expected header sensor,epoch_seconds,value".into(),
        });
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let sensor = record
            .get(0)
            .filter(|s| !s.is_empty())
            .ok_or_else(|| Error::ParseError { line, msg: "missing sensor".into() })?
            .to_string();
        let t: i64 = parse_field(record.get(1), line, "epoch_seconds")?;
        let v: f64 = parse_field(record.get(2), line, "value")?;
        if !v.is_finite() {
            return Err(Error::ParseError { line, msg: "non-finite value".into() });
        }
        rows.push((sensor, t, v));
    }
    Ok(TimeSeriesTable::from_rows(rows))
}

pub fn read_time_series(path: impl AsRef<Path>) -> Result<TimeSeriesTable> {
    parse_time_series(&read_text(path.as_ref())?)
}

/// Sensor series on a shared uniform time grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ResampledSeries {
    pub start: i64,
    pub interval: i64,
    pub values: BTreeMap<String, Vec<f64>>,
}

impl ResampledSeries {
    pub fn len(&self) -> usize {
        self.values.values().next().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn time(&self, k: usize) -> i64 {
        self.start + k as i64 * self.interval
    }

    /// Grid points in the half-open window `[from, to)`.
    pub fn segment(&self, from: i64, to: i64) -> ResampledSeries {
        let first = (0..self.len()).find(|&k| self.time(k) >= from).unwrap_or(self.len());
        let end = (first..self.len()).find(|&k| self.time(k) >= to).unwrap_or(self.len());
        ResampledSeries {
            start: self.time(first),
            interval: self.interval,
            values: self.values.iter().map(|(s, v)| (s.clone(), v[first..end].to_vec())).collect(),
        }
    }

    /// One graph signal per grid point, with nodes in `order`.
    pub fn snapshots(&self, order: &[String]) -> Result<Vec<GraphSignal>> {
        let cols = order
            .iter()
            .map(|s| {
                self.values
                    .get(s)
                    .ok_or_else(|| Error::InvalidParameter(format!("unknown sensor '{s}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        (0..self.len())
            .map(|k| GraphSignal::new(cols.iter().map(|c| c[k]).collect()))
            .collect()
    }
}

/// Linear interpolation of every sensor onto `start, start + interval, ...`
/// up to and including `end`. Grid points before a sensor's first or after
/// its last sample are errors; nothing is extrapolated.
pub fn resample_series(table: &TimeSeriesTable, interval_seconds: i64, window: (i64, i64)) -> Result<ResampledSeries> {
    let (start, end) = window;
    if interval_seconds <= 0 || end < start {
        return Err(Error::InvalidParameter(format!(
            "bad resampling grid: interval {interval_seconds}, window [{start}, {end}]"
        )));
    }
    let steps = ((end - start) / interval_seconds) as usize + 1;
    let mut values = BTreeMap::new();
    for (sensor, raw) in &table.series {
        let mut out = Vec::with_capacity(steps);
        let mut k = 0;
        for step in 0..steps {
            let t = start + step as i64 * interval_seconds;
            while k + 1 < raw.len() && raw[k + 1].0 <= t {
                k += 1;
            }
            let (t0, v0) = raw[k];
            let v = if t0 == t {
                v0
            } else if t0 < t && k + 1 < raw.len() {
                let (t1, v1) = raw[k + 1];
                v0 + (v1 - v0) * (t - t0) as f64 / (t1 - t0) as f64
            } else {
                return Err(Error::CoverageError { sensor: sensor.clone(), time: t });
            };
            out.push(v);
        }
        values.insert(sensor.clone(), out);
    }
    Ok(ResampledSeries { start, interval: interval_seconds, values })
}

/// Sensors whose observation count reaches `fraction` of the largest count.
pub fn select_sensors(counts: &BTreeMap<String, usize>, fraction: f64) -> Result<Vec<String>> {
    if counts.is_empty() {
        return Err(Error::InvalidParameter("no sensors to select from".into()));
    }
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::InvalidParameter(format!("fraction must lie in (0, 1], got {fraction}")));
    }
    let max = *counts.values().max().expect("non-empty") as f64;
    Ok(counts
        .iter()
        .filter(|(_, &c)| c as f64 >= fraction * max)
        .map(|(s, _)| s.clone())
        .collect())
}
