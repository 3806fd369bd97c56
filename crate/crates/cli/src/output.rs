//! Result rendering. Every command writes either one JSON document or a CSV
//! table with a header line to stdout.

use graph_sampen::experiments::{BenchRow, OutputFormat};
use graph_sampen::{CorrelationSums, Error, SampEnResult};
use serde_json::{json, Map, Value};

const COLUMNS: [&str; 7] = ["value", "A", "B", "n_templates_m", "n_templates_m1", "epsilon", "error"];

/// A computed entropy, or the reason it is undefined with whatever sums exist.
#[derive(Debug, Clone)]
pub enum Outcome {
    Defined(SampEnResult),
    Undefined { error: &'static str, sums: Option<CorrelationSums> },
}

impl Outcome {
    /// Undefined-entropy errors become outcomes; anything else is passed on.
    pub fn from_result(res: graph_sampen::Result<SampEnResult>) -> anyhow::Result<Self> {
        match res {
            Ok(r) => Ok(Outcome::Defined(r)),
            Err(e) if e.is_undefined_entropy() => {
                let sums = match &e {
                    Error::NoMatches(s) | Error::NoExtendedMatches(s) => Some(*s),
                    _ => None,
                };
                Ok(Outcome::Undefined { error: e.name(), sums })
            }
            Err(e) => Err(e.into()),
        }
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            Outcome::Defined(r) => Some(r.value),
            Outcome::Undefined { .. } => None,
        }
    }

    fn sums(&self) -> Option<CorrelationSums> {
        match self {
            Outcome::Defined(r) => Some(r.sums()),
            Outcome::Undefined { sums, .. } => *sums,
        }
    }

    fn error(&self) -> Option<&'static str> {
        match self {
            Outcome::Defined(_) => None,
            Outcome::Undefined { error, .. } => Some(error),
        }
    }

    fn to_json(&self) -> Map<String, Value> {
        let s = self.sums();
        let mut obj = Map::new();
        obj.insert("value".into(), json!(self.value()));
        obj.insert("A".into(), json!(s.map(|s| s.a)));
        obj.insert("B".into(), json!(s.map(|s| s.b)));
        obj.insert("n_templates_m".into(), json!(s.map(|s| s.n_templates_m)));
        obj.insert("n_templates_m1".into(), json!(s.map(|s| s.n_templates_m1)));
        obj.insert("epsilon".into(), json!(s.map(|s| s.epsilon)));
        obj.insert("error".into(), json!(self.error()));
        obj
    }

    fn csv_fields(&self) -> Vec<String> {
        let s = self.sums();
        let opt = |v: Option<String>| v.unwrap_or_default();
        vec![
            opt(self.value().map(|v| v.to_string())),
            opt(s.map(|s| s.a.to_string())),
            opt(s.map(|s| s.b.to_string())),
            opt(s.map(|s| s.n_templates_m.to_string())),
            opt(s.map(|s| s.n_templates_m1.to_string())),
            opt(s.map(|s| s.epsilon.to_string())),
            self.error().unwrap_or_default().to_string(),
        ]
    }
}

/// Output of `compute`, `series` and `image`.
pub enum Report {
    Single(Outcome),
    /// Per-patch outcomes; the summary is the mean over defined patches.
    Patches(Vec<Outcome>),
}

impl Report {
    pub fn single(outcome: Outcome) -> Self {
        Report::Single(outcome)
    }

    pub fn patches(outcomes: Vec<Outcome>) -> Self {
        Report::Patches(outcomes)
    }

    fn outcomes(&self) -> &[Outcome] {
        match self {
            Report::Single(o) => std::slice::from_ref(o),
            Report::Patches(v) => v,
        }
    }

    pub fn all_undefined(&self) -> bool {
        self.outcomes().iter().all(|o| o.value().is_none())
    }

    fn patch_mean(&self) -> Option<f64> {
        let values: Vec<f64> = self.outcomes().iter().filter_map(Outcome::value).collect();
        (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match (self, format) {
            (Report::Single(o), OutputFormat::Json) => format!("{}\n", Value::Object(o.to_json())),
            (Report::Single(o), OutputFormat::Csv) => format!("{}\n{}\n", COLUMNS.join(","), o.csv_fields().join(",")),
            (Report::Patches(v), OutputFormat::Json) => {
                let patches: Vec<Value> = v
                    .iter()
                    .enumerate()
                    .map(|(k, o)| {
                        let mut obj = Map::new();
                        obj.insert("patch".into(), json!(k));
                        obj.extend(o.to_json());
                        Value::Object(obj)
                    })
                    .collect();
                let defined = v.iter().filter(|o| o.value().is_some()).count();
                let doc = json!({ "patches": patches, "mean": self.patch_mean(), "patches_ok": defined });
                format!("{doc}\n")
            }
            (Report::Patches(v), OutputFormat::Csv) => {
                let mut out = format!("patch,{}\n", COLUMNS.join(","));
                for (k, o) in v.iter().enumerate() {
                    out.push_str(&format!("{k},{}\n", o.csv_fields().join(",")));
                }
                let mean = self.patch_mean().map(|m| m.to_string()).unwrap_or_default();
                out.push_str(&format!("mean,{mean}{}\n", ",".repeat(COLUMNS.len() - 1)));
                out
            }
        }
    }
}

pub fn render_bench(rows: &[BenchRow], format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => {
            let mut out = String::from("N,m,mean_ms,calls,undefined\n");
            for r in rows {
                out.push_str(&format!("{},{},{},{},{}\n", r.n, r.m, r.mean_ms, r.calls, r.undefined));
            }
            out
        }
        OutputFormat::Json => {
            let arr: Vec<Value> = rows
                .iter()
                .map(|r| json!({ "N": r.n, "m": r.m, "mean_ms": r.mean_ms, "calls": r.calls, "undefined": r.undefined }))
                .collect();
            format!("{}\n", Value::Array(arr))
        }
    }
}
