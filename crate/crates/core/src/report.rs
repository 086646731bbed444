//! Report structures and deterministic serialization.
//!
//! JSON output uses fixed key order (struct declaration order) and prints
//! every float with 17 significant digits, so identical runs are
//! byte-identical and every value round-trips. CSV and text renderings
//! flatten the same tree with the same float formatting.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::bounds::{ExpansionTrace, LemmaCheck};

/// Per-facet measurements of one vertex cone.
#[derive(Debug, Clone, Serialize)]
pub struct FacetReport {
    pub dropped_row: usize,
    pub height: f64,
    pub area: f64,
    pub area_stderr: f64,
}

/// Per-vertex cone summary carried in the full report.
#[derive(Debug, Clone, Serialize)]
pub struct ConeStatsReport {
    pub vertex: usize,
    pub volume: f64,
    pub volume_stderr: f64,
    pub simplex_volume: f64,
    pub dockable_surface: f64,
    pub dockable_stderr: f64,
    pub facets: Vec<FacetReport>,
}

/// Full analysis output: shape, conditioning, exact diameter, ceiling
/// under both ball-volume conventions, per-cone measurements, and every
/// verified inequality.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub tool: String,
    pub command: String,
    pub input: Option<String>,
    pub n: usize,
    pub m: usize,
    pub samples: u64,
    pub seed: u64,
    pub perturb_sigma: Option<f64>,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub exact_diameter: usize,
    pub diameter_witness: (usize, usize),
    /// `m - n`, reported for comparison with the conjectured bound it
    /// famously fails to satisfy in general.
    pub hirsch_quantity: usize,
    pub delta: f64,
    pub det_star: f64,
    pub det_star_all_minors: Option<f64>,
    pub per_vertex_dets: Vec<f64>,
    pub paper_ball_volume: f64,
    pub standard_ball_volume: f64,
    pub j_max_paper: u64,
    pub diameter_bound_paper: u64,
    pub j_max_standard: u64,
    pub diameter_bound_standard: u64,
    pub tie_count: u64,
    pub cone_stats: Vec<ConeStatsReport>,
    pub lemma_results: Vec<LemmaCheck>,
    pub lemma_failures: usize,
    pub expansion: Option<ExpansionTrace>,
}

impl BoundReport {
    pub fn all_lemmas_pass(&self) -> bool {
        self.lemma_failures == 0
    }
}

/// Output format of the command-line reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

/// Pretty JSON formatter that prints every float with 17 significant
/// digits (`{:.16e}`), enough to reconstruct the exact binary64 value.
struct SigFigFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl<'a> SigFigFormatter<'a> {
    fn new() -> Self {
        Self { inner: PrettyFormatter::new() }
    }
}

impl<'a> Formatter for SigFigFormatter<'a> {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            // JSON has no non-finite numbers; they only arise from
            // inconclusive zero-hit ratios.
            write!(writer, "null")
        }
    }

    fn begin_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_array(writer)
    }

    fn end_array<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_object(writer)
    }

    fn end_object<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W>(&mut self, writer: &mut W, first: bool) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W>(&mut self, writer: &mut W) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        self.inner.begin_object_value(writer)
    }
}

/// Serializes any report value to deterministic pretty JSON.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigFigFormatter::new());
    value.serialize(&mut ser).expect("report values serialize");
    buf.push(b'\n');
    String::from_utf8(buf).expect("json is utf-8")
}

fn format_leaf(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(num) => {
            if let Some(i) = num.as_i64() {
                i.to_string()
            } else if let Some(u) = num.as_u64() {
                u.to_string()
            } else {
                let x = num.as_f64().expect("numeric leaf");
                if x.is_finite() {
                    format!("{x:.16e}")
                } else {
                    "null".to_string()
                }
            }
        }
        Value::String(s) => s.clone(),
        _ => unreachable!("containers are not leaves"),
    }
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (key, child) in map {
                let path =
                    if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
                flatten(&path, child, out);
            }
        }
        Value::Array(items) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), child, out);
            }
        }
        leaf => out.push((prefix.to_string(), format_leaf(leaf))),
    }
}

fn flat_pairs<T: Serialize>(value: &T) -> Vec<(String, String)> {
    let tree = serde_json::to_value(value).expect("report values serialize");
    let mut out = Vec::new();
    flatten("", &tree, &mut out);
    out
}

fn csv_quote(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// Two-column `key,value` CSV with the same paths and numeric text as the
/// JSON rendering.
pub fn to_csv<T: Serialize>(value: &T) -> String {
    let mut out = String::from("key,value\n");
    for (key, val) in flat_pairs(value) {
        out.push_str(&format!("{},{}\n", csv_quote(&key), csv_quote(&val)));
    }
    out
}

/// Aligned `key = value` lines for terminals.
pub fn to_text<T: Serialize>(value: &T) -> String {
    let pairs = flat_pairs(value);
    let width = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    let mut out = String::new();
    for (key, val) in pairs {
        out.push_str(&format!("{key:<width$} = {val}\n"));
    }
    out
}

/// Renders in the requested format.
pub fn render<T: Serialize>(value: &T, format: OutputFormat) -> String {
    match format {
        OutputFormat::Json => to_json(value),
        OutputFormat::Csv => to_csv(value),
        OutputFormat::Text => to_text(value),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Sample {
        name: String,
        count: u64,
        ratio: f64,
        items: Vec<f64>,
        missing: Option<f64>,
    }

    fn sample() -> Sample {
        Sample {
            name: "square".into(),
            count: 4,
            ratio: std::f64::consts::PI / 4.0,
            items: vec![1.0, 0.5],
            missing: None,
        }
    }

    #[test]
    fn json_floats_roundtrip_and_are_stable() {
        let text = to_json(&sample());
        assert_eq!(text, to_json(&sample()));
        let value: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(value["ratio"].as_f64().unwrap(), std::f64::consts::PI / 4.0);
        assert!(text.contains("7.8539816339744828e-1"));
    }

    #[test]
    fn csv_carries_identical_numeric_content() {
        let json: Value = serde_json::from_str(&to_json(&sample())).unwrap();
        let csv = to_csv(&sample());
        let line = csv.lines().find(|l| l.starts_with("ratio,")).unwrap();
        let csv_value: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(csv_value, json["ratio"].as_f64().unwrap());
        assert!(csv.contains("items[0],1.0000000000000000e0"));
        assert!(csv.contains("missing,\n"));
    }

    #[test]
    fn text_is_aligned_key_value() {
        let text = to_text(&sample());
        assert!(text.contains("name"));
        assert!(text.lines().all(|l| l.contains(" = ")));
    }
}
