use std::io::Write;

use serde::Serialize;

use super::config::OutputFormat;
use crate::error::{Error, Result};

/// Column order of the CSV output.
pub const CSV_HEADER: [&str; 11] =
    ["kind", "seed", "instance", "n", "d", "f_name", "variant", "numerator", "denominator", "ratio", "skipped"];

/// One measured left/right side pair, or a per-variant summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRecord {
    pub kind: String,
    pub seed: u64,
    /// Trial index; `None` marks a summary row.
    pub instance: Option<usize>,
    pub n: usize,
    pub d: usize,
    pub f_name: String,
    /// Sub-experiment label such as `k0=1` or `p=2`.
    pub variant: String,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
    /// Degenerate trials dropped from the variant; summary rows only.
    pub skipped: Option<usize>,
}

impl RatioRecord {
    pub fn is_summary(&self) -> bool {
        self.instance.is_none()
    }
}

/// `numerator / denominator`, with `0 / 0 = 0`.
pub fn ratio(numerator: f64, denominator: f64) -> f64 {
    if numerator == 0.0 {
        0.0
    } else {
        numerator / denominator
    }
}

/// Result of one trial of one variant.
#[derive(Debug, Clone, PartialEq)]
pub enum TrialOutcome {
    Measured(RatioRecord),
    /// The instance had a vanishing right-hand side and was dropped.
    Skipped { variant: String },
}

/// Measured records in trial order followed by one summary per variant (in
/// order of first appearance) holding the largest ratio and the skip count.
pub fn with_summaries(outcomes: Vec<TrialOutcome>, template: &RatioRecord) -> Vec<RatioRecord> {
    let mut variants: Vec<String> = Vec::new();
    let note = |v: &str, variants: &mut Vec<String>| {
        if !variants.iter().any(|x| x == v) {
            variants.push(v.to_string());
        }
    };
    let mut measured = Vec::new();
    let mut skipped: Vec<String> = Vec::new();
    for o in outcomes {
        match o {
            TrialOutcome::Measured(r) => {
                note(&r.variant, &mut variants);
                measured.push(r);
            }
            TrialOutcome::Skipped { variant } => {
                note(&variant, &mut variants);
                skipped.push(variant);
            }
        }
    }
    let mut summaries = Vec::with_capacity(variants.len());
    for v in &variants {
        let best = measured
            .iter()
            .filter(|r| &r.variant == v)
            .fold(None::<&RatioRecord>, |best, r| match best {
                Some(b) if !(r.ratio > b.ratio) => Some(b),
                _ => Some(r),
            });
        let (numerator, denominator, ratio) = best.map_or((f64::NAN, f64::NAN, f64::NAN), |b| (b.numerator, b.denominator, b.ratio));
        summaries.push(RatioRecord {
            instance: None,
            variant: v.clone(),
            numerator,
            denominator,
            ratio,
            skipped: Some(skipped.iter().filter(|s| *s == v).count()),
            ..template.clone()
        });
    }
    measured.extend(summaries);
    measured
}

/// 17 significant digits; non-finite values as `NaN`, `inf`, `-inf`.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

fn json_float(x: f64) -> String {
    if x.is_finite() {
        format_float(x)
    } else {
        "null".to_string()
    }
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Null,
}

impl Cell {
    fn json(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => json_float(*x),
            Cell::Text(s) => json_string(s),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => "null".to_string(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Null => String::new(),
        }
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        // Seeds above i64::MAX keep their bit pattern as text.
        i64::try_from(v).map_or_else(|_| Cell::Text(v.to_string()), Cell::Int)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<C: Into<Cell>> From<Option<C>> for Cell {
    fn from(v: Option<C>) -> Self {
        v.map_or(Cell::Null, Into::into)
    }
}

/// Rows under a fixed header, emitted as JSON lines or CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width does not match the header");
        self.rows.push(row);
    }

    pub fn header(&self) -> &[&'static str] {
        &self.header
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn write(&self, format: OutputFormat, out: impl Write) -> Result<()> {
        match format {
            OutputFormat::JsonLines => {
                let mut out = std::io::BufWriter::new(out);
                for row in &self.rows {
                    let fields: Vec<String> =
                        self.header.iter().zip(row).map(|(k, v)| format!("{}:{}", json_string(k), v.json())).collect();
                    writeln!(out, "{{{}}}", fields.join(","))?;
                }
                out.flush()?;
            }
            OutputFormat::Csv => {
                let mut w = csv::Writer::from_writer(out);
                let io = |e: csv::Error| Error::Io(e.to_string());
                w.write_record(&self.header).map_err(io)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv)).map_err(io)?;
                }
                w.flush()?;
            }
        }
        Ok(())
    }

    pub fn render(&self, format: OutputFormat) -> Result<String> {
        let mut buf = Vec::new();
        self.write(format, &mut buf)?;
        String::from_utf8(buf).map_err(|e| Error::Io(e.to_string()))
    }
}

/// Ratio records as a table; summary rows carry `instance = "summary"` in CSV
/// and `null` in JSON.
pub fn records_table(records: &[RatioRecord]) -> Table {
    let mut t = Table::new(&CSV_HEADER);
    for r in records {
        t.push(vec![
            r.kind.as_str().into(),
            r.seed.into(),
            r.instance.map_or(Cell::Null, Cell::from),
            r.n.into(),
            r.d.into(),
            r.f_name.as_str().into(),
            r.variant.as_str().into(),
            r.numerator.into(),
            r.denominator.into(),
            r.ratio.into(),
            r.skipped.into(),
        ]);
    }
    t
}

pub fn write_records(records: &[RatioRecord], format: OutputFormat, out: impl Write) -> Result<()> {
    let mut t = records_table(records);
    if format == OutputFormat::Csv {
        for (row, r) in t.rows.iter_mut().zip(records) {
            if r.is_summary() {
                row[2] = Cell::Text("summary".into());
            }
        }
    }
    t.write(format, out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(instance: usize, variant: &str, r: f64) -> RatioRecord {
        RatioRecord {
            kind: "doi".into(),
            seed: 1,
            instance: Some(instance),
            n: 2,
            d: 1,
            f_name: "id".into(),
            variant: variant.into(),
            numerator: r,
            denominator: 1.0,
            ratio: r,
            skipped: None,
        }
    }

    #[test]
    fn summaries_take_max_and_count_skips() {
        let outcomes = vec![
            TrialOutcome::Measured(rec(0, "a", 0.5)),
            TrialOutcome::Skipped { variant: "a".into() },
            TrialOutcome::Measured(rec(2, "a", 0.7)),
            TrialOutcome::Measured(rec(2, "b", 0.1)),
        ];
        let all = with_summaries(outcomes, &rec(0, "", 0.0));
        let sums: Vec<_> = all.iter().filter(|r| r.is_summary()).collect();
        assert_eq!(sums.len(), 2);
        assert_eq!((sums[0].variant.as_str(), sums[0].ratio, sums[0].skipped), ("a", 0.7, Some(1)));
        assert_eq!((sums[1].variant.as_str(), sums[1].ratio, sums[1].skipped), ("b", 0.1, Some(0)));
    }

    #[test]
    fn float_format_has_17_digits() {
        assert_eq!(format_float(0.1), "1.0000000000000001e-1");
        assert_eq!(format_float(f64::NAN), "NaN");
    }

    #[test]
    fn json_lines_parse_back() {
        let mut buf = Vec::new();
        write_records(&[rec(3, "k0=1", 0.25)], OutputFormat::JsonLines, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["instance"], 3);
        assert_eq!(v["ratio"].as_f64(), Some(0.25));
    }

    #[test]
    fn csv_header_is_fixed() {
        let mut buf = Vec::new();
        write_records(&[], OutputFormat::Csv, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().trim_end(), CSV_HEADER.join(","));
    }
}
