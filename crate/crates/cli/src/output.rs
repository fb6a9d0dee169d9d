//! JSON and CSV emission. Every floating-point value is serialized in
//! scientific notation with a fixed number of significant digits (17 by
//! default, enough to round-trip a double bit-for-bit).

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{json, Map, Value};
use triverge::{DivergenceReport, SmoothingContext, TrivergenceComponents, TrivergenceResult};

pub const DEFAULT_DIGITS: usize = 17;

/// Printed significant digits, overridable via `TRIVERGE_PRECISION`.
pub fn printed_digits() -> usize {
    std::env::var("TRIVERGE_PRECISION")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(DEFAULT_DIGITS)
}

/// Compact JSON with floats printed to a fixed significant-digit count.
struct SigFigFormatter {
    digits: usize,
}

impl Formatter for SigFigFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        write!(writer, "{:.*e}", self.digits - 1, value)
    }
}

pub fn json_to_string(value: &Value, digits: usize) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFigFormatter { digits });
    value
        .serialize(&mut ser)
        .expect("JSON serialization cannot fail");
    String::from_utf8(out).expect("serializer emits UTF-8")
}

fn region_terms_value(report: &DivergenceReport) -> Value {
    let mut map = Map::new();
    for (region, term) in &report.region_terms {
        map.insert(region.as_str().to_string(), json!(term));
    }
    Value::Object(map)
}

fn divergence_component(report: &DivergenceReport) -> Value {
    json!({
        "first_label": report.first_label,
        "second_label": report.second_label,
        "value_bits": report.value,
        "region_terms": region_terms_value(report),
    })
}

fn denominator_value(ctx: &SmoothingContext) -> Value {
    json!({
        "policy": ctx.denominator_policy.as_str(),
        "value": ctx.denominator,
    })
}

pub fn div_report(report: &DivergenceReport) -> Value {
    json!({
        "command": "div",
        "base": report.kind.as_str(),
        "mode": report.context.mode.as_str(),
        "denominator": denominator_value(&report.context),
        "value_bits": report.value,
        "region_terms": region_terms_value(report),
        "labels": [report.first_label, report.second_label],
        "tie_flags": [],
    })
}

pub fn triv_report(result: &TrivergenceResult, input_labels: &[String; 3]) -> Value {
    let canonical_labels: Vec<&str> = result
        .canonicalization
        .source_indices
        .iter()
        .map(|&i| input_labels[i].as_str())
        .collect();
    let components = match &result.components {
        TrivergenceComponents::Product { factors } => json!({
            "factors": factors.iter().map(divergence_component).collect::<Vec<_>>(),
        }),
        TrivergenceComponents::Compound {
            inner,
            scalar,
            normalizer,
            normalizer_kind,
        } => json!({
            "inner": divergence_component(inner),
            "scalar": scalar,
            "normalizer": normalizer,
            "normalizer_kind": normalizer_kind.as_str(),
        }),
    };
    json!({
        "command": "triv",
        "form": result.form.as_str(),
        "base": result.base.as_str(),
        "mode": result.context.mode.as_str(),
        "denominator": denominator_value(&result.context),
        "value": result.value,
        "units": result.units(),
        "zero_branch_flag": result.zero_branch,
        "canonical_order": {
            "labels": canonical_labels,
            "source_indices": result.canonicalization.source_indices,
            "tie_flags": result.canonicalization.tie_flags,
        },
        "components": components,
    })
}

pub struct MatrixReport {
    pub base: &'static str,
    pub mode: &'static str,
    pub denominator_policy: &'static str,
    /// Single shared denominator when one exists (explicit policy); absent
    /// when each cell resolves its own pair sum.
    pub denominator_value: Option<u64>,
    pub labels: Vec<String>,
    pub values: Vec<Vec<f64>>,
}

pub fn matrix_report_json(report: &MatrixReport) -> Value {
    json!({
        "command": "matrix",
        "base": report.base,
        "mode": report.mode,
        "denominator": {
            "policy": report.denominator_policy,
            "value": report.denominator_value,
        },
        "labels": report.labels,
        "values": report.values,
    })
}

pub fn matrix_csv(report: &MatrixReport, digits: usize) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["label".to_string()];
    header.extend(report.labels.iter().cloned());
    writer.write_record(&header).expect("csv header");
    for (label, row) in report.labels.iter().zip(&report.values) {
        let mut record = vec![label.clone()];
        record.extend(row.iter().map(|v| format!("{:.*e}", digits - 1, v)));
        writer.write_record(&record).expect("csv row");
    }
    String::from_utf8(writer.into_inner().expect("csv flush")).expect("csv utf8")
}

pub struct VariantRow {
    pub index: usize,
    pub notation: String,
    pub evaluable: bool,
    pub evaluation: Option<VariantEvaluation>,
}

pub enum VariantEvaluation {
    Value {
        value: f64,
        units: &'static str,
        zero_branch: bool,
    },
    NotEvaluable,
}

pub fn variants_report(form: &str, rows: &[VariantRow]) -> Value {
    let variants: Vec<Value> = rows
        .iter()
        .map(|row| {
            let mut map = Map::new();
            map.insert("index".into(), json!(row.index));
            map.insert("notation".into(), json!(row.notation));
            map.insert("evaluable".into(), json!(row.evaluable));
            match &row.evaluation {
                Some(VariantEvaluation::Value {
                    value,
                    units,
                    zero_branch,
                }) => {
                    map.insert("value".into(), json!(value));
                    map.insert("units".into(), json!(units));
                    map.insert("zero_branch_flag".into(), json!(zero_branch));
                }
                Some(VariantEvaluation::NotEvaluable) => {
                    map.insert("note".into(), json!("not evaluable: undefined in source"));
                }
                None => {}
            }
            Value::Object(map)
        })
        .collect();
    json!({
        "command": "variants",
        "form": form,
        "count": rows.len(),
        "evaluable_count": rows.iter().filter(|r| r.evaluable).count(),
        "variants": variants,
    })
}
