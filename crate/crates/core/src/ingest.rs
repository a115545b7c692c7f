//! Study bundles and expert CSV files.
//!
//! A bundle is one JSON document:
//!
//! ```text
//! {
//!   "name": "optional title",
//!   "scale": {"min": 0, "max": 4},
//!   "criteria": [{"id": "C1", "name": "...", "category": "internal", "description": "..."}],
//!   "respondents": [{"id": "R1", "role": "practitioner", "description": "..."}],
//!   "matrices": {"R1": [[0, 2], [1, 0]]},        // raw mode, or
//!   "rough_group": [[[0, 0], [1.2, 2.5]], ...],  // aggregate mode
//!   "analysis": {"tau": "max-total-sum", "threshold": "mean-sigma:1"}  // optional defaults
//! }
//! ```
//!
//! Parsing never stops at the first problem; every violation is collected
//! into a [`ValidationReport`].

use std::collections::HashSet;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::dematel::{CrispEnvelope, ExpertMatrix, RoughMatrix, TauStrategy};
use crate::error::ValidationReport;
use crate::network::{CrispifyMode, ThresholdMode};
use crate::pipeline::AnalysisConfig;
use crate::rough::{Judgment, RoughNumber, Scale};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Internal,
    External,
    Custom,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Internal => "internal",
            Category::External => "external",
            Category::Custom => "custom",
        }
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "internal" => Ok(Category::Internal),
            "external" => Ok(Category::External),
            "custom" => Ok(Category::Custom),
            other => Err(format!(
                "unknown category `{other}` (expected internal, external or custom)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CriterionMeta {
    pub id: String,
    pub name: String,
    pub category: Category,
    pub description: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Practitioner,
    Academic,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Practitioner => "practitioner",
            Role::Academic => "academic",
        }
    }
}

impl FromStr for Role {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "practitioner" => Ok(Role::Practitioner),
            "academic" => Ok(Role::Academic),
            other => Err(format!(
                "unknown role `{other}` (expected practitioner or academic)"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RespondentMeta {
    pub id: String,
    pub role: Role,
    pub description: String,
}

/// The judgment data a bundle carries.
#[derive(Debug, Clone, PartialEq)]
pub enum StudyData {
    /// One matrix per respondent, in respondent order.
    Raw(Vec<ExpertMatrix>),
    /// A rough group matrix aggregated elsewhere.
    Aggregate(RoughMatrix),
}

/// Analysis settings a bundle may carry; command-line flags override them.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BundleDefaults {
    pub tau: Option<TauStrategy>,
    pub envelope: Option<CrispEnvelope>,
    pub crispify: Option<CrispifyMode>,
    pub threshold: Option<ThresholdMode>,
}

impl BundleDefaults {
    pub fn is_empty(&self) -> bool {
        *self == BundleDefaults::default()
    }

    pub fn apply(&self, config: &mut AnalysisConfig) {
        if let Some(t) = self.tau {
            config.tau = t;
        }
        if let Some(e) = self.envelope {
            config.envelope = e;
        }
        if let Some(c) = self.crispify {
            config.crispify = c;
        }
        if let Some(t) = self.threshold {
            config.threshold = t;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyBundle {
    pub name: Option<String>,
    pub scale: Scale,
    pub criteria: Vec<CriterionMeta>,
    pub respondents: Vec<RespondentMeta>,
    pub data: StudyData,
    pub defaults: BundleDefaults,
}

impl StudyBundle {
    pub fn criterion_ids(&self) -> Vec<String> {
        self.criteria.iter().map(|c| c.id.clone()).collect()
    }

    pub fn is_aggregate(&self) -> bool {
        matches!(self.data, StudyData::Aggregate(_))
    }
}

const BUNDLE_KEYS: &[&str] = &[
    "name",
    "scale",
    "criteria",
    "respondents",
    "matrices",
    "rough_group",
    "analysis",
];

pub fn parse_study_bundle(bytes: &[u8]) -> Result<StudyBundle, ValidationReport> {
    let mut report = ValidationReport::default();
    let text = match std::str::from_utf8(bytes) {
        Ok(t) => t,
        Err(e) => {
            report.push("document", format!("not valid UTF-8: {e}"));
            return Err(report);
        }
    };
    let root: Value = match serde_json::from_str(text) {
        Ok(v) => v,
        Err(e) => {
            report.push(
                format!("line {}, column {}", e.line(), e.column()),
                format!("malformed JSON: {e}"),
            );
            return Err(report);
        }
    };
    let Some(obj) = root.as_object() else {
        report.push("document", "top level must be an object");
        return Err(report);
    };
    for key in obj.keys() {
        if !BUNDLE_KEYS.contains(&key.as_str()) {
            report.push(key.clone(), "unknown field");
        }
    }

    let name = match obj.get("name") {
        None | Some(Value::Null) => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => {
            report.push("name", "must be a string");
            None
        }
    };
    let scale = parse_scale(obj.get("scale"), &mut report);
    let criteria = parse_criteria(obj.get("criteria"), &mut report);
    let respondents = parse_respondents(obj.get("respondents"), &mut report);
    let defaults = parse_defaults(obj.get("analysis"), &mut report);
    let n = criteria.len();

    let data = match (obj.get("matrices"), obj.get("rough_group")) {
        (Some(_), Some(_)) => {
            report.push(
                "document",
                "both `matrices` and `rough_group` given; exactly one is allowed",
            );
            None
        }
        (None, None) => {
            report.push(
                "document",
                "neither `matrices` nor `rough_group` given; exactly one is required",
            );
            None
        }
        (Some(m), None) => {
            parse_matrices(m, &respondents, n, scale.unwrap_or_default(), &mut report)
                .map(StudyData::Raw)
        }
        (None, Some(g)) => parse_rough_group(g, n, &mut report).map(StudyData::Aggregate),
    };

    match (scale, data, report.is_empty()) {
        (Some(scale), Some(data), true) => Ok(StudyBundle {
            name,
            scale,
            criteria,
            respondents,
            data,
            defaults,
        }),
        _ => Err(report),
    }
}

fn parse_scale(v: Option<&Value>, report: &mut ValidationReport) -> Option<Scale> {
    let Some(v) = v else {
        report.push("scale", "missing");
        return None;
    };
    let bound = |key: &str, report: &mut ValidationReport| match v.get(key).and_then(Value::as_u64)
    {
        Some(b) if b <= u64::from(u8::MAX) => Some(b as u8),
        _ => {
            report.push(format!("scale.{key}"), "must be an integer in 0..=255");
            None
        }
    };
    if !v.is_object() {
        report.push("scale", "must be an object with `min` and `max`");
        return None;
    }
    let min = bound("min", report);
    let max = bound("max", report);
    match Scale::new(min?, max?) {
        Ok(s) => Some(s),
        Err(e) => {
            report.push("scale", e.to_string());
            None
        }
    }
}

fn string_field(
    obj: &Map<String, Value>,
    key: &str,
    loc: &str,
    required: bool,
    report: &mut ValidationReport,
) -> Option<String> {
    match obj.get(key) {
        Some(Value::String(s)) => Some(s.clone()),
        None if !required => Some(String::new()),
        None => {
            report.push(format!("{loc}.{key}"), "missing");
            None
        }
        Some(_) => {
            report.push(format!("{loc}.{key}"), "must be a string");
            None
        }
    }
}

fn parse_id(
    obj: &Map<String, Value>,
    loc: &str,
    seen: &mut HashSet<String>,
    report: &mut ValidationReport,
) -> Option<String> {
    let id = string_field(obj, "id", loc, true, report)?;
    if id.trim().is_empty() {
        report.push(format!("{loc}.id"), "must not be empty");
        return None;
    }
    if !seen.insert(id.clone()) {
        report.push(format!("{loc}.id"), format!("duplicate id `{id}`"));
        return None;
    }
    Some(id)
}

fn parse_criteria(v: Option<&Value>, report: &mut ValidationReport) -> Vec<CriterionMeta> {
    let Some(items) = v.and_then(Value::as_array) else {
        report.push("criteria", "missing or not an array");
        return Vec::new();
    };
    if items.is_empty() {
        report.push("criteria", "must list at least one criterion");
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let loc = format!("criteria[{i}]");
        let Some(obj) = item.as_object() else {
            report.push(loc, "must be an object");
            continue;
        };
        let id = parse_id(obj, &loc, &mut seen, report);
        let name = string_field(obj, "name", &loc, true, report);
        let description = string_field(obj, "description", &loc, false, report);
        let category = match obj.get("category").and_then(Value::as_str) {
            Some(c) => c
                .parse::<Category>()
                .map_err(|e| report.push(format!("{loc}.category"), e))
                .ok(),
            None => {
                report.push(format!("{loc}.category"), "missing or not a string");
                None
            }
        };
        if let (Some(id), Some(name), Some(description), Some(category)) =
            (id, name, description, category)
        {
            out.push(CriterionMeta {
                id,
                name,
                category,
                description,
            });
        }
    }
    out
}

fn parse_respondents(v: Option<&Value>, report: &mut ValidationReport) -> Vec<RespondentMeta> {
    let Some(items) = v.and_then(Value::as_array) else {
        report.push("respondents", "missing or not an array");
        return Vec::new();
    };
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, item) in items.iter().enumerate() {
        let loc = format!("respondents[{i}]");
        let Some(obj) = item.as_object() else {
            report.push(loc, "must be an object");
            continue;
        };
        let id = parse_id(obj, &loc, &mut seen, report);
        let description = string_field(obj, "description", &loc, false, report);
        let role = match obj.get("role").and_then(Value::as_str) {
            Some(r) => r
                .parse::<Role>()
                .map_err(|e| report.push(format!("{loc}.role"), e))
                .ok(),
            None => {
                report.push(format!("{loc}.role"), "missing or not a string");
                None
            }
        };
        if let (Some(id), Some(role), Some(description)) = (id, role, description) {
            out.push(RespondentMeta {
                id,
                role,
                description,
            });
        }
    }
    out
}

fn parse_defaults(v: Option<&Value>, report: &mut ValidationReport) -> BundleDefaults {
    let mut d = BundleDefaults::default();
    let Some(v) = v else {
        return d;
    };
    let Some(obj) = v.as_object() else {
        report.push("analysis", "must be an object");
        return d;
    };
    fn setting<T: FromStr<Err = crate::error::Error>>(
        obj: &Map<String, Value>,
        key: &str,
        report: &mut ValidationReport,
    ) -> Option<T> {
        let v = obj.get(key)?;
        match v.as_str().map(str::parse::<T>) {
            Some(Ok(t)) => Some(t),
            Some(Err(e)) => {
                report.push(format!("analysis.{key}"), e.to_string());
                None
            }
            None => {
                report.push(format!("analysis.{key}"), "must be a string");
                None
            }
        }
    }
    for key in obj.keys() {
        if !["tau", "envelope", "crispify", "threshold"].contains(&key.as_str()) {
            report.push(format!("analysis.{key}"), "unknown setting");
        }
    }
    d.tau = setting(obj, "tau", report);
    d.envelope = setting(obj, "envelope", report);
    d.crispify = setting(obj, "crispify", report);
    d.threshold = setting(obj, "threshold", report);
    d
}

fn parse_matrices(
    v: &Value,
    respondents: &[RespondentMeta],
    n: usize,
    scale: Scale,
    report: &mut ValidationReport,
) -> Option<Vec<ExpertMatrix>> {
    let Some(obj) = v.as_object() else {
        report.push("matrices", "must be an object keyed by respondent id");
        return None;
    };
    let before = report.len();
    let known: HashSet<&str> = respondents.iter().map(|r| r.id.as_str()).collect();
    for key in obj.keys() {
        if !known.contains(key.as_str()) {
            report.push(format!("matrices.{key}"), "no respondent with this id");
        }
    }
    let mut out = Vec::new();
    for r in respondents {
        let loc = format!("matrices.{}", r.id);
        let Some(m) = obj.get(&r.id) else {
            report.push(loc, "respondent has no matrix");
            continue;
        };
        if let Some(rows) = int_matrix(m, n, &loc, scale, report) {
            match ExpertMatrix::new(r.id.clone(), rows) {
                Ok(m) => out.push(m),
                Err(e) => report.push(loc, e.to_string()),
            }
        }
    }
    (report.len() == before).then_some(out)
}

fn int_matrix(
    v: &Value,
    n: usize,
    loc: &str,
    scale: Scale,
    report: &mut ValidationReport,
) -> Option<Vec<Vec<Judgment>>> {
    let Some(rows) = v.as_array() else {
        report.push(loc, "must be an array of rows");
        return None;
    };
    let before = report.len();
    if rows.len() != n {
        report.push(
            loc,
            format!("has {} rows, expected {n} (one per criterion)", rows.len()),
        );
    }
    let mut out = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let Some(cells) = row.as_array() else {
            report.push(format!("{loc}[{i}]"), "must be an array");
            continue;
        };
        if cells.len() != n {
            report.push(
                format!("{loc}[{i}]"),
                format!("has {} entries, expected {n}", cells.len()),
            );
        }
        let mut judgments = Vec::with_capacity(n);
        for (j, cell) in cells.iter().enumerate() {
            let at = format!("{loc}[{i}][{j}]");
            let Some(value) = cell.as_i64() else {
                report.push(at, format!("`{cell}` is not an integer"));
                continue;
            };
            match scale.judgment(value) {
                Ok(jd) if i == j && jd != Judgment::ZERO => {
                    report.push(at, format!("diagonal entry is {value}, must be 0"))
                }
                Ok(jd) => judgments.push(jd),
                Err(_) => report.push(
                    at,
                    format!("value {value} outside scale {}..={}", scale.min, scale.max),
                ),
            }
        }
        out.push(judgments);
    }
    (report.len() == before).then_some(out)
}

fn parse_rough_group(v: &Value, n: usize, report: &mut ValidationReport) -> Option<RoughMatrix> {
    let Some(rows) = v.as_array() else {
        report.push("rough_group", "must be an array of rows");
        return None;
    };
    let before = report.len();
    if rows.len() != n {
        report.push(
            "rough_group",
            format!("has {} rows, expected {n}", rows.len()),
        );
    }
    let mut out = Vec::with_capacity(n);
    for (i, row) in rows.iter().enumerate() {
        let Some(cells) = row.as_array() else {
            report.push(format!("rough_group[{i}]"), "must be an array");
            continue;
        };
        if cells.len() != n {
            report.push(
                format!("rough_group[{i}]"),
                format!("has {} entries, expected {n}", cells.len()),
            );
        }
        let mut parsed = Vec::with_capacity(n);
        for (j, cell) in cells.iter().enumerate() {
            let at = format!("rough_group[{i}][{j}]");
            let pair = cell
                .as_array()
                .filter(|p| p.len() == 2)
                .and_then(|p| Some((p[0].as_f64()?, p[1].as_f64()?)));
            let Some((lo, hi)) = pair else {
                report.push(at, "must be a [lower, upper] pair of numbers");
                continue;
            };
            if lo < 0.0 {
                report.push(at.clone(), format!("lower bound {lo} is negative"));
                continue;
            }
            if i == j && (lo != 0.0 || hi != 0.0) {
                report.push(
                    at,
                    format!("diagonal entry is [{lo}, {hi}], must be [0, 0]"),
                );
                continue;
            }
            match RoughNumber::new(lo, hi) {
                Ok(r) => parsed.push(r),
                Err(e) => report.push(at, e.to_string()),
            }
        }
        out.push(parsed);
    }
    if report.len() != before {
        return None;
    }
    RoughMatrix::from_rows(out)
        .map_err(|e| report.push("rough_group", e.to_string()))
        .ok()
}

/// Serializes a bundle with one matrix row per line.
pub fn write_bundle(bundle: &StudyBundle) -> String {
    fn js<T: Serialize + ?Sized>(v: &T) -> String {
        serde_json::to_string(v).expect("bundle values serialize")
    }
    let mut out = String::from("{\n");
    if let Some(name) = &bundle.name {
        let _ = writeln!(out, "  \"name\": {},", js(name));
    }
    let _ = writeln!(
        out,
        "  \"scale\": {{\"min\": {}, \"max\": {}}},",
        bundle.scale.min, bundle.scale.max
    );

    out.push_str("  \"criteria\": [");
    let items: Vec<String> = bundle
        .criteria
        .iter()
        .map(|c| format!("\n    {}", js(c)))
        .collect();
    out.push_str(&items.join(","));
    out.push_str(if items.is_empty() { "],\n" } else { "\n  ],\n" });

    out.push_str("  \"respondents\": [");
    let items: Vec<String> = bundle
        .respondents
        .iter()
        .map(|r| format!("\n    {}", js(r)))
        .collect();
    out.push_str(&items.join(","));
    out.push_str(if items.is_empty() { "]" } else { "\n  ]" });

    match &bundle.data {
        StudyData::Raw(matrices) => {
            out.push_str(",\n  \"matrices\": {");
            let items: Vec<String> = matrices
                .iter()
                .map(|m| {
                    format!(
                        "\n    {}: {}",
                        js(m.expert()),
                        rows_block(&m.to_ints(), "    ")
                    )
                })
                .collect();
            out.push_str(&items.join(","));
            out.push_str(if items.is_empty() { "}" } else { "\n  }" });
        }
        StudyData::Aggregate(group) => {
            let _ = write!(
                out,
                ",\n  \"rough_group\": {}",
                rows_block(&group.to_rows(), "  ")
            );
        }
    }

    if !bundle.defaults.is_empty() {
        let mut d = Map::new();
        let d_ = &bundle.defaults;
        if let Some(t) = d_.tau {
            d.insert("tau".into(), t.as_str().into());
        }
        if let Some(e) = d_.envelope {
            d.insert("envelope".into(), e.as_str().into());
        }
        if let Some(c) = d_.crispify {
            d.insert("crispify".into(), c.as_str().into());
        }
        if let Some(t) = d_.threshold {
            d.insert("threshold".into(), t.to_string().into());
        }
        let _ = write!(out, ",\n  \"analysis\": {}", js(&d));
    }
    out.push_str("\n}\n");
    out
}

fn rows_block<T: Serialize>(rows: &[Vec<T>], indent: &str) -> String {
    if rows.is_empty() {
        return "[]".into();
    }
    let lines: Vec<String> = rows
        .iter()
        .map(|r| {
            format!(
                "{indent}  {}",
                serde_json::to_string(r).expect("rows serialize")
            )
        })
        .collect();
    format!("[\n{}\n{indent}]", lines.join(",\n"))
}

/// Expert matrix read from CSV together with the criterion order of its header.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpertCsv {
    pub criteria: Vec<String>,
    pub matrix: ExpertMatrix,
}

/// Reads an expert matrix CSV.
///
/// The header row lists criterion ids, optionally preceded by one corner
/// cell. Each following row is `<row-id>,<v1>,...,<vn>` with row ids in
/// header order. Locations in diagnostics are 1-based `line L, column C`.
pub fn parse_expert_csv(
    bytes: &[u8],
    expert: &str,
    scale: &Scale,
) -> Result<ExpertCsv, ValidationReport> {
    let mut report = ValidationReport::default();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut records = Vec::new();
    for rec in reader.byte_records() {
        match rec {
            Ok(r) => records.push(r),
            Err(e) => {
                report.push("document", format!("malformed CSV: {e}"));
                return Err(report);
            }
        }
    }
    let mut lines: Vec<(u64, Vec<String>)> = Vec::new();
    for rec in &records {
        let line = rec.position().map_or(0, |p| p.line());
        let mut fields = Vec::with_capacity(rec.len());
        for (c, f) in rec.iter().enumerate() {
            match std::str::from_utf8(f) {
                Ok(s) => fields.push(s.to_string()),
                Err(_) => {
                    report.push(format!("line {line}, column {}", c + 1), "not valid UTF-8");
                    fields.push(String::new());
                }
            }
        }
        if fields.iter().all(String::is_empty) {
            continue;
        }
        lines.push((line, fields));
    }
    let Some(((_, header), body)) = lines.split_first() else {
        report.push("document", "empty file");
        return Err(report);
    };
    let n = body.len();
    let offset = if header.len() == n + 1 {
        1
    } else if header.len() == n {
        0
    } else {
        report.push(
            "line 1",
            format!(
                "header has {} criterion ids but there are {n} data rows (matrix must be square)",
                header.len()
            ),
        );
        return Err(report);
    };
    let criteria: Vec<String> = header[offset..].to_vec();
    let mut seen = HashSet::new();
    for (c, id) in criteria.iter().enumerate() {
        if id.is_empty() {
            report.push(
                format!("line 1, column {}", c + offset + 1),
                "empty criterion id",
            );
        } else if !seen.insert(id) {
            report.push(
                format!("line 1, column {}", c + offset + 1),
                format!("duplicate id `{id}`"),
            );
        }
    }
    let mut rows = Vec::with_capacity(n);
    for (i, (line, fields)) in body.iter().enumerate() {
        if fields.len() != n + 1 {
            report.push(
                format!("line {line}"),
                format!(
                    "has {} fields, expected row id plus {n} values",
                    fields.len()
                ),
            );
            continue;
        }
        if fields[0] != criteria[i] {
            report.push(
                format!("line {line}, column 1"),
                format!(
                    "row id `{}` does not match header id `{}`",
                    fields[0], criteria[i]
                ),
            );
        }
        let mut row = Vec::with_capacity(n);
        for (j, cell) in fields[1..].iter().enumerate() {
            let at = format!(
                "line {line}, column {} ({} -> {})",
                j + 2,
                criteria[i],
                criteria[j]
            );
            let Ok(value) = cell.parse::<i64>() else {
                report.push(at, format!("`{cell}` is not an integer"));
                continue;
            };
            match scale.judgment(value) {
                Ok(jd) if i == j && jd != Judgment::ZERO => {
                    report.push(at, format!("diagonal entry is {value}, must be 0"))
                }
                Ok(jd) => row.push(jd),
                Err(_) => report.push(
                    at,
                    format!("value {value} outside scale {}..={}", scale.min, scale.max),
                ),
            }
        }
        rows.push(row);
    }
    if !report.is_empty() {
        return Err(report);
    }
    match ExpertMatrix::new(expert, rows) {
        Ok(matrix) => Ok(ExpertCsv { criteria, matrix }),
        Err(e) => {
            report.push("document", e.to_string());
            Err(report)
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
