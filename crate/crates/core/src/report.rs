//! Result tables, graph files, the full JSON report and the reproduction
//! deviation ledger.
//!
//! Every renderer is a pure function of its input, so equal reports give
//! byte-identical files.

use serde::Serialize;

use crate::dematel::{evaluate, CrispEnvelope, CriterionResult, RoughMatrix, TauStrategy};
use crate::error::Result;
use crate::linalg::{self, Matrix};
use crate::network::{CausalPoint, CrispifyMode, InfluenceNetwork, ThresholdMode};
use crate::pipeline::Analysis;
use crate::published;
use crate::rough::{crisp_convert, RoughNumber};

/// Settings needed to rerun an analysis bit-identically.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub tau_strategy: TauStrategy,
    pub tau: f64,
    pub envelope: CrispEnvelope,
    pub crispify: CrispifyMode,
    pub threshold_mode: ThresholdMode,
    pub k: Option<f64>,
    pub q: f64,
    pub include_diagonal: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Intermediates {
    pub group: RoughMatrix,
    pub normalized: RoughMatrix,
    pub total: RoughMatrix,
    pub row_sums: Vec<RoughNumber>,
    pub column_sums: Vec<RoughNumber>,
    pub influence: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<ConfigEcho>,
    pub criteria: Vec<String>,
    pub results: Vec<CriterionResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub intermediates: Option<Intermediates>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub network: Option<InfluenceNetwork>,
    pub causal: Vec<CausalPoint>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub deviations: Vec<DeviationEntry>,
}

impl AnalysisReport {
    pub fn from_analysis(a: &Analysis, name: Option<String>) -> Self {
        let k = match a.config.threshold {
            ThresholdMode::MeanSigma { k } => Some(k),
            ThresholdMode::Fixed { .. } => None,
        };
        AnalysisReport {
            name,
            config: Some(ConfigEcho {
                tau_strategy: a.config.tau,
                tau: a.tau,
                envelope: a.config.envelope,
                crispify: a.config.crispify,
                threshold_mode: a.config.threshold,
                k,
                q: a.threshold,
                include_diagonal: a.config.include_diagonal,
            }),
            criteria: a.ids.clone(),
            results: a.results.clone(),
            intermediates: Some(Intermediates {
                group: a.group.clone(),
                normalized: a.normalized.clone(),
                total: a.total.clone(),
                row_sums: a.scores.row_sums.clone(),
                column_sums: a.scores.column_sums.clone(),
                influence: a.influence.clone(),
            }),
            network: Some(a.network.clone()),
            causal: a.causal.clone(),
            deviations: Vec::new(),
        }
    }

    /// Report holding only per-criterion results, without a matrix run.
    pub fn from_results(results: Vec<CriterionResult>) -> Self {
        AnalysisReport {
            name: None,
            config: None,
            criteria: results.iter().map(|r| r.id.clone()).collect(),
            causal: crate::network::causal_diagram(&results),
            results,
            intermediates: None,
            network: None,
            deviations: Vec::new(),
        }
    }
}

/// Four fractional digits, ties to even on the exact binary value.
pub fn fmt4(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::CRLF)
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

/// `criterion,X,Y,X+Y,X-Y,group`
pub fn render_prominence_csv(results: &[CriterionResult]) -> Vec<u8> {
    csv_bytes(
        &["criterion", "X", "Y", "X+Y", "X-Y", "group"],
        results.iter().map(|r| {
            vec![
                r.id.clone(),
                fmt4(r.x),
                fmt4(r.y),
                fmt4(r.prominence),
                fmt4(r.relation),
                r.group.to_string(),
            ]
        }),
    )
}

/// `criterion,omega,W,rank,tied`
pub fn render_weights_csv(results: &[CriterionResult]) -> Vec<u8> {
    csv_bytes(
        &["criterion", "omega", "W", "rank", "tied"],
        results.iter().map(|r| {
            vec![
                r.id.clone(),
                fmt4(r.importance),
                fmt4(r.weight),
                r.rank.to_string(),
                r.tied.to_string(),
            ]
        }),
    )
}

/// `criterion,prominence,relation,group`
pub fn render_causal_csv(points: &[CausalPoint]) -> Vec<u8> {
    csv_bytes(
        &["criterion", "prominence", "relation", "group"],
        points.iter().map(|p| {
            vec![
                p.id.clone(),
                fmt4(p.prominence),
                fmt4(p.relation),
                p.group.to_string(),
            ]
        }),
    )
}

/// Full-precision JSON document.
pub fn render_json(report: &AnalysisReport) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(report).expect("report serializes");
    out.push(b'\n');
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RenderedTables {
    pub prominence_csv: Vec<u8>,
    pub weights_csv: Vec<u8>,
    pub causal_csv: Vec<u8>,
    pub json: Vec<u8>,
}

pub fn render_tables(report: &AnalysisReport) -> RenderedTables {
    RenderedTables {
        prominence_csv: render_prominence_csv(&report.results),
        weights_csv: render_weights_csv(&report.results),
        causal_csv: render_causal_csv(&report.causal),
        json: render_json(report),
    }
}

fn dot_id(id: &str) -> String {
    let mut s = String::with_capacity(id.len() + 2);
    s.push('"');
    for c in id.chars() {
        if c == '"' || c == '\\' {
            s.push('\\');
        }
        s.push(c);
    }
    s.push('"');
    s
}

/// Graphviz `digraph` with nodes and edges sorted by criterion id.
pub fn render_graph_dot(network: &InfluenceNetwork) -> Vec<u8> {
    let mut nodes: Vec<&str> = network.nodes.iter().map(String::as_str).collect();
    nodes.sort_unstable();
    let mut edges: Vec<_> = network
        .edges
        .iter()
        .map(|e| {
            (
                &network.nodes[e.source],
                &network.nodes[e.target],
                e.strength,
            )
        })
        .collect();
    edges.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

    let mut out = String::from("digraph influence {\n");
    out.push_str(&format!("  // threshold q = {:?}\n", network.threshold));
    for n in nodes {
        out.push_str(&format!("  {};\n", dot_id(n)));
    }
    for (s, t, w) in edges {
        out.push_str(&format!(
            "  {} -> {} [strength={:?}, label=\"{}\"];\n",
            dot_id(s),
            dot_id(t),
            w,
            fmt4(w)
        ));
    }
    out.push_str("}\n");
    out.into_bytes()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeviationStatus {
    Pass,
    Fail,
    NotComparable,
}

impl DeviationStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            DeviationStatus::Pass => "pass",
            DeviationStatus::Fail => "fail",
            DeviationStatus::NotComparable => "not-comparable",
        }
    }
}

/// One reconciled cell of a printed reference table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeviationEntry {
    pub table: String,
    pub cell: String,
    pub reference: f64,
    pub computed: f64,
    pub abs_diff: f64,
    pub tolerance: f64,
    pub status: DeviationStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl DeviationEntry {
    pub fn compare(
        table: &str,
        cell: String,
        reference: f64,
        computed: f64,
        tolerance: f64,
    ) -> Self {
        let abs_diff = (reference - computed).abs();
        DeviationEntry {
            table: table.into(),
            cell,
            reference,
            computed,
            abs_diff,
            tolerance,
            status: if abs_diff <= tolerance {
                DeviationStatus::Pass
            } else {
                DeviationStatus::Fail
            },
            note: None,
        }
    }

    pub fn not_comparable(
        table: &str,
        cell: String,
        reference: f64,
        computed: f64,
        note: &str,
    ) -> Self {
        DeviationEntry {
            table: table.into(),
            cell,
            reference,
            computed,
            abs_diff: (reference - computed).abs(),
            tolerance: f64::NAN,
            status: DeviationStatus::NotComparable,
            note: Some(note.into()),
        }
    }

    fn with_note(mut self, note: &str) -> Self {
        self.note = Some(note.into());
        self
    }
}

pub const TOL_NORMALIZED: f64 = 5e-4;
pub const TOL_TOTAL: f64 = 2e-3;
pub const TOL_SUMS: f64 = 1e-3;
pub const TOL_WEIGHTS: f64 = 1e-3;

const NOTE_SUMS: &str = "printed x is the column sum and printed y the row sum";
const NOTE_CRISP: &str =
    "printed crisp values are about three times any crisp conversion of the printed interval sums";

fn grid(g: &[[f64; 7]; 7]) -> Matrix {
    Matrix::from_fn(7, |i, j| g[i][j])
}

/// Reconciles a run on the shipped study against the printed tables.
///
/// `analysis` must come from the shipped bundle (seven criteria in the
/// published order).
pub fn deviation_ledger(analysis: &Analysis) -> Result<Vec<DeviationEntry>> {
    let ids = published::IDS;
    let mut out = Vec::new();

    let norm = &analysis.normalized;
    for i in 0..7 {
        for j in 0..7 {
            if i == j {
                continue;
            }
            let r = norm.get(i, j);
            let cell = |b: &str| format!("{}->{} {b}", ids[i], ids[j]);
            out.push(DeviationEntry::compare(
                "A3",
                cell("lower"),
                published::NORMALIZED_LOWER[i][j],
                r.lower(),
                TOL_NORMALIZED,
            ));
            out.push(DeviationEntry::compare(
                "A3",
                cell("upper"),
                published::NORMALIZED_UPPER[i][j],
                r.upper(),
                TOL_NORMALIZED,
            ));
        }
    }

    // Total relation of the printed normalized lower bounds.
    let t_lower = linalg::total_relation(&grid(&published::NORMALIZED_LOWER))?;
    for i in 0..7 {
        for j in 0..7 {
            out.push(DeviationEntry::compare(
                "A4",
                format!("{}->{} lower", ids[i], ids[j]),
                published::TOTAL_LOWER[i][j],
                t_lower[(i, j)],
                TOL_TOTAL,
            ));
        }
    }

    // Lower sums from the printed grid, upper sums from this run.
    let printed = grid(&published::TOTAL_LOWER);
    let (p_rows, p_cols) = (printed.row_sums(), printed.column_sums());
    let (rows, cols) = (&analysis.scores.row_sums, &analysis.scores.column_sums);
    for i in 0..published::SUMS_X.len() {
        let id = ids[i];
        out.push(
            DeviationEntry::compare(
                "A5",
                format!("{id} x lower"),
                published::SUMS_X[i][0],
                p_cols[i],
                TOL_SUMS,
            )
            .with_note(NOTE_SUMS),
        );
        out.push(
            DeviationEntry::compare(
                "A5",
                format!("{id} x upper"),
                published::SUMS_X[i][1],
                cols[i].upper(),
                TOL_SUMS,
            )
            .with_note(NOTE_SUMS),
        );
        out.push(
            DeviationEntry::compare(
                "A5",
                format!("{id} y lower"),
                published::SUMS_Y[i][0],
                p_rows[i],
                TOL_SUMS,
            )
            .with_note(NOTE_SUMS),
        );
        out.push(
            DeviationEntry::compare(
                "A5",
                format!("{id} y upper"),
                published::SUMS_Y[i][1],
                rows[i].upper(),
                TOL_SUMS,
            )
            .with_note(NOTE_SUMS),
        );
    }

    // Crisp conversion of the printed sums, and of this run's sums.
    let to_rn = |p: &[f64; 2]| RoughNumber::new(p[0], p[1]);
    let hand_x = crisp_convert(
        &published::SUMS_X
            .iter()
            .map(to_rn)
            .collect::<Result<Vec<_>>>()?,
    )?;
    let hand_y = crisp_convert(
        &published::SUMS_Y
            .iter()
            .map(to_rn)
            .collect::<Result<Vec<_>>>()?,
    )?;
    for i in 0..hand_x.len() {
        out.push(DeviationEntry::not_comparable(
            "A5->3",
            format!("{} X", ids[i]),
            published::CRISP_X[i],
            hand_x[i],
            NOTE_CRISP,
        ));
        out.push(DeviationEntry::not_comparable(
            "A5->3",
            format!("{} Y", ids[i]),
            published::CRISP_Y[i],
            hand_y[i],
            NOTE_CRISP,
        ));
    }
    for i in 0..7 {
        out.push(DeviationEntry::not_comparable(
            "3",
            format!("{} X", ids[i]),
            published::CRISP_X[i],
            analysis.scores.y[i],
            NOTE_CRISP,
        ));
        out.push(DeviationEntry::not_comparable(
            "3",
            format!("{} Y", ids[i]),
            published::CRISP_Y[i],
            analysis.scores.x[i],
            NOTE_CRISP,
        ));
    }

    // Internal consistency of the printed crisp table.
    for i in 0..7 {
        let (x, y) = (published::CRISP_X[i], published::CRISP_Y[i]);
        out.push(DeviationEntry::compare(
            "3",
            format!("{} X+Y", ids[i]),
            published::PROMINENCE[i],
            x + y,
            TOL_WEIGHTS,
        ));
        out.push(DeviationEntry::compare(
            "3",
            format!("{} X-Y", ids[i]),
            published::RELATION[i],
            x - y,
            TOL_WEIGHTS,
        ));
    }

    for r in weights_from_printed_crisp()? {
        let i = ids.iter().position(|id| *id == r.id).expect("published id");
        out.push(DeviationEntry::compare(
            "4",
            format!("{} omega", r.id),
            published::IMPORTANCE[i],
            r.importance,
            TOL_WEIGHTS,
        ));
        out.push(DeviationEntry::compare(
            "4",
            format!("{} W", r.id),
            published::WEIGHT[i],
            r.weight,
            TOL_WEIGHTS,
        ));
        out.push(DeviationEntry::compare(
            "4",
            format!("{} rank", r.id),
            published::RANK[i] as f64,
            r.rank as f64,
            0.0,
        ));
    }
    Ok(out)
}

/// Weights, ranks and groups computed from the printed crisp `X`, `Y`.
pub fn weights_from_printed_crisp() -> Result<Vec<CriterionResult>> {
    evaluate(&published::ids(), &published::CRISP_X, &published::CRISP_Y)
}

/// Whether a ledger has no failing comparable cell.
pub fn ledger_passes(entries: &[DeviationEntry]) -> bool {
    entries.iter().all(|e| e.status != DeviationStatus::Fail)
}

/// `table,cell,reference,computed,abs_diff,tolerance,status,note`
pub fn render_deviations_csv(entries: &[DeviationEntry]) -> Vec<u8> {
    let full = |v: f64| {
        if v.is_nan() {
            String::new()
        } else {
            format!("{v:?}")
        }
    };
    csv_bytes(
        &[
            "table",
            "cell",
            "reference",
            "computed",
            "abs_diff",
            "tolerance",
            "status",
            "note",
        ],
        entries.iter().map(|e| {
            vec![
                e.table.clone(),
                e.cell.clone(),
                fmt4(e.reference),
                full(e.computed),
                full(e.abs_diff),
                full(e.tolerance),
                e.status.as_str().into(),
                e.note.clone().unwrap_or_default(),
            ]
        }),
    )
}
