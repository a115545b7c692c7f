//! Rough DEMATEL: from expert judgment matrices to prominence, relation,
//! weights and cause/effect groups.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::crisp::CrispDirectMatrix;
use crate::error::{Bound, Error, Result};
use crate::linalg::{self, Matrix};
use crate::rough::{self, average_rough, Judgment, JudgmentSet, RoughNumber, RoughSequence, Scale};

/// One expert's square judgment matrix with a zero diagonal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpertMatrix {
    expert: String,
    n: usize,
    values: Vec<Judgment>,
}

impl ExpertMatrix {
    pub fn new(expert: impl Into<String>, rows: Vec<Vec<Judgment>>) -> Result<Self> {
        let expert = expert.into();
        let n = rows.len();
        let mut values = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Shape(format!(
                    "expert {expert}: row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            if row[i] != Judgment::ZERO {
                return Err(Error::invalid(format!(
                    "expert {expert}: diagonal entry ({i},{i}) is {}, must be 0",
                    row[i]
                )));
            }
            values.extend(row);
        }
        Ok(ExpertMatrix { expert, n, values })
    }

    /// Builds a matrix from raw integers checked against `scale`.
    pub fn from_ints(expert: impl Into<String>, rows: &[Vec<i64>], scale: &Scale) -> Result<Self> {
        let rows = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&v| scale.judgment(v))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        ExpertMatrix::new(expert, rows)
    }

    pub fn expert(&self) -> &str {
        &self.expert
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Judgment {
        self.values[i * self.n + j]
    }

    pub fn to_ints(&self) -> Vec<Vec<u8>> {
        self.values
            .chunks(self.n.max(1))
            .take(self.n)
            .map(|r| r.iter().map(|j| j.value()).collect())
            .collect()
    }

    pub fn to_crisp(&self) -> CrispDirectMatrix {
        let m = Matrix::from_fn(self.n, |i, j| f64::from(self.get(i, j).value()));
        CrispDirectMatrix::new(m).expect("expert matrices are valid crisp matrices")
    }
}

/// Per-cell judgment multisets pooled from all experts.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupJudgments {
    n: usize,
    experts: usize,
    cells: Vec<JudgmentSet>,
}

impl GroupJudgments {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn experts(&self) -> usize {
        self.experts
    }

    pub fn cell(&self, i: usize, j: usize) -> &JudgmentSet {
        &self.cells[i * self.n + j]
    }
}

pub fn collect_group(matrices: &[ExpertMatrix]) -> Result<GroupJudgments> {
    if matrices.len() < 2 {
        return Err(Error::InsufficientExperts(matrices.len()));
    }
    let n = matrices[0].n;
    if let Some(bad) = matrices.iter().find(|m| m.n != n) {
        return Err(Error::Shape(format!(
            "expert {} has a {1}x{1} matrix, expected {n}x{n}",
            bad.expert, bad.n
        )));
    }
    let zero = JudgmentSet::new(vec![Judgment::ZERO])?;
    let mut cells = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                cells.push(zero.clone());
            } else {
                cells.push(JudgmentSet::new(
                    matrices.iter().map(|m| m.get(i, j)).collect(),
                )?);
            }
        }
    }
    Ok(GroupJudgments {
        n,
        experts: matrices.len(),
        cells,
    })
}

/// Square matrix of rough numbers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "Vec<Vec<RoughNumber>>", try_from = "Vec<Vec<RoughNumber>>")]
pub struct RoughMatrix {
    n: usize,
    entries: Vec<RoughNumber>,
}

impl RoughMatrix {
    pub fn from_rows(rows: Vec<Vec<RoughNumber>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::Shape(format!(
                    "rough row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            entries.extend(row);
        }
        Ok(RoughMatrix { n, entries })
    }

    /// Pairs two bound matrices; fails if any lower exceeds its upper.
    pub fn from_bounds(lower: &Matrix, upper: &Matrix) -> Result<Self> {
        if lower.dim() != upper.dim() {
            return Err(Error::Shape("bound matrices differ in size".into()));
        }
        let entries = lower
            .iter()
            .zip(upper.iter())
            .map(|(l, u)| RoughNumber::new(l, u))
            .collect::<Result<Vec<_>>>()?;
        Ok(RoughMatrix {
            n: lower.dim(),
            entries,
        })
    }

    pub fn from_point(m: &Matrix) -> Self {
        RoughMatrix {
            n: m.dim(),
            entries: m.iter().map(RoughNumber::point).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> RoughNumber {
        self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[RoughNumber] {
        &self.entries
    }

    pub fn to_rows(&self) -> Vec<Vec<RoughNumber>> {
        self.entries
            .chunks(self.n.max(1))
            .take(self.n)
            .map(<[RoughNumber]>::to_vec)
            .collect()
    }

    pub fn bound(&self, bound: Bound) -> Matrix {
        Matrix::from_fn(self.n, |i, j| {
            let r = self.get(i, j);
            match bound {
                Bound::Lower => r.lower(),
                Bound::Upper => r.upper(),
            }
        })
    }

    pub fn lower_matrix(&self) -> Matrix {
        self.bound(Bound::Lower)
    }

    pub fn upper_matrix(&self) -> Matrix {
        self.bound(Bound::Upper)
    }

    /// Componentwise sum of every row.
    pub fn row_sums(&self) -> Vec<RoughNumber> {
        (0..self.n)
            .map(|i| (0..self.n).fold(RoughNumber::ZERO, |acc, j| acc + self.get(i, j)))
            .collect()
    }

    /// Componentwise sum of every column.
    pub fn column_sums(&self) -> Vec<RoughNumber> {
        (0..self.n)
            .map(|j| (0..self.n).fold(RoughNumber::ZERO, |acc, i| acc + self.get(i, j)))
            .collect()
    }

    pub fn permuted(&self, perm: &[usize]) -> RoughMatrix {
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(self.get(perm[i], perm[j]));
            }
        }
        RoughMatrix { n, entries }
    }
}

impl From<RoughMatrix> for Vec<Vec<RoughNumber>> {
    fn from(m: RoughMatrix) -> Self {
        m.to_rows()
    }
}

impl TryFrom<Vec<Vec<RoughNumber>>> for RoughMatrix {
    type Error = Error;

    fn try_from(rows: Vec<Vec<RoughNumber>>) -> Result<Self> {
        RoughMatrix::from_rows(rows)
    }
}

/// Converts every judgment in a cell to a rough number against the cell's
/// multiset and averages them. Diagonal cells stay `[0, 0]`.
pub fn rough_group_matrix(g: &GroupJudgments) -> RoughMatrix {
    let n = g.n;
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                entries.push(RoughNumber::ZERO);
                continue;
            }
            let seq = RoughSequence::from_judgments(g.cell(i, j));
            entries.push(average_rough(&seq).expect("cells hold at least two judgments"));
        }
    }
    RoughMatrix { n, entries }
}

/// How the rough group matrix is scaled before the total-relation step.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TauStrategy {
    /// Largest row sum of upper bounds.
    MaxUpperSum,
    /// Largest row sum of lower plus upper bounds.
    #[default]
    MaxTotalSum,
}

impl TauStrategy {
    pub fn as_str(self) -> &'static str {
        match self {
            TauStrategy::MaxUpperSum => "max-upper-sum",
            TauStrategy::MaxTotalSum => "max-total-sum",
        }
    }
}

impl fmt::Display for TauStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TauStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max-upper-sum" => Ok(TauStrategy::MaxUpperSum),
            "max-total-sum" => Ok(TauStrategy::MaxTotalSum),
            other => Err(Error::invalid(format!(
                "unknown tau strategy `{other}` (expected max-upper-sum or max-total-sum)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedRough {
    pub tau: f64,
    pub matrix: RoughMatrix,
}

pub fn tau(r: &RoughMatrix, strategy: TauStrategy) -> f64 {
    r.row_sums()
        .into_iter()
        .map(|s| match strategy {
            TauStrategy::MaxUpperSum => s.upper(),
            TauStrategy::MaxTotalSum => s.lower() + s.upper(),
        })
        .fold(0.0, f64::max)
}

pub fn normalize_rough(r: &RoughMatrix, strategy: TauStrategy) -> Result<NormalizedRough> {
    let tau = tau(r, strategy);
    if tau <= 0.0 {
        return Err(Error::Degenerate(
            "rough group matrix has no nonzero upper bound".into(),
        ));
    }
    let entries = r
        .entries
        .iter()
        .map(|e| e.scale(1.0 / tau))
        .collect::<Result<Vec<_>>>()?;
    Ok(NormalizedRough {
        tau,
        matrix: RoughMatrix { n: r.n, entries },
    })
}

/// Applies `T = D (I - D)^-1` to the lower and upper bound matrices independently.
pub fn rough_total_relation(rn: &RoughMatrix) -> Result<RoughMatrix> {
    let lower = linalg::total_relation_for(&rn.lower_matrix(), Bound::Lower)?;
    let upper = linalg::total_relation_for(&rn.upper_matrix(), Bound::Upper)?;
    // Entrywise monotone in exact arithmetic; absorb last-bit rounding only.
    let lower = Matrix::from_fn(rn.n, |i, j| {
        let (l, u) = (lower[(i, j)], upper[(i, j)]);
        if l > u && l - u <= 1e-12 * u.abs().max(1.0) {
            u
        } else {
            l
        }
    });
    RoughMatrix::from_bounds(&lower, &upper)
}

/// Envelope used when turning the row- and column-sum intervals into crisp values.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrispEnvelope {
    /// Row sums against their own envelope, column sums against theirs.
    #[default]
    Separate,
    /// Both lists against one shared envelope.
    Joint,
}

impl CrispEnvelope {
    pub fn as_str(self) -> &'static str {
        match self {
            CrispEnvelope::Separate => "separate",
            CrispEnvelope::Joint => "joint",
        }
    }
}

impl fmt::Display for CrispEnvelope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CrispEnvelope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "separate" => Ok(CrispEnvelope::Separate),
            "joint" => Ok(CrispEnvelope::Joint),
            other => Err(Error::invalid(format!(
                "unknown envelope `{other}` (expected separate or joint)"
            ))),
        }
    }
}

/// Interval row sums `X`, column sums `Y`, and their crisp values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoughScores {
    pub row_sums: Vec<RoughNumber>,
    pub column_sums: Vec<RoughNumber>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

pub fn rough_sums(t: &RoughMatrix, envelope: CrispEnvelope) -> Result<RoughScores> {
    let row_sums = t.row_sums();
    let column_sums = t.column_sums();
    let (x, y) = match envelope {
        CrispEnvelope::Separate => (
            rough::crisp_convert(&row_sums)?,
            rough::crisp_convert(&column_sums)?,
        ),
        CrispEnvelope::Joint => {
            let all = row_sums.iter().chain(&column_sums);
            let lo = all.clone().map(|r| r.lower()).fold(f64::INFINITY, f64::min);
            let hi = all.map(|r| r.upper()).fold(f64::NEG_INFINITY, f64::max);
            (
                rough::crisp_convert_in(&row_sums, lo, hi),
                rough::crisp_convert_in(&column_sums, lo, hi),
            )
        }
    };
    Ok(RoughScores {
        row_sums,
        column_sums,
        x,
        y,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProminenceRelation {
    pub prominence: f64,
    pub relation: f64,
}

pub fn prominence_relation(x: &[f64], y: &[f64]) -> Vec<ProminenceRelation> {
    x.iter()
        .zip(y)
        .map(|(&x, &y)| ProminenceRelation {
            prominence: x + y,
            relation: x - y,
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Weight {
    /// `sqrt(m^2 + n^2)`.
    pub importance: f64,
    /// Importance divided by the total importance.
    pub weight: f64,
    /// 1 is most important.
    pub rank: usize,
    /// Another criterion has exactly the same importance.
    pub tied: bool,
}

pub fn weights(results: &[ProminenceRelation]) -> Result<Vec<Weight>> {
    if results.is_empty() {
        return Err(Error::invalid("no criteria to weight"));
    }
    let importance: Vec<f64> = results
        .iter()
        .map(|r| r.prominence.hypot(r.relation))
        .collect();
    let total: f64 = importance.iter().sum();
    if !(total.is_finite() && total > 0.0) {
        return Err(Error::Degenerate(format!(
            "total importance is {total}; weights are undefined"
        )));
    }
    let mut order: Vec<usize> = (0..importance.len()).collect();
    // Stable: equal importance keeps input order.
    order.sort_by(|&a, &b| importance[b].total_cmp(&importance[a]));
    let mut rank = vec![0; importance.len()];
    for (pos, &i) in order.iter().enumerate() {
        rank[i] = pos + 1;
    }
    Ok(importance
        .iter()
        .enumerate()
        .map(|(i, &w)| Weight {
            importance: w,
            weight: w / total,
            rank: rank[i],
            tied: importance
                .iter()
                .enumerate()
                .any(|(k, &other)| k != i && other == w),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Group {
    Cause,
    Effect,
    Neutral,
}

impl Group {
    pub fn of(relation: f64) -> Group {
        if relation > 0.0 {
            Group::Cause
        } else if relation < 0.0 {
            Group::Effect
        } else {
            Group::Neutral
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Group::Cause => "cause",
            Group::Effect => "effect",
            Group::Neutral => "neutral",
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub fn classify(results: &[ProminenceRelation]) -> Vec<Group> {
    results.iter().map(|r| Group::of(r.relation)).collect()
}

/// Final per-criterion outcome of an analysis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: String,
    pub x: f64,
    pub y: f64,
    pub prominence: f64,
    pub relation: f64,
    pub importance: f64,
    pub weight: f64,
    pub rank: usize,
    pub tied: bool,
    pub group: Group,
}

/// Prominence, relation, weights, ranks and groups from crisp row/column values.
pub fn evaluate(ids: &[String], x: &[f64], y: &[f64]) -> Result<Vec<CriterionResult>> {
    if ids.len() != x.len() || x.len() != y.len() {
        return Err(Error::Shape(format!(
            "{} ids, {} x values, {} y values",
            ids.len(),
            x.len(),
            y.len()
        )));
    }
    let pr = prominence_relation(x, y);
    let w = weights(&pr)?;
    let groups = classify(&pr);
    Ok(ids
        .iter()
        .enumerate()
        .map(|(i, id)| CriterionResult {
            id: id.clone(),
            x: x[i],
            y: y[i],
            prominence: pr[i].prominence,
            relation: pr[i].relation,
            importance: w[i].importance,
            weight: w[i].weight,
            rank: w[i].rank,
            tied: w[i].tied,
            group: groups[i],
        })
        .collect())
}
