//! Crisp influence matrix, significance threshold and the thresholded
//! influence network.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dematel::{CriterionResult, Group, RoughMatrix};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::rough;

/// How each rough total-relation entry becomes a single number.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CrispifyMode {
    /// `(lower + upper) / 2`.
    #[default]
    Midpoint,
    /// Normalize/blend/denormalize over the envelope of every entry of the matrix.
    GlobalCrisp,
}

impl CrispifyMode {
    pub fn as_str(self) -> &'static str {
        match self {
            CrispifyMode::Midpoint => "midpoint",
            CrispifyMode::GlobalCrisp => "global-crisp",
        }
    }
}

impl fmt::Display for CrispifyMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CrispifyMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "midpoint" => Ok(CrispifyMode::Midpoint),
            "global-crisp" => Ok(CrispifyMode::GlobalCrisp),
            other => Err(Error::invalid(format!(
                "unknown crispify mode `{other}` (expected midpoint or global-crisp)"
            ))),
        }
    }
}

pub type CrispInfluenceMatrix = Matrix;

pub fn crispify_total(t: &RoughMatrix, mode: CrispifyMode) -> CrispInfluenceMatrix {
    let n = t.dim();
    match mode {
        CrispifyMode::Midpoint => Matrix::from_fn(n, |i, j| t.get(i, j).midpoint()),
        CrispifyMode::GlobalCrisp => {
            let values = rough::crisp_convert(t.entries()).unwrap_or_default();
            Matrix::from_fn(n, |i, j| values[i * n + j])
        }
    }
}

/// Cutoff rule for significant edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum ThresholdMode {
    /// Mean plus `k` population standard deviations.
    MeanSigma {
        k: f64,
    },
    Fixed {
        q: f64,
    },
}

impl Default for ThresholdMode {
    fn default() -> Self {
        ThresholdMode::MeanSigma { k: 1.0 }
    }
}

impl fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdMode::MeanSigma { k } => write!(f, "mean-sigma:{k}"),
            ThresholdMode::Fixed { q } => write!(f, "fixed:{q}"),
        }
    }
}

impl FromStr for ThresholdMode {
    type Err = Error;

    /// Parses `mean-sigma:<k>`, `mean-sigma`, or `fixed:<q>`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = match s.split_once(':') {
            Some((kind, arg)) => (kind, Some(arg)),
            None => (s, None),
        };
        let number = |a: &str| {
            a.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::invalid(format!("threshold argument `{a}` is not a number")))
        };
        match (kind, arg) {
            ("mean-sigma", None) => Ok(ThresholdMode::default()),
            ("mean-sigma", Some(a)) => Ok(ThresholdMode::MeanSigma { k: number(a)? }),
            ("fixed", Some(a)) => Ok(ThresholdMode::Fixed { q: number(a)? }),
            _ => Err(Error::invalid(format!(
                "unknown threshold `{s}` (expected mean-sigma:<k> or fixed:<q>)"
            ))),
        }
    }
}

/// Threshold `q` over the off-diagonal entries, or all entries when
/// `include_diagonal` is set.
pub fn threshold(
    tstar: &CrispInfluenceMatrix,
    mode: ThresholdMode,
    include_diagonal: bool,
) -> Result<f64> {
    if tstar.dim() < 2 {
        return Err(Error::invalid("threshold needs at least 2 criteria"));
    }
    match mode {
        ThresholdMode::Fixed { q } if q < 0.0 || !q.is_finite() => Err(Error::invalid(format!(
            "fixed threshold {q} must be nonnegative"
        ))),
        ThresholdMode::Fixed { q } => Ok(q),
        ThresholdMode::MeanSigma { k } => {
            let values: Vec<f64> = if include_diagonal {
                tstar.iter().collect()
            } else {
                tstar.off_diagonal().collect()
            };
            let (mean, sd) = mean_and_population_sd(&values);
            Ok(mean + k * sd)
        }
    }
}

fn mean_and_population_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub strength: f64,
}

/// Criteria as nodes, influences at or above `q` as directed edges.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InfluenceNetwork {
    pub nodes: Vec<String>,
    pub edges: Vec<Edge>,
    pub threshold: f64,
    /// Diagonal entries that reached the threshold; not part of `edges`
    /// unless self-loops were requested.
    pub self_influence_over_threshold: Vec<usize>,
}

impl InfluenceNetwork {
    pub fn outgoing(&self, node: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.source == node)
    }

    pub fn incoming(&self, node: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.target == node)
    }
}

pub fn extract_network(
    tstar: &CrispInfluenceMatrix,
    q: f64,
    ids: &[String],
    include_self_loops: bool,
) -> Result<InfluenceNetwork> {
    let n = tstar.dim();
    if ids.len() != n {
        return Err(Error::Shape(format!(
            "{} ids for a {n}x{n} matrix",
            ids.len()
        )));
    }
    let mut edges = Vec::new();
    let mut self_influence = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let strength = tstar[(i, j)];
            if strength < q {
                continue;
            }
            if i == j {
                self_influence.push(i);
                if !include_self_loops {
                    continue;
                }
            }
            edges.push(Edge {
                source: i,
                target: j,
                strength,
            });
        }
    }
    Ok(InfluenceNetwork {
        nodes: ids.to_vec(),
        edges,
        threshold: q,
        self_influence_over_threshold: self_influence,
    })
}

/// A criterion positioned by prominence (horizontal) and relation (vertical).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CausalPoint {
    pub id: String,
    pub prominence: f64,
    pub relation: f64,
    pub group: Group,
}

pub fn causal_diagram(results: &[CriterionResult]) -> Vec<CausalPoint> {
    results
        .iter()
        .map(|r| CausalPoint {
            id: r.id.clone(),
            prominence: r.prominence,
            relation: r.relation,
            group: r.group,
        })
        .collect()
}
