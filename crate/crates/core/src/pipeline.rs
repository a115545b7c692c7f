//! End-to-end analysis runs.

use serde::{Deserialize, Serialize};

use crate::dematel::{
    collect_group, evaluate, normalize_rough, rough_group_matrix, rough_sums, rough_total_relation,
    CrispEnvelope, CriterionResult, ExpertMatrix, RoughMatrix, RoughScores, TauStrategy,
};
use crate::error::{Error, Result};
use crate::network::{
    causal_diagram, crispify_total, extract_network, threshold, CausalPoint, CrispInfluenceMatrix,
    CrispifyMode, InfluenceNetwork, ThresholdMode,
};

/// Every knob that affects an analysis. Echoed verbatim into reports.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub tau: TauStrategy,
    pub envelope: CrispEnvelope,
    pub crispify: CrispifyMode,
    pub threshold: ThresholdMode,
    /// Count diagonal entries in the threshold statistics and allow self-loops.
    #[serde(default)]
    pub include_diagonal: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Analysis {
    pub config: AnalysisConfig,
    pub ids: Vec<String>,
    pub group: RoughMatrix,
    pub tau: f64,
    pub normalized: RoughMatrix,
    pub total: RoughMatrix,
    pub scores: RoughScores,
    pub results: Vec<CriterionResult>,
    pub influence: CrispInfluenceMatrix,
    pub threshold: f64,
    pub network: InfluenceNetwork,
    pub causal: Vec<CausalPoint>,
}

/// Runs the full pipeline from raw expert matrices.
pub fn analyze_experts(
    ids: &[String],
    experts: &[ExpertMatrix],
    config: &AnalysisConfig,
) -> Result<Analysis> {
    let group = rough_group_matrix(&collect_group(experts)?);
    analyze_group(ids, group, config)
}

/// Runs the pipeline from an already aggregated rough group matrix.
pub fn analyze_group(
    ids: &[String],
    group: RoughMatrix,
    config: &AnalysisConfig,
) -> Result<Analysis> {
    let n = group.dim();
    if n < 2 {
        return Err(Error::invalid(format!(
            "analysis needs at least 2 criteria, got {n}"
        )));
    }
    if ids.len() != n {
        return Err(Error::Shape(format!(
            "{} criterion ids for a {n}x{n} matrix",
            ids.len()
        )));
    }
    let normalized = normalize_rough(&group, config.tau)?;
    let total = rough_total_relation(&normalized.matrix)?;
    let scores = rough_sums(&total, config.envelope)?;
    let results = evaluate(ids, &scores.x, &scores.y)?;
    let influence = crispify_total(&total, config.crispify);
    let q = threshold(&influence, config.threshold, config.include_diagonal)?;
    let network = extract_network(&influence, q, ids, config.include_diagonal)?;
    let causal = causal_diagram(&results);
    Ok(Analysis {
        config: *config,
        ids: ids.to_vec(),
        group,
        tau: normalized.tau,
        normalized: normalized.matrix,
        total,
        scores,
        results,
        influence,
        threshold: q,
        network,
        causal,
    })
}
