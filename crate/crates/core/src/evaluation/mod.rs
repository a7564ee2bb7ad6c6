//! Offline evaluation: accuracy, cross-validation and grid search,
//! popularity bias, leave-one-out hit rate, and the survey statistics.

mod bias;
mod cv;
mod hit_rate;
mod stats;

pub use bias::{cohort_recommendations, popular_items, popularity_share, sample_cohort};
pub use cv::{
    cross_validate, fold_assignment, grid_search, holdout_rmse, kfold_cv, CvReport, GridRow,
    GridSearchResult, HyperGrid,
};
pub use hit_rate::{hit_rate_at_k, hit_rate_with, HitRateReport};
pub use stats::{histogram, normal_cdf, normal_sf, uniform_edges, z_test_one_sided, Histogram, ZTest};

use serde::Serialize;

use crate::error::{Error, Result};

/// Root mean square error.
pub fn rmse(predictions: &[f64], truths: &[f64]) -> Result<f64> {
    if predictions.len() != truths.len() {
        return Err(Error::invalid(format!(
            "{} predictions for {} truths",
            predictions.len(),
            truths.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::invalid("rmse of an empty sample"));
    }
    let sse: f64 = predictions
        .iter()
        .zip(truths)
        .map(|(p, t)| (p - t).powi(2))
        .sum();
    Ok((sse / predictions.len() as f64).sqrt())
}

/// Metric bundle emitted by the reporting commands. Metrics that were not
/// computed are omitted from serialized output.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EvalReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rmse: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub fold_rmse: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hit_rate_at_k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub popularity_share: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram: Option<Histogram>,
}

impl EvalReport {
    /// Checks value ranges: RMSE non-negative, rates and shares in [0, 1],
    /// p in (0, 1).
    pub fn check(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::invalid(format!("{what} out of range: {v}")));
        if let Some(r) = self.rmse.filter(|r| !(*r >= 0.0)) {
            return bad("rmse", r);
        }
        for (name, v) in [("hit rate", self.hit_rate_at_k), ("popularity share", self.popularity_share)] {
            if let Some(v) = v.filter(|v| !(0.0..=1.0).contains(v)) {
                return bad(name, v);
            }
        }
        if let Some(p) = self.p.filter(|p| !(*p > 0.0 && *p < 1.0)) {
            return bad("p", p);
        }
        Ok(())
    }
}
