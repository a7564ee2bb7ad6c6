//! k-fold cross-validation and exhaustive grid search over SGD settings.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rmse;
use crate::error::{Error, Result};
use crate::ratings::{Dataset, RatingTriple};
use crate::svd::{predict_known, train, FactorModel, Hyperparams};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CvReport {
    pub fold_rmse: Vec<f64>,
    pub mean_rmse: f64,
    /// Held-out rows scored across all folds.
    pub evaluated: usize,
    /// Held-out rows whose player or champion never appeared in the fold's
    /// training part.
    pub skipped: usize,
}

/// Fold id of every row: rows are shuffled with `seed` and dealt round-robin,
/// so fold sizes differ by at most one.
pub fn fold_assignment(n_rows: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n_rows).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold = vec![0; n_rows];
    for (pos, &row) in order.iter().enumerate() {
        fold[row] = pos % folds.max(1);
    }
    fold
}

/// RMSE of clamped predictions on `test`, plus how many rows were skipped
/// because the model never saw their player or champion.
pub fn holdout_rmse(m: &FactorModel, test: &[RatingTriple]) -> Result<(Option<f64>, usize)> {
    let mut predictions = Vec::with_capacity(test.len());
    let mut truths = Vec::with_capacity(test.len());
    let mut skipped = 0;
    for t in test {
        if m.users().get(&t.player_id).is_none() || m.items().get(&t.champion_id).is_none() {
            skipped += 1;
            continue;
        }
        predictions.push(predict_known(m, &t.player_id, t.champion_id)?);
        truths.push(f64::from(t.rating));
    }
    if predictions.is_empty() {
        return Ok((None, skipped));
    }
    Ok((Some(rmse(&predictions, &truths)?), skipped))
}

/// Cross-validates an arbitrary fitting procedure.
pub fn cross_validate<F>(d: &Dataset, folds: usize, seed: u64, fit: F) -> Result<CvReport>
where
    F: Fn(&Dataset) -> Result<FactorModel> + Sync,
{
    if folds < 2 {
        return Err(Error::invalid("cross-validation needs at least 2 folds"));
    }
    if d.n_rows() < folds {
        return Err(Error::invalid(format!(
            "degenerate partition: {} rows cannot fill {folds} folds",
            d.n_rows()
        )));
    }
    let assignment = fold_assignment(d.n_rows(), folds, seed);
    let results: Vec<(f64, usize, usize)> = (0..folds)
        .into_par_iter()
        .map(|k| {
            let (mut train_rows, mut test_rows) = (Vec::new(), Vec::new());
            for (t, &f) in d.triples().iter().zip(&assignment) {
                if f == k {
                    test_rows.push(t.clone());
                } else {
                    train_rows.push(t.clone());
                }
            }
            let model = fit(&Dataset::from_triples(train_rows)?)?;
            let (score, skipped) = holdout_rmse(&model, &test_rows)?;
            let score = score.ok_or_else(|| {
                Error::invalid(format!(
                    "degenerate partition: no row of fold {k} has a known player and champion"
                ))
            })?;
            Ok((score, test_rows.len() - skipped, skipped))
        })
        .collect::<Result<_>>()?;
    let fold_rmse: Vec<f64> = results.iter().map(|r| r.0).collect();
    Ok(CvReport {
        mean_rmse: fold_rmse.iter().sum::<f64>() / folds as f64,
        fold_rmse,
        evaluated: results.iter().map(|r| r.1).sum(),
        skipped: results.iter().map(|r| r.2).sum(),
    })
}

/// Test RMSE of SGD training with `h` under `folds`-fold cross-validation.
pub fn kfold_cv(d: &Dataset, h: &Hyperparams, folds: usize, seed: u64) -> Result<CvReport> {
    cross_validate(d, folds, seed, |train_set| Ok(train(train_set, h)?.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperGrid {
    pub epochs: Vec<usize>,
    /// Candidate lambdas.
    pub regularization: Vec<f64>,
    /// Candidate gammas.
    pub learning_rate: Vec<f64>,
}

impl HyperGrid {
    /// Grid points in lexicographic (epochs, lambda, gamma) order, each
    /// filled in over `base`.
    pub fn points(&self, base: &Hyperparams) -> Result<Vec<Hyperparams>> {
        if self.epochs.is_empty() || self.regularization.is_empty() || self.learning_rate.is_empty() {
            return Err(Error::invalid("every grid axis needs at least one value"));
        }
        let mut out = Vec::new();
        for &epochs in &self.epochs {
            for &regularization in &self.regularization {
                for &learning_rate in &self.learning_rate {
                    let h = Hyperparams {
                        epochs,
                        regularization,
                        learning_rate,
                        fold_in_lambda: regularization,
                        ..*base
                    };
                    h.validate()?;
                    out.push(h);
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridRow {
    pub epochs: usize,
    pub lambda: f64,
    pub gamma: f64,
    /// Infinite when training diverged at this point.
    pub mean_rmse: f64,
    pub fold_rmse: Vec<f64>,
    pub diverged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GridSearchResult {
    pub best: Hyperparams,
    pub best_rmse: f64,
    pub table: Vec<GridRow>,
}

impl GridSearchResult {
    /// `epochs,lambda,gamma,mean_rmse,min_fold_rmse,max_fold_rmse,diverged`
    pub fn to_csv(&self) -> String {
        let mut s = String::from("epochs,lambda,gamma,mean_rmse,min_fold_rmse,max_fold_rmse,diverged\n");
        for r in &self.table {
            let min = r.fold_rmse.iter().copied().fold(f64::INFINITY, f64::min);
            let max = r.fold_rmse.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                r.epochs, r.lambda, r.gamma, r.mean_rmse, min, max, r.diverged
            ));
        }
        s
    }
}

/// Cross-validates every grid point and returns the one with the lowest mean
/// RMSE; ties keep the earliest point in grid order.
pub fn grid_search(
    d: &Dataset,
    grid: &HyperGrid,
    base: &Hyperparams,
    folds: usize,
    seed: u64,
) -> Result<GridSearchResult> {
    let points = grid.points(base)?;
    let table: Vec<GridRow> = points
        .par_iter()
        .map(|h| {
            let (mean_rmse, fold_rmse, diverged) = match kfold_cv(d, h, folds, seed) {
                Ok(r) => (r.mean_rmse, r.fold_rmse, false),
                Err(Error::Diverged { .. }) => (f64::INFINITY, Vec::new(), true),
                Err(e) => return Err(e),
            };
            Ok(GridRow {
                epochs: h.epochs,
                lambda: h.regularization,
                gamma: h.learning_rate,
                mean_rmse,
                fold_rmse,
                diverged,
            })
        })
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, row) in table.iter().enumerate() {
        if row.mean_rmse < table[best].mean_rmse {
            best = i;
        }
    }
    if table[best].diverged {
        return Err(Error::Diverged { epoch: table[best].epochs });
    }
    Ok(GridSearchResult {
        best: points[best],
        best_rmse: table[best].mean_rmse,
        table,
    })
}
