//! Unbiased SVD latent-factor model trained by stochastic gradient descent.
//!
//! Ratings are modelled as the plain inner product `q_i . p_u` of an item
//! vector and a user vector, with no global mean and no user or item biases:
//! the inputs are already normalized per player. Training minimizes
//!
//! ```text
//! J = sum over observed (u, i) of (r_ui - q_i . p_u)^2 + lambda * (|p_u|^2 + |q_i|^2)
//! ```
//!
//! one rating at a time, which gives the classic updates
//!
//! ```text
//! e    = r_ui - q_i . p_u
//! p_u += gamma * (e * q_i - lambda * p_u)
//! q_i += gamma * (e * p_u - lambda * q_i)
//! ```
//!
//! Players that were not part of training are folded in by solving a small
//! ridge regression against the fixed item factors.

mod persist;

pub use persist::{load_model, save_model, FORMAT_VERSION};

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratings::{Dataset, Index, MAX_RATING, MIN_RATING};

pub const RATING_BOUNDS: (f64, f64) = (MIN_RATING as f64, MAX_RATING as f64);

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    /// Latent dimensionality.
    pub factors: usize,
    pub epochs: usize,
    /// Step size, gamma.
    pub learning_rate: f64,
    /// Weight of the squared-norm penalty, lambda.
    pub regularization: f64,
    pub seed: u64,
    /// Standard deviation of the Gaussian used to initialize factors.
    pub init_std: f64,
    /// Ridge penalty used when folding in a new player.
    pub fold_in_lambda: f64,
}

impl Hyperparams {
    /// 20 epochs, lambda 0.005, gamma 0.02.
    pub fn paper_default() -> Self {
        Self::with_rates(20, 0.02, 0.005)
    }

    /// 20 epochs, lambda 0.4, gamma 0.0005, as found by grid search.
    pub fn paper_tuned() -> Self {
        Self::with_rates(20, 0.0005, 0.4)
    }

    /// 100 factors, N(0, 0.1^2) initialization, seed 0, and a fold-in
    /// penalty equal to `regularization`.
    pub fn with_rates(epochs: usize, learning_rate: f64, regularization: f64) -> Self {
        Self {
            factors: 100,
            epochs,
            learning_rate,
            regularization,
            seed: 0,
            init_std: 0.1,
            fold_in_lambda: regularization,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.factors == 0 {
            return Err(Error::invalid("factors must be at least 1"));
        }
        if self.epochs == 0 {
            return Err(Error::invalid("epochs must be at least 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::invalid("learning rate (gamma) must be positive"));
        }
        if !(self.regularization >= 0.0 && self.regularization.is_finite()) {
            return Err(Error::invalid("regularization (lambda) must be non-negative"));
        }
        if !(self.init_std >= 0.0 && self.init_std.is_finite()) {
            return Err(Error::invalid("init_std must be non-negative"));
        }
        if !(self.fold_in_lambda >= 0.0 && self.fold_in_lambda.is_finite()) {
            return Err(Error::invalid("fold-in lambda must be non-negative"));
        }
        Ok(())
    }
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self::paper_default()
    }
}

/// Learned user and item factors. Both matrices are row-major with
/// `factors` columns.
#[derive(Clone, Debug, PartialEq)]
pub struct FactorModel {
    hyperparams: Hyperparams,
    users: Index<String>,
    items: Index<u32>,
    user_factors: Vec<f64>,
    item_factors: Vec<f64>,
}

impl FactorModel {
    pub(crate) fn from_parts(
        hyperparams: Hyperparams,
        users: Index<String>,
        items: Index<u32>,
        user_factors: Vec<f64>,
        item_factors: Vec<f64>,
    ) -> Result<Self> {
        let f = hyperparams.factors;
        if f == 0
            || user_factors.len() != users.len() * f
            || item_factors.len() != items.len() * f
        {
            return Err(Error::invalid("factor matrix shape does not match indices"));
        }
        if !user_factors.iter().chain(&item_factors).all(|x| x.is_finite()) {
            return Err(Error::invalid("factor matrices contain non-finite entries"));
        }
        Ok(Self {
            hyperparams,
            users,
            items,
            user_factors,
            item_factors,
        })
    }

    pub fn hyperparams(&self) -> &Hyperparams {
        &self.hyperparams
    }

    pub fn factors(&self) -> usize {
        self.hyperparams.factors
    }

    pub fn users(&self) -> &Index<String> {
        &self.users
    }

    pub fn items(&self) -> &Index<u32> {
        &self.items
    }

    pub fn user_vector(&self, user: usize) -> &[f64] {
        let f = self.factors();
        &self.user_factors[user * f..(user + 1) * f]
    }

    pub fn item_vector(&self, item: usize) -> &[f64] {
        let f = self.factors();
        &self.item_factors[item * f..(item + 1) * f]
    }

    pub fn user_vector_of(&self, player_id: &str) -> Result<&[f64]> {
        let u = self
            .users
            .get(&player_id.to_string())
            .ok_or_else(|| Error::UnknownPlayer(player_id.to_string()))?;
        Ok(self.user_vector(u))
    }

    pub fn item_vector_of(&self, champion_id: u32) -> Result<&[f64]> {
        let i = self
            .items
            .get(&champion_id)
            .ok_or(Error::UnknownChampion(champion_id))?;
        Ok(self.item_vector(i))
    }

    pub(crate) fn user_factors(&self) -> &[f64] {
        &self.user_factors
    }

    pub(crate) fn item_factors(&self) -> &[f64] {
        &self.item_factors
    }

    /// Mutable access for tests that set factors by hand.
    #[doc(hidden)]
    pub fn factors_mut(&mut self) -> (&mut [f64], &mut [f64]) {
        (&mut self.user_factors, &mut self.item_factors)
    }
}

pub fn dot(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn clamp_rating(raw: f64) -> f64 {
    raw.clamp(RATING_BOUNDS.0, RATING_BOUNDS.1)
}

/// The seeded generator shared by initialization and per-epoch shuffling.
pub fn training_rng(h: &Hyperparams) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(h.seed)
}

/// Draws every factor from `N(0, init_std^2)`, users first, then items.
pub fn init_model(d: &Dataset, h: &Hyperparams) -> Result<FactorModel> {
    init_model_with(d, h, &mut training_rng(h))
}

fn init_model_with(d: &Dataset, h: &Hyperparams, rng: &mut ChaCha8Rng) -> Result<FactorModel> {
    if h.factors == 0 {
        return Err(Error::invalid("factors must be at least 1"));
    }
    let normal = Normal::new(0.0, h.init_std)
        .map_err(|e| Error::invalid(format!("init_std {}: {e}", h.init_std)))?;
    let mut draw = |n: usize| -> Vec<f64> { (0..n).map(|_| normal.sample(rng)).collect() };
    let user_factors = draw(d.n_users() * h.factors);
    let item_factors = draw(d.n_items() * h.factors);
    Ok(FactorModel {
        hyperparams: *h,
        users: d.users().clone(),
        items: d.items().clone(),
        user_factors,
        item_factors,
    })
}

/// Dataset rows resolved to the model's own indices.
fn resolve_rows(m: &FactorModel, d: &Dataset) -> Result<Vec<(usize, usize, f64)>> {
    let same_index = m.users == *d.users() && m.items == *d.items();
    if same_index {
        return Ok(d.indexed().iter().map(|r| (r.user, r.item, r.rating)).collect());
    }
    let user_map = d
        .users()
        .keys()
        .iter()
        .map(|k| m.users.get(k).ok_or_else(|| Error::UnknownPlayer(k.clone())))
        .collect::<Result<Vec<_>>>()?;
    let item_map = d
        .items()
        .keys()
        .iter()
        .map(|&k| m.items.get(&k).ok_or(Error::UnknownChampion(k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(d
        .indexed()
        .iter()
        .map(|r| (user_map[r.user], item_map[r.item], r.rating))
        .collect())
}

/// One SGD pass over every rating of `d`, in an order shuffled by `rng`.
pub fn sgd_epoch(m: &mut FactorModel, d: &Dataset, rng: &mut ChaCha8Rng) -> Result<()> {
    let mut rows = resolve_rows(m, d)?;
    rows.shuffle(rng);
    let f = m.factors();
    let lr = m.hyperparams.learning_rate;
    let reg = m.hyperparams.regularization;
    for (u, i, r) in rows {
        let p = &mut m.user_factors[u * f..(u + 1) * f];
        let q = &mut m.item_factors[i * f..(i + 1) * f];
        let err = r - dot(p, q);
        for (pf, qf) in p.iter_mut().zip(q.iter_mut()) {
            let (p0, q0) = (*pf, *qf);
            *pf += lr * (err * q0 - reg * p0);
            *qf += lr * (err * p0 - reg * q0);
        }
    }
    Ok(())
}

fn all_finite(m: &FactorModel) -> bool {
    m.user_factors.iter().chain(&m.item_factors).all(|x| x.is_finite())
}

/// Regularized squared error of `m` over the ratings of `d`.
pub fn objective(m: &FactorModel, d: &Dataset) -> Result<f64> {
    let reg = m.hyperparams.regularization;
    Ok(resolve_rows(m, d)?
        .into_iter()
        .map(|(u, i, r)| {
            let p = m.user_vector(u);
            let q = m.item_vector(i);
            let e = r - dot(p, q);
            e * e + reg * (dot(p, p) + dot(q, q))
        })
        .sum())
}

/// Gradient of one rating's term `(r - q.p)^2 + lambda (|p|^2 + |q|^2)`
/// with respect to `p` and `q`. An SGD update moves each vector by
/// `-gamma / 2` times its gradient.
pub fn rating_gradient(p: &[f64], q: &[f64], rating: f64, lambda: f64) -> (Vec<f64>, Vec<f64>) {
    let e = rating - dot(p, q);
    let gp = p.iter().zip(q).map(|(pf, qf)| -2.0 * e * qf + 2.0 * lambda * pf).collect();
    let gq = p.iter().zip(q).map(|(pf, qf)| -2.0 * e * pf + 2.0 * lambda * qf).collect();
    (gp, gq)
}

/// Gradient of [`objective`] as (user factors, item factors), each shaped
/// like the model's matrices.
pub fn objective_gradient(m: &FactorModel, d: &Dataset) -> Result<(Vec<f64>, Vec<f64>)> {
    let f = m.factors();
    let mut gu = vec![0.0; m.user_factors.len()];
    let mut gi = vec![0.0; m.item_factors.len()];
    for (u, i, r) in resolve_rows(m, d)? {
        let (gp, gq) = rating_gradient(m.user_vector(u), m.item_vector(i), r, m.hyperparams.regularization);
        for k in 0..f {
            gu[u * f + k] += gp[k];
            gi[i * f + k] += gq[k];
        }
    }
    Ok((gu, gi))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrainingTrace {
    /// Objective after each epoch; `objective[0]` follows epoch 1.
    pub objective: Vec<f64>,
}

/// Initializes a model and runs `h.epochs` SGD passes, recording the
/// objective after each pass.
pub fn train(d: &Dataset, h: &Hyperparams) -> Result<(FactorModel, TrainingTrace)> {
    h.validate()?;
    if d.is_empty() {
        return Err(Error::NoMasteryData);
    }
    let mut rng = training_rng(h);
    let mut m = init_model_with(d, h, &mut rng)?;
    let mut trace = Vec::with_capacity(h.epochs);
    for epoch in 1..=h.epochs {
        sgd_epoch(&mut m, d, &mut rng)?;
        if !all_finite(&m) {
            return Err(Error::Diverged { epoch });
        }
        trace.push(objective(&m, d)?);
    }
    Ok((m, TrainingTrace { objective: trace }))
}

/// `clamp(q_i . p, 1, 100)` for a given user vector.
pub fn predict(m: &FactorModel, user_vector: &[f64], champion_id: u32) -> Result<f64> {
    let q = m.item_vector_of(champion_id)?;
    if user_vector.len() != q.len() {
        return Err(Error::invalid(format!(
            "user vector has length {}, model has {} factors",
            user_vector.len(),
            q.len()
        )));
    }
    Ok(clamp_rating(dot(user_vector, q)))
}

/// Prediction for a player that was part of training.
pub fn predict_known(m: &FactorModel, player_id: &str, champion_id: u32) -> Result<f64> {
    predict(m, m.user_vector_of(player_id)?, champion_id)
}

/// `sum (r - q_i . p)^2 + reg |p|^2` over a fold-in profile.
pub fn fold_in_objective(m: &FactorModel, profile: &[(u32, f64)], reg: f64, p: &[f64]) -> Result<f64> {
    let mut total = reg * dot(p, p);
    for &(c, r) in profile {
        let e = r - dot(m.item_vector_of(c)?, p);
        total += e * e;
    }
    Ok(total)
}

/// Closed-form user vector for a player outside the training set: the
/// minimizer of [`fold_in_objective`] with item factors held fixed.
///
/// Solves whichever normal equations are smaller: `(Q^T Q + reg I) p = Q^T r`
/// when the profile has at least `f` items, otherwise the equivalent
/// `p = Q^T (Q Q^T + reg I)^-1 r`. With `reg == 0` and a rank-deficient
/// system the minimum-norm least-squares solution is returned.
pub fn fold_in(m: &FactorModel, profile: &[(u32, f64)], reg: f64) -> Result<Vec<f64>> {
    if profile.is_empty() {
        return Err(Error::invalid("fold-in profile is empty"));
    }
    if !(reg >= 0.0 && reg.is_finite()) {
        return Err(Error::invalid("fold-in lambda must be non-negative"));
    }
    let f = m.factors();
    let n = profile.len();
    let mut q = DMatrix::<f64>::zeros(n, f);
    for (row, &(c, _)) in profile.iter().enumerate() {
        q.row_mut(row).copy_from_slice(m.item_vector_of(c)?);
    }
    let r = DVector::from_iterator(n, profile.iter().map(|&(_, r)| r));

    let solved = if reg > 0.0 {
        if n >= f {
            let gram = q.tr_mul(&q) + DMatrix::identity(f, f) * reg;
            gram.cholesky().map(|c| c.solve(&q.tr_mul(&r)))
        } else {
            let gram = &q * q.transpose() + DMatrix::identity(n, n) * reg;
            gram.cholesky().map(|c| q.tr_mul(&c.solve(&r)))
        }
    } else {
        None
    };
    let p = match solved {
        Some(p) => p,
        None => q
            .svd(true, true)
            .solve(&r, 1e-12)
            .map_err(|e| Error::invalid(format!("fold-in solve failed: {e}")))?,
    };
    Ok(p.iter().copied().collect())
}
