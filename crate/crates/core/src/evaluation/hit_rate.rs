//! Leave-one-out hit rate.
//!
//! For each sampled player one of their five highest-rated champions is
//! hidden and removed from the training data. The model is trained once on
//! what remains; each player is then queried with the top five of their
//! remaining champions (renormalized so the best is 100), and a trial hits
//! when the hidden champion appears in the top `k`.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ratings::{scale_to_rating, Dataset};
use crate::recommender::{recommend_for_profile, ProfileScorer, QueryProfile, PROFILE_SIZE};
use crate::svd::{train, Hyperparams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HitRateReport {
    pub hits: usize,
    pub trials: usize,
    /// Trials dropped because the hidden champion vanished from training.
    pub skipped: usize,
    pub rate: f64,
}

#[derive(Clone, Debug)]
struct Trial {
    player: String,
    hidden: u32,
    profile: Vec<(u32, u8)>,
}

fn plan_trials(d: &Dataset, seed: u64, max_users: Option<usize>) -> (Vec<Trial>, HashSet<usize>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows_by_user = d.rows_by_user();
    let mut eligible: Vec<usize> = (0..d.n_users()).filter(|&u| rows_by_user[u].len() >= 2).collect();
    eligible.shuffle(&mut rng);
    eligible.truncate(max_users.unwrap_or(usize::MAX));
    eligible.sort_unstable();

    let mut trials = Vec::with_capacity(eligible.len());
    let mut hidden_rows = HashSet::new();
    for u in eligible {
        let mut rows: Vec<(u32, u8, usize)> = rows_by_user[u]
            .iter()
            .map(|&pos| {
                let t = &d.triples()[pos];
                (t.champion_id, t.rating, pos)
            })
            .collect();
        rows.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        let pick = rng.random_range(0..rows.len().min(PROFILE_SIZE));
        let (hidden, _, pos) = rows.remove(pick);
        hidden_rows.insert(pos);
        rows.truncate(PROFILE_SIZE);
        let top = u64::from(rows[0].1);
        let profile = rows
            .iter()
            .map(|&(c, r, _)| (c, scale_to_rating(u64::from(r), top)))
            .collect();
        trials.push(Trial {
            player: d.users().key(u).clone(),
            hidden,
            profile,
        });
    }
    (trials, hidden_rows)
}

/// Hit rate of any model family: `fit` trains on the dataset with hidden
/// rows removed.
pub fn hit_rate_with<S, F>(
    d: &Dataset,
    k: usize,
    seed: u64,
    max_users: Option<usize>,
    fit: F,
) -> Result<HitRateReport>
where
    S: ProfileScorer,
    F: FnOnce(&Dataset) -> Result<S>,
{
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let (trials, hidden_rows) = plan_trials(d, seed, max_users);
    let train_rows = d
        .triples()
        .iter()
        .enumerate()
        .filter(|(pos, _)| !hidden_rows.contains(pos))
        .map(|(_, t)| t.clone())
        .collect();
    let model = fit(&Dataset::from_triples(train_rows)?)?;

    let (mut hits, mut scored, mut skipped) = (0, 0, 0);
    for trial in &trials {
        if !model.knows(trial.hidden) || !trial.profile.iter().any(|&(c, _)| model.knows(c)) {
            skipped += 1;
            continue;
        }
        let profile = QueryProfile {
            player_id: trial.player.clone(),
            entries: trial.profile.clone(),
        };
        let list = recommend_for_profile(&model, &profile, k)?;
        scored += 1;
        if list.champions().any(|c| c == trial.hidden) {
            hits += 1;
        }
    }
    Ok(HitRateReport {
        hits,
        trials: scored,
        skipped,
        rate: if scored == 0 { 0.0 } else { hits as f64 / scored as f64 },
    })
}

/// Leave-one-out hit rate at `k` of SGD-trained SVD.
pub fn hit_rate_at_k(
    d: &Dataset,
    h: &Hyperparams,
    k: usize,
    seed: u64,
    max_users: Option<usize>,
) -> Result<HitRateReport> {
    hit_rate_with(d, k, seed, max_users, |train_set| Ok(train(train_set, h)?.0))
}
