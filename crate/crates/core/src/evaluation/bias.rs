//! Popularity bias: how much of a cohort's recommendations go to the most
//! frequently rated champions.

use std::collections::{HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::ratings::{Dataset, MasteryRecord};
use crate::recommender::{recommend_for_profile, top_champions, ProfileScorer, RecommendationList, PROFILE_SIZE};

/// Champions in the top `fraction` of the catalog by training-set rating
/// count (ties by champion id), at least one.
pub fn popular_items(d: &Dataset, fraction: f64) -> HashSet<u32> {
    let counts = d.item_counts();
    let mut order: Vec<usize> = (0..d.n_items()).collect();
    order.sort_by(|&a, &b| {
        counts[b]
            .cmp(&counts[a])
            .then(d.items().key(a).cmp(d.items().key(b)))
    });
    // small slack so that e.g. 0.1 * 60 is 6, not 7
    let n = ((fraction * d.n_items() as f64) - 1e-9).ceil().max(1.0) as usize;
    order
        .into_iter()
        .take(n.min(d.n_items()))
        .map(|i| *d.items().key(i))
        .collect()
}

/// Fraction of all recommended slots held by popular champions; 0 for a
/// cohort with no recommendations.
pub fn popularity_share(recs: &[RecommendationList], d: &Dataset, fraction: f64) -> f64 {
    let popular = popular_items(d, fraction);
    let (hits, slots) = recs
        .iter()
        .flat_map(|l| l.champions())
        .fold((0usize, 0usize), |(h, s), c| (h + usize::from(popular.contains(&c)), s + 1));
    if slots == 0 {
        0.0
    } else {
        hits as f64 / slots as f64
    }
}

/// Players sampled from `records` without replacement, reported in
/// first-seen order. Asking for more players than exist returns them all.
pub fn sample_cohort(records: &[MasteryRecord], size: usize, seed: u64) -> Vec<String> {
    let mut order: HashMap<&str, usize> = HashMap::new();
    for r in records {
        let next = order.len();
        order.entry(&r.player_id).or_insert(next);
    }
    let mut players: Vec<(&str, usize)> = order.into_iter().collect();
    players.sort_by_key(|&(_, i)| i);
    players.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    players.truncate(size);
    players.sort_by_key(|&(_, i)| i);
    players.into_iter().map(|(p, _)| p.to_string()).collect()
}

/// Top-`k` lists for each cohort player, queried with their top five
/// champions from `records`.
pub fn cohort_recommendations<S: ProfileScorer + ?Sized>(
    scorer: &S,
    records: &[MasteryRecord],
    cohort: &[String],
    k: usize,
) -> Result<Vec<RecommendationList>> {
    let mut by_player: HashMap<&str, Vec<MasteryRecord>> = HashMap::new();
    for r in records {
        by_player.entry(&r.player_id).or_default().push(r.clone());
    }
    cohort
        .iter()
        .map(|p| {
            let rows = by_player
                .get(p.as_str())
                .ok_or_else(|| Error::UnknownPlayer(p.clone()))?;
            recommend_for_profile(scorer, &top_champions(rows, PROFILE_SIZE)?, k)
        })
        .collect()
}
