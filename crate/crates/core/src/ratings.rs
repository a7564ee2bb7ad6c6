//! Rating domain types and the mastery-points to 1..=100 normalization.
//!
//! Raw champion mastery points only grow, and grow faster for players who
//! play more, so they are rescaled per player: the most played champion is
//! rated 100 and every other champion is rated linearly against it, rounded
//! up so that any positive amount of play is worth at least 1.

use std::collections::{HashMap, HashSet};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_RATING: u8 = 1;
pub const MAX_RATING: u8 = 100;

/// One (player, champion, mastery points) observation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MasteryRecord {
    pub player_id: String,
    pub champion_id: u32,
    pub cmp: u64,
}

impl MasteryRecord {
    pub fn new(player_id: impl Into<String>, champion_id: u32, cmp: u64) -> Self {
        Self {
            player_id: player_id.into(),
            champion_id,
            cmp,
        }
    }
}

/// A normalized training row.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatingTriple {
    pub player_id: String,
    pub champion_id: u32,
    pub rating: u8,
}

/// A bijection between external keys and dense indices `0..len`, in
/// first-seen order.
#[derive(Clone, Debug)]
pub struct Index<K> {
    keys: Vec<K>,
    lookup: HashMap<K, usize>,
}

impl<K: Clone + Eq + Hash> Index<K> {
    pub fn new() -> Self {
        Self {
            keys: Vec::new(),
            lookup: HashMap::new(),
        }
    }

    pub fn from_keys(keys: impl IntoIterator<Item = K>) -> Result<Self> {
        let mut index = Self::new();
        for key in keys {
            let before = index.len();
            if index.insert(key) != before {
                return Err(Error::invalid("duplicate key in index"));
            }
        }
        Ok(index)
    }

    /// Returns the dense index of `key`, assigning the next one if unseen.
    pub fn insert(&mut self, key: K) -> usize {
        if let Some(&i) = self.lookup.get(&key) {
            return i;
        }
        let i = self.keys.len();
        self.lookup.insert(key.clone(), i);
        self.keys.push(key);
        i
    }

    pub fn get(&self, key: &K) -> Option<usize> {
        self.lookup.get(key).copied()
    }

    pub fn key(&self, index: usize) -> &K {
        &self.keys[index]
    }

    pub fn keys(&self) -> &[K] {
        &self.keys
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }
}

impl<K: Eq> PartialEq for Index<K> {
    fn eq(&self, other: &Self) -> bool {
        self.keys == other.keys
    }
}

impl<K: Eq> Eq for Index<K> {}

impl<K: Clone + Eq + Hash> Default for Index<K> {
    fn default() -> Self {
        Self::new()
    }
}

/// A rating with its user and item resolved to dense indices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IndexedRating {
    pub user: usize,
    pub item: usize,
    pub rating: f64,
}

/// Normalized ratings plus dense user and item indices.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    triples: Vec<RatingTriple>,
    indexed: Vec<IndexedRating>,
    users: Index<String>,
    items: Index<u32>,
}

impl Dataset {
    /// Assembles a dataset from already-normalized triples. Indices are
    /// assigned in first-seen order.
    pub fn from_triples(triples: Vec<RatingTriple>) -> Result<Self> {
        let mut users = Index::new();
        let mut items = Index::new();
        let mut seen = HashSet::with_capacity(triples.len());
        let mut indexed = Vec::with_capacity(triples.len());
        for t in &triples {
            if !(MIN_RATING..=MAX_RATING).contains(&t.rating) {
                return Err(Error::invalid(format!(
                    "rating {} for player {:?} outside 1..=100",
                    t.rating, t.player_id
                )));
            }
            let user = users.insert(t.player_id.clone());
            let item = items.insert(t.champion_id);
            if !seen.insert((user, item)) {
                return Err(Error::DuplicateRecord {
                    player: t.player_id.clone(),
                    champion: t.champion_id,
                });
            }
            indexed.push(IndexedRating {
                user,
                item,
                rating: f64::from(t.rating),
            });
        }
        Ok(Self {
            triples,
            indexed,
            users,
            items,
        })
    }

    pub fn triples(&self) -> &[RatingTriple] {
        &self.triples
    }

    pub fn indexed(&self) -> &[IndexedRating] {
        &self.indexed
    }

    pub fn users(&self) -> &Index<String> {
        &self.users
    }

    pub fn items(&self) -> &Index<u32> {
        &self.items
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn n_rows(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Row positions grouped by dense user index.
    pub fn rows_by_user(&self) -> Vec<Vec<usize>> {
        let mut rows = vec![Vec::new(); self.n_users()];
        for (pos, r) in self.indexed.iter().enumerate() {
            rows[r.user].push(pos);
        }
        rows
    }

    /// Number of ratings per dense item index.
    pub fn item_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_items()];
        for r in &self.indexed {
            counts[r.item] += 1;
        }
        counts
    }
}

/// Normalizes one player's mastery records to ratings: `ceil(100 * cmp / max_cmp)`.
pub fn normalize_user(records: &[MasteryRecord]) -> Result<Vec<RatingTriple>> {
    let first = records.first().ok_or(Error::NoMasteryData)?;
    if let Some(other) = records.iter().find(|r| r.player_id != first.player_id) {
        return Err(Error::invalid(format!(
            "records span several players ({:?} and {:?})",
            first.player_id, other.player_id
        )));
    }
    if let Some(zero) = records.iter().find(|r| r.cmp == 0) {
        return Err(Error::invalid(format!(
            "champion {} has zero mastery points; filter zeros before normalizing",
            zero.champion_id
        )));
    }
    let max = records.iter().map(|r| r.cmp).max().unwrap_or(1);
    Ok(records
        .iter()
        .map(|r| RatingTriple {
            player_id: r.player_id.clone(),
            champion_id: r.champion_id,
            rating: scale_to_rating(r.cmp, max),
        })
        .collect())
}

/// `ceil(100 * value / max)` for `0 < value <= max`, in exact integer arithmetic.
pub(crate) fn scale_to_rating(value: u64, max: u64) -> u8 {
    debug_assert!(value > 0 && value <= max);
    let scaled = (u128::from(value) * u128::from(MAX_RATING)).div_ceil(u128::from(max));
    scaled as u8
}

/// Drops zero-mastery rows, normalizes each player, and indexes the result.
///
/// Players keep their first-seen order and each player's rows keep their
/// input order, so the same input always yields the same indices.
pub fn build_training_set(records: &[MasteryRecord]) -> Result<Dataset> {
    let mut players: Index<&str> = Index::new();
    let mut grouped: Vec<Vec<MasteryRecord>> = Vec::new();
    for r in records.iter().filter(|r| r.cmp > 0) {
        let p = players.insert(r.player_id.as_str());
        if p == grouped.len() {
            grouped.push(Vec::new());
        }
        grouped[p].push(r.clone());
    }
    if grouped.is_empty() {
        return Err(Error::NoMasteryData);
    }
    let mut triples = Vec::with_capacity(records.len());
    for player_records in &grouped {
        triples.extend(normalize_user(player_records)?);
    }
    Dataset::from_triples(triples)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DatasetStats {
    pub n_users: usize,
    pub n_items: usize,
    pub n_rows: usize,
    pub mean_rows_per_user: f64,
    /// Counts of ratings in 1..=10, 11..=20, ..., 91..=100.
    pub rating_histogram: [usize; 10],
}

pub fn dataset_stats(d: &Dataset) -> DatasetStats {
    let mut rating_histogram = [0; 10];
    for t in d.triples() {
        rating_histogram[usize::from((t.rating - 1) / 10)] += 1;
    }
    DatasetStats {
        n_users: d.n_users(),
        n_items: d.n_items(),
        n_rows: d.n_rows(),
        mean_rows_per_user: d.n_rows() as f64 / d.n_users() as f64,
        rating_histogram,
    }
}
