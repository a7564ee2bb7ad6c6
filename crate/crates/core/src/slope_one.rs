//! Slope One baseline.
//!
//! `dev(j, i)` is the mean of `r_uj - r_ui` over users who rated both items
//! and `c(j, i)` the number of such users. A target item is predicted from a
//! profile as
//!
//! ```text
//! sum_i c(j, i) * (r_i + dev(j, i)) / sum_i c(j, i)
//! ```
//!
//! over profile items co-rated with `j` (weighted variant), or as the plain
//! mean of `r_i + dev(j, i)` (unweighted variant).

use crate::error::{Error, Result};
use crate::ratings::{Dataset, Index};
use crate::svd::RATING_BOUNDS;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SlopeOneVariant {
    #[default]
    Weighted,
    Unweighted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SlopeOneModel {
    items: Index<u32>,
    /// Row-major `n x n`; entry `(j, i)` is `dev(j, i)`.
    dev: Vec<f64>,
    counts: Vec<u32>,
    variant: SlopeOneVariant,
}

impl SlopeOneModel {
    /// Builds the deviation table from `(user, item, rating)` rows whose item
    /// indices refer to `items`. Each user may rate an item at most once.
    pub fn from_ratings(
        items: Index<u32>,
        ratings: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Self {
        let n = items.len();
        let mut by_user: Vec<Vec<(usize, f64)>> = Vec::new();
        for (u, i, r) in ratings {
            if u >= by_user.len() {
                by_user.resize_with(u + 1, Vec::new);
            }
            by_user[u].push((i, r));
        }
        let mut sums = vec![0.0; n * n];
        let mut counts = vec![0u32; n * n];
        for rated in &by_user {
            for &(j, rj) in rated {
                for &(i, ri) in rated {
                    sums[j * n + i] += rj - ri;
                    counts[j * n + i] += 1;
                }
            }
        }
        let dev = sums
            .iter()
            .zip(&counts)
            .map(|(&s, &c)| if c > 0 { s / f64::from(c) } else { 0.0 })
            .collect();
        Self {
            items,
            dev,
            counts,
            variant: SlopeOneVariant::Weighted,
        }
    }

    pub fn with_variant(mut self, variant: SlopeOneVariant) -> Self {
        self.variant = variant;
        self
    }

    pub fn variant(&self) -> SlopeOneVariant {
        self.variant
    }

    pub fn items(&self) -> &Index<u32> {
        &self.items
    }

    fn pair(&self, j: u32, i: u32) -> Option<usize> {
        let n = self.items.len();
        Some(self.items.get(&j)? * n + self.items.get(&i)?)
    }

    /// Number of users who rated both champions.
    pub fn count(&self, j: u32, i: u32) -> u32 {
        self.pair(j, i).map_or(0, |k| self.counts[k])
    }

    /// `dev(j, i)`, defined only when the champions are co-rated.
    pub fn deviation(&self, j: u32, i: u32) -> Option<f64> {
        let k = self.pair(j, i)?;
        (self.counts[k] > 0).then(|| self.dev[k])
    }

    /// Number of co-rated ordered pairs with distinct items.
    pub fn n_pairs(&self) -> usize {
        let n = self.items.len();
        (0..n * n)
            .filter(|&k| k / n != k % n && self.counts[k] > 0)
            .count()
    }
}

pub fn train_slope_one(d: &Dataset) -> SlopeOneModel {
    SlopeOneModel::from_ratings(
        d.items().clone(),
        d.indexed().iter().map(|r| (r.user, r.item, r.rating)),
    )
}

/// Slope One estimate for `item`, clamped to the rating scale. Falls back
/// to the profile's mean rating when no profile item is co-rated with it.
pub fn predict_slope_one(m: &SlopeOneModel, profile: &[(u32, f64)], item: u32) -> Result<f64> {
    if profile.is_empty() {
        return Err(Error::invalid("slope one profile is empty"));
    }
    let n = m.items.len();
    let j = m.items.get(&item).ok_or(Error::UnknownChampion(item))?;
    let (mut num, mut den) = (0.0, 0.0);
    for &(champion, r) in profile {
        let Some(i) = m.items.get(&champion) else {
            continue;
        };
        let c = m.counts[j * n + i];
        if i == j || c == 0 {
            continue;
        }
        let w = match m.variant {
            SlopeOneVariant::Weighted => f64::from(c),
            SlopeOneVariant::Unweighted => 1.0,
        };
        num += w * (r + m.dev[j * n + i]);
        den += w;
    }
    let raw = if den > 0.0 {
        num / den
    } else {
        profile.iter().map(|&(_, r)| r).sum::<f64>() / profile.len() as f64
    };
    Ok(raw.clamp(RATING_BOUNDS.0, RATING_BOUNDS.1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratings::RatingTriple;
    use proptest::prelude::*;

    /// Items 10 (I) and 20 (J); user 0 rated both, user 1 rated only I.
    fn two_user_model() -> SlopeOneModel {
        let items = Index::from_keys([10u32, 20]).unwrap();
        SlopeOneModel::from_ratings(items, [(0, 0, 1.0), (0, 1, 1.5), (1, 0, 2.0)])
    }

    #[test]
    fn deviation_by_hand() {
        let m = two_user_model();
        assert_eq!(m.deviation(20, 10), Some(0.5));
        assert_eq!(m.deviation(10, 20), Some(-0.5));
        assert_eq!(m.count(20, 10), 1);
        assert_eq!(m.deviation(10, 10), Some(0.0));
    }

    #[test]
    fn prediction_by_hand() {
        let m = two_user_model();
        assert_eq!(predict_slope_one(&m, &[(10, 2.0)], 20).unwrap(), 2.5);
    }

    #[test]
    fn no_co_ratings_gives_empty_table_and_mean_fallback() {
        let triples = vec![
            RatingTriple { player_id: "a".into(), champion_id: 1, rating: 40 },
            RatingTriple { player_id: "b".into(), champion_id: 2, rating: 60 },
            RatingTriple { player_id: "c".into(), champion_id: 3, rating: 90 },
        ];
        let m = train_slope_one(&Dataset::from_triples(triples).unwrap());
        assert_eq!(m.n_pairs(), 0);
        assert_eq!(m.deviation(1, 2), None);
        assert_eq!(predict_slope_one(&m, &[(1, 40.0), (2, 60.0)], 3).unwrap(), 50.0);
    }

    #[test]
    fn duplicated_users_leave_deviations_unchanged() {
        let base: Vec<(usize, usize, f64)> = vec![
            (0, 0, 10.0), (0, 1, 40.0), (0, 2, 100.0),
            (1, 0, 100.0), (1, 2, 35.0),
            (2, 1, 100.0), (2, 2, 80.0), (2, 0, 7.0),
        ];
        let items = Index::from_keys([1u32, 2, 3]).unwrap();
        let once = SlopeOneModel::from_ratings(items.clone(), base.clone());
        let twice = SlopeOneModel::from_ratings(
            items,
            base.iter().copied().chain(base.iter().map(|&(u, i, r)| (u + 3, i, r))),
        );
        for j in [1, 2, 3] {
            for i in [1, 2, 3] {
                let (a, b) = (once.deviation(j, i), twice.deviation(j, i));
                assert!(a.zip(b).is_some_and(|(a, b)| (a - b).abs() < 1e-12) || a == b);
                assert_eq!(twice.count(j, i), 2 * once.count(j, i));
            }
        }
    }

    #[test]
    fn prediction_errors() {
        let m = two_user_model();
        assert!(predict_slope_one(&m, &[], 20).is_err());
        assert!(matches!(
            predict_slope_one(&m, &[(10, 2.0)], 99),
            Err(Error::UnknownChampion(99))
        ));
    }

    #[test]
    fn unweighted_variant_averages_evenly() {
        // user 0: I=10, J=20, K=50; user 1: I=20, K=40; user 2: J=30, K=60; user 3: J=10, K=10
        let items = Index::from_keys([1u32, 2, 3]).unwrap();
        let rows = [
            (0, 0, 10.0), (0, 1, 20.0), (0, 2, 50.0),
            (1, 0, 20.0), (1, 2, 40.0),
            (2, 1, 30.0), (2, 2, 60.0),
            (3, 1, 10.0), (3, 2, 10.0),
        ];
        let m = SlopeOneModel::from_ratings(items, rows);
        // dev(K, I) = (40 + 20) / 2 = 30 with c = 2; dev(K, J) = (30 + 30 + 0) / 3 = 20 with c = 3
        let profile = [(1, 10.0), (2, 30.0)];
        // (2 * 40 + 3 * 50) / 5
        assert!((predict_slope_one(&m, &profile, 3).unwrap() - 46.0).abs() < 1e-12);
        let m = m.with_variant(SlopeOneVariant::Unweighted);
        assert!((predict_slope_one(&m, &profile, 3).unwrap() - 45.0).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn table_is_antisymmetric(rows in prop::collection::btree_map((0usize..6, 0usize..5), 1.0f64..100.0, 0..25)) {
            let items = Index::from_keys(0u32..5).unwrap();
            let m = SlopeOneModel::from_ratings(items, rows.into_iter().map(|((u, i), r)| (u, i, r)));
            for j in 0..5 {
                prop_assert_eq!(m.count(j, j) > 0, m.deviation(j, j).is_some());
                for i in 0..5 {
                    prop_assert_eq!(m.count(j, i), m.count(i, j));
                    match (m.deviation(j, i), m.deviation(i, j)) {
                        (Some(a), Some(b)) => prop_assert!((a + b).abs() < 1e-12),
                        (None, None) => {}
                        _ => prop_assert!(false, "asymmetric definition"),
                    }
                }
                if let Some(d) = m.deviation(j, j) {
                    prop_assert_eq!(d, 0.0);
                }
            }
        }

        #[test]
        fn predictions_stay_on_scale(
            rows in prop::collection::btree_map((0usize..6, 0usize..5), 1.0f64..=100.0, 1..25),
            profile in prop::collection::btree_map(0u32..5, 1.0f64..=100.0, 1..4),
            target in 0u32..5,
        ) {
            let items = Index::from_keys(0u32..5).unwrap();
            let m = SlopeOneModel::from_ratings(items, rows.into_iter().map(|((u, i), r)| (u, i, r)));
            let profile: Vec<_> = profile.into_iter().collect();
            let p = predict_slope_one(&m, &profile, target).unwrap();
            prop_assert!((1.0..=100.0).contains(&p));
        }
    }
}
