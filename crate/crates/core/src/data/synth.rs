//! Synthetic mastery populations.
//!
//! Each user is assigned one archetype uniformly at random and gets a
//! log-normal activity level. For every champion in the archetype's pool
//! the mastery points are a Poisson draw with mean
//! `activity * base intensity`; zero draws are omitted, exactly as a
//! never-played champion would be.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ratings::MasteryRecord;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Archetype {
    /// `(champion_id, base intensity)` pairs.
    pub pool: Vec<(u32, f64)>,
}

impl Archetype {
    pub fn champions(&self) -> impl Iterator<Item = u32> + '_ {
        self.pool.iter().map(|&(c, _)| c)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_users: usize,
    pub archetypes: Vec<Archetype>,
    /// Location of the log-normal activity law.
    pub activity_mu: f64,
    /// Scale of the log-normal activity law; 0 gives every user activity `exp(mu)`.
    pub activity_sigma: f64,
    pub seed: u64,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.archetypes.is_empty() {
            return Err(Error::invalid("at least one archetype is required"));
        }
        for (a, arch) in self.archetypes.iter().enumerate() {
            if arch.pool.is_empty() {
                return Err(Error::invalid(format!("archetype {a} has an empty pool")));
            }
            if let Some(&(c, x)) = arch.pool.iter().find(|&&(_, x)| !(x > 0.0 && x.is_finite())) {
                return Err(Error::invalid(format!(
                    "archetype {a}: intensity {x} for champion {c} must be positive"
                )));
            }
        }
        if !self.activity_mu.is_finite() || !(self.activity_sigma >= 0.0 && self.activity_sigma.is_finite()) {
            return Err(Error::invalid("activity law parameters must be finite, sigma >= 0"));
        }
        Ok(())
    }

    /// Two disjoint archetypes splitting champions `1..=n_items` in half.
    /// Within a pool the intensity of the champion at rank `k` is
    /// `10 / (k + 1)`: a clear order of favourites, with the tail of each pool
    /// played by only some of its players.
    pub fn two_archetype(n_users: usize, n_items: u32, seed: u64) -> Self {
        let half = n_items / 2;
        let pool = |ids: std::ops::RangeInclusive<u32>| Archetype {
            pool: ids
                .enumerate()
                .map(|(k, c)| (c, 10.0 / (k as f64 + 1.0)))
                .collect(),
        };
        Self {
            n_users,
            archetypes: vec![pool(1..=half), pool(half + 1..=n_items)],
            activity_mu: 0.0,
            activity_sigma: 0.5,
            seed,
        }
    }

    /// A population skewed toward its first `n_popular` champions, which
    /// every archetype plays at ten times the base intensity of 1. The
    /// remaining champions are split evenly into `n_archetypes` niche pools;
    /// the niche champion at rank `k` in a pool has intensity `10 / (k + 1)`.
    pub fn skewed(n_users: usize, n_items: u32, n_popular: u32, n_archetypes: u32, seed: u64) -> Self {
        let niche: Vec<u32> = (n_popular + 1..=n_items).collect();
        let per = (niche.len() / n_archetypes.max(1) as usize).max(1);
        let archetypes = niche
            .chunks(per)
            .take(n_archetypes as usize)
            .map(|chunk| {
                let mut pool: Vec<(u32, f64)> = (1..=n_popular).map(|c| (c, 10.0)).collect();
                pool.extend(
                    chunk
                        .iter()
                        .enumerate()
                        .map(|(k, &c)| (c, 10.0 / (k as f64 + 1.0))),
                );
                Archetype { pool }
            })
            .collect();
        Self {
            n_users,
            archetypes,
            activity_mu: 0.0,
            activity_sigma: 0.5,
            seed,
        }
    }
}

/// Generates mastery records. Player ids are `synth-<n>` in generation order;
/// each player's rows follow the archetype's pool order.
pub fn generate_synthetic(cfg: &SynthConfig) -> Result<Vec<MasteryRecord>> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let activity = LogNormal::new(cfg.activity_mu, cfg.activity_sigma)
        .map_err(|e| Error::invalid(format!("activity law: {e}")))?;
    let width = cfg.n_users.max(1).to_string().len();
    let mut out = Vec::new();
    for u in 0..cfg.n_users {
        let player_id = format!("synth-{u:0width$}");
        let archetype = &cfg.archetypes[rng.random_range(0..cfg.archetypes.len())];
        let level = activity.sample(&mut rng);
        for &(champion_id, intensity) in &archetype.pool {
            let mean = level * intensity;
            let cmp = if mean > 0.0 {
                let law = Poisson::new(mean)
                    .map_err(|e| Error::invalid(format!("poisson mean {mean}: {e}")))?;
                law.sample(&mut rng) as u64
            } else {
                0
            };
            if cmp > 0 {
                out.push(MasteryRecord {
                    player_id: player_id.clone(),
                    champion_id,
                    cmp,
                });
            }
        }
    }
    Ok(out)
}
