//! Champion recommendations from mastery telemetry.
//!
//! Raw champion mastery points are normalized per player to implicit 1..=100
//! ratings ([`ratings`]), an unbiased SVD latent-factor model is trained on
//! them by SGD ([`svd`]), and a queried player's five most played champions
//! are folded into the learned space to rank every other champion
//! ([`recommender`]). A Slope One baseline ([`slope_one`]) and an offline
//! evaluation harness ([`evaluation`]) sit alongside.

pub mod cli;
pub mod data;
pub mod error;
pub mod evaluation;
mod io;
pub mod ratings;
pub mod recommender;
pub mod slope_one;
pub mod svd;

pub use error::{Error, Result};
pub use io::write_atomic;
pub use ratings::{build_training_set, normalize_user, Dataset, MasteryRecord, RatingTriple};
pub use recommender::{recommend, top_champions, QueryProfile, RecommendationList};
pub use svd::{train, FactorModel, Hyperparams};
