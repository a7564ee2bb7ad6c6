//! Data at the process boundary: dataset CSV files, the champion catalog,
//! synthetic populations and the game API client.

pub mod api;
pub mod catalog;
pub mod records;
pub mod synth;

pub use api::{fetch_player_masteries, ApiClient, ApiConfig, ApiMode};
pub use catalog::{load_catalog, ChampionCatalog};
pub use records::{load_csv, read_records, save_csv, write_records};
pub use synth::{generate_synthetic, Archetype, SynthConfig};
