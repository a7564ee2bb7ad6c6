//! Query pipeline: a player's top mastery champions form the profile, the
//! profile is scored against every other champion the model knows, and the
//! best `k` are returned.

use std::cmp::Ordering;

use serde::Serialize;

use crate::data::ChampionCatalog;
use crate::error::{Error, Result};
use crate::ratings::{normalize_user, MasteryRecord};
use crate::slope_one::{predict_slope_one, SlopeOneModel};
use crate::svd::{fold_in, predict, FactorModel};

/// Number of champions in a query profile.
pub const PROFILE_SIZE: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryProfile {
    pub player_id: String,
    /// `(champion_id, rating)`, highest rating first.
    pub entries: Vec<(u32, u8)>,
}

impl QueryProfile {
    pub fn ratings(&self) -> Vec<(u32, f64)> {
        self.entries.iter().map(|&(c, r)| (c, f64::from(r))).collect()
    }

    pub fn contains(&self, champion_id: u32) -> bool {
        self.entries.iter().any(|&(c, _)| c == champion_id)
    }
}

/// The `n` highest-mastery champions, ties broken by lower champion id,
/// normalized so the first entry is 100.
pub fn top_champions(records: &[MasteryRecord], n: usize) -> Result<QueryProfile> {
    if n == 0 {
        return Err(Error::invalid("profile size must be at least 1"));
    }
    let mut played: Vec<&MasteryRecord> = records.iter().filter(|r| r.cmp > 0).collect();
    if played.is_empty() {
        return Err(Error::NoMasteryData);
    }
    played.sort_by(|a, b| b.cmp.cmp(&a.cmp).then(a.champion_id.cmp(&b.champion_id)));
    played.truncate(n);
    let selected: Vec<MasteryRecord> = played.into_iter().cloned().collect();
    let rated = normalize_user(&selected)?;
    Ok(QueryProfile {
        player_id: selected[0].player_id.clone(),
        entries: rated.into_iter().map(|t| (t.champion_id, t.rating)).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Recommendation {
    pub champion_id: u32,
    pub score: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecommendationList {
    pub player_id: String,
    pub k: usize,
    /// Highest score first; equal scores by ascending champion id.
    pub items: Vec<Recommendation>,
}

impl RecommendationList {
    pub fn champions(&self) -> impl Iterator<Item = u32> + '_ {
        self.items.iter().map(|r| r.champion_id)
    }
}

/// Anything that can score unseen champions for a rating profile.
pub trait ProfileScorer {
    /// Scores every known champion outside `profile`.
    fn score_candidates(&self, profile: &[(u32, f64)]) -> Result<Vec<Recommendation>>;

    fn knows(&self, champion_id: u32) -> bool;
}

impl ProfileScorer for FactorModel {
    fn knows(&self, champion_id: u32) -> bool {
        self.items().get(&champion_id).is_some()
    }

    fn score_candidates(&self, profile: &[(u32, f64)]) -> Result<Vec<Recommendation>> {
        let known: Vec<(u32, f64)> = profile
            .iter()
            .copied()
            .filter(|(c, _)| self.items().get(c).is_some())
            .collect();
        if known.is_empty() {
            return Err(Error::invalid("none of the profile champions are known to the model"));
        }
        let user = fold_in(self, &known, self.hyperparams().fold_in_lambda)?;
        self.items()
            .keys()
            .iter()
            .filter(|c| !profile.iter().any(|(p, _)| p == *c))
            .map(|&c| {
                Ok(Recommendation {
                    champion_id: c,
                    score: predict(self, &user, c)?,
                })
            })
            .collect()
    }
}

impl ProfileScorer for SlopeOneModel {
    fn knows(&self, champion_id: u32) -> bool {
        self.items().get(&champion_id).is_some()
    }

    fn score_candidates(&self, profile: &[(u32, f64)]) -> Result<Vec<Recommendation>> {
        if !profile.iter().any(|(c, _)| self.items().get(c).is_some()) {
            return Err(Error::invalid("none of the profile champions are known to the model"));
        }
        self.items()
            .keys()
            .iter()
            .filter(|c| !profile.iter().any(|(p, _)| p == *c))
            .map(|&c| {
                Ok(Recommendation {
                    champion_id: c,
                    score: predict_slope_one(self, profile, c)?,
                })
            })
            .collect()
    }
}

pub(crate) fn rank(mut scored: Vec<Recommendation>, k: usize) -> Vec<Recommendation> {
    scored.sort_by(|a, b| {
        b.score
            .partial_cmp(&a.score)
            .unwrap_or(Ordering::Equal)
            .then(a.champion_id.cmp(&b.champion_id))
    });
    scored.truncate(k);
    scored
}

pub fn recommend_for_profile<S: ProfileScorer + ?Sized>(
    scorer: &S,
    profile: &QueryProfile,
    k: usize,
) -> Result<RecommendationList> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let scored = scorer.score_candidates(&profile.ratings())?;
    Ok(RecommendationList {
        player_id: profile.player_id.clone(),
        k,
        items: rank(scored, k),
    })
}

/// Top-`k` champions for a player from their mastery records.
pub fn recommend(m: &FactorModel, records: &[MasteryRecord], k: usize) -> Result<RecommendationList> {
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let profile = top_champions(records, PROFILE_SIZE)?;
    recommend_for_profile(m, &profile, k)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    #[default]
    Text,
    Json,
    Csv,
}

#[derive(Serialize)]
struct JsonItem<'a> {
    champion_id: u32,
    name: &'a str,
    score: f64,
}

#[derive(Serialize)]
struct JsonDocument<'a> {
    player: &'a str,
    generated_at: &'a str,
    items: Vec<JsonItem<'a>>,
}

/// Renders a list; returns the document and one warning per champion the
/// catalog could not name.
pub fn format_recommendations(
    list: &RecommendationList,
    catalog: &ChampionCatalog,
    format: OutputFormat,
    generated_at: &str,
) -> (String, Vec<String>) {
    let names: Vec<String> = list.champions().map(|c| catalog.display_name(c)).collect();
    let warnings = list
        .champions()
        .filter(|&c| catalog.name(c).is_none())
        .map(|c| format!("champion {c} is not in the catalog"))
        .collect();
    let doc = match format {
        OutputFormat::Json => {
            let doc = JsonDocument {
                player: &list.player_id,
                generated_at,
                items: list
                    .items
                    .iter()
                    .zip(&names)
                    .map(|(r, name)| JsonItem {
                        champion_id: r.champion_id,
                        name,
                        score: r.score,
                    })
                    .collect(),
            };
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable");
            s.push('\n');
            s
        }
        OutputFormat::Csv => {
            let mut s = String::from("rank,champion_id,name,score\n");
            for (n, (r, name)) in list.items.iter().zip(&names).enumerate() {
                s.push_str(&format!(
                    "{},{},{},{:.4}\n",
                    n + 1,
                    r.champion_id,
                    csv_field(name),
                    r.score
                ));
            }
            s
        }
        OutputFormat::Text => {
            let mut s = format!("Recommendations for {} ({generated_at})\n", list.player_id);
            if list.items.is_empty() {
                s.push_str("  (none)\n");
            }
            for (n, (r, name)) in list.items.iter().zip(&names).enumerate() {
                s.push_str(&format!("{:>3}. {:<20} {:>7.2}\n", n + 1, name, r.score));
            }
            s
        }
    };
    (doc, warnings)
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratings::{Dataset, RatingTriple};
    use crate::svd::{init_model, Hyperparams};

    fn records(name: &str, cmps: &[(u32, u64)]) -> Vec<MasteryRecord> {
        cmps.iter().map(|&(c, x)| MasteryRecord::new(name, c, x)).collect()
    }

    #[test]
    fn table_one_profile() {
        let mut recs = records(
            "p",
            &[(117, 59_486), (143, 136_709), (40, 89_306), (267, 367_191), (69, 106_064), (1, 12), (2, 0)],
        );
        recs.reverse();
        let profile = top_champions(&recs, 5).unwrap();
        assert_eq!(
            profile.entries,
            vec![(267, 100), (143, 38), (69, 29), (40, 25), (117, 17)]
        );
    }

    #[test]
    fn fewer_than_n_champions() {
        let profile = top_champions(&records("p", &[(1, 5), (2, 9), (3, 1), (4, 0)]), 5).unwrap();
        assert_eq!(profile.entries.len(), 3);
    }

    #[test]
    fn ties_at_max_by_champion_id() {
        let profile = top_champions(&records("p", &[(9, 700), (4, 700), (5, 10)]), 5).unwrap();
        assert_eq!(&profile.entries[..2], &[(4, 100), (9, 100)]);
    }

    #[test]
    fn no_played_champions() {
        assert!(matches!(
            top_champions(&records("p", &[(1, 0)]), 5),
            Err(Error::NoMasteryData)
        ));
        assert!(top_champions(&[], 5).is_err());
    }

    fn toy_model(n_items: u32) -> FactorModel {
        let triples = (1..=n_items)
            .map(|c| RatingTriple {
                player_id: format!("u{}", c % 3),
                champion_id: c,
                rating: (c * 11 % 100 + 1) as u8,
            })
            .collect();
        let d = Dataset::from_triples(triples).unwrap();
        let h = Hyperparams {
            factors: 4,
            init_std: 1.0,
            ..Hyperparams::paper_default()
        };
        init_model(&d, &h).unwrap()
    }

    #[test]
    fn truncation_by_availability() {
        let m = toy_model(6);
        let recs = records("q", &[(1, 50), (2, 40), (3, 30), (4, 20), (5, 10)]);
        let list = recommend(&m, &recs, 5).unwrap();
        assert_eq!(list.items.len(), 1);
        assert_eq!(list.items[0].champion_id, 6);
    }

    #[test]
    fn excludes_profile_and_orders() {
        let m = toy_model(30);
        let recs = records("q", &[(3, 500), (7, 400), (11, 300), (20, 200), (25, 100), (26, 50)]);
        let list = recommend(&m, &recs, 10).unwrap();
        let profile = top_champions(&recs, 5).unwrap();
        assert_eq!(list.items.len(), 10);
        assert!(list.champions().all(|c| !profile.contains(c)));
        // a played champion outside the top five may still be recommended
        for w in list.items.windows(2) {
            assert!(
                w[0].score > w[1].score
                    || (w[0].score == w[1].score && w[0].champion_id < w[1].champion_id)
            );
        }
    }

    #[test]
    fn recommend_errors() {
        let m = toy_model(6);
        assert!(recommend(&m, &records("q", &[(1, 5)]), 0).is_err());
        assert!(recommend(&m, &records("q", &[(99, 5), (98, 4)]), 5).is_err());
    }

    #[test]
    fn unknown_profile_champions_are_ignored_when_others_are_known() {
        let m = toy_model(8);
        let list = recommend(&m, &records("q", &[(99, 500), (1, 300)]), 3).unwrap();
        assert_eq!(list.items.len(), 3);
        assert!(list.champions().all(|c| c != 1 && c != 99));
    }

    #[test]
    fn slope_one_scorer() {
        let d = Dataset::from_triples(vec![
            RatingTriple { player_id: "a".into(), champion_id: 1, rating: 100 },
            RatingTriple { player_id: "a".into(), champion_id: 2, rating: 50 },
            RatingTriple { player_id: "b".into(), champion_id: 1, rating: 100 },
            RatingTriple { player_id: "b".into(), champion_id: 3, rating: 20 },
        ])
        .unwrap();
        let so = crate::slope_one::train_slope_one(&d);
        let profile = QueryProfile { player_id: "q".into(), entries: vec![(1, 100)] };
        let list = recommend_for_profile(&so, &profile, 5).unwrap();
        let got: Vec<(u32, f64)> = list.items.iter().map(|r| (r.champion_id, r.score)).collect();
        assert_eq!(got, vec![(2, 50.0), (3, 20.0)]);
    }

    fn sample_list() -> RecommendationList {
        RecommendationList {
            player_id: "Sona Main".into(),
            k: 2,
            items: vec![
                Recommendation { champion_id: 267, score: 87.5 },
                Recommendation { champion_id: 9999, score: 12.25 },
            ],
        }
    }

    #[test]
    fn json_document_shape() {
        let catalog = ChampionCatalog::from_entries([(267, "Nami".to_string())]).unwrap();
        let (doc, warnings) =
            format_recommendations(&sample_list(), &catalog, OutputFormat::Json, "2020-01-01T00:00:00Z");
        let v: serde_json::Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(v["player"], "Sona Main");
        assert_eq!(v["generated_at"], "2020-01-01T00:00:00Z");
        assert_eq!(v["items"][0]["name"], "Nami");
        assert_eq!(v["items"][1]["name"], "#9999");
        assert_eq!(v["items"][1]["score"], 12.25);
        assert_eq!(warnings.len(), 1);
        let keys: Vec<_> = ["\"player\"", "\"generated_at\"", "\"items\""]
            .iter()
            .map(|k| doc.find(k).unwrap())
            .collect();
        assert!(keys.windows(2).all(|w| w[0] < w[1]));
        let again = format_recommendations(&sample_list(), &catalog, OutputFormat::Json, "2020-01-01T00:00:00Z");
        assert_eq!(doc, again.0);
    }

    #[test]
    fn empty_list_renders() {
        let list = RecommendationList { player_id: "p".into(), k: 5, items: vec![] };
        let (doc, warnings) =
            format_recommendations(&list, &ChampionCatalog::default(), OutputFormat::Json, "t");
        let v: serde_json::Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(v["items"].as_array().unwrap().len(), 0);
        assert!(warnings.is_empty());
        let (text, _) = format_recommendations(&list, &ChampionCatalog::default(), OutputFormat::Text, "t");
        assert!(text.contains("(none)"));
    }

    #[test]
    fn csv_rendering() {
        let catalog = ChampionCatalog::from_entries([(267, "Nami, Tidecaller".to_string())]).unwrap();
        let (doc, _) = format_recommendations(&sample_list(), &catalog, OutputFormat::Csv, "t");
        assert_eq!(
            doc,
            "rank,champion_id,name,score\n1,267,\"Nami, Tidecaller\",87.5000\n2,9999,#9999,12.2500\n"
        );
    }
}
