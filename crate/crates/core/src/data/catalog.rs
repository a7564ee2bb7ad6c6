//! Champion id to display name mapping, read from a `champion_id,name` CSV.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::open_input;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ChampionCatalog {
    entries: BTreeMap<u32, String>,
}

impl ChampionCatalog {
    pub fn from_entries(entries: impl IntoIterator<Item = (u32, String)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (id, name) in entries {
            if name.trim().is_empty() {
                return Err(Error::invalid(format!("champion {id} has an empty name")));
            }
            if map.insert(id, name).is_some() {
                return Err(Error::invalid(format!("duplicate champion id {id} in catalog")));
            }
        }
        Ok(Self { entries: map })
    }

    pub fn name(&self, id: u32) -> Option<&str> {
        self.entries.get(&id).map(String::as_str)
    }

    /// The champion's name, or `#<id>` when the catalog does not know it.
    pub fn display_name(&self, id: u32) -> String {
        self.name(id).map_or_else(|| format!("#{id}"), str::to_string)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &str)> {
        self.entries.iter().map(|(&id, name)| (id, name.as_str()))
    }
}

pub fn load_catalog(path: &Path) -> Result<ChampionCatalog> {
    let mut rdr = csv::Reader::from_reader(open_input(path)?);
    let mut entries = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        if row.len() != 2 {
            return Err(Error::Parse {
                line,
                message: format!("expected champion_id,name, found {} fields", row.len()),
            });
        }
        let id = row[0].parse().map_err(|_| Error::Parse {
            line,
            message: format!("champion_id {:?} is not a non-negative integer", &row[0]),
        })?;
        entries.push((id, row[1].to_string()));
    }
    ChampionCatalog::from_entries(entries)
}
