//! Dataset CSV: header `player_id,champion_id,cmp`, UTF-8, LF line endings.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::{open_input, write_atomic};
use crate::ratings::MasteryRecord;

const HEADER: [&str; 3] = ["player_id", "champion_id", "cmp"];

pub fn read_records<R: Read>(reader: R) -> Result<Vec<MasteryRecord>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let header = rdr.headers()?.clone();
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!("expected header {:?}, found {:?}", HEADER.join(","), header),
        });
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let bad = |message: String| Error::Parse { line, message };
        if row.len() != 3 {
            return Err(bad(format!("expected 3 fields, found {}", row.len())));
        }
        let player_id = row[0].to_string();
        if player_id.is_empty() {
            return Err(bad("empty player_id".into()));
        }
        let champion_id: u32 = row[1]
            .parse()
            .map_err(|_| bad(format!("champion_id {:?} is not a non-negative integer", &row[1])))?;
        let cmp: u64 = row[2]
            .parse()
            .map_err(|_| bad(format!("cmp {:?} is not a non-negative integer", &row[2])))?;
        if !seen.insert((player_id.clone(), champion_id)) {
            return Err(Error::DuplicateRecord {
                player: player_id,
                champion: champion_id,
            });
        }
        out.push(MasteryRecord {
            player_id,
            champion_id,
            cmp,
        });
    }
    Ok(out)
}

pub fn write_records<W: Write>(writer: W, records: &[MasteryRecord]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(HEADER)?;
    for r in records {
        w.write_record([
            r.player_id.as_str(),
            &r.champion_id.to_string(),
            &r.cmp.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_csv(path: &Path) -> Result<Vec<MasteryRecord>> {
    read_records(open_input(path)?)
}

pub fn save_csv(records: &[MasteryRecord], path: &Path) -> Result<()> {
    let mut buf = Vec::new();
    write_records(&mut buf, records)?;
    write_atomic(path, &buf)
}
