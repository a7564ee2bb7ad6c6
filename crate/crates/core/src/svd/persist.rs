//! Binary model file.
//!
//! All integers and floats are little-endian.
//!
//! ```text
//! magic            8 bytes  "CHMPSVD\0"
//! format_version   u32
//! factors          u32
//! n_users          u64
//! n_items          u64
//! epochs           u32
//! learning_rate    f64
//! regularization   f64
//! init_std         f64
//! fold_in_lambda   f64
//! seed             u64
//! item table       n_items x u32 champion id, in dense-index order
//! user table       n_users x (u32 byte length, UTF-8 player id)
//! Q                n_items x factors f64, row-major
//! P                n_users x factors f64, row-major
//! ```
//!
//! Anything after P is an error, as is a short read anywhere.

use std::io::Read;
use std::path::Path;

use super::{FactorModel, Hyperparams};
use crate::error::{Error, Result};
use crate::io::{open_input, write_atomic};
use crate::ratings::Index;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &[u8; 8] = b"CHMPSVD\0";

pub fn save_model(m: &FactorModel, path: &Path) -> Result<()> {
    write_atomic(path, &encode(m))
}

pub fn load_model(path: &Path) -> Result<FactorModel> {
    let mut bytes = Vec::new();
    open_input(path)?.read_to_end(&mut bytes)?;
    decode(&bytes)
}

pub(crate) fn encode(m: &FactorModel) -> Vec<u8> {
    let h = m.hyperparams();
    let mut out = Vec::with_capacity(
        96 + 8 * (m.user_factors().len() + m.item_factors().len()) + 12 * m.users().len(),
    );
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&(h.factors as u32).to_le_bytes());
    out.extend_from_slice(&(m.users().len() as u64).to_le_bytes());
    out.extend_from_slice(&(m.items().len() as u64).to_le_bytes());
    out.extend_from_slice(&(h.epochs as u32).to_le_bytes());
    for x in [h.learning_rate, h.regularization, h.init_std, h.fold_in_lambda] {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out.extend_from_slice(&h.seed.to_le_bytes());
    for c in m.items().keys() {
        out.extend_from_slice(&c.to_le_bytes());
    }
    for u in m.users().keys() {
        out.extend_from_slice(&(u.len() as u32).to_le_bytes());
        out.extend_from_slice(u.as_bytes());
    }
    for x in m.item_factors().iter().chain(m.user_factors()) {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| {
            Error::CorruptModel(format!("truncated while reading {what} at byte {}", self.pos))
        })?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }

    fn f64s(&mut self, n: usize, what: &str) -> Result<Vec<f64>> {
        let len = n
            .checked_mul(8)
            .ok_or_else(|| Error::CorruptModel(format!("{what} size overflows")))?;
        Ok(self
            .take(len, what)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect())
    }
}

pub(crate) fn decode(bytes: &[u8]) -> Result<FactorModel> {
    let mut r = Reader { bytes, pos: 0 };
    if r.take(MAGIC.len(), "magic")? != MAGIC {
        return Err(Error::CorruptModel("not a model file (bad magic)".into()));
    }
    let version = r.u32("format version")?;
    if version != FORMAT_VERSION {
        return Err(Error::ModelVersion {
            found: version,
            expected: FORMAT_VERSION,
        });
    }
    let factors = r.u32("factors")? as usize;
    let n_users = r.u64("user count")? as usize;
    let n_items = r.u64("item count")? as usize;
    let epochs = r.u32("epochs")? as usize;
    let learning_rate = r.f64("learning rate")?;
    let regularization = r.f64("regularization")?;
    let init_std = r.f64("init_std")?;
    let fold_in_lambda = r.f64("fold-in lambda")?;
    let seed = r.u64("seed")?;
    let hyperparams = Hyperparams {
        factors,
        epochs,
        learning_rate,
        regularization,
        seed,
        init_std,
        fold_in_lambda,
    };

    // Bound counts by the remaining length before allocating.
    if n_items.saturating_mul(4) > bytes.len() || n_users.saturating_mul(4) > bytes.len() {
        return Err(Error::CorruptModel("index counts exceed file size".into()));
    }
    let mut item_ids = Vec::with_capacity(n_items);
    for _ in 0..n_items {
        item_ids.push(r.u32("item table")?);
    }
    let mut user_ids = Vec::with_capacity(n_users);
    for _ in 0..n_users {
        let len = r.u32("user table")? as usize;
        let raw = r.take(len, "user table")?;
        let id = std::str::from_utf8(raw)
            .map_err(|_| Error::CorruptModel("player id is not UTF-8".into()))?;
        user_ids.push(id.to_string());
    }
    let items = Index::from_keys(item_ids)
        .map_err(|_| Error::CorruptModel("duplicate champion id in item table".into()))?;
    let users = Index::from_keys(user_ids)
        .map_err(|_| Error::CorruptModel("duplicate player id in user table".into()))?;

    let item_factors = r.f64s(n_items.saturating_mul(factors), "item factors")?;
    let user_factors = r.f64s(n_users.saturating_mul(factors), "user factors")?;
    if r.pos != bytes.len() {
        return Err(Error::CorruptModel(format!(
            "{} trailing bytes after user factors",
            bytes.len() - r.pos
        )));
    }
    FactorModel::from_parts(hyperparams, users, items, user_factors, item_factors)
        .map_err(|e| Error::CorruptModel(e.to_string()))
}
