//! On-disk result cache: one pretty-printed JSON record per key, named by
//! the SHA-256 of the canonical parameter string.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use sha2::{Digest, Sha256};
use weil_core::ENUMERATION_ORDER_VERSION;

use crate::record::SCHEMA;

/// Canonical key for a census, e.g. `weil-census/1;census;g=1;p=5;r=1;ell=3;residues=;enum=1`.
pub fn census_key(g: usize, p: u64, r: u32, ell: u64, residues: Option<&[u64]>) -> String {
    let residues = residues
        .map(|m| m.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
        .unwrap_or_default();
    format!("{SCHEMA};census;g={g};p={p};r={r};ell={ell};residues={residues};enum={ENUMERATION_ORDER_VERSION}")
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &str) -> PathBuf {
        let digest = Sha256::digest(key.as_bytes());
        self.dir.join(format!("{}.json", hex::encode(digest)))
    }

    /// A stored record, or `None` when missing or unreadable. Unreadable
    /// entries are treated as misses and get overwritten.
    pub fn load<T: DeserializeOwned>(&self, key: &str) -> Option<T> {
        let text = fs::read_to_string(self.path_for(key)).ok()?;
        let entry: Entry<T> = serde_json::from_str(&text).ok()?;
        (entry.key == key).then_some(entry.record)
    }

    pub fn store<T: Serialize>(&self, key: &str, record: &T) -> io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path_for(key);
        let text =
            serde_json::to_string_pretty(&EntryRef { key, record }).map_err(io::Error::other)?;
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, text + "\n")?;
        fs::rename(&tmp, &path)
    }
}

#[derive(serde::Deserialize)]
struct Entry<T> {
    key: String,
    record: T,
}

#[derive(Serialize)]
struct EntryRef<'a, T> {
    key: &'a str,
    record: &'a T,
}
