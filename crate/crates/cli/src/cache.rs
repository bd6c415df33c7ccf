//! On-disk cache: one JSON file per object, named by the SHA-256 of its key
//! parts and the crate version.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::report::Outcome;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize, Deserialize)]
struct Entry {
    version: String,
    key: String,
    payload: Outcome,
}

pub fn sha256(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    hex::encode(h.finalize())
}

pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Cache {
        Cache { dir }
    }

    pub fn enabled(&self) -> bool {
        self.dir.is_some()
    }

    pub fn key(parts: &[&str]) -> String {
        let mut all = vec![VERSION];
        all.extend_from_slice(parts);
        sha256(&all)
    }

    fn path(dir: &Path, key: &str) -> PathBuf {
        dir.join(format!("{key}.json"))
    }

    pub fn load(&self, key: &str) -> Option<Outcome> {
        let dir = self.dir.as_ref()?;
        let s = std::fs::read_to_string(Self::path(dir, key)).ok()?;
        let e: Entry = serde_json::from_str(&s).ok()?;
        (e.version == VERSION && e.key == key).then_some(e.payload)
    }

    pub fn store(&self, key: &str, payload: &Outcome) -> std::io::Result<()> {
        let Some(dir) = &self.dir else { return Ok(()) };
        std::fs::create_dir_all(dir)?;
        let e = Entry { version: VERSION.to_string(), key: key.to_string(), payload: payload.clone() };
        let tmp = dir.join(format!("{key}.json.tmp"));
        std::fs::write(&tmp, serde_json::to_string(&e)?)?;
        std::fs::rename(tmp, Self::path(dir, key))
    }
}
