//! Content-hashed records of stage outputs.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::util::{create_writer, open_reader};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub stage: String,
    /// Input name → content hash.
    pub inputs: BTreeMap<String, String>,
    /// Output file name → content hash.
    pub outputs: BTreeMap<String, String>,
    /// Hash over all outputs in name order.
    pub output_hash: String,
    pub counts: BTreeMap<String, u64>,
    /// Configuration text, verbatim.
    pub config: String,
    pub created_unix: u64,
}

impl DatasetManifest {
    pub fn new(stage: &str) -> Self {
        DatasetManifest {
            stage: stage.to_string(),
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            output_hash: String::new(),
            counts: BTreeMap::new(),
            config: String::new(),
            created_unix: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
        }
    }

    pub fn input(mut self, name: &str, hash: impl Into<String>) -> Self {
        self.inputs.insert(name.to_string(), hash.into());
        self
    }

    pub fn output(mut self, name: &str, hash: impl Into<String>) -> Self {
        self.outputs.insert(name.to_string(), hash.into());
        self.output_hash = self.combined_output_hash();
        self
    }

    pub fn count(mut self, name: &str, n: usize) -> Self {
        self.counts.insert(name.to_string(), n as u64);
        self
    }

    pub fn config(mut self, text: &str) -> Self {
        self.config = text.to_string();
        self
    }

    fn combined_output_hash(&self) -> String {
        let mut h = Sha256::new();
        for (name, hash) in &self.outputs {
            h.update(name.as_bytes());
            h.update([0]);
            h.update(hash.as_bytes());
            h.update(b"\n");
        }
        hex::encode(h.finalize())
    }

    /// Hash over everything except the timestamp and the config echo: equal
    /// fingerprints mean equal inputs, outputs and counts.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.stage.as_bytes());
        for map in [&self.inputs, &self.outputs] {
            h.update([1]);
            for (k, v) in map {
                h.update(k.as_bytes());
                h.update([0]);
                h.update(v.as_bytes());
                h.update(b"\n");
            }
        }
        h.update([2]);
        h.update(self.output_hash.as_bytes());
        for (k, v) in &self.counts {
            h.update(k.as_bytes());
            h.update(v.to_le_bytes());
        }
        hex::encode(h.finalize())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = create_writer(path)?;
        serde_json::to_writer_pretty(&mut w, self)?;
        std::io::Write::flush(&mut w).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(open_reader(path)?)?)
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Hash of the JSON-lines serialization of `records`, in the given order.
pub fn hash_records<T: Serialize>(records: &[T]) -> Result<String> {
    let mut h = Sha256::new();
    for r in records {
        h.update(serde_json::to_vec(r)?);
        h.update(b"\n");
    }
    Ok(hex::encode(h.finalize()))
}

pub fn hash_file(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}
