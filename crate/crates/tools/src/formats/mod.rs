//! On-disk formats. Tabular data is comment-headed CSV (see [`table`]);
//! structured results are JSON documents with a `provenance` block.

pub mod depth;
pub mod fieldmap;
pub mod records;
pub mod series;
pub mod spectrum;
pub mod table;

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use table::{num, Header};

pub const TOOLKIT: &str = concat!("vsi-tools ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("format error: {0}")]
    Invalid(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    InFile {
        path: PathBuf,
        #[source]
        source: Box<FormatError>,
    },
}

impl FormatError {
    /// Attaches the file name to a parse error.
    pub fn in_file(self, path: &Path) -> Self {
        match self {
            e @ (FormatError::Io { .. } | FormatError::InFile { .. }) => e,
            e => FormatError::InFile {
                path: path.to_path_buf(),
                source: Box::new(e),
            },
        }
    }
}

/// Toolkit version, configuration hash and seed of the run that wrote a file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub toolkit: String,
    pub config_sha256: String,
    pub seed: u64,
}

impl Provenance {
    /// Hashes the canonical JSON encoding of `config`.
    pub fn for_config<C: Serialize>(config: &C, seed: u64) -> Self {
        let bytes = serde_json::to_vec(config).expect("configuration serializes");
        Self {
            toolkit: TOOLKIT.to_string(),
            config_sha256: hex::encode(Sha256::digest(&bytes)),
            seed,
        }
    }
}

/// JSON file body: `{ "provenance": {...}, "data": ... }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document<T> {
    pub provenance: Provenance,
    pub data: T,
}

impl<T: Serialize> Document<T> {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("document serializes");
        s.push('\n');
        s
    }
}

impl<T: DeserializeOwned> Document<T> {
    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        Ok(serde_json::from_str(text)?)
    }
}

pub fn read_text(path: &Path) -> Result<String, FormatError> {
    fs::read_to_string(path).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), FormatError> {
    fs::write(path, text).map_err(|source| FormatError::Io {
        path: path.to_path_buf(),
        source,
    })
}
