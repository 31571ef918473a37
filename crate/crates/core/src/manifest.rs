//! Run manifests: a sidecar JSON record of what produced an output
//! file, with content digests for every input and output. Manifests
//! carry no timestamps, so reruns with identical inputs produce
//! identical manifests.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::stylometry;

/// SHA-256 of a file's bytes, lowercase hex.
pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 64 * 1024];
    loop {
        let n = file.read(&mut buf).map_err(|e| Error::io(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(format!("{:x}", hasher.finalize()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FileDigest {
    /// The path as the caller gave it, not canonicalized.
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    pub fn for_path(path: &Path) -> Result<FileDigest> {
        Ok(FileDigest { path: path.display().to_string(), sha256: sha256_file(path)? })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordlistDigests {
    pub function_words_sha256: String,
    pub stopwords_sha256: String,
}

/// The full provenance record for one tool invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    /// Flattened invocation parameters, stringified.
    pub config: BTreeMap<String, String>,
    pub inputs: Vec<FileDigest>,
    pub outputs: Vec<FileDigest>,
    pub wordlists: WordlistDigests,
    pub catalog_sha256: String,
}

impl Manifest {
    pub fn new(subcommand: &str, catalog_sha256: String) -> Manifest {
        Manifest {
            tool: "trollsweep".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            subcommand: subcommand.to_string(),
            config: BTreeMap::new(),
            inputs: Vec::new(),
            outputs: Vec::new(),
            wordlists: WordlistDigests {
                function_words_sha256: stylometry::function_words_sha256(),
                stopwords_sha256: stylometry::stopwords_sha256(),
            },
            catalog_sha256,
        }
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.config.insert(key.to_string(), value.to_string());
        self
    }

    pub fn add_input(&mut self, path: &Path) -> Result<&mut Self> {
        self.inputs.push(FileDigest::for_path(path)?);
        Ok(self)
    }

    pub fn add_output(&mut self, path: &Path) -> Result<&mut Self> {
        self.outputs.push(FileDigest::for_path(path)?);
        Ok(self)
    }

    /// The manifest path for an output file: `<output>.manifest.json`
    /// alongside it.
    pub fn path_for(output: &Path) -> PathBuf {
        let name = output.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        output.with_file_name(format!("{name}.manifest.json"))
    }

    /// Serialize next to the given output file and return the manifest
    /// path.
    pub fn write_beside(&self, output: &Path) -> Result<PathBuf> {
        let path = Manifest::path_for(output);
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::malformed(&path, format!("manifest serialization: {e}")))?;
        std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
        Ok(path)
    }
}
