//! Client-application intelligence. Campaign operators fabricate client
//! names that imitate real ones through stray whitespace or case
//! changes ("Twitter for  Android", "hootsuite"); organic users cannot
//! produce these because real clients register one exact name. The
//! catalog pins down the legitimate names and the classification rules.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

const DEFAULT_CATALOG: &str = include_str!("../resources/default_catalog.toml");

/// Coarse class of a client-application name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceClass {
    /// Official first-party client, exact name.
    Regular,
    /// Known scheduling/automation service, exact name.
    Scheduling,
    /// Fabricated imitation of a legitimate client.
    Fake,
    /// Anything else: minor real clients, custom apps, unknowns.
    Other,
}

impl std::fmt::Display for SourceClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SourceClass::Regular => "regular",
            SourceClass::Scheduling => "scheduling",
            SourceClass::Fake => "fake",
            SourceClass::Other => "other",
        };
        f.write_str(s)
    }
}

/// The four name lists driving source classification. Serializes to a
/// TOML file with one array per list, so deployments can extend it
/// without rebuilding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceCatalog {
    pub regular: BTreeSet<String>,
    pub scheduling: BTreeSet<String>,
    pub canonical: BTreeSet<String>,
    pub known_fakes: BTreeSet<String>,
}

impl Default for SourceCatalog {
    fn default() -> Self {
        toml::from_str(DEFAULT_CATALOG).expect("embedded catalog parses")
    }
}

impl SourceCatalog {
    pub fn from_toml_file(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        toml::from_str(&raw).map_err(|e| Error::malformed(path, format!("catalog: {e}")))
    }

    pub fn to_toml_file(&self, path: &Path) -> Result<()> {
        let raw = toml::to_string_pretty(self)
            .map_err(|e| Error::malformed(path, format!("catalog serialize: {e}")))?;
        std::fs::write(path, raw).map_err(|e| Error::io(path, e))
    }

    /// Content hash over the canonical serialization, recorded in
    /// manifests and model files so results can be tied to the exact
    /// catalog that produced them.
    pub fn sha256(&self) -> String {
        let raw = toml::to_string(self).expect("catalog serializes");
        let mut h = Sha256::new();
        h.update(raw.as_bytes());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Normalize a client name for imitation matching: trim outer
/// whitespace, squeeze internal whitespace runs to single spaces,
/// lowercase.
pub fn collapse(name: &str) -> String {
    name.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// Is this client name a fabricated imitation?
///
/// The explicit fake list wins first; an exactly canonical name is
/// never fake; otherwise the name is fake when its collapsed form
/// lands on a collapsed canonical name. So "Twitter for  Android" is
/// fake while "Twitter for Android" is not, and "Moments Internal
/// Auth" is neither (just unrecognized).
pub fn is_fake_source(name: &str, catalog: &SourceCatalog) -> bool {
    if catalog.known_fakes.contains(name) {
        return true;
    }
    if catalog.canonical.contains(name) {
        return false;
    }
    let collapsed = collapse(name);
    if collapsed.is_empty() {
        return false;
    }
    catalog.canonical.iter().any(|c| collapse(c) == collapsed)
}

/// Classify a client name. Precedence: regular, then scheduling, then
/// fake, then other.
pub fn classify_source(name: &str, catalog: &SourceCatalog) -> SourceClass {
    if catalog.regular.contains(name) {
        SourceClass::Regular
    } else if catalog.scheduling.contains(name) {
        SourceClass::Scheduling
    } else if is_fake_source(name, catalog) {
        SourceClass::Fake
    } else {
        SourceClass::Other
    }
}
