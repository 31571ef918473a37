//! Canonical in-memory form of a data dump: corpora of accounts, each
//! carrying its tweets. Every ingest path normalizes into these types,
//! and every downstream stage consumes them.

use std::fmt;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Class tag carried by corpora and their accounts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusLabel {
    Troll,
    Benign,
    Unlabeled,
}

impl fmt::Display for CorpusLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CorpusLabel::Troll => "troll",
            CorpusLabel::Benign => "benign",
            CorpusLabel::Unlabeled => "unlabeled",
        };
        f.write_str(s)
    }
}

impl FromStr for CorpusLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "troll" => Ok(CorpusLabel::Troll),
            "benign" => Ok(CorpusLabel::Benign),
            "unlabeled" => Ok(CorpusLabel::Unlabeled),
            other => Err(Error::InvalidArgument(format!(
                "unknown label '{other}' (expected troll, benign, or unlabeled)"
            ))),
        }
    }
}

/// One tweet, normalized. `client` is the human-readable application
/// name after anchor-tag decoding; `timestamp` is UTC epoch seconds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tweet {
    pub tweet_id: String,
    pub account_id: String,
    pub text: String,
    pub timestamp: i64,
    pub client: String,
    pub language: String,
    pub is_retweet: bool,
}

/// One account with its profile metadata and tweets.
///
/// Invariant: `tweets` is sorted by (timestamp, tweet_id) ascending and
/// every tweet's `account_id` equals this account's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Account {
    pub account_id: String,
    pub screen_name: String,
    pub description: String,
    pub account_language: String,
    pub description_language: String,
    pub followers: u64,
    pub following: u64,
    /// Profile creation time, UTC epoch seconds.
    pub creation_time: i64,
    /// Campaign tag for troll dumps; empty for benign/unlabeled data.
    pub campaign: String,
    pub label: CorpusLabel,
    pub tweets: Vec<Tweet>,
}

impl Account {
    /// Restore the invariants after construction or mutation: sort
    /// tweets by (timestamp, tweet_id) and stamp the owning account id.
    pub fn normalize(&mut self) {
        for t in &mut self.tweets {
            t.account_id = self.account_id.clone();
        }
        self.tweets
            .sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then_with(|| a.tweet_id.cmp(&b.tweet_id)));
    }
}

/// A set of accounts sharing one provenance and label.
///
/// Invariant: `accounts` is sorted by `account_id` and ids are unique.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub accounts: Vec<Account>,
    pub label: CorpusLabel,
    /// Where this corpus came from, for reports. Not semantic: two
    /// corpora differing only here compare equal for analysis purposes.
    pub source_path: String,
}

impl Corpus {
    pub fn new(mut accounts: Vec<Account>, label: CorpusLabel, source_path: impl Into<String>) -> Result<Self> {
        accounts.sort_by(|a, b| a.account_id.cmp(&b.account_id));
        for w in accounts.windows(2) {
            if w[0].account_id == w[1].account_id {
                return Err(Error::InvalidArgument(format!(
                    "duplicate account_id '{}' in corpus",
                    w[0].account_id
                )));
            }
        }
        for a in &mut accounts {
            a.normalize();
            a.label = label;
        }
        Ok(Corpus { accounts, label, source_path: source_path.into() })
    }

    pub fn tweet_count(&self) -> usize {
        self.accounts.iter().map(|a| a.tweets.len()).sum()
    }

    /// Distinct campaign tags present, sorted. Empty tags are skipped.
    pub fn campaigns(&self) -> Vec<String> {
        let mut names: Vec<String> =
            self.accounts.iter().map(|a| a.campaign.clone()).filter(|c| !c.is_empty()).collect();
        names.sort();
        names.dedup();
        names
    }
}

/// Write a corpus in the interchange format: one JSON account record per
/// line, accounts in id order. Reading the file back yields a corpus
/// that compares equal (up to `source_path`).
pub fn write_canonical_jsonl(corpus: &Corpus, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for account in &corpus.accounts {
        let line = serde_json::to_string(account)
            .map_err(|e| Error::malformed(path, format!("serialize: {e}")))?;
        writeln!(out, "{line}").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

/// Read a corpus written by [`write_canonical_jsonl`]. The corpus label
/// is taken from the account records, which must all agree.
pub fn read_canonical_jsonl(path: &Path) -> Result<Corpus> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut accounts = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let account: Account = serde_json::from_str(&line)
            .map_err(|e| Error::malformed(path, format!("line {}: {e}", lineno + 1)))?;
        accounts.push(account);
    }
    if accounts.is_empty() {
        return Err(Error::EmptyCorpus { path: path.to_path_buf() });
    }
    let label = accounts[0].label;
    if let Some(bad) = accounts.iter().find(|a| a.label != label) {
        return Err(Error::malformed(
            path,
            format!("mixed labels: account '{}' is {}, expected {label}", bad.account_id, bad.label),
        ));
    }
    Corpus::new(accounts, label, path.display().to_string())
}
