//! The 45-dimensional per-account feature vector and the dataset
//! machinery around it: metadata (rows 1-10), the 24-hour activity
//! profile (rows 11-34), stylometric aggregates (rows 35-42), and
//! client-source signals (rows 43-45).
//!
//! Feature extraction is a pure function of (account, context), is
//! invariant to tweet order, and always yields finite values. Accounts
//! with no tweets degrade to zeros everywhere except the profile
//! metadata.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::model::{Account, Corpus, CorpusLabel, Tweet};
use crate::source::{classify_source, SourceCatalog, SourceClass};
use crate::stylometry;

pub const FEATURE_COUNT: usize = 45;

/// Names of the 45 features, in vector order. Pinned by a golden-file
/// test; changing a name or position is a format break.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "tweet_count",
    "account_age_days",
    "followers",
    "following",
    "language",
    "description_length",
    "description_language",
    "cumulative_mentions_per_tweet",
    "average_tweet_length",
    "retweet_fraction",
    "hour_00",
    "hour_01",
    "hour_02",
    "hour_03",
    "hour_04",
    "hour_05",
    "hour_06",
    "hour_07",
    "hour_08",
    "hour_09",
    "hour_10",
    "hour_11",
    "hour_12",
    "hour_13",
    "hour_14",
    "hour_15",
    "hour_16",
    "hour_17",
    "hour_18",
    "hour_19",
    "hour_20",
    "hour_21",
    "hour_22",
    "hour_23",
    "average_tweet_word_count",
    "average_tweet_unique_words",
    "average_tweet_stopword_count",
    "average_tweet_punctuation_count",
    "average_word_length",
    "average_sentence_length",
    "average_sentence_complexity",
    "function_to_non_function_words_ratio",
    "distinct_sources",
    "fraction_fake_sources",
    "fraction_regular_sources",
];

/// Index of a feature by name.
pub fn feature_index(name: &str) -> Option<usize> {
    FEATURE_NAMES.iter().position(|n| *n == name)
}

/// The four feature families used by the ablation study, as index
/// ranges into the vector.
pub fn feature_groups() -> [(&'static str, std::ops::Range<usize>); 4] {
    [
        ("metadata", 0..10),
        ("temporal", 10..34),
        ("stylometry", 34..42),
        ("source", 42..45),
    ]
}

const DEFAULT_LANGUAGES: &str = include_str!("../resources/languages.txt");

/// Ordered language-code table mapping codes to small integers:
/// position + 1, with 0 for unknown or empty. The table is persisted
/// with trained models so prediction-time encoding always matches
/// training-time encoding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageTable {
    codes: Vec<String>,
}

impl Default for LanguageTable {
    fn default() -> Self {
        LanguageTable {
            codes: DEFAULT_LANGUAGES.lines().map(|l| l.trim().to_string()).filter(|l| !l.is_empty()).collect(),
        }
    }
}

impl LanguageTable {
    pub fn new(codes: Vec<String>) -> Self {
        let mut seen = BTreeSet::new();
        let codes = codes
            .into_iter()
            .map(|c| c.trim().to_lowercase())
            .filter(|c| !c.is_empty() && seen.insert(c.clone()))
            .collect();
        LanguageTable { codes }
    }

    pub fn codes(&self) -> &[String] {
        &self.codes
    }

    /// Encode a language code as its 1-based table position, 0 when
    /// absent. Region subtags fall back to the primary tag, so "en-gb"
    /// encodes like "en" unless listed itself.
    pub fn encode(&self, code: &str) -> usize {
        let lower = code.trim().to_lowercase();
        if lower.is_empty() {
            return 0;
        }
        if let Some(pos) = self.codes.iter().position(|c| *c == lower) {
            return pos + 1;
        }
        if let Some((primary, _)) = lower.split_once('-') {
            if let Some(pos) = self.codes.iter().position(|c| *c == primary) {
                return pos + 1;
            }
        }
        0
    }

    /// Build a table from observed corpora: codes ordered by descending
    /// frequency over account and tweet languages (ties alphabetical),
    /// with "en" forced to position 1.
    pub fn from_corpora(corpora: &[&Corpus]) -> Self {
        let mut counts: std::collections::BTreeMap<String, u64> = std::collections::BTreeMap::new();
        for corpus in corpora {
            for account in &corpus.accounts {
                for code in [&account.account_language, &account.description_language] {
                    let c = code.trim().to_lowercase();
                    if !c.is_empty() {
                        *counts.entry(c).or_insert(0) += 1;
                    }
                }
                for tweet in &account.tweets {
                    let c = tweet.language.trim().to_lowercase();
                    if !c.is_empty() {
                        *counts.entry(c).or_insert(0) += 1;
                    }
                }
            }
        }
        let mut ordered: Vec<(String, u64)> = counts.into_iter().collect();
        ordered.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        let mut codes: Vec<String> = ordered.into_iter().map(|(c, _)| c).collect();
        if let Some(pos) = codes.iter().position(|c| c == "en") {
            codes.remove(pos);
        }
        codes.insert(0, "en".to_string());
        LanguageTable { codes }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let raw = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let table = LanguageTable::new(raw.lines().map(str::to_string).collect());
        if table.codes.is_empty() {
            return Err(Error::malformed(path, "language table has no codes"));
        }
        Ok(table)
    }

    pub fn to_file(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.codes.join("\n") + "\n").map_err(|e| Error::io(path, e))
    }
}

/// Everything feature extraction needs besides the account itself.
pub struct FeatureContext<'a> {
    /// Timestamp against which account age is measured, UTC epoch
    /// seconds. Usually the newest tweet in the data under analysis.
    pub reference_time: i64,
    pub catalog: &'a SourceCatalog,
    pub languages: &'a LanguageTable,
}

/// Newest tweet timestamp across the corpora, the usual reference
/// point. Falls back to the newest account-creation time when there
/// are no tweets at all.
pub fn default_reference_time(corpora: &[&Corpus]) -> i64 {
    let newest_tweet = corpora
        .iter()
        .flat_map(|c| c.accounts.iter())
        .flat_map(|a| a.tweets.iter())
        .map(|t| t.timestamp)
        .max();
    newest_tweet.unwrap_or_else(|| {
        corpora
            .iter()
            .flat_map(|c| c.accounts.iter())
            .map(|a| a.creation_time)
            .max()
            .unwrap_or(0)
    })
}

/// One extracted 45-feature vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub values: Vec<f64>,
}

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        feature_index(name).map(|i| self.values[i])
    }
}

/// Fraction of tweets falling in each UTC hour of day. All zeros for
/// an empty slice; otherwise the 24 bins sum to 1.
pub fn hourly_histogram(tweets: &[Tweet]) -> [f64; 24] {
    let mut bins = [0.0f64; 24];
    if tweets.is_empty() {
        return bins;
    }
    for t in tweets {
        let hour = ((t.timestamp % 86_400) / 3_600) as usize;
        bins[hour] += 1.0;
    }
    let n = tweets.len() as f64;
    for b in &mut bins {
        *b /= n;
    }
    bins
}

/// Extract the 45-feature vector for one account.
///
/// Fails only when the reference time precedes the account's creation
/// time, which would make the age negative.
pub fn extract_features(account: &Account, ctx: &FeatureContext<'_>) -> Result<FeatureVector> {
    if ctx.reference_time < account.creation_time {
        return Err(Error::InvalidArgument(format!(
            "reference time {} precedes creation time of account '{}'",
            ctx.reference_time, account.account_id
        )));
    }
    let mut v = vec![0.0f64; FEATURE_COUNT];
    let n = account.tweets.len();

    v[0] = n as f64;
    v[1] = (ctx.reference_time - account.creation_time) as f64 / 86_400.0;
    v[2] = account.followers as f64;
    v[3] = account.following as f64;
    v[4] = ctx.languages.encode(&account.account_language) as f64;
    v[5] = account.description.chars().count() as f64;
    v[6] = ctx.languages.encode(&account.description_language) as f64;

    if n > 0 {
        let nf = n as f64;
        let mut mentions = 0usize;
        let mut chars = 0usize;
        let mut retweets = 0usize;
        let mut distinct_clients: BTreeSet<&str> = BTreeSet::new();
        let mut fake = 0usize;
        let mut regular = 0usize;
        let mut words = 0.0;
        let mut unique = 0.0;
        let mut stop = 0.0;
        let mut punct = 0.0;
        let mut word_len = 0.0;
        let mut sent_len = 0.0;
        let mut ease = 0.0;
        let mut function_total = 0u64;
        let mut non_function_total = 0u64;
        for t in &account.tweets {
            mentions += stylometry::count_mentions(&t.text);
            chars += t.text.chars().count();
            retweets += t.is_retweet as usize;
            distinct_clients.insert(t.client.as_str());
            match classify_source(&t.client, ctx.catalog) {
                SourceClass::Fake => fake += 1,
                SourceClass::Regular => regular += 1,
                _ => {}
            }
            let s = stylometry::analyze(&t.text);
            words += s.word_count as f64;
            unique += s.unique_word_count as f64;
            stop += s.stopword_count as f64;
            punct += s.punctuation_count as f64;
            word_len += s.mean_word_length;
            sent_len += s.mean_sentence_length;
            ease += s.reading_ease;
            function_total += s.function_word_count as u64;
            non_function_total += s.non_function_word_count as u64;
        }

        v[7] = mentions as f64 / nf;
        v[8] = chars as f64 / nf;
        v[9] = retweets as f64 / nf;
        let hours = hourly_histogram(&account.tweets);
        v[10..34].copy_from_slice(&hours);
        v[34] = words / nf;
        v[35] = unique / nf;
        v[36] = stop / nf;
        v[37] = punct / nf;
        v[38] = word_len / nf;
        v[39] = sent_len / nf;
        v[40] = ease / nf;
        v[41] = if non_function_total > 0 {
            function_total as f64 / non_function_total as f64
        } else {
            0.0
        };
        v[42] = distinct_clients.len() as f64;
        v[43] = fake as f64 / nf;
        v[44] = regular as f64 / nf;
    }

    debug_assert!(v.iter().all(|x| x.is_finite()));
    Ok(FeatureVector { values: v })
}

/// One labeled dataset row: the vector plus identity and provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetRow {
    pub account_id: String,
    pub label: CorpusLabel,
    /// Campaign tag for troll rows, corpus origin otherwise.
    pub provenance: String,
    pub values: Vec<f64>,
}

/// A feature matrix with aligned labels and per-row provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub rows: Vec<DatasetRow>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn count_label(&self, label: CorpusLabel) -> usize {
        self.rows.iter().filter(|r| r.label == label).count()
    }

    /// One feature column as a vector.
    pub fn column(&self, index: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.values[index]).collect()
    }

    /// One feature column restricted to rows of a label.
    pub fn column_by_label(&self, index: usize, label: CorpusLabel) -> Vec<f64> {
        self.rows.iter().filter(|r| r.label == label).map(|r| r.values[index]).collect()
    }

    /// Project onto a subset of feature columns, preserving rows.
    pub fn subset_columns(&self, indices: &[usize]) -> Result<Dataset> {
        for &i in indices {
            if i >= self.feature_names.len() {
                return Err(Error::InvalidArgument(format!(
                    "feature index {i} out of range ({} features)",
                    self.feature_names.len()
                )));
            }
        }
        Ok(Dataset {
            feature_names: indices.iter().map(|&i| self.feature_names[i].clone()).collect(),
            rows: self
                .rows
                .iter()
                .map(|r| DatasetRow {
                    account_id: r.account_id.clone(),
                    label: r.label,
                    provenance: r.provenance.clone(),
                    values: indices.iter().map(|&i| r.values[i]).collect(),
                })
                .collect(),
        })
    }

    fn provenance_path(path: &Path) -> PathBuf {
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        path.with_file_name(format!("{stem}.provenance.csv"))
    }

    /// Write the matrix as CSV (feature columns plus a final `label`
    /// column) with an identity sidecar next to it.
    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| Error::malformed(path, e.to_string()))?;
        let mut header: Vec<String> = self.feature_names.clone();
        header.push("label".into());
        w.write_record(&header).map_err(|e| Error::malformed(path, e.to_string()))?;
        for row in &self.rows {
            let mut rec: Vec<String> = row.values.iter().map(|v| v.to_string()).collect();
            rec.push(row.label.to_string());
            w.write_record(&rec).map_err(|e| Error::malformed(path, e.to_string()))?;
        }
        w.flush().map_err(|e| Error::io(path, e))?;

        let side = Self::provenance_path(path);
        let mut w = csv::Writer::from_path(&side).map_err(|e| Error::malformed(&side, e.to_string()))?;
        w.write_record(["account_id", "label", "provenance"])
            .map_err(|e| Error::malformed(&side, e.to_string()))?;
        for row in &self.rows {
            w.write_record([row.account_id.as_str(), &row.label.to_string(), &row.provenance])
                .map_err(|e| Error::malformed(&side, e.to_string()))?;
        }
        w.flush().map_err(|e| Error::io(&side, e))
    }

    /// Read a matrix written by [`Dataset::save_csv`]. The sidecar is
    /// optional; without it rows get positional identities.
    pub fn load_csv(path: &Path) -> Result<Dataset> {
        let mut r = csv::Reader::from_path(path).map_err(|e| Error::malformed(path, e.to_string()))?;
        let headers = r.headers().map_err(|e| Error::malformed(path, e.to_string()))?.clone();
        if headers.len() < 2 || headers.iter().next_back() != Some("label") {
            return Err(Error::malformed(path, "expected feature columns plus a trailing 'label' column"));
        }
        let feature_names: Vec<String> =
            headers.iter().take(headers.len() - 1).map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, record) in r.records().enumerate() {
            let record = record.map_err(|e| Error::malformed(path, e.to_string()))?;
            if record.len() != headers.len() {
                return Err(Error::malformed(path, format!("row {}: wrong column count", i + 1)));
            }
            let mut values = Vec::with_capacity(feature_names.len());
            for field in record.iter().take(feature_names.len()) {
                let x: f64 = field
                    .parse()
                    .map_err(|_| Error::malformed(path, format!("row {}: bad number '{field}'", i + 1)))?;
                values.push(x);
            }
            let label: CorpusLabel = record.iter().next_back().unwrap().parse()?;
            rows.push(DatasetRow {
                account_id: format!("row{:06}", i + 1),
                label,
                provenance: String::new(),
                values,
            });
        }
        let side = Self::provenance_path(path);
        if side.exists() {
            let mut r = csv::Reader::from_path(&side).map_err(|e| Error::malformed(&side, e.to_string()))?;
            let mut ids = Vec::new();
            for record in r.records() {
                let record = record.map_err(|e| Error::malformed(&side, e.to_string()))?;
                ids.push((
                    record.get(0).unwrap_or("").to_string(),
                    record.get(2).unwrap_or("").to_string(),
                ));
            }
            if ids.len() != rows.len() {
                return Err(Error::malformed(&side, "sidecar row count does not match matrix"));
            }
            for (row, (id, prov)) in rows.iter_mut().zip(ids) {
                row.account_id = id;
                row.provenance = prov;
            }
        }
        Ok(Dataset { feature_names: feature_names.clone(), rows })
    }
}

fn row_provenance(account: &Account, corpus: &Corpus) -> String {
    if account.campaign.is_empty() {
        corpus.source_path.clone()
    } else {
        account.campaign.clone()
    }
}

/// Featurize every account of every corpus into one dataset. Rows are
/// sorted by account id so the result is independent of work-sharding.
pub fn featurize_corpora(corpora: &[&Corpus], ctx: &FeatureContext<'_>) -> Result<Dataset> {
    let mut items: Vec<(String, CorpusLabel, String, &Account)> = Vec::new();
    for corpus in corpora {
        for account in &corpus.accounts {
            items.push((account.account_id.clone(), account.label, row_provenance(account, corpus), account));
        }
    }
    let results = exec::par_map(items, |(id, label, provenance, account)| {
        extract_features(account, ctx).map(|fv| DatasetRow {
            account_id: id,
            label,
            provenance,
            values: fv.values,
        })
    });
    let mut rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.account_id.cmp(&b.account_id));
    Ok(Dataset {
        feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
        rows,
    })
}

/// Build a balanced two-class dataset: `n_per_class` accounts sampled
/// uniformly without replacement from each corpus (all of them, with a
/// warning, when a side is short), featurized, and shuffled. Fully
/// determined by `seed`.
pub fn balance_sample(
    trolls: &Corpus,
    benign: &Corpus,
    n_per_class: usize,
    seed: u64,
    ctx: &FeatureContext<'_>,
) -> Result<(Dataset, Vec<String>)> {
    if n_per_class == 0 {
        return Err(Error::InvalidArgument("n_per_class must be positive".into()));
    }
    let mut warnings = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut pick = |corpus: &Corpus, want: usize, side: &str, rng: &mut ChaCha8Rng| -> Vec<usize> {
        let have = corpus.accounts.len();
        if have < want {
            warnings.push(format!(
                "{side} corpus has {have} accounts, fewer than the requested {want}; using all"
            ));
            (0..have).collect()
        } else {
            rand::seq::index::sample(rng, have, want).into_vec()
        }
    };
    let troll_idx = pick(trolls, n_per_class, "troll", &mut rng);
    let benign_idx = pick(benign, n_per_class, "benign", &mut rng);

    let mut items: Vec<(CorpusLabel, String, &Account)> = Vec::new();
    for &i in &troll_idx {
        let a = &trolls.accounts[i];
        items.push((CorpusLabel::Troll, row_provenance(a, trolls), a));
    }
    for &i in &benign_idx {
        let a = &benign.accounts[i];
        items.push((CorpusLabel::Benign, row_provenance(a, benign), a));
    }
    let results = exec::par_map(items, |(label, provenance, account)| {
        extract_features(account, ctx).map(|fv| DatasetRow {
            account_id: account.account_id.clone(),
            label,
            provenance,
            values: fv.values,
        })
    });
    let mut rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    rows.shuffle(&mut rng);
    Ok((
        Dataset { feature_names: FEATURE_NAMES.iter().map(|s| s.to_string()).collect(), rows },
        warnings,
    ))
}
