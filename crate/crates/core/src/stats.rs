//! Population-contrast statistics: two-sample Kolmogorov-Smirnov tests
//! over feature columns, TF-IDF vocabulary contrast, per-campaign
//! activity metrics, client-app time series, cross-corpus duplicate
//! text detection, and source-count CDFs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::features::Dataset;
use crate::model::{Account, Corpus, CorpusLabel};
use crate::source::{classify_source, SourceCatalog, SourceClass};
use crate::stylometry;

/// Significance level used throughout unless a caller overrides it.
pub const DEFAULT_ALPHA: f64 = 0.01;

/// Outcome of one two-sample KS test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n1: usize,
    pub n2: usize,
    pub alpha: f64,
    pub significant: bool,
}

/// Two-sample KS statistic: the largest absolute gap between the two
/// empirical CDFs, evaluated at the pooled sample points.
fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n1, n2) = (a.len() as f64, b.len() as f64);
    let mut i = 0usize;
    let mut j = 0usize;
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        let diff = (i as f64 / n1 - j as f64 / n2).abs();
        if diff > d {
            d = diff;
        }
    }
    d
}

/// Asymptotic two-sided p-value for the KS statistic, via the
/// alternating series Q(lambda) = 2 * sum_k (-1)^(k-1) exp(-2 k^2
/// lambda^2) with the effective-size correction. Terms are truncated
/// below 1e-12 and the result clamped to [0, 1]. Small lambda is
/// short-circuited to 1: the series stops converging usefully there
/// while the true limit is 1.
fn ks_p_value(d: f64, n1: usize, n2: usize) -> f64 {
    if d <= 0.0 {
        return 1.0;
    }
    let n_e = (n1 as f64 * n2 as f64) / (n1 as f64 + n2 as f64);
    let sqrt_ne = n_e.sqrt();
    let lambda = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d;
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0f64;
    let mut sign = 1.0f64;
    for k in 1..=1000u32 {
        let term = 2.0 * (-2.0 * (k as f64) * (k as f64) * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-12 {
            break;
        }
        sign = -sign;
    }
    sum.clamp(0.0, 1.0)
}

/// Run the two-sample KS test. Errors when either sample is empty.
pub fn ks_test(a: &[f64], b: &[f64], alpha: f64) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidArgument("ks test needs two non-empty samples".into()));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidArgument(format!("alpha {alpha} outside [0, 1]")));
    }
    let statistic = ks_statistic(a, b);
    let p_value = ks_p_value(statistic, a.len(), b.len());
    Ok(KsResult {
        statistic,
        p_value,
        n1: a.len(),
        n2: b.len(),
        alpha,
        significant: p_value < alpha,
    })
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        0.0
    } else {
        xs.iter().sum::<f64>() / xs.len() as f64
    }
}

/// One feature's row in a population-contrast report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub feature: String,
    pub statistic: f64,
    pub p_value: f64,
    pub significant: bool,
    pub troll_mean: f64,
    pub benign_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub alpha: f64,
    pub troll_rows: usize,
    pub benign_rows: usize,
    pub rows: Vec<ComparisonRow>,
}

/// KS-test every requested feature column, troll rows against benign
/// rows. Feature order in the report follows the request order.
pub fn comparison_report(ds: &Dataset, features: &[usize], alpha: f64) -> Result<ComparisonReport> {
    let troll_rows = ds.count_label(CorpusLabel::Troll);
    let benign_rows = ds.count_label(CorpusLabel::Benign);
    if troll_rows == 0 || benign_rows == 0 {
        return Err(Error::InvalidArgument(
            "comparison needs both troll and benign rows in the dataset".into(),
        ));
    }
    for &f in features {
        if f >= ds.feature_names.len() {
            return Err(Error::InvalidArgument(format!(
                "feature index {f} out of range ({} features)",
                ds.feature_names.len()
            )));
        }
    }
    let results = exec::par_map(features.to_vec(), |f| {
        let troll = ds.column_by_label(f, CorpusLabel::Troll);
        let benign = ds.column_by_label(f, CorpusLabel::Benign);
        ks_test(&troll, &benign, alpha).map(|ks| ComparisonRow {
            feature: ds.feature_names[f].clone(),
            statistic: ks.statistic,
            p_value: ks.p_value,
            significant: ks.significant,
            troll_mean: mean(&troll),
            benign_mean: mean(&benign),
        })
    });
    let rows = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(ComparisonReport { alpha, troll_rows, benign_rows, rows })
}

/// A scored vocabulary term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermScore {
    pub term: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TfidfReport {
    pub group_a: Vec<TermScore>,
    pub group_b: Vec<TermScore>,
}

/// How corpora become TF-IDF documents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DocUnit {
    /// One document per account: all its tweets concatenated.
    Account,
    /// One document per tweet.
    Tweet,
}

impl std::str::FromStr for DocUnit {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "account" => Ok(DocUnit::Account),
            "tweet" => Ok(DocUnit::Tweet),
            other => Err(Error::InvalidArgument(format!(
                "unknown document unit '{other}' (expected account or tweet)"
            ))),
        }
    }
}

/// Turn a corpus into TF-IDF documents under the chosen unit.
pub fn documents(corpus: &Corpus, unit: DocUnit) -> Vec<String> {
    match unit {
        DocUnit::Account => corpus
            .accounts
            .iter()
            .map(|a| a.tweets.iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join("\n"))
            .collect(),
        DocUnit::Tweet => corpus
            .accounts
            .iter()
            .flat_map(|a| a.tweets.iter().map(|t| t.text.clone()))
            .collect(),
    }
}

fn term_counts(doc: &str) -> BTreeMap<String, u64> {
    let mut counts = BTreeMap::new();
    for token in stylometry::tokenize(doc) {
        *counts.entry(token.to_lowercase()).or_insert(0) += 1;
    }
    counts
}

/// Contrast the vocabularies of two document groups. IDF is computed
/// over the union (ln of total documents over document frequency), raw
/// term counts serve as TF, and each group's term score is the sum of
/// tf*idf over its documents. Returns the top `k` terms per group,
/// ties broken alphabetically.
pub fn tfidf_contrast(docs_a: &[String], docs_b: &[String], k: usize) -> Result<TfidfReport> {
    if docs_a.is_empty() || docs_b.is_empty() {
        return Err(Error::InvalidArgument("tfidf needs two non-empty document groups".into()));
    }
    let n_docs = (docs_a.len() + docs_b.len()) as f64;
    let counted_a: Vec<BTreeMap<String, u64>> =
        exec::par_map(docs_a.to_vec(), |d| term_counts(&d));
    let counted_b: Vec<BTreeMap<String, u64>> =
        exec::par_map(docs_b.to_vec(), |d| term_counts(&d));

    let mut df: BTreeMap<&str, u64> = BTreeMap::new();
    for doc in counted_a.iter().chain(counted_b.iter()) {
        for term in doc.keys() {
            *df.entry(term.as_str()).or_insert(0) += 1;
        }
    }

    let group_score = |docs: &[BTreeMap<String, u64>]| -> Vec<TermScore> {
        let mut totals: BTreeMap<&str, u64> = BTreeMap::new();
        for doc in docs {
            for (term, tf) in doc {
                *totals.entry(term.as_str()).or_insert(0) += tf;
            }
        }
        let mut scored: Vec<TermScore> = totals
            .into_iter()
            .map(|(term, tf)| {
                let idf = (n_docs / df[term] as f64).ln();
                TermScore { term: term.to_string(), score: tf as f64 * idf }
            })
            .collect();
        scored.sort_by(|a, b| {
            b.score.partial_cmp(&a.score).unwrap().then_with(|| a.term.cmp(&b.term))
        });
        scored.truncate(k);
        scored
    };

    Ok(TfidfReport { group_a: group_score(&counted_a), group_b: group_score(&counted_b) })
}

/// Aggregate activity profile of one corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignMetrics {
    pub name: String,
    pub account_count: usize,
    pub tweet_count: usize,
    pub tweets_per_account: f64,
    pub retweet_fraction: f64,
    pub fake_source_fraction: f64,
    pub scheduling_source_fraction: f64,
    pub regular_source_fraction: f64,
    pub distinct_sources: usize,
    pub distinct_fake_sources: usize,
    /// Mean tweets per distinct fabricated client name; 0 without any.
    pub tweets_per_fake_source: f64,
}

/// Compute the activity metrics of a corpus under a catalog.
pub fn campaign_metrics(corpus: &Corpus, catalog: &SourceCatalog) -> CampaignMetrics {
    let name = {
        let campaigns = corpus.campaigns();
        if campaigns.is_empty() {
            corpus.source_path.clone()
        } else {
            campaigns.join("+")
        }
    };
    let account_count = corpus.accounts.len();
    let tweet_count = corpus.tweet_count();
    let mut retweets = 0usize;
    let mut fake = 0usize;
    let mut scheduling = 0usize;
    let mut regular = 0usize;
    let mut sources: BTreeMap<&str, SourceClass> = BTreeMap::new();
    for account in &corpus.accounts {
        for tweet in &account.tweets {
            retweets += tweet.is_retweet as usize;
            let class = *sources
                .entry(tweet.client.as_str())
                .or_insert_with(|| classify_source(&tweet.client, catalog));
            match class {
                SourceClass::Fake => fake += 1,
                SourceClass::Scheduling => scheduling += 1,
                SourceClass::Regular => regular += 1,
                SourceClass::Other => {}
            }
        }
    }
    let distinct_fake_sources =
        sources.values().filter(|c| **c == SourceClass::Fake).count();
    let frac = |x: usize| if tweet_count > 0 { x as f64 / tweet_count as f64 } else { 0.0 };
    CampaignMetrics {
        name,
        account_count,
        tweet_count,
        tweets_per_account: if account_count > 0 {
            tweet_count as f64 / account_count as f64
        } else {
            0.0
        },
        retweet_fraction: frac(retweets),
        fake_source_fraction: frac(fake),
        scheduling_source_fraction: frac(scheduling),
        regular_source_fraction: frac(regular),
        distinct_sources: sources.len(),
        distinct_fake_sources,
        tweets_per_fake_source: if distinct_fake_sources > 0 {
            fake as f64 / distinct_fake_sources as f64
        } else {
            0.0
        },
    }
}

/// One bin of an application time series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimePoint {
    pub bin_start: i64,
    pub count: u64,
}

/// Tweet counts over time for one exact client name, in fixed-width
/// bins. Only non-empty bins appear; bins are sorted ascending.
pub fn app_timeseries(corpora: &[&Corpus], app: &str, bin_seconds: i64) -> Result<Vec<TimePoint>> {
    if bin_seconds <= 0 {
        return Err(Error::InvalidArgument("bin width must be positive".into()));
    }
    let mut bins: BTreeMap<i64, u64> = BTreeMap::new();
    for corpus in corpora {
        for account in &corpus.accounts {
            for tweet in &account.tweets {
                if tweet.client == app {
                    let bin = tweet.timestamp.div_euclid(bin_seconds) * bin_seconds;
                    *bins.entry(bin).or_insert(0) += 1;
                }
            }
        }
    }
    Ok(bins.into_iter().map(|(bin_start, count)| TimePoint { bin_start, count }).collect())
}

/// A tweet text shared across corpora.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuplicateRecord {
    /// Normalized form shared by the occurrences.
    pub text: String,
    /// Corpora the text appears in, by corpus name, sorted.
    pub corpora: Vec<String>,
    /// Total occurrences across all corpora.
    pub occurrences: u64,
}

/// Normalize tweet text for duplicate matching: drop a manual-retweet
/// prefix ("RT @user:"), drop URL tokens, collapse whitespace,
/// lowercase. Retweets of the same underlying text thus match across
/// different retweeters.
pub fn normalize_for_duplicates(text: &str) -> String {
    let body = if text.starts_with("RT @") {
        match text.find(':') {
            Some(pos) => &text[pos + 1..],
            None => text,
        }
    } else {
        text
    };
    body.split_whitespace()
        .filter(|t| !t.starts_with("http://") && !t.starts_with("https://"))
        .collect::<Vec<_>>()
        .join(" ")
        .to_lowercase()
}

/// Find normalized tweet texts appearing in at least `min_corpora`
/// distinct corpora. Sorted by breadth, then occurrences, then text.
pub fn cross_corpus_duplicates(corpora: &[&Corpus], min_corpora: usize) -> Result<Vec<DuplicateRecord>> {
    if min_corpora < 2 {
        return Err(Error::InvalidArgument("min_corpora must be at least 2".into()));
    }
    let mut seen: BTreeMap<String, BTreeMap<String, u64>> = BTreeMap::new();
    for corpus in corpora {
        for account in &corpus.accounts {
            for tweet in &account.tweets {
                let norm = normalize_for_duplicates(&tweet.text);
                if norm.is_empty() {
                    continue;
                }
                *seen
                    .entry(norm)
                    .or_default()
                    .entry(corpus.source_path.clone())
                    .or_insert(0) += 1;
            }
        }
    }
    let mut records: Vec<DuplicateRecord> = seen
        .into_iter()
        .filter(|(_, per)| per.len() >= min_corpora)
        .map(|(text, per)| DuplicateRecord {
            text,
            occurrences: per.values().sum(),
            corpora: per.into_keys().collect(),
        })
        .collect();
    records.sort_by(|a, b| {
        b.corpora
            .len()
            .cmp(&a.corpora.len())
            .then_with(|| b.occurrences.cmp(&a.occurrences))
            .then_with(|| a.text.cmp(&b.text))
    });
    Ok(records)
}

/// One point of an empirical CDF.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub value: f64,
    pub cumulative: f64,
}

/// Empirical CDF of distinct client-name counts per account, pooled
/// over the given corpora. Monotone non-decreasing, ends at 1.
pub fn source_count_cdf(corpora: &[&Corpus]) -> Result<Vec<CdfPoint>> {
    let accounts: Vec<&Account> =
        corpora.iter().flat_map(|c| c.accounts.iter()).collect();
    if accounts.is_empty() {
        return Err(Error::InvalidArgument("cdf needs at least one account".into()));
    }
    let mut counts: Vec<usize> = accounts
        .iter()
        .map(|a| {
            a.tweets
                .iter()
                .map(|t| t.client.as_str())
                .collect::<std::collections::BTreeSet<_>>()
                .len()
        })
        .collect();
    counts.sort_unstable();
    let n = counts.len() as f64;
    let mut points = Vec::new();
    let mut i = 0usize;
    while i < counts.len() {
        let v = counts[i];
        while i < counts.len() && counts[i] == v {
            i += 1;
        }
        points.push(CdfPoint { value: v as f64, cumulative: i as f64 / n });
    }
    Ok(points)
}
