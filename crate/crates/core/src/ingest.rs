//! Parsers for the two dump shapes in the wild: campaign CSV exports
//! (one row per tweet, account metadata repeated on every row) and
//! 1%-sample JSONL (one API-shaped tweet object per line). Both
//! normalize into [`Corpus`].
//!
//! Robustness policy: a row or line that cannot be understood is
//! skipped and counted, never fatal; structural problems (missing
//! required columns, empty files) are errors. Parsing may shard by line
//! ranges; account assembly merges by id, which is associative and
//! order-insensitive, so sharding cannot change the result.

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader};
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime, TimeZone, Utc};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{Account, Corpus, CorpusLabel, Tweet};

/// A parsed corpus plus the count of rows/lines the parser had to skip.
#[derive(Debug)]
pub struct Ingested {
    pub corpus: Corpus,
    pub skipped: usize,
}

/// Extract the human-readable client name from a raw `source` value.
///
/// Dumps store the client either as plain text (`Twitter Web Client`)
/// or as the API's anchor tag (`<a href="..." rel="nofollow">Twitter
/// for iPhone</a>`). The anchor form is unwrapped and HTML entities are
/// decoded; anything else passes through unchanged. No whitespace is
/// trimmed: leading/trailing spaces are exactly what the fake-source
/// analysis looks for.
pub fn decode_client_name(raw: &str) -> String {
    if let Some(inner) = anchor_inner(raw) {
        decode_entities(inner)
    } else {
        decode_entities(raw)
    }
}

fn anchor_inner(raw: &str) -> Option<&str> {
    let rest = raw.strip_prefix("<a")?;
    // Either `<a>` directly or `<a ...attrs...>`.
    let open_end = rest.find('>')?;
    if open_end > 0 && !rest[..open_end].starts_with([' ', '\t']) {
        return None;
    }
    let body = &rest[open_end + 1..];
    let inner = body.strip_suffix("</a>")?;
    Some(inner)
}

fn decode_entities(s: &str) -> String {
    if !s.contains('&') {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let tail = &rest[amp..];
        match tail.find(';') {
            Some(semi) if semi <= 12 => {
                let entity = &tail[1..semi];
                let decoded = match entity {
                    "amp" => Some('&'),
                    "lt" => Some('<'),
                    "gt" => Some('>'),
                    "quot" => Some('"'),
                    "apos" => Some('\''),
                    _ => entity
                        .strip_prefix('#')
                        .and_then(|num| {
                            if let Some(hex) = num.strip_prefix('x').or_else(|| num.strip_prefix('X')) {
                                u32::from_str_radix(hex, 16).ok()
                            } else {
                                num.parse::<u32>().ok()
                            }
                        })
                        .and_then(char::from_u32),
                };
                match decoded {
                    Some(c) => {
                        out.push(c);
                        rest = &tail[semi + 1..];
                    }
                    None => {
                        out.push('&');
                        rest = &tail[1..];
                    }
                }
            }
            _ => {
                out.push('&');
                rest = &tail[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

/// Parse a timestamp in any format the dumps use, to UTC epoch seconds.
/// Returns `None` for unparseable or pre-1970 values.
pub fn parse_timestamp(s: &str) -> Option<i64> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let naive_formats = ["%Y-%m-%d %H:%M:%S", "%Y-%m-%d %H:%M"];
    for fmt in naive_formats {
        if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
            return positive(Utc.from_utc_datetime(&dt).timestamp());
        }
    }
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        let dt = d.and_hms_opt(0, 0, 0)?;
        return positive(Utc.from_utc_datetime(&dt).timestamp());
    }
    // Classic API format: "Wed Oct 10 20:19:24 +0000 2018".
    if let Ok(dt) = DateTime::parse_from_str(s, "%a %b %d %H:%M:%S %z %Y") {
        return positive(dt.timestamp());
    }
    if let Ok(dt) = DateTime::parse_from_rfc2822(s) {
        return positive(dt.timestamp());
    }
    None
}

fn positive(ts: i64) -> Option<i64> {
    (ts >= 0).then_some(ts)
}

fn parse_bool(s: &str) -> bool {
    matches!(s.trim().to_ascii_lowercase().as_str(), "true" | "t" | "1" | "yes")
}

/// A tweet is a retweet when the dump says so or the text carries the
/// conventional manual-retweet prefix.
pub fn is_retweet(flag: bool, text: &str) -> bool {
    flag || text.starts_with("RT @")
}

const CSV_COLUMNS: [&str; 13] = [
    "userid",
    "user_screen_name",
    "user_profile_description",
    "account_creation_date",
    "account_language",
    "follower_count",
    "following_count",
    "tweetid",
    "tweet_text",
    "tweet_time",
    "tweet_client_name",
    "tweet_language",
    "is_retweet",
];

/// Parse a campaign CSV export. Each row is one tweet with the posting
/// account's metadata inlined; metadata is taken from the account's
/// first row. The campaign tag defaults to the file stem when the
/// label is troll, and stays empty otherwise.
pub fn parse_campaign_csv(path: &Path, label: CorpusLabel) -> Result<Ingested> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(BufReader::new(file));

    let headers = reader
        .headers()
        .map_err(|e| Error::malformed(path, format!("header: {e}")))?
        .clone();
    let mut idx = BTreeMap::new();
    for (i, name) in headers.iter().enumerate() {
        idx.entry(name.to_string()).or_insert(i);
    }
    for required in CSV_COLUMNS {
        if !idx.contains_key(required) {
            return Err(Error::MissingColumn { path: path.to_path_buf(), column: required.into() });
        }
    }
    let col = |name: &str| idx[name];
    let campaign = if label == CorpusLabel::Troll {
        path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
    } else {
        String::new()
    };

    let mut builders: BTreeMap<String, Account> = BTreeMap::new();
    let mut skipped = 0usize;
    for record in reader.records() {
        let record = match record {
            Ok(r) => r,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        let field = |name: &str| record.get(col(name)).unwrap_or("");
        let account_id = field("userid").to_string();
        if account_id.is_empty() {
            skipped += 1;
            continue;
        }
        let Some(tweet_time) = parse_timestamp(field("tweet_time")) else {
            skipped += 1;
            continue;
        };
        let account = builders.entry(account_id.clone()).or_insert_with(|| {
            let account_language = field("account_language").to_string();
            Account {
                account_id: account_id.clone(),
                screen_name: field("user_screen_name").to_string(),
                description: field("user_profile_description").to_string(),
                description_language: account_language.clone(),
                account_language,
                followers: field("follower_count").trim().parse().unwrap_or(0),
                following: field("following_count").trim().parse().unwrap_or(0),
                creation_time: parse_timestamp(field("account_creation_date")).unwrap_or(0),
                campaign: campaign.clone(),
                label,
                tweets: Vec::new(),
            }
        });
        let text = field("tweet_text").to_string();
        account.tweets.push(Tweet {
            tweet_id: field("tweetid").to_string(),
            account_id,
            is_retweet: is_retweet(parse_bool(field("is_retweet")), &text),
            text,
            timestamp: tweet_time,
            client: decode_client_name(field("tweet_client_name")),
            language: field("tweet_language").to_string(),
        });
    }

    let accounts: Vec<Account> = builders.into_values().collect();
    if accounts.is_empty() {
        return Err(Error::EmptyCorpus { path: path.to_path_buf() });
    }
    let corpus = Corpus::new(accounts, label, path.display().to_string())?;
    Ok(Ingested { corpus, skipped })
}

#[derive(Deserialize)]
struct SampleUser {
    id_str: Option<String>,
    id: Option<u64>,
    screen_name: Option<String>,
    description: Option<String>,
    lang: Option<String>,
    followers_count: Option<u64>,
    friends_count: Option<u64>,
    created_at: Option<String>,
}

#[derive(Deserialize)]
struct SampleTweet {
    id_str: Option<String>,
    id: Option<u64>,
    text: Option<String>,
    full_text: Option<String>,
    created_at: Option<String>,
    source: Option<String>,
    lang: Option<String>,
    retweeted_status: Option<serde_json::Value>,
    user: Option<SampleUser>,
}

/// Parse 1%-sample JSONL: one API tweet object per line, grouped here
/// into accounts. Sample data is unlabeled organic traffic, so the
/// corpus comes back benign-labeled; callers dealing with suspect data
/// can relabel before analysis.
pub fn parse_sample_jsonl(path: &Path) -> Result<Ingested> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);

    let mut builders: BTreeMap<String, Account> = BTreeMap::new();
    let mut skipped = 0usize;
    for line in reader.lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: SampleTweet = match serde_json::from_str(&line) {
            Ok(t) => t,
            Err(_) => {
                skipped += 1;
                continue;
            }
        };
        let Some(user) = parsed.user else {
            skipped += 1;
            continue;
        };
        let account_id = match (&user.id_str, user.id) {
            (Some(s), _) if !s.is_empty() => s.clone(),
            (_, Some(n)) => n.to_string(),
            _ => {
                skipped += 1;
                continue;
            }
        };
        let Some(timestamp) = parsed.created_at.as_deref().and_then(parse_timestamp) else {
            skipped += 1;
            continue;
        };
        let text = parsed.text.or(parsed.full_text).unwrap_or_default();
        let tweet_id = match (&parsed.id_str, parsed.id) {
            (Some(s), _) if !s.is_empty() => s.clone(),
            (_, Some(n)) => n.to_string(),
            _ => {
                skipped += 1;
                continue;
            }
        };
        let account = builders.entry(account_id.clone()).or_insert_with(|| {
            let account_language = user.lang.clone().unwrap_or_default();
            Account {
                account_id: account_id.clone(),
                screen_name: user.screen_name.clone().unwrap_or_default(),
                description: user.description.clone().unwrap_or_default(),
                description_language: account_language.clone(),
                account_language,
                followers: user.followers_count.unwrap_or(0),
                following: user.friends_count.unwrap_or(0),
                creation_time: user.created_at.as_deref().and_then(parse_timestamp).unwrap_or(0),
                campaign: String::new(),
                label: CorpusLabel::Benign,
                tweets: Vec::new(),
            }
        });
        account.tweets.push(Tweet {
            tweet_id,
            account_id,
            is_retweet: is_retweet(parsed.retweeted_status.is_some(), &text),
            text,
            timestamp,
            client: decode_client_name(parsed.source.as_deref().unwrap_or("")),
            language: parsed.lang.unwrap_or_default(),
        });
    }

    let accounts: Vec<Account> = builders.into_values().collect();
    if accounts.is_empty() {
        return Err(Error::EmptyCorpus { path: path.to_path_buf() });
    }
    let corpus = Corpus::new(accounts, CorpusLabel::Benign, path.display().to_string())?;
    Ok(Ingested { corpus, skipped })
}
