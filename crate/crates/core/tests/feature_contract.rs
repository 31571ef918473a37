//! The feature vector is a public contract: fixed width, fixed names,
//! fixed group boundaries, and fixed degenerate behavior. Downstream
//! models and serialized datasets all assume it, so it is pinned
//! against a checked-in golden file.

use trollsweep_core::features::{
    extract_features, feature_groups, feature_index, FeatureContext, LanguageTable,
    FEATURE_COUNT, FEATURE_NAMES,
};
use trollsweep_core::model::{Account, CorpusLabel, Tweet};
use trollsweep_core::source::SourceCatalog;

const DAY: i64 = 86_400;

fn account(tweets: Vec<Tweet>) -> Account {
    Account {
        account_id: "a1".into(),
        screen_name: "a1".into(),
        description: "short words".into(),
        account_language: "en".into(),
        description_language: "en".into(),
        followers: 42,
        following: 17,
        creation_time: 10 * DAY,
        campaign: "c".into(),
        label: CorpusLabel::Troll,
        tweets,
    }
}

fn tweet(id: &str, ts: i64) -> Tweet {
    Tweet {
        tweet_id: id.into(),
        account_id: "a1".into(),
        text: "Plain words for the test.".into(),
        timestamp: ts,
        client: "Twitter Web Client".into(),
        language: "en".into(),
        is_retweet: false,
    }
}

#[test]
fn names_match_the_golden_file() {
    let golden = include_str!("data/feature_names.golden");
    let expected: Vec<&str> = golden.lines().collect();
    assert_eq!(expected.len(), FEATURE_COUNT);
    assert_eq!(FEATURE_NAMES.to_vec(), expected);
    // Names are unique and addressable.
    for (i, name) in FEATURE_NAMES.iter().enumerate() {
        assert_eq!(feature_index(name), Some(i), "{name} does not resolve to its slot");
    }
}

#[test]
fn groups_tile_the_vector() {
    let groups = feature_groups();
    let mut covered = [false; FEATURE_COUNT];
    for (_, range) in &groups {
        for i in range.clone() {
            assert!(!covered[i], "feature {i} claimed by two groups");
            covered[i] = true;
        }
    }
    assert!(covered.iter().all(|&c| c), "every feature belongs to a group");
    let names: Vec<&str> = groups.iter().map(|(n, _)| *n).collect();
    assert_eq!(names, ["metadata", "temporal", "stylometry", "source"]);
}

#[test]
fn hourly_bins_sum_to_one_for_active_accounts() {
    let catalog = SourceCatalog::default();
    let languages = LanguageTable::default();
    let ctx =
        FeatureContext { reference_time: 100 * DAY, catalog: &catalog, languages: &languages };
    let tweets: Vec<Tweet> =
        (0..17).map(|i| tweet(&format!("t{i}"), 50 * DAY + (i as i64) * 5_000)).collect();
    let fv = extract_features(&account(tweets), &ctx).unwrap();
    let hour_range = feature_groups()[1].1.clone();
    let hourly: f64 = (hour_range.start..hour_range.start + 24).map(|i| fv.values[i]).sum();
    assert!((hourly - 1.0).abs() < 1e-9, "hourly mass {hourly}");
}

#[test]
fn zero_tweet_account_degenerates_cleanly() {
    let catalog = SourceCatalog::default();
    let languages = LanguageTable::default();
    let ctx =
        FeatureContext { reference_time: 100 * DAY, catalog: &catalog, languages: &languages };
    let fv = extract_features(&account(vec![]), &ctx).unwrap();
    assert_eq!(fv.values.len(), FEATURE_COUNT);
    // Profile-derived slots still carry the profile.
    assert_eq!(fv.get("tweet_count"), Some(0.0));
    assert_eq!(fv.get("account_age_days"), Some(90.0));
    assert_eq!(fv.get("followers"), Some(42.0));
    assert_eq!(fv.get("following"), Some(17.0));
    assert_eq!(fv.get("description_length"), Some("short words".len() as f64));
    // Everything behavioral is exactly zero, including the histogram.
    for (i, v) in fv.values.iter().enumerate().skip(7) {
        assert_eq!(*v, 0.0, "feature {} should be 0 for an empty account", FEATURE_NAMES[i]);
    }
}
