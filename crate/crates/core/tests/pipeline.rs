//! End-to-end flow through the library: generate a corpus pair,
//! featurize, contrast, train every classifier, persist, reload, and
//! run the holdout protocols. Everything here is seed-pinned.

use trollsweep_core::eval::{detect_in_wild, false_positive_eval};
use trollsweep_core::features::{
    balance_sample, default_reference_time, featurize_corpora, FeatureContext, LanguageTable,
};
use trollsweep_core::learn::{
    cv::cross_validate, load_model, predict_dataset, save_model, train, Algorithm, ModelMeta,
    TrainConfig,
};
use trollsweep_core::model::{Corpus, CorpusLabel};
use trollsweep_core::source::SourceCatalog;
use trollsweep_core::stats::{comparison_report, DEFAULT_ALPHA};
use trollsweep_core::synth::{generate, SynthConfig};

fn setup(seed: u64, n: usize) -> (Corpus, Corpus) {
    let config = SynthConfig { n_troll: n, n_benign: n, seed, ..SynthConfig::default() };
    generate(&config).unwrap()
}

#[test]
fn full_pipeline_from_generation_to_detection() {
    let (trolls, benign) = setup(1234, 24);
    let catalog = SourceCatalog::default();
    let languages = LanguageTable::default();
    let refs = [&trolls, &benign];
    let ctx = FeatureContext {
        reference_time: default_reference_time(&refs),
        catalog: &catalog,
        languages: &languages,
    };

    let ds = featurize_corpora(&refs, &ctx).unwrap();
    assert_eq!(ds.len(), 48);
    assert_eq!(ds.count_label(CorpusLabel::Troll), 24);

    // The generated contrast shows up in the population comparison.
    let all: Vec<usize> = (0..ds.feature_names.len()).collect();
    let report = comparison_report(&ds, &all, DEFAULT_ALPHA).unwrap();
    let significant: Vec<&str> = report
        .rows
        .iter()
        .filter(|r| r.significant)
        .map(|r| r.feature.as_str())
        .collect();
    for expected in ["retweet_fraction", "fraction_fake_sources", "cumulative_mentions_per_tweet"]
    {
        assert!(significant.contains(&expected), "{expected} should separate: {significant:?}");
    }

    // Every classifier family learns the contrast.
    for algorithm in [
        Algorithm::Knn,
        Algorithm::DecisionTree,
        Algorithm::LinearSvm,
        Algorithm::RandomForest,
    ] {
        let mut config = TrainConfig::new(algorithm, 9);
        config.forest_trees = 30;
        let cv = cross_validate(&ds, &config, 4).unwrap();
        assert!(
            cv.pooled.f1 > 0.85,
            "{algorithm:?} pooled f1 {} below expectation",
            cv.pooled.f1
        );
    }
}

#[test]
fn persisted_model_predicts_identically() {
    let (trolls, benign) = setup(77, 20);
    let catalog = SourceCatalog::default();
    let languages = LanguageTable::default();
    let refs = [&trolls, &benign];
    let ctx = FeatureContext {
        reference_time: default_reference_time(&refs),
        catalog: &catalog,
        languages: &languages,
    };
    let (ds, warnings) = balance_sample(&trolls, &benign, 20, 5, &ctx).unwrap();
    assert!(warnings.is_empty());

    let config = TrainConfig { forest_trees: 30, ..TrainConfig::new(Algorithm::RandomForest, 5) };
    let meta = ModelMeta::new(&languages, catalog.sha256());
    let model = train(&ds, &config, meta).unwrap();

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("model.json");
    save_model(&model, &path).unwrap();
    let reloaded = load_model(&path).unwrap();

    let fresh = predict_dataset(&model, &ds).unwrap();
    let persisted = predict_dataset(&reloaded, &ds).unwrap();
    assert_eq!(fresh, persisted);
}

#[test]
fn holdout_protocols_hold_on_synthetic_populations() {
    let (trolls, benign) = setup(31, 30);
    let catalog = SourceCatalog::default();
    let languages = LanguageTable::default();
    let refs = [&trolls, &benign];
    let ctx = FeatureContext {
        reference_time: default_reference_time(&refs),
        catalog: &catalog,
        languages: &languages,
    };
    let (ds, _) = balance_sample(&trolls, &benign, 30, 3, &ctx).unwrap();
    let config = TrainConfig { forest_trees: 30, ..TrainConfig::new(Algorithm::RandomForest, 3) };
    let model = train(&ds, &config, ModelMeta::default()).unwrap();

    // A disjoint benign population generated from another seed stays
    // almost entirely unflagged.
    let (_, holdout) = setup(32, 40);
    let fp = false_positive_eval(&model, &holdout, &ctx, 0.5).unwrap();
    assert_eq!(fp.scored, 40);
    assert!(
        fp.false_positive_rate <= 0.05,
        "false positive rate {} too high",
        fp.false_positive_rate
    );

    // An unlabeled mixed population is swept through the fake-client
    // gate: only impersonating-client users are candidates, and the
    // troll-like ones among them get flagged.
    let (wild_trolls, wild_benign) = setup(33, 25);
    let mut accounts = wild_trolls.accounts.clone();
    accounts.extend(wild_benign.accounts.iter().cloned());
    for a in &mut accounts {
        a.label = CorpusLabel::Unlabeled;
        a.campaign = String::new();
    }
    let wild = Corpus::new(accounts, CorpusLabel::Unlabeled, "wild").unwrap();
    let sweep = detect_in_wild(&model, &wild, &ctx, 0.5).unwrap();
    assert_eq!(sweep.total_accounts, 50);
    assert!(sweep.candidate_count > 0);
    assert!(sweep.candidate_count < 50, "the client gate must filter");
    assert!(!sweep.flagged.is_empty());
    assert!(sweep.flagged.iter().all(|f| f.score >= 0.5));
}
