//! Benchmarks the dispatch-based pipeline stages against straight
//! sequential loops over the same work. Build with the default
//! features for the threaded dispatcher, or with
//! `--no-default-features` to measure the sequential dispatcher under
//! the same harness.

use criterion::{criterion_group, criterion_main, Criterion};

use trollsweep_core::features::{
    default_reference_time, extract_features, featurize_corpora, FeatureContext, LanguageTable,
    FEATURE_COUNT,
};
use trollsweep_core::learn::{train, Algorithm, ModelMeta, TrainConfig};
use trollsweep_core::model::Corpus;
use trollsweep_core::stats::{comparison_report, ks_test, DEFAULT_ALPHA};
use trollsweep_core::source::SourceCatalog;
use trollsweep_core::synth::{generate, SynthConfig};

fn corpora() -> (Corpus, Corpus) {
    let config = SynthConfig { n_troll: 40, n_benign: 40, seed: 77, ..SynthConfig::default() };
    generate(&config).expect("generation is infallible for valid configs")
}

fn bench_featurize(c: &mut Criterion) {
    let (trolls, benign) = corpora();
    let catalog = SourceCatalog::default();
    let languages = LanguageTable::default();
    let refs = [&trolls, &benign];
    let ctx = FeatureContext {
        reference_time: default_reference_time(&refs),
        catalog: &catalog,
        languages: &languages,
    };

    let mut group = c.benchmark_group("featurize");
    group.sample_size(10);
    group.bench_function("dispatch", |b| {
        b.iter(|| featurize_corpora(&refs, &ctx).unwrap());
    });
    group.bench_function("sequential_loop", |b| {
        b.iter(|| {
            let mut rows = Vec::new();
            for corpus in refs {
                for account in &corpus.accounts {
                    rows.push(extract_features(account, &ctx).unwrap());
                }
            }
            rows
        });
    });
    group.finish();
}

fn bench_ks(c: &mut Criterion) {
    let (trolls, benign) = corpora();
    let catalog = SourceCatalog::default();
    let languages = LanguageTable::default();
    let refs = [&trolls, &benign];
    let ctx = FeatureContext {
        reference_time: default_reference_time(&refs),
        catalog: &catalog,
        languages: &languages,
    };
    let ds = featurize_corpora(&refs, &ctx).unwrap();
    let all: Vec<usize> = (0..FEATURE_COUNT).collect();

    let mut group = c.benchmark_group("ks_report");
    group.sample_size(10);
    group.bench_function("dispatch", |b| {
        b.iter(|| comparison_report(&ds, &all, DEFAULT_ALPHA).unwrap());
    });
    group.bench_function("sequential_loop", |b| {
        b.iter(|| {
            use trollsweep_core::model::CorpusLabel;
            let mut results = Vec::new();
            for &i in &all {
                let a = ds.column_by_label(i, CorpusLabel::Troll);
                let b = ds.column_by_label(i, CorpusLabel::Benign);
                results.push(ks_test(&a, &b, DEFAULT_ALPHA).unwrap());
            }
            results
        });
    });
    group.finish();
}

fn bench_forest(c: &mut Criterion) {
    let (trolls, benign) = corpora();
    let catalog = SourceCatalog::default();
    let languages = LanguageTable::default();
    let refs = [&trolls, &benign];
    let ctx = FeatureContext {
        reference_time: default_reference_time(&refs),
        catalog: &catalog,
        languages: &languages,
    };
    let ds = featurize_corpora(&refs, &ctx).unwrap();
    let config = TrainConfig {
        forest_trees: 25,
        ..TrainConfig::new(Algorithm::RandomForest, 7)
    };

    let mut group = c.benchmark_group("forest_train");
    group.sample_size(10);
    group.bench_function("25_trees", |b| {
        b.iter(|| train(&ds, &config, ModelMeta::default()).unwrap());
    });
    group.finish();
}

criterion_group!(benches, bench_featurize, bench_ks, bench_forest);
criterion_main!(benches);
