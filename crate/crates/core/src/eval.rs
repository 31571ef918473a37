//! Evaluation protocols that go beyond cross-validation: training on
//! one campaign and detecting the others, bounding false positives on
//! a disjoint benign holdout, and sweeping an unlabeled corpus for
//! accounts that imitate first-party clients.

use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::features::{balance_sample, extract_features, FeatureContext};
use crate::learn::{predict, train, TrainConfig, TrainedModel};
use crate::model::{Account, Corpus, CorpusLabel};
use crate::source::is_fake_source;

/// Minimum campaign size worth training a round on.
const MIN_CAMPAIGN_ACCOUNTS: usize = 2;

/// Scores for one target campaign under a model trained elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetOutcome {
    pub campaign: String,
    /// Accounts that could be featurized and scored.
    pub scored: usize,
    /// Accounts dropped because features could not be extracted.
    pub skipped: usize,
    pub detected: usize,
    pub detection_rate: f64,
}

/// One training round: a model fit on a single campaign, applied to
/// every other campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignRound {
    pub train_campaign: String,
    pub training_trolls: usize,
    pub training_benign: usize,
    pub warnings: Vec<String>,
    pub targets: Vec<TargetOutcome>,
    pub overall_scored: usize,
    pub overall_detected: usize,
    pub overall_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCampaignReport {
    pub seed: u64,
    pub n_per_class: usize,
    pub threshold: f64,
    pub campaigns: Vec<String>,
    /// Campaigns excluded for having fewer than two accounts.
    pub skipped_campaigns: Vec<String>,
    pub rounds: Vec<CampaignRound>,
}

fn campaign_of(account: &Account) -> String {
    if account.campaign.is_empty() { "unattributed".to_string() } else { account.campaign.clone() }
}

/// The holdout protocols featurize accounts into the full canonical
/// vector, so a model trained on renamed or subset columns cannot be
/// applied meaningfully and is refused by name, not just by width.
fn ensure_canonical_features(model: &TrainedModel) -> Result<()> {
    if model.feature_names != crate::features::FEATURE_NAMES {
        return Err(Error::Protocol(format!(
            "model was trained on {} non-canonical feature columns; these protocols need a \
             model trained on the full canonical feature set",
            model.feature_names.len()
        )));
    }
    Ok(())
}

/// Featurize accounts one by one, keeping (id, values) for the ones
/// that succeed and counting the ones that do not.
fn score_rows(
    accounts: &[&Account],
    ctx: &FeatureContext<'_>,
) -> (Vec<(String, Vec<f64>)>, usize) {
    let results = exec::par_map(accounts.to_vec(), |account| {
        extract_features(account, ctx).map(|fv| (account.account_id.clone(), fv.values)).ok()
    });
    let mut rows = Vec::new();
    let mut skipped = 0usize;
    for r in results {
        match r {
            Some(row) => rows.push(row),
            None => skipped += 1,
        }
    }
    (rows, skipped)
}

/// Leave-one-campaign-in evaluation. For every campaign in the troll
/// corpora, a balanced model is trained on that campaign alone against
/// a benign pool sampled once up front, then asked to flag the
/// accounts of every other campaign. A target account counts as
/// detected when its score reaches `threshold`.
///
/// Training and target identities must not overlap; an overlap means
/// the inputs were mislabeled and is reported as an error rather than
/// silently inflating detection.
pub fn leave_one_campaign_eval(
    trolls: &[&Corpus],
    benign: &Corpus,
    ctx: &FeatureContext<'_>,
    config: &TrainConfig,
    n_per_class: usize,
    threshold: f64,
) -> Result<CrossCampaignReport> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidArgument(format!(
            "threshold must lie in [0, 1], got {threshold}"
        )));
    }
    // Group troll accounts by campaign across all input corpora.
    let mut by_campaign: std::collections::BTreeMap<String, Vec<&Account>> =
        std::collections::BTreeMap::new();
    for corpus in trolls {
        for account in &corpus.accounts {
            by_campaign.entry(campaign_of(account)).or_default().push(account);
        }
    }
    let mut campaigns = Vec::new();
    let mut skipped_campaigns = Vec::new();
    for (name, accounts) in &by_campaign {
        if accounts.len() < MIN_CAMPAIGN_ACCOUNTS {
            skipped_campaigns.push(name.clone());
        } else {
            campaigns.push(name.clone());
        }
    }
    if campaigns.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "cross-campaign evaluation needs at least 2 usable campaigns, found {}",
            campaigns.len()
        )));
    }

    // One benign pool, sampled once, shared by every round.
    let pool_size = n_per_class.min(benign.accounts.len());
    if pool_size == 0 {
        return Err(Error::EmptyCorpus { path: benign.source_path.clone().into() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let pool_idx = rand::seq::index::sample(&mut rng, benign.accounts.len(), pool_size);
    let pool_accounts: Vec<Account> =
        pool_idx.iter().map(|i| benign.accounts[i].clone()).collect();
    let benign_pool = Corpus::new(pool_accounts, CorpusLabel::Benign, "benign-pool")?;

    let mut rounds = Vec::new();
    for train_name in &campaigns {
        let train_accounts: Vec<Account> =
            by_campaign[train_name].iter().map(|a| (*a).clone()).collect();
        let campaign_corpus =
            Corpus::new(train_accounts, CorpusLabel::Troll, format!("campaign:{train_name}"))?;
        let (ds, warnings) = balance_sample(&campaign_corpus, &benign_pool, n_per_class, config.seed, ctx)?;
        let model = train(&ds, config, Default::default())?;
        let training_trolls = ds.count_label(CorpusLabel::Troll);
        let training_benign = ds.count_label(CorpusLabel::Benign);
        let trained_ids: BTreeSet<&str> =
            model.training_account_ids.iter().map(|s| s.as_str()).collect();

        let mut targets = Vec::new();
        let mut overall_scored = 0usize;
        let mut overall_detected = 0usize;
        for target_name in &campaigns {
            if target_name == train_name {
                continue;
            }
            let target_accounts = &by_campaign[target_name];
            if let Some(overlap) =
                target_accounts.iter().find(|a| trained_ids.contains(a.account_id.as_str()))
            {
                return Err(Error::Protocol(format!(
                    "account {} appears in both the {train_name} training set and the \
                     {target_name} targets; campaigns must be disjoint",
                    overlap.account_id
                )));
            }
            let (rows, skipped) = score_rows(target_accounts, ctx);
            let mut detected = 0usize;
            for (_, values) in &rows {
                let (_, score) = predict(&model, values)?;
                if score >= threshold {
                    detected += 1;
                }
            }
            let scored = rows.len();
            overall_scored += scored;
            overall_detected += detected;
            targets.push(TargetOutcome {
                campaign: target_name.clone(),
                scored,
                skipped,
                detected,
                detection_rate: if scored == 0 { 0.0 } else { detected as f64 / scored as f64 },
            });
        }
        rounds.push(CampaignRound {
            train_campaign: train_name.clone(),
            training_trolls,
            training_benign,
            warnings,
            targets,
            overall_scored,
            overall_detected,
            overall_rate: if overall_scored == 0 {
                0.0
            } else {
                overall_detected as f64 / overall_scored as f64
            },
        });
    }
    Ok(CrossCampaignReport {
        seed: config.seed,
        n_per_class,
        threshold,
        campaigns,
        skipped_campaigns,
        rounds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsePositiveReport {
    pub threshold: f64,
    /// Holdout accounts scored.
    pub scored: usize,
    pub skipped: usize,
    pub flagged: Vec<String>,
    pub false_positive_rate: f64,
}

/// Scores a benign holdout with a trained model and reports the
/// fraction flagged as trolls. The holdout must be disjoint from the
/// model's training accounts; any overlap is an error because it would
/// understate the true false-positive rate.
pub fn false_positive_eval(
    model: &TrainedModel,
    holdout: &Corpus,
    ctx: &FeatureContext<'_>,
    threshold: f64,
) -> Result<FalsePositiveReport> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidArgument(format!(
            "threshold must lie in [0, 1], got {threshold}"
        )));
    }
    ensure_canonical_features(model)?;
    if holdout.accounts.is_empty() {
        return Err(Error::EmptyCorpus { path: holdout.source_path.clone().into() });
    }
    let trained_ids: BTreeSet<&str> =
        model.training_account_ids.iter().map(|s| s.as_str()).collect();
    if let Some(overlap) =
        holdout.accounts.iter().find(|a| trained_ids.contains(a.account_id.as_str()))
    {
        return Err(Error::Protocol(format!(
            "holdout account {} was part of training; the holdout must be disjoint",
            overlap.account_id
        )));
    }
    let refs: Vec<&Account> = holdout.accounts.iter().collect();
    let (rows, skipped) = score_rows(&refs, ctx);
    let mut flagged = Vec::new();
    for (id, values) in &rows {
        let (_, score) = predict(model, values)?;
        if score >= threshold {
            flagged.push(id.clone());
        }
    }
    let scored = rows.len();
    let rate = if scored == 0 { 0.0 } else { flagged.len() as f64 / scored as f64 };
    Ok(FalsePositiveReport {
        threshold,
        scored,
        skipped,
        flagged,
        false_positive_rate: rate,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WildAccount {
    pub account_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WildReport {
    pub threshold: f64,
    pub total_accounts: usize,
    /// Accounts that posted through at least one client judged fake.
    pub candidate_count: usize,
    pub skipped: usize,
    pub flagged: Vec<WildAccount>,
    /// Flagged fraction of the scored candidates; 0 when none qualify.
    pub flagged_rate: f64,
}

/// Sweep an unlabeled corpus for troll-like accounts. Only accounts
/// that used a client name judged to impersonate a first-party client
/// are scored; everything else is left alone, which keeps the sweep's
/// precision tied to the strength of that prior.
pub fn detect_in_wild(
    model: &TrainedModel,
    corpus: &Corpus,
    ctx: &FeatureContext<'_>,
    threshold: f64,
) -> Result<WildReport> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidArgument(format!(
            "threshold must lie in [0, 1], got {threshold}"
        )));
    }
    ensure_canonical_features(model)?;
    if corpus.label == CorpusLabel::Troll {
        return Err(Error::InvalidArgument(
            "in-the-wild detection expects an unlabeled or benign corpus, not a troll corpus"
                .into(),
        ));
    }
    let candidates: Vec<&Account> = corpus
        .accounts
        .iter()
        .filter(|a| a.tweets.iter().any(|t| is_fake_source(&t.client, ctx.catalog)))
        .collect();
    let candidate_count = candidates.len();
    let (rows, skipped) = score_rows(&candidates, ctx);
    let mut flagged = Vec::new();
    for (id, values) in &rows {
        let (_, score) = predict(model, values)?;
        if score >= threshold {
            flagged.push(WildAccount { account_id: id.clone(), score });
        }
    }
    let scored = rows.len();
    let rate = if scored == 0 { 0.0 } else { flagged.len() as f64 / scored as f64 };
    Ok(WildReport {
        threshold,
        total_accounts: corpus.accounts.len(),
        candidate_count,
        skipped,
        flagged,
        flagged_rate: rate,
    })
}
