//! Synthetic two-population corpus generation with tunable contrast
//! knobs. Every behavioral difference between the generated troll and
//! benign populations is an explicit parameter, so evaluation
//! scenarios (full contrast, source-only contrast, permuted nulls) can
//! be constructed instead of found.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::model::{Account, Corpus, CorpusLabel, Tweet};

/// Midnight-aligned epoch anchor for generated activity; tweets land
/// in the 90 days before it, account creation well before that.
const DAY_BASE: i64 = 1_499_990_400;

/// The benign population's fixed behavior. The troll knobs in
/// [`SynthConfig`] contrast against these.
const BENIGN_SCHEDULED_FRACTION: f64 = 0.05;
const BENIGN_RETWEET_FRACTION: f64 = 0.2;
const BENIGN_HOUR_CONCENTRATION: f64 = 1.0 / 3.0;
const BENIGN_MENTION_INTENSITY: f64 = 0.4;
const BENIGN_VERBOSITY: usize = 2;
const BENIGN_TWEET_FLOOR: usize = 20;
const BENIGN_FOLLOWER_CAP: u64 = 2324;
const BENIGN_FOLLOWING_CAP: u64 = 1104;

const TROLL_TWEET_FLOOR: usize = 30;
const TROLL_FOLLOWER_CAP: u64 = 4180;
const TROLL_FOLLOWING_CAP: u64 = 1922;

/// Client names the generated trolls impersonate first-party apps
/// with; each classifies as fake under the default catalog.
const FAKE_CLIENTS: [&str; 3] =
    ["Twitter for  Android", "Twitter from Android", "twtkr for iPad"];
const SCHEDULING_CLIENTS: [&str; 4] = ["IFTTT", "TweetDeck", "dlvr.it", "Hootsuite"];
const REGULAR_CLIENTS: [&str; 3] =
    ["Twitter Web Client", "Twitter for iPhone", "Twitter for Android"];

const ADJECTIVES: [&str; 12] = [
    "quick", "quiet", "bright", "heavy", "golden", "broken", "early", "honest", "narrow",
    "distant", "simple", "steady",
];
const NOUNS: [&str; 12] = [
    "river", "signal", "garden", "engine", "market", "window", "anchor", "ladder", "harbor",
    "meadow", "copper", "lantern",
];
const VERBS: [&str; 10] = [
    "carries", "follows", "crosses", "answers", "repairs", "welcomes", "measures", "borrows",
    "gathers", "remembers",
];

/// Controls for one generated corpus pair. The troll side follows the
/// knobs; the benign side follows fixed constants. Identical values on
/// both sides produce indistinguishable populations for that behavior.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_troll: usize,
    pub n_benign: usize,
    pub seed: u64,
    /// Troll tweets posted through scheduling clients.
    pub scheduled_fraction: f64,
    /// Troll tweets posted through impersonating clients.
    pub fake_source_fraction: f64,
    pub retweet_fraction: f64,
    /// Shared texts the populations recirculate; pool contents are
    /// derived from a fixed internal seed, so corpora generated with
    /// different seeds still share texts.
    pub copypasta_pool: usize,
    /// Probability a troll tweet lands in the account's preferred
    /// four-hour block instead of a uniform hour.
    pub hour_concentration: f64,
    /// Mean mentions per troll tweet.
    pub mention_intensity: f64,
    /// Sentences per troll tweet.
    pub verbosity: usize,
    /// When false, troll profile metadata (audience size, tweet
    /// volume) is drawn from the benign distributions, leaving client
    /// choice as the dominant separating signal.
    pub metadata_contrast: bool,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_troll: 500,
            n_benign: 500,
            seed: 42,
            scheduled_fraction: 0.3,
            fake_source_fraction: 0.25,
            retweet_fraction: 0.6,
            copypasta_pool: 40,
            hour_concentration: 0.9,
            mention_intensity: 3.0,
            verbosity: 3,
            metadata_contrast: true,
        }
    }
}

impl SynthConfig {
    /// A corpus pair whose populations differ only in client usage:
    /// every behavioral knob is pinned to the benign constant and
    /// profile metadata is matched.
    pub fn source_contrast_only(n_troll: usize, n_benign: usize, seed: u64) -> Self {
        SynthConfig {
            n_troll,
            n_benign,
            seed,
            retweet_fraction: BENIGN_RETWEET_FRACTION,
            hour_concentration: BENIGN_HOUR_CONCENTRATION,
            mention_intensity: BENIGN_MENTION_INTENSITY,
            verbosity: BENIGN_VERBOSITY,
            metadata_contrast: false,
            ..SynthConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| -> Result<()> {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!(
                    "{name} must lie in [0, 1], got {v}"
                )));
            }
            Ok(())
        };
        unit("scheduled_fraction", self.scheduled_fraction)?;
        unit("fake_source_fraction", self.fake_source_fraction)?;
        unit("retweet_fraction", self.retweet_fraction)?;
        unit("hour_concentration", self.hour_concentration)?;
        if self.scheduled_fraction + self.fake_source_fraction > 1.0 {
            return Err(Error::InvalidArgument(format!(
                "scheduled_fraction + fake_source_fraction must not exceed 1, got {}",
                self.scheduled_fraction + self.fake_source_fraction
            )));
        }
        if !self.mention_intensity.is_finite() || self.mention_intensity < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "mention_intensity must be a nonnegative number, got {}",
                self.mention_intensity
            )));
        }
        if self.verbosity == 0 {
            return Err(Error::InvalidArgument("verbosity must be at least 1".into()));
        }
        if self.copypasta_pool == 0 {
            return Err(Error::InvalidArgument("copypasta_pool must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-population generation parameters, resolved from the config.
struct ClassParams {
    label: CorpusLabel,
    campaign: String,
    id_tag: char,
    stream_tag: u64,
    fake_fraction: f64,
    scheduled_fraction: f64,
    retweet_fraction: f64,
    hour_concentration: f64,
    mention_intensity: f64,
    verbosity: usize,
    tweet_floor: usize,
    follower_cap: u64,
    following_cap: u64,
}

fn troll_params(config: &SynthConfig) -> ClassParams {
    ClassParams {
        label: CorpusLabel::Troll,
        campaign: format!("synth-{:08x}", config.seed),
        id_tag: 't',
        stream_tag: 1 << 40,
        fake_fraction: config.fake_source_fraction,
        scheduled_fraction: config.scheduled_fraction,
        retweet_fraction: config.retweet_fraction,
        hour_concentration: config.hour_concentration,
        mention_intensity: config.mention_intensity,
        verbosity: config.verbosity,
        tweet_floor: if config.metadata_contrast { TROLL_TWEET_FLOOR } else { BENIGN_TWEET_FLOOR },
        follower_cap: if config.metadata_contrast {
            TROLL_FOLLOWER_CAP
        } else {
            BENIGN_FOLLOWER_CAP
        },
        following_cap: if config.metadata_contrast {
            TROLL_FOLLOWING_CAP
        } else {
            BENIGN_FOLLOWING_CAP
        },
    }
}

fn benign_params() -> ClassParams {
    ClassParams {
        label: CorpusLabel::Benign,
        campaign: String::new(),
        id_tag: 'b',
        stream_tag: 2 << 40,
        fake_fraction: 0.0,
        scheduled_fraction: BENIGN_SCHEDULED_FRACTION,
        retweet_fraction: BENIGN_RETWEET_FRACTION,
        hour_concentration: BENIGN_HOUR_CONCENTRATION,
        mention_intensity: BENIGN_MENTION_INTENSITY,
        verbosity: BENIGN_VERBOSITY,
        tweet_floor: BENIGN_TWEET_FLOOR,
        follower_cap: BENIGN_FOLLOWER_CAP,
        following_cap: BENIGN_FOLLOWING_CAP,
    }
}

fn pick<'a>(rng: &mut ChaCha8Rng, items: &[&'a str]) -> &'a str {
    items[rng.gen_range(0..items.len())]
}

fn sentence(rng: &mut ChaCha8Rng) -> String {
    let mut s = format!(
        "The {} {} {} the {} {}",
        pick(rng, &ADJECTIVES),
        pick(rng, &NOUNS),
        pick(rng, &VERBS),
        pick(rng, &ADJECTIVES),
        pick(rng, &NOUNS)
    );
    // Occasionally extend with a clause so lengths vary.
    if rng.gen::<f64>() < 0.3 {
        s.push_str(&format!(
            " and {} the {} {}",
            pick(rng, &VERBS),
            pick(rng, &ADJECTIVES),
            pick(rng, &NOUNS)
        ));
    }
    s.push('.');
    s
}

fn handle(rng: &mut ChaCha8Rng) -> String {
    format!("{}_{}{}", pick(rng, &ADJECTIVES), pick(rng, &NOUNS), rng.gen_range(1..100))
}

/// The recirculated text pool. Seeded independently of the corpus seed
/// so separately generated corpora share texts verbatim.
pub fn copypasta_pool(size: usize) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    (0..size)
        .map(|_| {
            let mut text = sentence(&mut rng);
            text.push(' ');
            text.push_str(&sentence(&mut rng));
            text
        })
        .collect()
}

fn generate_account(
    config: &SynthConfig,
    params: &ClassParams,
    pool: &[String],
    index: usize,
) -> Account {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(params.stream_tag | index as u64);

    let account_id = format!("s{:08x}{}{index:05}", config.seed, params.id_tag);
    let screen_name = handle(&mut rng);
    let description = format!("{} {}", sentence(&mut rng), sentence(&mut rng));
    let followers = rng.gen_range(0..=params.follower_cap);
    let following = rng.gen_range(0..=params.following_cap);
    let creation_time = DAY_BASE - 86_400 * rng.gen_range(200..1500);
    let n_tweets = params.tweet_floor + rng.gen_range(0..40);
    let preferred_block = rng.gen_range(0..24i64);

    let mut tweets = Vec::with_capacity(n_tweets);
    for j in 0..n_tweets {
        let day: i64 = rng.gen_range(0..90);
        let hour: i64 = if rng.gen::<f64>() < params.hour_concentration {
            (preferred_block + rng.gen_range(0..4)) % 24
        } else {
            rng.gen_range(0..24)
        };
        let timestamp = DAY_BASE - day * 86_400 + hour * 3_600 + rng.gen_range(0..3_600);

        let u: f64 = rng.gen();
        let client = if u < params.fake_fraction {
            pick(&mut rng, &FAKE_CLIENTS)
        } else if u < params.fake_fraction + params.scheduled_fraction {
            pick(&mut rng, &SCHEDULING_CLIENTS)
        } else {
            pick(&mut rng, &REGULAR_CLIENTS)
        };

        let is_retweet = rng.gen::<f64>() < params.retweet_fraction;
        let text = if is_retweet {
            let source = &pool[rng.gen_range(0..pool.len())];
            format!("RT @{}: {}", handle(&mut rng), source)
        } else {
            let mentions = params.mention_intensity.floor() as usize
                + usize::from(rng.gen::<f64>() < params.mention_intensity.fract());
            let mut parts = Vec::with_capacity(mentions + params.verbosity);
            for _ in 0..mentions {
                parts.push(format!("@{}", handle(&mut rng)));
            }
            for _ in 0..params.verbosity {
                parts.push(sentence(&mut rng));
            }
            parts.join(" ")
        };

        tweets.push(Tweet {
            tweet_id: format!("{account_id}-{j:04}"),
            account_id: account_id.clone(),
            text,
            timestamp,
            client: client.to_string(),
            language: "en".to_string(),
            is_retweet,
        });
    }

    Account {
        account_id,
        screen_name,
        description,
        account_language: "en".to_string(),
        description_language: "en".to_string(),
        followers,
        following,
        creation_time,
        campaign: params.campaign.clone(),
        label: params.label,
        tweets,
    }
}

fn generate_class(config: &SynthConfig, params: &ClassParams, pool: &[String]) -> Result<Corpus> {
    let n = match params.label {
        CorpusLabel::Troll => config.n_troll,
        _ => config.n_benign,
    };
    let accounts = exec::par_map((0..n).collect(), |i| generate_account(config, params, pool, i));
    let suffix = match params.label {
        CorpusLabel::Troll => "troll",
        _ => "benign",
    };
    Corpus::new(accounts, params.label, format!("synth:{:08x}:{suffix}", config.seed))
}

/// Generate the troll and benign corpora described by the config. The
/// output is a pure function of the config; account streams are
/// independent, so parallel and sequential runs agree.
pub fn generate(config: &SynthConfig) -> Result<(Corpus, Corpus)> {
    config.validate()?;
    let pool = copypasta_pool(config.copypasta_pool);
    let trolls = generate_class(config, &troll_params(config), &pool)?;
    let benign = generate_class(config, &benign_params(), &pool)?;
    Ok((trolls, benign))
}
