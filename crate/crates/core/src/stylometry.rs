//! Per-tweet text statistics: tokenization, mention counting, sentence
//! splitting, a syllable heuristic, and the Flesch reading-ease score.
//! These are writing-style signals, so URLs and @mentions are not
//! words, and punctuation is measured rather than discarded silently.
//!
//! The function-word and stopword lists ship as plain-text resources
//! (one lowercase term per line); the stopword list is a strict
//! superset of the function-word list. Both are English-only, which is
//! a known limitation for multilingual campaigns: the counts degrade
//! gracefully to zero rather than misfiring.

use std::collections::BTreeSet;
use std::sync::OnceLock;

use sha2::{Digest, Sha256};

const FUNCTION_WORDS_RAW: &str = include_str!("../resources/function_words.txt");
const STOPWORDS_RAW: &str = include_str!("../resources/stopwords.txt");

fn parse_list(raw: &'static str) -> BTreeSet<&'static str> {
    raw.lines().map(str::trim).filter(|l| !l.is_empty()).collect()
}

pub fn function_words() -> &'static BTreeSet<&'static str> {
    static SET: OnceLock<BTreeSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| parse_list(FUNCTION_WORDS_RAW))
}

pub fn stopwords() -> &'static BTreeSet<&'static str> {
    static SET: OnceLock<BTreeSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| parse_list(STOPWORDS_RAW))
}

fn sha256_hex(data: &str) -> String {
    let mut h = Sha256::new();
    h.update(data.as_bytes());
    let out = h.finalize();
    out.iter().map(|b| format!("{b:02x}")).collect()
}

/// Content hash of the shipped function-word list, for manifests.
pub fn function_words_sha256() -> String {
    sha256_hex(FUNCTION_WORDS_RAW)
}

/// Content hash of the shipped stopword list, for manifests.
pub fn stopwords_sha256() -> String {
    sha256_hex(STOPWORDS_RAW)
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

fn is_pure_mention(token: &str) -> bool {
    let Some(rest) = token.strip_prefix('@') else { return false };
    !rest.is_empty() && rest.chars().all(|c| c.is_alphanumeric() || c == '_')
}

/// Word tokens of a tweet. Whitespace-delimited; URL tokens and pure
/// @mentions are dropped entirely; remaining tokens lose surrounding
/// punctuation. Case is preserved.
pub fn tokenize(text: &str) -> Vec<String> {
    tokenize_counting(text).0
}

/// Tokenize and also count the punctuation characters stripped from
/// token edges (standalone punctuation runs like `...` count fully).
fn tokenize_counting(text: &str) -> (Vec<String>, usize) {
    let mut words = Vec::new();
    let mut punct = 0usize;
    for raw in text.split_whitespace() {
        if raw.starts_with("http://") || raw.starts_with("https://") {
            continue;
        }
        // Trailing punctuation goes first so `@user:` still reads as a
        // mention. Mentions contribute nothing, not even their sigil.
        let trailing = raw.chars().rev().take_while(|&c| is_punct(c)).count();
        let t1 = &raw[..raw.len() - raw.chars().rev().take(trailing).map(char::len_utf8).sum::<usize>()];
        if is_pure_mention(t1) {
            continue;
        }
        let leading = t1.chars().take_while(|&c| is_punct(c)).count();
        let core = &t1[t1.chars().take(leading).map(char::len_utf8).sum::<usize>()..];
        punct += trailing + leading;
        if !core.is_empty() {
            words.push(core.to_string());
        }
    }
    (words, punct)
}

/// Count @mentions in raw text: an `@` at the start or right after a
/// non-word character, followed by at least one word character. Email
/// addresses do not match because their `@` follows a word character.
pub fn count_mentions(text: &str) -> usize {
    let mut count = 0usize;
    let mut prev: Option<char> = None;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        if c == '@'
            && prev.is_none_or(|p| !is_word_char(p))
            && chars.peek().is_some_and(|&n| is_word_char(n))
        {
            count += 1;
        }
        prev = Some(c);
    }
    count
}

const SENTENCE_TERMINATORS: [char; 5] = ['.', '!', '?', '؟', '。'];

/// Split text into sentence segments on runs of terminator characters.
/// Segments that are empty after trimming do not count, so `...` alone
/// yields no sentences.
pub fn split_sentences(text: &str) -> Vec<&str> {
    text.split(|c| SENTENCE_TERMINATORS.contains(&c))
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect()
}

/// Syllable estimate for one word token.
///
/// Latin-script words count maximal vowel groups (a e i o u y), with a
/// trailing silent `e` after a consonant uncounted, floored at one.
/// Words with no ASCII letters get one syllable per character pair,
/// rounded up: a crude but monotone stand-in for scripts the vowel
/// heuristic cannot see.
pub fn estimate_syllables(word: &str) -> usize {
    if word.is_empty() {
        return 0;
    }
    if !word.chars().any(|c| c.is_ascii_alphabetic()) {
        return word.chars().count().div_ceil(2);
    }
    let lower: Vec<char> = word.chars().map(|c| c.to_ascii_lowercase()).collect();
    let is_vowel = |c: char| matches!(c, 'a' | 'e' | 'i' | 'o' | 'u' | 'y');
    let mut groups = 0usize;
    let mut in_group = false;
    for &c in &lower {
        if is_vowel(c) {
            if !in_group {
                groups += 1;
            }
            in_group = true;
        } else {
            in_group = false;
        }
    }
    if groups > 1 {
        let n = lower.len();
        if lower[n - 1] == 'e' && !is_vowel(lower[n - 2]) {
            groups -= 1;
        }
    }
    groups.max(1)
}

/// Flesch reading ease, clamped to [0, 100]. Zero-word text scores 0.
pub fn flesch_reading_ease(text: &str) -> f64 {
    let words = tokenize(text);
    if words.is_empty() {
        return 0.0;
    }
    let sentence_count = split_sentences(text).len().max(1) as f64;
    let word_count = words.len() as f64;
    let syllables: usize = words.iter().map(|w| estimate_syllables(w)).sum();
    let score =
        206.835 - 1.015 * (word_count / sentence_count) - 84.6 * (syllables as f64 / word_count);
    score.clamp(0.0, 100.0)
}

/// Everything the feature builder needs to know about one tweet's text.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TextStats {
    pub word_count: usize,
    /// Distinct words, case-insensitive.
    pub unique_word_count: usize,
    pub stopword_count: usize,
    pub function_word_count: usize,
    /// Words outside the stopword list entirely.
    pub non_function_word_count: usize,
    pub punctuation_count: usize,
    pub sentence_count: usize,
    /// Mean word length in characters; 0 with no words.
    pub mean_word_length: f64,
    /// Mean words per sentence; 0 with no sentences.
    pub mean_sentence_length: f64,
    /// Flesch reading ease of the whole text.
    pub reading_ease: f64,
}

/// Compute the full per-tweet statistics bundle in one pass.
pub fn analyze(text: &str) -> TextStats {
    let (words, punctuation_count) = tokenize_counting(text);
    let sentence_count = split_sentences(text).len();
    let word_count = words.len();

    let mut unique: BTreeSet<String> = BTreeSet::new();
    let mut stopword_count = 0usize;
    let mut function_word_count = 0usize;
    let mut non_function_word_count = 0usize;
    let mut char_total = 0usize;
    for w in &words {
        let lower = w.to_lowercase();
        if stopwords().contains(lower.as_str()) {
            stopword_count += 1;
        } else {
            non_function_word_count += 1;
        }
        if function_words().contains(lower.as_str()) {
            function_word_count += 1;
        }
        char_total += w.chars().count();
        unique.insert(lower);
    }

    TextStats {
        word_count,
        unique_word_count: unique.len(),
        stopword_count,
        function_word_count,
        non_function_word_count,
        punctuation_count,
        sentence_count,
        mean_word_length: if word_count > 0 { char_total as f64 / word_count as f64 } else { 0.0 },
        mean_sentence_length: if sentence_count > 0 {
            word_count as f64 / sentence_count as f64
        } else {
            0.0
        },
        reading_ease: flesch_reading_ease(text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_are_sane() {
        let f = function_words();
        let s = stopwords();
        assert!(f.len() >= 140, "function list has {}", f.len());
        assert!(s.len() >= 170, "stopword list has {}", s.len());
        assert!(f.iter().all(|w| s.contains(w)), "function words must be stopwords");
        assert!(f.iter().all(|w| *w == w.to_lowercase()));
        assert!(f.contains("the") && s.contains("the"));
        assert!(!s.contains("cat"));
    }

    #[test]
    fn hashes_are_stable_hex() {
        let h = function_words_sha256();
        assert_eq!(h.len(), 64);
        assert_eq!(h, function_words_sha256());
        assert_ne!(h, stopwords_sha256());
    }

    #[test]
    fn tokenize_drops_urls_and_mentions() {
        assert_eq!(tokenize("RT @user https://t.co/x hi"), vec!["RT", "hi"]);
        assert_eq!(tokenize("RT @user: copy"), vec!["RT", "copy"]);
        assert_eq!(tokenize("http://a.b standalone"), vec!["standalone"]);
    }

    #[test]
    fn tokenize_strips_edge_punctuation() {
        assert_eq!(tokenize("(hello), world!"), vec!["hello", "world"]);
        assert_eq!(tokenize("don't stop"), vec!["don't", "stop"]);
        assert_eq!(tokenize("#tag matters"), vec!["tag", "matters"]);
        assert!(tokenize("...").is_empty());
        assert!(tokenize("").is_empty());
    }

    #[test]
    fn punctuation_counted_from_edges() {
        let (words, punct) = tokenize_counting("...");
        assert!(words.is_empty());
        assert_eq!(punct, 3);
        let (words, punct) = tokenize_counting("wow!! (really)");
        assert_eq!(words, vec!["wow", "really"]);
        assert_eq!(punct, 4);
    }

    #[test]
    fn mention_counting() {
        assert_eq!(count_mentions("@a hi @b"), 2);
        assert_eq!(count_mentions("mail me a@b.com"), 0);
        assert_eq!(count_mentions("RT @user: hi .@another"), 2);
        assert_eq!(count_mentions("@ alone"), 0);
        assert_eq!(count_mentions("nothing here"), 0);
    }

    #[test]
    fn sentence_splitting() {
        assert_eq!(split_sentences("One. Two! Three?"), vec!["One", "Two", "Three"]);
        assert_eq!(split_sentences("..."), Vec::<&str>::new());
        assert_eq!(split_sentences("no terminator"), vec!["no terminator"]);
        assert_eq!(split_sentences("a . b"), vec!["a", "b"]);
        assert_eq!(split_sentences("هل هذا؟ نعم。"), vec!["هل هذا", "نعم"]);
    }

    #[test]
    fn syllable_cases() {
        assert_eq!(estimate_syllables("cat"), 1);
        assert_eq!(estimate_syllables("beautiful"), 3);
        assert_eq!(estimate_syllables("x"), 1);
        assert_eq!(estimate_syllables("make"), 1);
        assert_eq!(estimate_syllables("the"), 1);
        // Trailing silent-e rule undercounts this one: 3 groups minus 1.
        assert_eq!(estimate_syllables("syllable"), 2);
        // Non-Latin script: one syllable per character pair, rounded up.
        assert_eq!(estimate_syllables("привет"), 3);
        assert_eq!(estimate_syllables("都"), 1);
    }

    #[test]
    fn flesch_three_simple_words_clamps_to_100() {
        // 3 words, 1 sentence, 3 syllables:
        // 206.835 - 1.015*3 - 84.6*1 = 119.19, clamped to 100.
        assert_eq!(flesch_reading_ease("The cat sat."), 100.0);
    }

    #[test]
    fn flesch_zero_words_is_zero() {
        assert_eq!(flesch_reading_ease(""), 0.0);
        assert_eq!(flesch_reading_ease("... !!!"), 0.0);
        assert_eq!(flesch_reading_ease("@only @mentions https://t.co/x"), 0.0);
    }

    #[test]
    fn flesch_dense_text_clamps_to_zero() {
        // One long word of many syllables forces the raw score negative.
        let text = "antidisestablishmentarianism incomprehensibilities deinstitutionalization";
        assert_eq!(flesch_reading_ease(text), 0.0);
    }

    #[test]
    fn analyze_the_cat() {
        let s = analyze("the cat");
        assert_eq!(s.word_count, 2);
        assert_eq!(s.stopword_count, 1);
        assert_eq!(s.function_word_count, 1);
        assert_eq!(s.non_function_word_count, 1);
        assert_eq!(s.sentence_count, 1);
        assert_eq!(s.unique_word_count, 2);
    }

    #[test]
    fn analyze_counts_are_consistent() {
        let s = analyze("The quick brown fox jumps over the lazy dog. The dog sleeps!");
        assert_eq!(s.word_count, 12);
        assert_eq!(s.sentence_count, 2);
        assert!(s.function_word_count + s.non_function_word_count <= s.word_count);
        assert!(s.unique_word_count <= s.word_count);
        // "the" appears three times (case-insensitive), "dog" twice.
        assert_eq!(s.unique_word_count, 9);
        assert!((s.mean_sentence_length - 6.0).abs() < 1e-12);
    }

    #[test]
    fn analyze_empty_is_all_zero() {
        assert_eq!(analyze(""), TextStats::default());
    }

    proptest::proptest! {
        #[test]
        fn reading_ease_stays_in_range(s in "\\PC{0,200}") {
            let ease = flesch_reading_ease(&s);
            proptest::prop_assert!((0.0..=100.0).contains(&ease), "ease {} for {:?}", ease, s);
        }

        #[test]
        fn word_count_agrees_with_tokenize(s in "\\PC{0,200}") {
            let stats = analyze(&s);
            let tokens = tokenize(&s);
            proptest::prop_assert_eq!(stats.word_count, tokens.len());
            proptest::prop_assert!(stats.unique_word_count <= stats.word_count);
            proptest::prop_assert!(stats.function_word_count <= stats.stopword_count);
            proptest::prop_assert_eq!(
                stats.non_function_word_count + stats.stopword_count,
                stats.word_count
            );
        }

        #[test]
        fn tokens_are_never_links_or_mentions(s in "\\PC{0,200}") {
            for token in tokenize(&s) {
                proptest::prop_assert!(!token.is_empty());
                proptest::prop_assert!(!token.starts_with("http://"));
                proptest::prop_assert!(!token.starts_with("https://"));
            }
        }

        #[test]
        fn syllables_bounded_by_length(w in "\\S{1,40}") {
            let syl = estimate_syllables(&w);
            proptest::prop_assert!(syl >= 1);
            proptest::prop_assert!(syl <= w.chars().count().max(1));
        }
    }
}
