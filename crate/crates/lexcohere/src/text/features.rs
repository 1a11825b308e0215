//! Feature extraction over token sequences.
//!
//! Shared stopword rules: a unigram feature requires a non-stopword token;
//! a bigram or trigram is kept unless every token in it is a stopword.
//! All extractors return deduplicated sets, so within one call a feature
//! counts once no matter how often it repeats.

use std::collections::BTreeSet;

use super::{FeatureId, Token};

fn ngram_feature(window: &[Token]) -> Option<FeatureId> {
    match window {
        [t] if !t.is_stop => Some(FeatureId::unigram(&t.stem)),
        [a, b] if !(a.is_stop && b.is_stop) => Some(FeatureId::bigram(&a.stem, &b.stem)),
        [a, b, c] if !(a.is_stop && b.is_stop && c.is_stop) => {
            Some(FeatureId::trigram(&a.stem, &b.stem, &c.stem))
        }
        _ => None,
    }
}

/// All n-gram features of `tokens` for n = 1..=max_n (max_n is clamped to 3).
/// N-grams never cross the ends of the slice.
pub fn extract_ngrams(tokens: &[Token], max_n: usize) -> BTreeSet<FeatureId> {
    let max_n = max_n.min(3);
    let mut out = BTreeSet::new();
    for n in 1..=max_n {
        for window in tokens.windows(n) {
            if let Some(f) = ngram_feature(window) {
                out.insert(f);
            }
        }
    }
    out
}

/// Unordered pairs of distinct non-stopword stems co-occurring within
/// `window` token positions of each other.
pub fn extract_conjunctions(tokens: &[Token], window: usize) -> BTreeSet<FeatureId> {
    let mut out = BTreeSet::new();
    for (i, a) in tokens.iter().enumerate() {
        if a.is_stop {
            continue;
        }
        for b in tokens.iter().skip(i + 1).take(window) {
            if b.is_stop || b.stem == a.stem {
                continue;
            }
            out.insert(FeatureId::conjunction(&a.stem, &b.stem));
        }
    }
    out
}

/// N-gram features (n = 1..=3) within `window` tokens on either side of
/// `position`, excluding every n-gram whose span covers `position` itself.
/// The window is truncated at the sentence boundaries and n-grams keep their
/// original adjacency: tokens on opposite sides of `position` never join.
pub fn extract_context(tokens: &[Token], position: usize, window: usize) -> BTreeSet<FeatureId> {
    assert!(position < tokens.len(), "context position out of range");
    let lo = position.saturating_sub(window);
    let hi = (position + window).min(tokens.len() - 1);
    let mut out = BTreeSet::new();
    for n in 1..=3usize {
        for start in lo..=hi {
            let end = start + n - 1;
            if end > hi {
                break;
            }
            if start <= position && position <= end {
                continue;
            }
            if let Some(f) = ngram_feature(&tokens[start..=end]) {
                out.insert(f);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::Tokenizer;

    fn toks(text: &str) -> Vec<Token> {
        Tokenizer::bundled().tokenize(text)
    }

    fn uni(s: &str) -> FeatureId {
        FeatureId::unigram(s)
    }

    // ---- extract_ngrams ----

    #[test]
    fn unigrams_skip_stopwords() {
        let got = extract_ngrams(&toks("the earthquake of the century"), 1);
        let want: BTreeSet<FeatureId> = [uni("earthquak"), uni("centuri")].into();
        assert_eq!(got, want);
    }

    #[test]
    fn bigrams_drop_all_stopword_windows() {
        let got = extract_ngrams(&toks("of the earthquake"), 2);
        let want: BTreeSet<FeatureId> =
            [uni("earthquak"), FeatureId::bigram("the", "earthquak")].into();
        // "of the" is all stopwords; "the earthquake" has one content token.
        assert_eq!(got, want);
    }

    #[test]
    fn trigram_extraction_matches_hand_count() {
        let tokens = toks("crustal plates shift");
        let got = extract_ngrams(&tokens, 3);
        let want: BTreeSet<FeatureId> = [
            uni("crustal"),
            uni("plate"),
            uni("shift"),
            FeatureId::bigram("crustal", "plate"),
            FeatureId::bigram("plate", "shift"),
            FeatureId::trigram("crustal", "plate", "shift"),
        ]
        .into();
        assert_eq!(got, want);
    }

    #[test]
    fn repeated_ngrams_dedup() {
        let got = extract_ngrams(&toks("quake quake quake"), 2);
        // one unigram and one bigram despite three occurrences
        assert_eq!(got.len(), 2);
    }

    #[test]
    fn ngrams_of_empty_slice() {
        assert!(extract_ngrams(&[], 3).is_empty());
    }

    // ---- extract_conjunctions ----

    #[test]
    fn conjunction_window_limits_distance() {
        // positions: flood(0) .. earthquake(3); distance 3
        let tokens = toks("floods follow the earthquake");
        let near = extract_conjunctions(&tokens, 10);
        assert!(near.contains(&FeatureId::conjunction("flood", "earthquak")));
        let far = extract_conjunctions(&tokens, 2);
        assert!(!far.contains(&FeatureId::conjunction("flood", "earthquak")));
    }

    #[test]
    fn conjunction_pairs_are_unordered_and_distinct() {
        let a = extract_conjunctions(&toks("flood earthquake"), 10);
        let b = extract_conjunctions(&toks("earthquake flood"), 10);
        assert_eq!(a, b);
        // same stem on both sides never pairs with itself
        let same = extract_conjunctions(&toks("flood floods flooding"), 10);
        assert!(same.is_empty());
    }

    #[test]
    fn conjunction_window_counts_stopword_positions() {
        // magma(0) and basalt(3): the two stopwords in between occupy
        // positions, so a window of 2 misses the pair and 3 catches it.
        let tokens = toks("magma under the basalt");
        assert!(extract_conjunctions(&tokens, 2).is_empty());
        assert_eq!(extract_conjunctions(&tokens, 3).len(), 1);
    }

    #[test]
    fn conjunctions_skip_stopwords_as_members() {
        let got = extract_conjunctions(&toks("the flood of the earthquake"), 10);
        let want: BTreeSet<FeatureId> = [FeatureId::conjunction("flood", "earthquak")].into();
        assert_eq!(got, want);
    }

    // ---- extract_context ----

    #[test]
    fn context_excludes_center_ngrams() {
        let tokens = toks("crustal plates boundary");
        let got = extract_context(&tokens, 1, 3);
        let want: BTreeSet<FeatureId> = [uni("crustal"), uni("boundari")].into();
        // every bigram and the trigram covers position 1, so only the two
        // flanking unigrams survive
        assert_eq!(got, want);
    }

    #[test]
    fn context_sides_do_not_join() {
        let tokens = toks("alpha beta gamma");
        let got = extract_context(&tokens, 1, 3);
        assert!(!got.contains(&FeatureId::bigram("alpha", "gamma")));
    }

    #[test]
    fn context_window_truncates_at_boundaries() {
        let tokens = toks("rift ridge basin fault magma crust mantle slab core");
        assert_eq!(tokens.len(), 9);
        let got = extract_context(&tokens, 4, 3);
        // window spans positions 1..=7; unigrams exclude position 4
        for (i, t) in tokens.iter().enumerate() {
            let has = got.contains(&uni(&t.stem));
            let expect = (1..=7).contains(&i) && i != 4;
            assert_eq!(has, expect, "unigram {i}");
        }
        // n-grams stay inside the window: positions 1..3 adjacent run
        assert!(got.contains(&FeatureId::trigram("ridg", "basin", "fault")));
        assert!(!got.contains(&FeatureId::bigram("rift", "ridg")));
    }

    #[test]
    fn context_at_sentence_edge() {
        let tokens = toks("magma rises fast");
        let got = extract_context(&tokens, 0, 3);
        let want: BTreeSet<FeatureId> =
            [uni("rise"), uni("fast"), FeatureId::bigram("rise", "fast")].into();
        assert_eq!(got, want);
    }

    #[test]
    fn context_of_single_token_sentence_is_empty() {
        let tokens = toks("magma");
        assert!(extract_context(&tokens, 0, 3).is_empty());
    }
}
