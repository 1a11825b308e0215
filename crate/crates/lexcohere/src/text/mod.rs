//! Tokenization, stemming, sentence segmentation, and feature extraction.
//!
//! Everything downstream (pseudo-documents, the three vector spaces, QA
//! scoring) consumes `Sentence` values produced here, so the rules in this
//! module define what counts as a token, a stem, and a feature.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

pub mod features;
pub mod porter;
pub mod segment;

pub use features::{extract_conjunctions, extract_context, extract_ngrams};
pub use segment::Segmenter;

/// One token: the surface form as written, its Porter stem, and whether the
/// lowercased surface is on the stopword list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub stem: String,
    pub is_stop: bool,
}

/// A segmented sentence. `text` is the whitespace-normalized surface form;
/// `source_id` is the position of the sentence in its corpus stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sentence {
    pub source_id: u64,
    pub text: String,
    pub tokens: Vec<Token>,
}

/// Key of one dimension in a sparse space. Stems inside a feature never
/// contain whitespace, which keeps the text encoding unambiguous.
///
/// Conjunction pairs are stored alphabetically ordered, so `(a, b)` and
/// `(b, a)` are the same feature.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureId {
    Unigram(String),
    Bigram(String, String),
    Trigram(String, String, String),
    Conjunction(String, String),
}

impl FeatureId {
    pub fn unigram(stem: impl Into<String>) -> FeatureId {
        FeatureId::Unigram(stem.into())
    }

    pub fn bigram(a: impl Into<String>, b: impl Into<String>) -> FeatureId {
        FeatureId::Bigram(a.into(), b.into())
    }

    pub fn trigram(a: impl Into<String>, b: impl Into<String>, c: impl Into<String>) -> FeatureId {
        FeatureId::Trigram(a.into(), b.into(), c.into())
    }

    /// Orders the pair; `a` and `b` must be distinct stems.
    pub fn conjunction(a: impl Into<String>, b: impl Into<String>) -> FeatureId {
        let a = a.into();
        let b = b.into();
        debug_assert_ne!(a, b, "conjunction of a stem with itself");
        if a <= b {
            FeatureId::Conjunction(a, b)
        } else {
            FeatureId::Conjunction(b, a)
        }
    }

    /// Stable single-line encoding used by the on-disk TSV formats.
    pub fn encode(&self) -> String {
        match self {
            FeatureId::Unigram(a) => format!("u:{a}"),
            FeatureId::Bigram(a, b) => format!("b:{a} {b}"),
            FeatureId::Trigram(a, b, c) => format!("t:{a} {b} {c}"),
            FeatureId::Conjunction(a, b) => format!("c:{a} {b}"),
        }
    }

    pub fn decode(text: &str) -> Result<FeatureId> {
        let bad = || Error::InvalidInput(format!("malformed feature key {text:?}"));
        let (kind, rest) = text.split_once(':').ok_or_else(bad)?;
        let parts: Vec<&str> = rest.split(' ').collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(bad());
        }
        match (kind, parts.as_slice()) {
            ("u", [a]) => Ok(FeatureId::unigram(*a)),
            ("b", [a, b]) => Ok(FeatureId::bigram(*a, *b)),
            ("t", [a, b, c]) => Ok(FeatureId::trigram(*a, *b, *c)),
            ("c", [a, b]) if a != b => Ok(FeatureId::Conjunction(a.to_string(), b.to_string())),
            _ => Err(bad()),
        }
    }
}

impl fmt::Display for FeatureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.encode())
    }
}

/// Splits text on non-alphanumeric characters and stamps each token with its
/// stem and stopword flag. Stopwords are matched on the lowercased surface
/// form, before stemming.
#[derive(Debug, Clone)]
pub struct Tokenizer {
    stopwords: HashSet<String>,
}

impl Tokenizer {
    /// Tokenizer with the bundled general-English stopword list.
    pub fn bundled() -> Tokenizer {
        let list = include_str!("../../data/stopwords.txt");
        Tokenizer::with_stopwords(parse_word_list(list))
    }

    pub fn with_stopwords<I, S>(stopwords: I) -> Tokenizer
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Tokenizer {
            stopwords: stopwords
                .into_iter()
                .map(|w| w.into().to_lowercase())
                .collect(),
        }
    }

    /// Loads one stopword per line; `#` lines and blanks are ignored.
    pub fn from_stopword_file(path: &Path) -> Result<Tokenizer> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Tokenizer::with_stopwords(parse_word_list(&text)))
    }

    pub fn is_stopword(&self, word: &str) -> bool {
        self.stopwords.contains(&word.to_lowercase())
    }

    pub fn stopword_count(&self) -> usize {
        self.stopwords.len()
    }

    pub fn tokenize(&self, text: &str) -> Vec<Token> {
        let mut tokens = Vec::new();
        let mut chars = text.char_indices().peekable();
        while let Some((start, c)) = chars.next() {
            if !c.is_alphanumeric() {
                continue;
            }
            let mut end = start + c.len_utf8();
            while let Some(&(i, d)) = chars.peek() {
                if d.is_alphanumeric() {
                    end = i + d.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            let surface = &text[start..end];
            let lower = surface.to_lowercase();
            let is_stop = self.stopwords.contains(&lower);
            tokens.push(Token {
                surface: surface.to_string(),
                stem: porter::stem(&lower),
                is_stop,
            });
        }
        tokens
    }

    /// Tokenize a raw sentence string into a `Sentence`.
    pub fn sentence(&self, source_id: u64, text: impl Into<String>) -> Sentence {
        let text = text.into();
        let tokens = self.tokenize(&text);
        Sentence {
            source_id,
            text,
            tokens,
        }
    }
}

pub(crate) fn parse_word_list(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}
