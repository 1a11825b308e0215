//! Engine configuration.
//!
//! One flat struct covers corpus filtering, feature extraction, and the
//! scoring beam. Every field has a default; a TOML config file may set any
//! subset of keys. `build-spaces` snapshots the effective config next to the
//! spaces it writes so that scoring reuses the same parameters later.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scorer::BeamConfig;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EngineConfig {
    /// Minimum stopword tokens a corpus sentence needs to count as English.
    pub min_stopword_count: usize,
    /// Match term phrases against stems instead of lowercased surface forms.
    pub match_stems: bool,
    /// Pseudo-documents with fewer sentences than this are dropped.
    pub min_sentences: usize,
    /// Hard cap on sentences per pseudo-document (first N in corpus order).
    #[serde(alias = "cap")]
    pub sentence_cap: usize,

    /// Max token distance for a co-occurrence pair to count as a conjunction.
    pub conj_window: usize,
    /// Tokens on each side of a position that supply context n-grams.
    pub context_window: usize,
    /// A terminology feature must occur in at least this many sentences of a
    /// pseudo-document to enter that row.
    pub min_support: usize,
    /// A stem must occur at least this many times in a pseudo-document to get
    /// a word-space row.
    pub min_occurrences: usize,

    /// Terms kept after the terminology tf-idf step.
    pub step1_keep: usize,
    /// Terms kept after the binary re-ranking step.
    pub step2_keep: usize,
    /// Terms kept after the word-context step.
    pub step3_keep: usize,
    /// Sentence matches averaged by the whole-sentence subscore.
    #[serde(alias = "k")]
    pub k_sentences: usize,
    /// Largest unigram subset considered by the subset-match subscore.
    #[serde(alias = "m")]
    pub m_subset: usize,
    /// Subset-match enumeration falls back to the top-N unigrams by
    /// individual overlap when the QA pair has more than N of them.
    pub subset_candidate_cap: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            min_stopword_count: 1,
            match_stems: false,
            min_sentences: 10,
            sentence_cap: 50_000,
            conj_window: 10,
            context_window: 3,
            min_support: 10,
            min_occurrences: 10,
            step1_keep: 10,
            step2_keep: 4,
            step3_keep: 1,
            k_sentences: 5,
            m_subset: 6,
            subset_candidate_cap: 12,
        }
    }
}

impl EngineConfig {
    pub fn from_toml_file(path: &Path) -> Result<EngineConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let cfg: EngineConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    /// Beam widths must narrow monotonically and keep at least one term.
    pub fn validate(&self) -> Result<()> {
        if self.step3_keep == 0 {
            return Err(Error::Config("step3_keep must be at least 1".into()));
        }
        if self.step1_keep < self.step2_keep || self.step2_keep < self.step3_keep {
            return Err(Error::Config(format!(
                "beam widths must satisfy step1_keep >= step2_keep >= step3_keep, got ({}, {}, {})",
                self.step1_keep, self.step2_keep, self.step3_keep
            )));
        }
        if self.k_sentences == 0 {
            return Err(Error::Config("k_sentences must be at least 1".into()));
        }
        if self.m_subset == 0 {
            return Err(Error::Config("m_subset must be at least 1".into()));
        }
        if self.subset_candidate_cap == 0 {
            return Err(Error::Config(
                "subset_candidate_cap must be at least 1".into(),
            ));
        }
        if self.min_sentences == 0 {
            return Err(Error::Config("min_sentences must be at least 1".into()));
        }
        if self.sentence_cap < self.min_sentences {
            return Err(Error::Config(format!(
                "sentence_cap ({}) is below min_sentences ({})",
                self.sentence_cap, self.min_sentences
            )));
        }
        if self.min_support == 0 || self.min_occurrences == 0 {
            return Err(Error::Config(
                "min_support and min_occurrences must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn beam(&self) -> BeamConfig {
        BeamConfig {
            step1_keep: self.step1_keep,
            step2_keep: self.step2_keep,
            step3_keep: self.step3_keep,
            k_sentences: self.k_sentences,
            m_subset: self.m_subset,
            subset_candidate_cap: self.subset_candidate_cap,
        }
    }
}
