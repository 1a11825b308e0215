//! Per-term binary sentence × n-gram matrices.
//!
//! Row i is the set of uni/bi/trigrams of sentence i of the term's
//! pseudo-document. Rows are derived entirely from the persisted sentence
//! text, so nothing beyond a count manifest is written to disk; loading
//! rebuilds the rows and checks the counts.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::pdocs::PseudoDocument;
use crate::space::TermId;
use crate::text::{extract_ngrams, FeatureId};

const MAX_NGRAM: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct SentenceRow {
    features: BTreeSet<FeatureId>,
    text: String,
}

impl SentenceRow {
    pub fn features(&self) -> &BTreeSet<FeatureId> {
        &self.features
    }

    pub fn text(&self) -> &str {
        &self.text
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn contains(&self, feature: &FeatureId) -> bool {
        self.features.contains(feature)
    }

    /// Number of features shared with the given set.
    pub fn shared(&self, features: &BTreeSet<FeatureId>) -> usize {
        let (small, large) = if self.features.len() <= features.len() {
            (&self.features, features)
        } else {
            (features, &self.features)
        };
        small.iter().filter(|f| large.contains(*f)).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentenceSpace {
    term: TermId,
    rows: Vec<SentenceRow>,
    postings: BTreeMap<FeatureId, Vec<u32>>,
}

/// Row count always equals the pseudo-document's sentence count; a sentence
/// with no tokens keeps an empty row so indices line up.
pub fn build_sentence_space(pdoc: &PseudoDocument) -> SentenceSpace {
    let mut rows = Vec::with_capacity(pdoc.sentences.len());
    let mut postings: BTreeMap<FeatureId, Vec<u32>> = BTreeMap::new();
    for (i, sentence) in pdoc.sentences.iter().enumerate() {
        let features = extract_ngrams(&sentence.tokens, MAX_NGRAM);
        for feature in &features {
            postings.entry(feature.clone()).or_default().push(i as u32);
        }
        rows.push(SentenceRow {
            features,
            text: sentence.text.clone(),
        });
    }
    SentenceSpace {
        term: pdoc.term,
        rows,
        postings,
    }
}

impl SentenceSpace {
    pub fn term(&self) -> TermId {
        self.term
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, index: u32) -> Option<&SentenceRow> {
        self.rows.get(index as usize)
    }

    pub fn rows(&self) -> impl Iterator<Item = &SentenceRow> {
        self.rows.iter()
    }

    /// Distinct n-grams across all rows.
    pub fn feature_count(&self) -> usize {
        self.postings.len()
    }

    pub fn postings(&self, feature: &FeatureId) -> &[u32] {
        self.postings.get(feature).map_or(&[], Vec::as_slice)
    }

    /// Sentences sharing at least one of the given features, ascending.
    pub fn candidate_sentences<'a, I>(&self, features: I) -> Vec<u32>
    where
        I: IntoIterator<Item = &'a FeatureId>,
    {
        let mut out: Vec<u32> = features
            .into_iter()
            .flat_map(|f| self.postings(f).iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn validate(&self) -> Result<()> {
        let mut postings: BTreeMap<FeatureId, Vec<u32>> = BTreeMap::new();
        for (i, row) in self.rows.iter().enumerate() {
            for feature in &row.features {
                postings.entry(feature.clone()).or_default().push(i as u32);
            }
        }
        if postings != self.postings {
            return Err(Error::DegenerateSpace(format!(
                "sentence space {}: inverted index does not match rows",
                self.term
            )));
        }
        Ok(())
    }
}
