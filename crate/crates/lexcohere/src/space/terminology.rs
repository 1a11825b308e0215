//! The term × (unigram + conjunction) matrix.
//!
//! One row per pseudo-document. tf counts sentences containing the feature,
//! never token repetitions; a feature enters a row only when it reaches
//! `min_support` sentences there. df counts rows where the feature survived.
//! Weights are derived lazily from the stored counts, so the tf-idf and
//! binary views share one store.

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pdocs::PseudoDocument;
use crate::space::persist;
use crate::space::{binarize, log1p10, raw_tfidf, SparseVector, TermId, WeightKind};
use crate::text::{extract_conjunctions, FeatureId, Token};

#[derive(Debug, Clone, PartialEq)]
pub struct TermRow {
    tf: BTreeMap<FeatureId, u32>,
    max_logtf: f64,
}

impl TermRow {
    fn from_counts(tf: BTreeMap<FeatureId, u32>) -> TermRow {
        let max_logtf = tf.values().map(|&c| log1p10(c)).fold(0.0, f64::max);
        TermRow { tf, max_logtf }
    }

    pub fn tf(&self, feature: &FeatureId) -> u32 {
        self.tf.get(feature).copied().unwrap_or(0)
    }

    pub fn features(&self) -> impl Iterator<Item = (&FeatureId, u32)> {
        self.tf.iter().map(|(f, &c)| (f, c))
    }

    pub fn len(&self) -> usize {
        self.tf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tf.is_empty()
    }

    pub fn max_logtf(&self) -> f64 {
        self.max_logtf
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TerminologySpace {
    rows: BTreeMap<TermId, TermRow>,
    phrases: BTreeMap<TermId, String>,
    df: BTreeMap<FeatureId, u32>,
    global_max_logdf: f64,
    postings: BTreeMap<FeatureId, Vec<TermId>>,
}

/// Distinct features of one sentence: non-stopword stems as unigrams plus
/// in-window conjunction pairs.
fn sentence_features(tokens: &[Token], conj_window: usize, out: &mut BTreeMap<FeatureId, u32>) {
    let mut seen = std::collections::BTreeSet::new();
    for token in tokens {
        if !token.is_stop {
            seen.insert(FeatureId::unigram(token.stem.clone()));
        }
    }
    for pair in extract_conjunctions(tokens, conj_window) {
        seen.insert(pair);
    }
    for feature in seen {
        *out.entry(feature).or_insert(0) += 1;
    }
}

fn row_counts(pdoc: &PseudoDocument, min_support: usize, conj_window: usize) -> TermRow {
    let mut counts = BTreeMap::new();
    for sentence in &pdoc.sentences {
        sentence_features(&sentence.tokens, conj_window, &mut counts);
    }
    counts.retain(|_, count| *count as usize >= min_support);
    TermRow::from_counts(counts)
}

/// Rows build in parallel; df, maxima, and the inverted index follow in one
/// sequential pass so the result is independent of scheduling.
pub fn build_terminology_space(
    pdocs: &[PseudoDocument],
    min_support: usize,
    conj_window: usize,
) -> Result<TerminologySpace> {
    if pdocs.is_empty() {
        return Err(Error::InvalidInput(
            "cannot build a terminology space from zero pseudo-documents".into(),
        ));
    }
    let built: Vec<(TermId, String, TermRow)> = pdocs
        .par_iter()
        .map(|pdoc| {
            (
                pdoc.term,
                pdoc.phrase.clone(),
                row_counts(pdoc, min_support, conj_window),
            )
        })
        .collect();

    let mut rows = BTreeMap::new();
    let mut phrases = BTreeMap::new();
    for (term, phrase, row) in built {
        if row.is_empty() {
            log::warn!("term {term} {phrase:?}: no feature reached min_support, row is empty");
        }
        if rows.insert(term, row).is_some() {
            return Err(Error::InvalidInput(format!(
                "duplicate pseudo-document for term {term}"
            )));
        }
        phrases.insert(term, phrase);
    }

    let mut df: BTreeMap<FeatureId, u32> = BTreeMap::new();
    let mut postings: BTreeMap<FeatureId, Vec<TermId>> = BTreeMap::new();
    for (&term, row) in &rows {
        for (feature, _) in row.features() {
            *df.entry(feature.clone()).or_insert(0) += 1;
            postings.entry(feature.clone()).or_default().push(term);
        }
    }
    let global_max_logdf = df.values().map(|&c| log1p10(c)).fold(0.0, f64::max);

    Ok(TerminologySpace {
        rows,
        phrases,
        df,
        global_max_logdf,
        postings,
    })
}

impl TerminologySpace {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn term_ids(&self) -> impl Iterator<Item = TermId> + '_ {
        self.rows.keys().copied()
    }

    /// Distinct features that survived in at least one row.
    pub fn feature_count(&self) -> usize {
        self.df.len()
    }

    pub fn contains_term(&self, term: TermId) -> bool {
        self.rows.contains_key(&term)
    }

    pub fn phrase(&self, term: TermId) -> Option<&str> {
        self.phrases.get(&term).map(String::as_str)
    }

    pub fn row(&self, term: TermId) -> Option<&TermRow> {
        self.rows.get(&term)
    }

    pub fn tf(&self, term: TermId, feature: &FeatureId) -> u32 {
        self.rows.get(&term).map_or(0, |row| row.tf(feature))
    }

    pub fn df(&self, feature: &FeatureId) -> u32 {
        self.df.get(feature).copied().unwrap_or(0)
    }

    pub fn global_max_logdf(&self) -> f64 {
        self.global_max_logdf
    }

    pub fn row_max_logtf(&self, term: TermId) -> f64 {
        self.rows.get(&term).map_or(0.0, TermRow::max_logtf)
    }

    pub fn tfidf(&self, term: TermId, feature: &FeatureId) -> f64 {
        let Some(row) = self.rows.get(&term) else {
            return 0.0;
        };
        let tf = row.tf(feature);
        if tf == 0 {
            return 0.0;
        }
        // present feature implies df ≥ 1 and positive normalizers
        raw_tfidf(tf, row.max_logtf, self.df(feature), self.global_max_logdf)
    }

    pub fn binary(&self, term: TermId, feature: &FeatureId) -> f64 {
        binarize(self.tfidf(term, feature))
    }

    pub fn weight(&self, term: TermId, feature: &FeatureId, kind: WeightKind) -> f64 {
        match kind {
            WeightKind::TfIdf => self.tfidf(term, feature),
            WeightKind::Binary => self.binary(term, feature),
        }
    }

    /// Materialized row; zero weights (idf-dead features) are dropped.
    pub fn row_vector(&self, term: TermId, kind: WeightKind) -> SparseVector {
        let Some(row) = self.rows.get(&term) else {
            return SparseVector::empty(kind);
        };
        match kind {
            WeightKind::TfIdf => SparseVector::weighted(
                row.tf
                    .keys()
                    .map(|f| (f.clone(), self.tfidf(term, f)))
                    .filter(|(_, w)| *w > 0.0),
            ),
            WeightKind::Binary => SparseVector::binary(
                row.tf
                    .keys()
                    .filter(|f| self.binary(term, f) > 0.0)
                    .cloned(),
            ),
        }
    }

    pub fn postings(&self, feature: &FeatureId) -> &[TermId] {
        self.postings.get(feature).map_or(&[], Vec::as_slice)
    }

    /// Terms sharing at least one of the given features, ascending, deduped.
    pub fn candidate_terms<'a, I>(&self, features: I) -> Vec<TermId>
    where
        I: IntoIterator<Item = &'a FeatureId>,
    {
        let mut out: Vec<TermId> = features
            .into_iter()
            .flat_map(|f| self.postings(f).iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Checks the stored df, maxima, and inverted index against the rows.
    pub fn validate(&self) -> Result<()> {
        let mut df: BTreeMap<FeatureId, u32> = BTreeMap::new();
        let mut postings: BTreeMap<FeatureId, Vec<TermId>> = BTreeMap::new();
        for (&term, row) in &self.rows {
            if !self.phrases.contains_key(&term) {
                return Err(Error::DegenerateSpace(format!("term {term} has no phrase")));
            }
            let max_logtf = row.tf.values().map(|&c| log1p10(c)).fold(0.0, f64::max);
            if max_logtf.to_bits() != row.max_logtf.to_bits() {
                return Err(Error::DegenerateSpace(format!(
                    "term {term}: stored row max {} != recomputed {max_logtf}",
                    row.max_logtf
                )));
            }
            for (feature, tf) in row.features() {
                if tf == 0 {
                    return Err(Error::DegenerateSpace(format!(
                        "term {term}: stored zero tf for {}",
                        feature.encode()
                    )));
                }
                *df.entry(feature.clone()).or_insert(0) += 1;
                postings.entry(feature.clone()).or_default().push(term);
            }
        }
        if df != self.df {
            return Err(Error::DegenerateSpace(
                "df table does not match rows".into(),
            ));
        }
        if postings != self.postings {
            return Err(Error::DegenerateSpace(
                "inverted index does not match rows".into(),
            ));
        }
        let global = df.values().map(|&c| log1p10(c)).fold(0.0, f64::max);
        if global.to_bits() != self.global_max_logdf.to_bits() {
            return Err(Error::DegenerateSpace(format!(
                "stored global df max {} != recomputed {global}",
                self.global_max_logdf
            )));
        }
        Ok(())
    }
}

/// Question-answer feature bundles for the terminology steps: unigrams are
/// the non-stopword stems of both sides; conjunctions join each side's
/// in-window pairs with every sorted cross pair (question stem, answer stem),
/// the cross pairs having no distance limit.
pub fn qa_features(
    q_tokens: &[Token],
    a_tokens: &[Token],
    conj_window: usize,
) -> (
    std::collections::BTreeSet<FeatureId>,
    std::collections::BTreeSet<FeatureId>,
) {
    let stems = |tokens: &[Token]| -> std::collections::BTreeSet<String> {
        tokens
            .iter()
            .filter(|t| !t.is_stop)
            .map(|t| t.stem.clone())
            .collect()
    };
    let q_stems = stems(q_tokens);
    let a_stems = stems(a_tokens);

    let unigrams: std::collections::BTreeSet<FeatureId> = q_stems
        .iter()
        .chain(a_stems.iter())
        .map(FeatureId::unigram)
        .collect();

    let mut conjunctions = extract_conjunctions(q_tokens, conj_window);
    conjunctions.extend(extract_conjunctions(a_tokens, conj_window));
    for x in &q_stems {
        for y in &a_stems {
            if x != y {
                conjunctions.insert(FeatureId::conjunction(x, y));
            }
        }
    }
    (unigrams, conjunctions)
}

// ---- persistence ----

#[derive(Serialize, Deserialize)]
struct RowMeta {
    term: TermId,
    phrase: String,
    max_logtf: f64,
    features: usize,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    format_version: u32,
    global_max_logdf: f64,
    feature_count: usize,
    rows: Vec<RowMeta>,
}

const MANIFEST: &str = "manifest.json";
const DF_FILE: &str = "df.tsv";
const POSTINGS_FILE: &str = "postings.bin";

fn row_file(term: TermId) -> String {
    format!("term_{}.tsv", term.0)
}

impl TerminologySpace {
    /// Layout: `manifest.json` (dimensions and maxima), `rows/term_<id>.tsv`
    /// with `feature_key<TAB>tf` lines, `df.tsv`, and `postings.bin`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        let manifest = Manifest {
            format_version: persist::FORMAT_VERSION,
            global_max_logdf: self.global_max_logdf,
            feature_count: self.df.len(),
            rows: self
                .rows
                .iter()
                .map(|(&term, row)| RowMeta {
                    term,
                    phrase: self.phrases[&term].clone(),
                    max_logtf: row.max_logtf,
                    features: row.len(),
                })
                .collect(),
        };
        persist::write_json(&dir.join(MANIFEST), &manifest)?;
        for (&term, row) in &self.rows {
            persist::write_count_tsv(&dir.join("rows").join(row_file(term)), &row.tf)?;
        }
        persist::write_count_tsv(&dir.join(DF_FILE), &self.df)?;
        let postings: BTreeMap<FeatureId, Vec<u32>> = self
            .postings
            .iter()
            .map(|(f, terms)| (f.clone(), terms.iter().map(|t| t.0).collect()))
            .collect();
        persist::write_postings(&dir.join(POSTINGS_FILE), &postings)
    }

    /// Loads and cross-checks every derived table against the rows, so a
    /// loaded space is guaranteed identical to a fresh build from the same
    /// pseudo-documents.
    pub fn load(dir: &Path) -> Result<TerminologySpace> {
        let manifest_path = dir.join(MANIFEST);
        let manifest: Manifest = persist::read_json(&manifest_path)?;
        persist::check_version(&manifest_path, manifest.format_version)?;

        let mut rows = BTreeMap::new();
        let mut phrases = BTreeMap::new();
        for meta in &manifest.rows {
            let path = dir.join("rows").join(row_file(meta.term));
            let tf = persist::read_count_tsv(&path)?;
            if tf.len() != meta.features {
                return Err(Error::parse(
                    &path,
                    0,
                    format!(
                        "manifest says {} features, file has {}",
                        meta.features,
                        tf.len()
                    ),
                ));
            }
            let row = TermRow::from_counts(tf);
            if row.max_logtf.to_bits() != meta.max_logtf.to_bits() {
                return Err(Error::parse(
                    &path,
                    0,
                    format!(
                        "manifest says row max {}, counts give {}",
                        meta.max_logtf, row.max_logtf
                    ),
                ));
            }
            rows.insert(meta.term, row);
            phrases.insert(meta.term, meta.phrase.clone());
        }
        if rows.len() != manifest.rows.len() {
            return Err(Error::parse(
                &manifest_path,
                0,
                "duplicate term in manifest",
            ));
        }

        let df = persist::read_count_tsv(&dir.join(DF_FILE))?;
        let raw_postings = persist::read_postings(&dir.join(POSTINGS_FILE))?;
        let postings: BTreeMap<FeatureId, Vec<TermId>> = raw_postings
            .into_iter()
            .map(|(f, ids)| (f, ids.into_iter().map(TermId).collect()))
            .collect();
        let global_max_logdf = manifest.global_max_logdf;

        let space = TerminologySpace {
            rows,
            phrases,
            df,
            global_max_logdf,
            postings,
        };
        space.validate().map_err(|e| {
            Error::parse(
                dir.join(MANIFEST).as_path(),
                0,
                format!("inconsistent store: {e}"),
            )
        })?;
        if space.df.len() != manifest.feature_count {
            return Err(Error::parse(
                &manifest_path,
                0,
                format!(
                    "manifest says {} features, df table has {}",
                    manifest.feature_count,
                    space.df.len()
                ),
            ));
        }
        Ok(space)
    }
}
