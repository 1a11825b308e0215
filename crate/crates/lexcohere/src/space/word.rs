//! Per-term word × context matrices.
//!
//! One matrix per term characterizes how words behave in that term's
//! pseudo-document: each row is a non-stopword stem with enough token
//! occurrences, each column a context n-gram seen around those occurrences.
//! The same word gets different rows under different terms, which is the
//! point: context near "earthquakes" differs from context near "glacier".

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pdocs::PseudoDocument;
use crate::space::persist;
use crate::space::{binarize, log1p10, raw_tfidf, SparseVector, TermId, WeightKind};
use crate::text::{extract_context, FeatureId, Token};

#[derive(Debug, Clone, PartialEq)]
pub struct WordRow {
    tf: BTreeMap<FeatureId, u32>,
    max_logtf: f64,
    occurrences: u32,
}

impl WordRow {
    fn from_counts(tf: BTreeMap<FeatureId, u32>, occurrences: u32) -> WordRow {
        let max_logtf = tf.values().map(|&c| log1p10(c)).fold(0.0, f64::max);
        WordRow {
            tf,
            max_logtf,
            occurrences,
        }
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

    pub fn occurrences(&self) -> u32 {
        self.occurrences
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WordSpace {
    term: TermId,
    rows: BTreeMap<String, WordRow>,
    df: BTreeMap<FeatureId, u32>,
    matrix_max_logdf: f64,
}

/// A row's tf for a context n-gram counts the token occurrences of the row
/// stem whose window contains that n-gram, once per occurrence no matter how
/// often the n-gram repeats inside one window.
pub fn build_word_space(pdoc: &PseudoDocument, window: usize, min_occurrences: usize) -> WordSpace {
    let mut occurrences: BTreeMap<&str, u32> = BTreeMap::new();
    for sentence in &pdoc.sentences {
        for token in &sentence.tokens {
            if !token.is_stop {
                *occurrences.entry(token.stem.as_str()).or_insert(0) += 1;
            }
        }
    }
    let qualifying: BTreeSet<&str> = occurrences
        .iter()
        .filter(|(_, &count)| count as usize >= min_occurrences)
        .map(|(&stem, _)| stem)
        .collect();
    if qualifying.is_empty() {
        log::warn!(
            "term {} {:?}: no stem reaches {} occurrences, word space is empty",
            pdoc.term,
            pdoc.phrase,
            min_occurrences
        );
    }

    let mut counts: BTreeMap<&str, BTreeMap<FeatureId, u32>> =
        qualifying.iter().map(|&s| (s, BTreeMap::new())).collect();
    for sentence in &pdoc.sentences {
        for (pos, token) in sentence.tokens.iter().enumerate() {
            if token.is_stop || !qualifying.contains(token.stem.as_str()) {
                continue;
            }
            let row = counts.get_mut(token.stem.as_str()).expect("qualifying row");
            for feature in extract_context(&sentence.tokens, pos, window) {
                *row.entry(feature).or_insert(0) += 1;
            }
        }
    }

    let rows: BTreeMap<String, WordRow> = counts
        .into_iter()
        .map(|(stem, tf)| {
            let row = WordRow::from_counts(tf, occurrences[stem]);
            (stem.to_string(), row)
        })
        .collect();

    let mut df: BTreeMap<FeatureId, u32> = BTreeMap::new();
    for row in rows.values() {
        for (feature, _) in row.features() {
            *df.entry(feature.clone()).or_insert(0) += 1;
        }
    }
    let matrix_max_logdf = df.values().map(|&c| log1p10(c)).fold(0.0, f64::max);

    WordSpace {
        term: pdoc.term,
        rows,
        df,
        matrix_max_logdf,
    }
}

impl WordSpace {
    pub fn term(&self) -> TermId {
        self.term
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn stems(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }

    pub fn row(&self, stem: &str) -> Option<&WordRow> {
        self.rows.get(stem)
    }

    pub fn contains(&self, stem: &str) -> bool {
        self.rows.contains_key(stem)
    }

    pub fn tf(&self, stem: &str, feature: &FeatureId) -> u32 {
        self.rows.get(stem).map_or(0, |row| row.tf(feature))
    }

    pub fn df(&self, feature: &FeatureId) -> u32 {
        self.df.get(feature).copied().unwrap_or(0)
    }

    pub fn matrix_max_logdf(&self) -> f64 {
        self.matrix_max_logdf
    }

    pub fn row_max_logtf(&self, stem: &str) -> f64 {
        self.rows.get(stem).map_or(0.0, WordRow::max_logtf)
    }

    pub fn tfidf(&self, stem: &str, feature: &FeatureId) -> f64 {
        let Some(row) = self.rows.get(stem) else {
            return 0.0;
        };
        let tf = row.tf(feature);
        if tf == 0 {
            return 0.0;
        }
        raw_tfidf(tf, row.max_logtf, self.df(feature), self.matrix_max_logdf)
    }

    pub fn binary(&self, stem: &str, feature: &FeatureId) -> f64 {
        binarize(self.tfidf(stem, feature))
    }

    pub fn weight(&self, stem: &str, feature: &FeatureId, kind: WeightKind) -> f64 {
        match kind {
            WeightKind::TfIdf => self.tfidf(stem, feature),
            WeightKind::Binary => self.binary(stem, feature),
        }
    }

    pub fn row_vector(&self, stem: &str, kind: WeightKind) -> SparseVector {
        let Some(row) = self.rows.get(stem) else {
            return SparseVector::empty(kind);
        };
        match kind {
            WeightKind::TfIdf => SparseVector::weighted(
                row.tf
                    .keys()
                    .map(|f| (f.clone(), self.tfidf(stem, f)))
                    .filter(|(_, w)| *w > 0.0),
            ),
            WeightKind::Binary => SparseVector::binary(
                row.tf
                    .keys()
                    .filter(|f| self.binary(stem, f) > 0.0)
                    .cloned(),
            ),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let mut df: BTreeMap<FeatureId, u32> = BTreeMap::new();
        for (stem, row) in &self.rows {
            let max_logtf = row.tf.values().map(|&c| log1p10(c)).fold(0.0, f64::max);
            if max_logtf.to_bits() != row.max_logtf.to_bits() {
                return Err(Error::DegenerateSpace(format!(
                    "word row {stem:?}: stored max {} != recomputed {max_logtf}",
                    row.max_logtf
                )));
            }
            for (feature, tf) in row.features() {
                if tf == 0 {
                    return Err(Error::DegenerateSpace(format!(
                        "word row {stem:?}: stored zero tf"
                    )));
                }
                if tf > row.occurrences {
                    return Err(Error::DegenerateSpace(format!(
                        "word row {stem:?}: tf {tf} for {} exceeds {} occurrences",
                        feature.encode(),
                        row.occurrences
                    )));
                }
                *df.entry(feature.clone()).or_insert(0) += 1;
            }
        }
        if df != self.df {
            return Err(Error::DegenerateSpace(format!(
                "word space {}: df table does not match rows",
                self.term
            )));
        }
        let max = df.values().map(|&c| log1p10(c)).fold(0.0, f64::max);
        if max.to_bits() != self.matrix_max_logdf.to_bits() {
            return Err(Error::DegenerateSpace(format!(
                "word space {}: stored df max {} != recomputed {max}",
                self.term, self.matrix_max_logdf
            )));
        }
        Ok(())
    }
}

/// Binary context bundles for the words of a QA pair. Contexts are gathered
/// within the question and within the answer separately (a window never
/// spans the boundary), then unioned per stem over all occurrences. Every
/// non-stopword stem gets an entry, possibly empty.
pub fn qa_word_contexts(
    q_tokens: &[Token],
    a_tokens: &[Token],
    window: usize,
) -> BTreeMap<String, BTreeSet<FeatureId>> {
    let mut out: BTreeMap<String, BTreeSet<FeatureId>> = BTreeMap::new();
    for tokens in [q_tokens, a_tokens] {
        for (pos, token) in tokens.iter().enumerate() {
            if token.is_stop {
                continue;
            }
            let entry = out.entry(token.stem.clone()).or_default();
            entry.extend(extract_context(tokens, pos, window));
        }
    }
    out
}

// ---- persistence ----

#[derive(Serialize, Deserialize)]
struct RowMeta {
    stem: String,
    occurrences: u32,
    max_logtf: f64,
    features: usize,
}

#[derive(Serialize, Deserialize)]
struct Manifest {
    format_version: u32,
    term: TermId,
    matrix_max_logdf: f64,
    rows: Vec<RowMeta>,
}

const MANIFEST: &str = "manifest.json";
const ROWS_FILE: &str = "rows.tsv";
const DF_FILE: &str = "df.tsv";

impl WordSpace {
    /// Layout: `manifest.json`, `rows.tsv` with `stem<TAB>feature<TAB>tf`
    /// lines grouped by stem, and `df.tsv`.
    pub fn save(&self, dir: &Path) -> Result<()> {
        let manifest = Manifest {
            format_version: persist::FORMAT_VERSION,
            term: self.term,
            matrix_max_logdf: self.matrix_max_logdf,
            rows: self
                .rows
                .iter()
                .map(|(stem, row)| RowMeta {
                    stem: stem.clone(),
                    occurrences: row.occurrences,
                    max_logtf: row.max_logtf,
                    features: row.len(),
                })
                .collect(),
        };
        persist::write_json(&dir.join(MANIFEST), &manifest)?;

        let rows_path = dir.join(ROWS_FILE);
        let mut file = persist::create(&rows_path)?;
        use std::io::Write as _;
        for (stem, row) in &self.rows {
            for (feature, tf) in row.features() {
                writeln!(file, "{stem}\t{}\t{tf}", feature.encode())
                    .map_err(|e| Error::io(&rows_path, e))?;
            }
        }
        file.flush().map_err(|e| Error::io(&rows_path, e))?;

        persist::write_count_tsv(&dir.join(DF_FILE), &self.df)
    }

    pub fn load(dir: &Path) -> Result<WordSpace> {
        let manifest_path = dir.join(MANIFEST);
        let manifest: Manifest = persist::read_json(&manifest_path)?;
        persist::check_version(&manifest_path, manifest.format_version)?;

        let rows_path = dir.join(ROWS_FILE);
        let text = persist::read_to_string(&rows_path)?;
        let mut counts: BTreeMap<String, BTreeMap<FeatureId, u32>> = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.is_empty() {
                continue;
            }
            let mut parts = line.splitn(3, '\t');
            let (Some(stem), Some(key), Some(tf)) = (parts.next(), parts.next(), parts.next())
            else {
                return Err(Error::parse(
                    &rows_path,
                    lineno + 1,
                    "expected stem<TAB>feature<TAB>tf",
                ));
            };
            let feature = FeatureId::decode(key)
                .map_err(|e| Error::parse(&rows_path, lineno + 1, e.to_string()))?;
            let tf: u32 = tf
                .parse()
                .map_err(|e| Error::parse(&rows_path, lineno + 1, format!("bad tf: {e}")))?;
            if counts
                .entry(stem.to_string())
                .or_default()
                .insert(feature, tf)
                .is_some()
            {
                return Err(Error::parse(&rows_path, lineno + 1, "duplicate row entry"));
            }
        }

        let mut rows = BTreeMap::new();
        for meta in &manifest.rows {
            let tf = counts.remove(&meta.stem).unwrap_or_default();
            if tf.len() != meta.features {
                return Err(Error::parse(
                    &rows_path,
                    0,
                    format!(
                        "row {:?}: manifest says {} features, file has {}",
                        meta.stem,
                        meta.features,
                        tf.len()
                    ),
                ));
            }
            let row = WordRow::from_counts(tf, meta.occurrences);
            if row.max_logtf.to_bits() != meta.max_logtf.to_bits() {
                return Err(Error::parse(
                    &rows_path,
                    0,
                    format!("row {:?}: maxima disagree with manifest", meta.stem),
                ));
            }
            if rows.insert(meta.stem.clone(), row).is_some() {
                return Err(Error::parse(
                    &manifest_path,
                    0,
                    "duplicate stem in manifest",
                ));
            }
        }
        if let Some(stray) = counts.keys().next() {
            return Err(Error::parse(
                &rows_path,
                0,
                format!("row {stray:?} not listed in manifest"),
            ));
        }

        let df = persist::read_count_tsv(&dir.join(DF_FILE))?;
        let space = WordSpace {
            term: manifest.term,
            rows,
            df,
            matrix_max_logdf: manifest.matrix_max_logdf,
        };
        space
            .validate()
            .map_err(|e| Error::parse(&manifest_path, 0, format!("inconsistent store: {e}")))?;
        Ok(space)
    }
}
