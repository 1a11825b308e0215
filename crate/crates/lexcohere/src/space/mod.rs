//! Sparse vector spaces over text features.
//!
//! Three space types share the same weighting scheme: a terminology space
//! (one row per term), per-term word spaces (one row per frequent stem), and
//! per-term sentence spaces (one binary row per sentence).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::text::FeatureId;

pub mod sentence;
pub mod store;
pub mod terminology;
pub mod word;

pub(crate) mod persist;

pub use sentence::SentenceSpace;
pub use store::SpaceStore;
pub use terminology::TerminologySpace;
pub use word::WordSpace;

/// Identifier of a term-bank entry; row index in the terminology space.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, serde::Serialize, serde::Deserialize,
)]
#[serde(transparent)]
pub struct TermId(pub u32);

impl std::fmt::Display for TermId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Length-normalized log tf-idf in [0, 1].
///
/// The tf part is `log10(tf+1)` over the largest such value in the row; the
/// idf part is `1 - log10(df+1)` over the largest log document frequency in
/// the whole matrix. Both normalizers must be positive: a zero normalizer
/// means the matrix has no features at all, and no weight is defined.
pub fn tfidf_weight(tf: u32, row_max_logtf: f64, df: u32, global_max_logdf: f64) -> Result<f64> {
    // NaN normalizers must land in the error branch too
    if row_max_logtf.is_nan() || row_max_logtf <= 0.0 {
        return Err(Error::DegenerateSpace(format!(
            "row tf normalizer is {row_max_logtf}, row has no features"
        )));
    }
    if global_max_logdf.is_nan() || global_max_logdf <= 0.0 {
        return Err(Error::DegenerateSpace(format!(
            "df normalizer is {global_max_logdf}, matrix has no features"
        )));
    }
    Ok(raw_tfidf(tf, row_max_logtf, df, global_max_logdf))
}

/// Same formula without the degenerate-normalizer checks, for call sites
/// whose construction already guarantees positive normalizers.
#[inline]
pub(crate) fn raw_tfidf(tf: u32, row_max_logtf: f64, df: u32, global_max_logdf: f64) -> f64 {
    debug_assert!(row_max_logtf > 0.0 && global_max_logdf > 0.0);
    let tf_part = log1p10(tf) / row_max_logtf;
    let idf_part = 1.0 - log1p10(df) / global_max_logdf;
    tf_part * idf_part
}

/// `log10(x + 1)` for counts.
#[inline]
pub(crate) fn log1p10(x: u32) -> f64 {
    (f64::from(x) + 1.0).log10()
}

/// 1 for positive weight, 0 otherwise. Applied to tf-idf weights this keeps
/// the idf zeros: a feature present everywhere binarizes to 0, not 1.
#[inline]
pub fn binarize(weight: f64) -> f64 {
    if weight > 0.0 {
        1.0
    } else {
        0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightKind {
    TfIdf,
    Binary,
}

/// Sparse feature vector. Zero weights are never stored, so `len` is the
/// number of nonzero dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    kind: WeightKind,
    entries: BTreeMap<FeatureId, f64>,
}

impl SparseVector {
    /// Binary vector with weight 1 on every given feature.
    pub fn binary<I: IntoIterator<Item = FeatureId>>(features: I) -> SparseVector {
        SparseVector {
            kind: WeightKind::Binary,
            entries: features.into_iter().map(|f| (f, 1.0)).collect(),
        }
    }

    /// Weighted vector; zero-weight entries are dropped.
    pub fn weighted<I: IntoIterator<Item = (FeatureId, f64)>>(entries: I) -> SparseVector {
        let entries: BTreeMap<FeatureId, f64> = entries
            .into_iter()
            .filter(|(_, w)| {
                debug_assert!(*w >= 0.0 && w.is_finite(), "weight {w} out of range");
                *w > 0.0
            })
            .collect();
        SparseVector {
            kind: WeightKind::TfIdf,
            entries,
        }
    }

    pub fn empty(kind: WeightKind) -> SparseVector {
        SparseVector {
            kind,
            entries: BTreeMap::new(),
        }
    }

    pub fn kind(&self) -> WeightKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, feature: &FeatureId) -> f64 {
        self.entries.get(feature).copied().unwrap_or(0.0)
    }

    pub fn contains(&self, feature: &FeatureId) -> bool {
        self.entries.contains_key(feature)
    }

    /// Entries in feature order.
    pub fn iter(&self) -> impl Iterator<Item = (&FeatureId, f64)> {
        self.entries.iter().map(|(f, &w)| (f, w))
    }

    pub fn l1_norm(&self) -> f64 {
        self.entries.values().sum()
    }

    /// Dot product; iterates the smaller vector in feature order.
    pub fn dot(&self, other: &SparseVector) -> f64 {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut sum = 0.0;
        for (f, w) in small.iter() {
            sum += w * large.get(f);
        }
        sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uni(s: &str) -> FeatureId {
        FeatureId::unigram(s)
    }

    // Frozen from hand evaluation: tf = 99 with row max tf = 99 gives a tf
    // part of exactly 1; df = 1 against a global max df of 9009 gives
    // 1 - log10(2)/log10(9010).
    #[test]
    fn tfidf_matches_frozen_value() {
        let w = tfidf_weight(99, log1p10(99), 1, log1p10(9009)).unwrap();
        assert!((w - 0.923_880_924_318_514_8).abs() < 1e-12, "w = {w:.16}");
    }

    #[test]
    fn tfidf_edges() {
        // tf = 0 kills the weight
        assert_eq!(tfidf_weight(0, log1p10(9), 1, log1p10(9)).unwrap(), 0.0);
        // df at the global max kills the weight even with max tf
        let w = tfidf_weight(9, log1p10(9), 9, log1p10(9)).unwrap();
        assert!(w.abs() < 1e-15, "w = {w}");
        // tf at row max with df = 0 hits exactly 1
        let w = tfidf_weight(9, log1p10(9), 0, log1p10(9)).unwrap();
        assert_eq!(w, 1.0);
    }

    #[test]
    fn tfidf_rejects_degenerate_normalizers() {
        assert!(tfidf_weight(1, 0.0, 1, 1.0).is_err());
        assert!(tfidf_weight(1, 1.0, 1, 0.0).is_err());
        assert!(tfidf_weight(1, -1.0, 1, 1.0).is_err());
    }

    #[test]
    fn binarize_keeps_idf_zero() {
        assert_eq!(binarize(0.7), 1.0);
        assert_eq!(binarize(0.0), 0.0);
        assert_eq!(binarize(1e-300), 1.0);
        // a weight zeroed by idf stays zero in the binary matrix
        let w = tfidf_weight(5, log1p10(9), 9, log1p10(9)).unwrap();
        assert_eq!(binarize(w), 0.0);
    }

    #[test]
    fn sparse_vector_drops_zero_weights() {
        let v = SparseVector::weighted([(uni("a"), 0.5), (uni("b"), 0.0), (uni("c"), 0.25)]);
        assert_eq!(v.len(), 2);
        assert!(!v.contains(&uni("b")));
        assert_eq!(v.get(&uni("a")), 0.5);
        assert_eq!(v.get(&uni("b")), 0.0);
    }

    #[test]
    fn dot_product_matches_hand_computation() {
        let a = SparseVector::weighted([(uni("x"), 0.5), (uni("y"), 0.25), (uni("z"), 1.0)]);
        let b = SparseVector::binary([uni("y"), uni("z"), uni("w")]);
        assert_eq!(a.dot(&b), 1.25);
        assert_eq!(b.dot(&a), 1.25);
        assert_eq!(a.dot(&SparseVector::empty(WeightKind::Binary)), 0.0);
    }

    #[test]
    fn l1_norm_of_binary_vector_counts_features() {
        let b = SparseVector::binary([uni("y"), uni("z"), uni("w")]);
        assert_eq!(b.l1_norm(), 3.0);
        assert_eq!(b.len(), 3);
    }
}
