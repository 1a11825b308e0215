//! The staged scoring pipeline.
//!
//! A (question, choice) pair earns eight subscores from the three spaces.
//! Term candidates narrow between steps: all terms sharing a feature, then
//! the best `step1_keep` by the terminology tf-idf subscores, `step2_keep`
//! after binary re-ranking, `step3_keep` after the word-context subscores,
//! and finally one term whose sentence space supplies the last two
//! subscores. The pair's final score is the mean of the enabled subscores
//! for the winning term.
//!
//! Every ranking breaks ties by ascending term id, and every floating-point
//! accumulation runs in a fixed (feature- or id-sorted) order, so repeated
//! runs are bit-identical.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::sentence::{SentenceRow, SentenceSpace};
use crate::space::terminology::{qa_features, TerminologySpace};
use crate::space::word::{qa_word_contexts, WordSpace};
use crate::space::{SpaceStore, SparseVector, TermId, WeightKind};
use crate::text::{extract_ngrams, FeatureId, Token, Tokenizer};

pub const SUBSCORE_COUNT: usize = 8;
pub const SUBSCORE_LABELS: [&str; SUBSCORE_COUNT] =
    ["1.1", "1.2", "2.1", "2.2", "3.1", "3.2", "4.1", "4.2"];

/// Beam widths and sentence-step parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BeamConfig {
    pub step1_keep: usize,
    pub step2_keep: usize,
    pub step3_keep: usize,
    pub k_sentences: usize,
    pub m_subset: usize,
    pub subset_candidate_cap: usize,
}

impl Default for BeamConfig {
    fn default() -> Self {
        BeamConfig {
            step1_keep: 10,
            step2_keep: 4,
            step3_keep: 1,
            k_sentences: 5,
            m_subset: 6,
            subset_candidate_cap: 12,
        }
    }
}

impl BeamConfig {
    pub fn validate(&self) -> Result<()> {
        if self.step3_keep == 0
            || self.k_sentences == 0
            || self.m_subset == 0
            || self.subset_candidate_cap == 0
        {
            return Err(Error::Config(
                "beam parameters must all be at least 1".into(),
            ));
        }
        if self.step1_keep < self.step2_keep || self.step2_keep < self.step3_keep {
            return Err(Error::Config(format!(
                "beam widths must satisfy step1_keep >= step2_keep >= step3_keep, got ({}, {}, {})",
                self.step1_keep, self.step2_keep, self.step3_keep
            )));
        }
        Ok(())
    }
}

/// Which of the eight subscores participate in ranking and in the final
/// mean. At least one must stay enabled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AblationMask {
    enabled: [bool; SUBSCORE_COUNT],
}

impl Default for AblationMask {
    fn default() -> Self {
        AblationMask::all()
    }
}

impl AblationMask {
    pub fn all() -> AblationMask {
        AblationMask {
            enabled: [true; SUBSCORE_COUNT],
        }
    }

    pub fn new(enabled: [bool; SUBSCORE_COUNT]) -> Result<AblationMask> {
        if enabled.iter().any(|&e| e) {
            Ok(AblationMask { enabled })
        } else {
            Err(Error::Config("all eight subscores disabled".into()))
        }
    }

    /// Everything enabled except the given subscore index.
    pub fn without(index: usize) -> AblationMask {
        assert!(index < SUBSCORE_COUNT);
        let mut enabled = [true; SUBSCORE_COUNT];
        enabled[index] = false;
        AblationMask { enabled }
    }

    pub fn enabled(&self, index: usize) -> bool {
        self.enabled[index]
    }

    pub fn flags(&self) -> [bool; SUBSCORE_COUNT] {
        self.enabled
    }

    pub fn is_complete(&self) -> bool {
        self.enabled.iter().all(|&e| e)
    }

    pub fn disabled_labels(&self) -> Vec<&'static str> {
        SUBSCORE_LABELS
            .iter()
            .zip(self.enabled)
            .filter(|(_, e)| !e)
            .map(|(&l, _)| l)
            .collect()
    }
}

/// Mean of the enabled subscores among the first `upto` (2, 4, 6, or 8
/// depending on the step); 0 when none of them is enabled.
pub fn masked_mean(subscores: &[f64; SUBSCORE_COUNT], mask: &AblationMask, upto: usize) -> f64 {
    debug_assert!(upto <= SUBSCORE_COUNT);
    let mut sum = 0.0;
    let mut n = 0u32;
    for (i, &s) in subscores.iter().enumerate().take(upto) {
        if mask.enabled(i) {
            sum += s;
            n += 1;
        }
    }
    if n == 0 {
        0.0
    } else {
        sum / f64::from(n)
    }
}

/// A question paired with one candidate answer, with every feature bundle
/// the pipeline needs derived up front.
#[derive(Debug, Clone)]
pub struct QaPair {
    q_tokens: Vec<Token>,
    a_tokens: Vec<Token>,
    q_stems: BTreeSet<String>,
    a_stems: BTreeSet<String>,
    unigrams: BTreeSet<FeatureId>,
    conjunctions: BTreeSet<FeatureId>,
    word_contexts: BTreeMap<String, BTreeSet<FeatureId>>,
    ngrams: BTreeSet<FeatureId>,
}

impl QaPair {
    /// Question and answer are separate token lists throughout; no window or
    /// n-gram ever crosses the boundary between them.
    pub fn new(
        q_tokens: Vec<Token>,
        a_tokens: Vec<Token>,
        conj_window: usize,
        context_window: usize,
    ) -> QaPair {
        let stems = |tokens: &[Token]| -> BTreeSet<String> {
            tokens
                .iter()
                .filter(|t| !t.is_stop)
                .map(|t| t.stem.clone())
                .collect()
        };
        let q_stems = stems(&q_tokens);
        let a_stems = stems(&a_tokens);
        let (unigrams, conjunctions) = qa_features(&q_tokens, &a_tokens, conj_window);
        let word_contexts = qa_word_contexts(&q_tokens, &a_tokens, context_window);
        let mut ngrams = extract_ngrams(&q_tokens, 3);
        ngrams.extend(extract_ngrams(&a_tokens, 3));
        QaPair {
            q_tokens,
            a_tokens,
            q_stems,
            a_stems,
            unigrams,
            conjunctions,
            word_contexts,
            ngrams,
        }
    }

    pub fn from_text(
        tokenizer: &Tokenizer,
        question: &str,
        answer: &str,
        conj_window: usize,
        context_window: usize,
    ) -> QaPair {
        QaPair::new(
            tokenizer.tokenize(question),
            tokenizer.tokenize(answer),
            conj_window,
            context_window,
        )
    }

    pub fn q_tokens(&self) -> &[Token] {
        &self.q_tokens
    }

    pub fn a_tokens(&self) -> &[Token] {
        &self.a_tokens
    }

    pub fn unigrams(&self) -> &BTreeSet<FeatureId> {
        &self.unigrams
    }

    pub fn conjunctions(&self) -> &BTreeSet<FeatureId> {
        &self.conjunctions
    }

    pub fn word_contexts(&self) -> &BTreeMap<String, BTreeSet<FeatureId>> {
        &self.word_contexts
    }

    pub fn ngrams(&self) -> &BTreeSet<FeatureId> {
        &self.ngrams
    }

    pub fn unigram_vector(&self) -> SparseVector {
        SparseVector::binary(self.unigrams.iter().cloned())
    }

    pub fn conjunction_vector(&self) -> SparseVector {
        SparseVector::binary(self.conjunctions.iter().cloned())
    }
}

/// Inner product with a binary vector, divided by its cardinality; 0 for an
/// empty vector. The sum always runs over `qa`'s features in ascending
/// order, so the result does not depend on how `row` was materialized.
pub fn overlap_score(row: &SparseVector, qa: &SparseVector) -> f64 {
    debug_assert_eq!(qa.kind(), WeightKind::Binary);
    if qa.is_empty() {
        return 0.0;
    }
    let sum: f64 = qa.iter().map(|(f, _)| row.get(f)).sum();
    sum / qa.len() as f64
}

fn overlap_of(features: &BTreeSet<FeatureId>, weight: impl Fn(&FeatureId) -> f64) -> f64 {
    if features.is_empty() {
        return 0.0;
    }
    let sum: f64 = features.iter().map(weight).sum();
    sum / features.len() as f64
}

/// Subscores 1.1, 1.2, 2.1, 2.2 for one term: unigram and conjunction
/// overlaps under tf-idf and binary weights.
pub fn terminology_subscores(
    space: &TerminologySpace,
    term: TermId,
    qa: &QaPair,
) -> (f64, f64, f64, f64) {
    let s11 = overlap_of(&qa.unigrams, |f| space.tfidf(term, f));
    let s12 = overlap_of(&qa.conjunctions, |f| space.tfidf(term, f));
    let s21 = overlap_of(&qa.unigrams, |f| space.binary(term, f));
    let s22 = overlap_of(&qa.conjunctions, |f| space.binary(term, f));
    (s11, s12, s21, s22)
}

/// Subscores 3.1 and 3.2 for one term's word space.
///
/// 3.1 compares each QA word's context to the same word's row; 3.2 compares
/// each word's context to the rows of the words on the other side of the
/// pair (for a word appearing on both sides, the answer side is searched).
/// Both average over all non-stopword QA stems, counting misses as zero.
pub fn word_subscores(space: &WordSpace, qa: &QaPair) -> (f64, f64) {
    let n = qa.word_contexts.len();
    if n == 0 {
        return (0.0, 0.0);
    }

    let mut same_sum = 0.0;
    let mut cross_sum = 0.0;
    for (stem, context) in &qa.word_contexts {
        same_sum += overlap_of(context, |f| space.tfidf(stem, f));

        let other_side = if qa.q_stems.contains(stem) {
            &qa.a_stems
        } else {
            &qa.q_stems
        };
        let mut best = 0.0f64;
        for y in other_side {
            best = best.max(overlap_of(context, |f| space.tfidf(y, f)));
        }
        cross_sum += best;
    }
    (same_sum / n as f64, cross_sum / n as f64)
}

/// Exhaustive best-subset search for one sentence row: over non-empty
/// subsets `u` (|u| ≤ m) of the candidate contexts, maximize
/// `shared(row, c(u)) / |c(u)| · |u| / m` where c(u) is the union of the
/// subset's contexts.
struct SubsetSearch<'a> {
    row: &'a SentenceRow,
    contexts: &'a [&'a BTreeSet<FeatureId>],
    m: usize,
    multiplicity: HashMap<&'a FeatureId, u32>,
    union_size: usize,
    shared: usize,
    best: f64,
}

impl<'a> SubsetSearch<'a> {
    fn run(row: &'a SentenceRow, contexts: &'a [&'a BTreeSet<FeatureId>], m: usize) -> f64 {
        let mut search = SubsetSearch {
            row,
            contexts,
            m,
            multiplicity: HashMap::new(),
            union_size: 0,
            shared: 0,
            best: 0.0,
        };
        search.descend(0, 0);
        search.best
    }

    fn descend(&mut self, start: usize, depth: usize) {
        for i in start..self.contexts.len() {
            self.push(i);
            // candidate contexts are non-empty, so the union never is
            let score = (self.shared as f64 / self.union_size as f64)
                * ((depth + 1) as f64 / self.m as f64);
            if score > self.best {
                self.best = score;
            }
            if depth + 1 < self.m {
                self.descend(i + 1, depth + 1);
            }
            self.pop(i);
        }
    }

    fn push(&mut self, i: usize) {
        for feature in self.contexts[i] {
            let count = self.multiplicity.entry(feature).or_insert(0);
            if *count == 0 {
                self.union_size += 1;
                if self.row.contains(feature) {
                    self.shared += 1;
                }
            }
            *count += 1;
        }
    }

    fn pop(&mut self, i: usize) {
        for feature in self.contexts[i] {
            let count = self.multiplicity.get_mut(feature).expect("pushed feature");
            *count -= 1;
            if *count == 0 {
                self.union_size -= 1;
                if self.row.contains(feature) {
                    self.shared -= 1;
                }
            }
        }
    }
}

/// Sum of the top `k` values divided by `k`. Fewer than `k` positive values
/// means the average is effectively padded with zeros.
fn top_k_mean(mut values: Vec<(u32, f64)>, k: usize) -> f64 {
    // the empty sum identity is -0.0, which would leak a negative zero
    // into reported subscores
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    values.truncate(k);
    let sum: f64 = values.iter().map(|(_, v)| v).sum();
    sum / k as f64
}

/// Subscores 4.1 (whole-sentence match) and 4.2 (best-subset match) against
/// one term's sentence space.
pub fn sentence_subscores(space: &SentenceSpace, qa: &QaPair, beam: &BeamConfig) -> (f64, f64) {
    let k = beam.k_sentences;

    let s41 = if qa.ngrams.is_empty() {
        0.0
    } else {
        let scores: Vec<(u32, f64)> = space
            .candidate_sentences(qa.ngrams.iter())
            .into_iter()
            .map(|sid| {
                let row = space.row(sid).expect("posting within range");
                (sid, row.shared(&qa.ngrams) as f64 / qa.ngrams.len() as f64)
            })
            .collect();
        top_k_mean(scores, k)
    };

    // per-sentence candidates: QA words whose own context vector shares a
    // feature with the sentence, at most subset_candidate_cap of them by
    // descending individual overlap (ties to the lexicographically first)
    let usable: Vec<(&String, &BTreeSet<FeatureId>)> = qa
        .word_contexts
        .iter()
        .filter(|(_, ctx)| !ctx.is_empty())
        .collect();
    let all_context_features: BTreeSet<&FeatureId> =
        usable.iter().flat_map(|(_, ctx)| ctx.iter()).collect();
    let s42 = if all_context_features.is_empty() {
        0.0
    } else {
        let scores: Vec<(u32, f64)> = space
            .candidate_sentences(all_context_features.iter().copied())
            .into_iter()
            .map(|sid| {
                let row = space.row(sid).expect("posting within range");
                let mut candidates: Vec<(&String, &BTreeSet<FeatureId>, f64)> = usable
                    .iter()
                    .filter_map(|&(stem, ctx)| {
                        let shared = row.shared(ctx);
                        (shared > 0).then(|| (stem, ctx, shared as f64 / ctx.len() as f64))
                    })
                    .collect();
                if candidates.len() > beam.subset_candidate_cap {
                    candidates.sort_by(|a, b| b.2.total_cmp(&a.2).then_with(|| a.0.cmp(b.0)));
                    candidates.truncate(beam.subset_candidate_cap);
                    candidates.sort_by(|a, b| a.0.cmp(b.0));
                }
                let contexts: Vec<&BTreeSet<FeatureId>> =
                    candidates.iter().map(|&(_, ctx, _)| ctx).collect();
                (sid, SubsetSearch::run(row, &contexts, beam.m_subset))
            })
            .collect();
        top_k_mean(scores, k)
    };

    (s41, s42)
}

/// Ranked `(term, s11, s12)` list. Candidates come from the inverted index;
/// when any exist, terms with a positive ranking mean sort first (ties by
/// ascending id) and the remaining ids pad the list in ascending order, so
/// a beam as wide as the term count reproduces an exhaustive scan. No
/// candidates at all short-circuits to an empty list.
pub fn step1(
    qa: &QaPair,
    space: &TerminologySpace,
    beam: &BeamConfig,
    mask: &AblationMask,
) -> Vec<(TermId, f64, f64)> {
    let candidates = space.candidate_terms(qa.unigrams.iter().chain(qa.conjunctions.iter()));
    if candidates.is_empty() {
        return Vec::new();
    }

    let mut scored: BTreeMap<TermId, (f64, f64)> = BTreeMap::new();
    for &term in &candidates {
        let s11 = overlap_of(&qa.unigrams, |f| space.tfidf(term, f));
        let s12 = overlap_of(&qa.conjunctions, |f| space.tfidf(term, f));
        scored.insert(term, (s11, s12));
    }

    let mut positives: Vec<(TermId, f64)> = scored
        .iter()
        .map(|(&term, &(s11, s12))| {
            (
                term,
                masked_mean(&[s11, s12, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], mask, 2),
            )
        })
        .filter(|&(_, key)| key > 0.0)
        .collect();
    positives.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    positives.truncate(beam.step1_keep);

    let mut kept: Vec<TermId> = positives.iter().map(|&(t, _)| t).collect();
    if kept.len() < beam.step1_keep {
        let taken: BTreeSet<TermId> = kept.iter().copied().collect();
        for term in space.term_ids() {
            if kept.len() == beam.step1_keep {
                break;
            }
            if !taken.contains(&term) {
                kept.push(term);
            }
        }
    }

    kept.into_iter()
        .map(|term| {
            let (s11, s12) = scored.get(&term).copied().unwrap_or((0.0, 0.0));
            (term, s11, s12)
        })
        .collect()
}

/// Binary re-ranking: computes s21/s22 for the step-1 survivors and keeps
/// the best `step2_keep` by the mean of the four terminology subscores.
pub fn step2(
    survivors: &[(TermId, f64, f64)],
    qa: &QaPair,
    space: &TerminologySpace,
    beam: &BeamConfig,
    mask: &AblationMask,
) -> Vec<(TermId, [f64; 4])> {
    let mut ranked: Vec<(TermId, [f64; 4], f64)> = survivors
        .iter()
        .map(|&(term, s11, s12)| {
            let s21 = overlap_of(&qa.unigrams, |f| space.binary(term, f));
            let s22 = overlap_of(&qa.conjunctions, |f| space.binary(term, f));
            let four = [s11, s12, s21, s22];
            let key = masked_mean(&[s11, s12, s21, s22, 0.0, 0.0, 0.0, 0.0], mask, 4);
            (term, four, key)
        })
        .collect();
    ranked.sort_by(|a, b| b.2.total_cmp(&a.2).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(beam.step2_keep);
    ranked.into_iter().map(|(t, four, _)| (t, four)).collect()
}

/// Word-context re-ranking: s31/s32 per survivor, keep the best
/// `step3_keep` by the mean of six subscores.
pub fn step3(
    survivors: &[(TermId, [f64; 4])],
    qa: &QaPair,
    store: &SpaceStore,
    beam: &BeamConfig,
    mask: &AblationMask,
) -> Result<Vec<(TermId, [f64; 6])>> {
    let mut ranked: Vec<(TermId, [f64; 6], f64)> = Vec::with_capacity(survivors.len());
    for &(term, four) in survivors {
        let word_space = store.word(term)?;
        let (s31, s32) = word_subscores(&word_space, qa);
        let six = [four[0], four[1], four[2], four[3], s31, s32];
        let key = masked_mean(
            &[six[0], six[1], six[2], six[3], six[4], six[5], 0.0, 0.0],
            mask,
            6,
        );
        ranked.push((term, six, key));
    }
    ranked.sort_by(|a, b| b.2.total_cmp(&a.2).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(beam.step3_keep);
    Ok(ranked.into_iter().map(|(t, six, _)| (t, six)).collect())
}

/// Sentence-space subscores for one surviving term.
pub fn step4(
    term: TermId,
    qa: &QaPair,
    store: &SpaceStore,
    beam: &BeamConfig,
) -> Result<(f64, f64)> {
    let space = store.sentence(term)?;
    Ok(sentence_subscores(&space, qa, beam))
}

/// Ranked term lists recorded at each step, with the ranking mean used
/// there.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BeamTrace {
    pub step1: Vec<(TermId, f64)>,
    pub step2: Vec<(TermId, f64)>,
    pub step3: Vec<(TermId, f64)>,
    pub step4: Vec<(TermId, f64)>,
}

/// Everything scored for one (question, choice) pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreBreakdown {
    pub choice_index: usize,
    /// Winning term, absent when no term shares any feature with the pair.
    pub term: Option<TermId>,
    pub term_phrase: Option<String>,
    /// Subscores 1.1, 1.2, 2.1, 2.2, 3.1, 3.2, 4.1, 4.2. Disabled subscores
    /// are still computed and reported; they just do not enter any mean.
    pub subscores: [f64; SUBSCORE_COUNT],
    /// Mean of the enabled subscores of the winning term.
    pub final_score: f64,
    pub beam: BeamTrace,
}

impl ScoreBreakdown {
    fn empty() -> ScoreBreakdown {
        ScoreBreakdown {
            choice_index: 0,
            term: None,
            term_phrase: None,
            subscores: [0.0; SUBSCORE_COUNT],
            final_score: 0.0,
            beam: BeamTrace::default(),
        }
    }
}

/// Runs the full pipeline for one pair.
pub fn score_pair(
    qa: &QaPair,
    store: &SpaceStore,
    beam: &BeamConfig,
    mask: &AblationMask,
) -> Result<ScoreBreakdown> {
    beam.validate()?;
    let terminology = store.terminology();

    let survivors1 = step1(qa, terminology, beam, mask);
    if survivors1.is_empty() {
        return Ok(ScoreBreakdown::empty());
    }
    let trace1: Vec<(TermId, f64)> = survivors1
        .iter()
        .map(|&(t, s11, s12)| {
            (
                t,
                masked_mean(&[s11, s12, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0], mask, 2),
            )
        })
        .collect();

    let survivors2 = step2(&survivors1, qa, terminology, beam, mask);
    let trace2: Vec<(TermId, f64)> = survivors2
        .iter()
        .map(|&(t, four)| {
            (
                t,
                masked_mean(
                    &[four[0], four[1], four[2], four[3], 0.0, 0.0, 0.0, 0.0],
                    mask,
                    4,
                ),
            )
        })
        .collect();

    let survivors3 = step3(&survivors2, qa, store, beam, mask)?;
    let trace3: Vec<(TermId, f64)> = survivors3
        .iter()
        .map(|&(t, six)| {
            (
                t,
                masked_mean(
                    &[six[0], six[1], six[2], six[3], six[4], six[5], 0.0, 0.0],
                    mask,
                    6,
                ),
            )
        })
        .collect();

    let mut finalists: Vec<(TermId, [f64; SUBSCORE_COUNT], f64)> =
        Vec::with_capacity(survivors3.len());
    for &(term, six) in &survivors3 {
        let (s41, s42) = step4(term, qa, store, beam)?;
        let eight = [six[0], six[1], six[2], six[3], six[4], six[5], s41, s42];
        let key = masked_mean(&eight, mask, SUBSCORE_COUNT);
        finalists.push((term, eight, key));
    }
    finalists.sort_by(|a, b| b.2.total_cmp(&a.2).then_with(|| a.0.cmp(&b.0)));
    let trace4: Vec<(TermId, f64)> = finalists.iter().map(|&(t, _, key)| (t, key)).collect();

    let (term, subscores, final_score) = finalists[0];
    Ok(ScoreBreakdown {
        choice_index: 0,
        term: Some(term),
        term_phrase: store.phrase(term).map(str::to_string),
        subscores,
        final_score,
        beam: BeamTrace {
            step1: trace1,
            step2: trace2,
            step3: trace3,
            step4: trace4,
        },
    })
}

/// One question answered: the argmax choice set and every breakdown.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Answer {
    /// Indices of all choices tied at the maximum final score.
    pub argmax: Vec<usize>,
    pub breakdowns: Vec<ScoreBreakdown>,
}

/// Scores every choice against the question and returns the argmax set
/// (ties are kept, for fractional marking downstream).
pub fn answer_question(
    question: &str,
    choices: &[String],
    store: &SpaceStore,
    beam: &BeamConfig,
    mask: &AblationMask,
) -> Result<Answer> {
    if choices.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "a question needs at least 2 choices, got {}",
            choices.len()
        )));
    }
    let config = store.config();
    let q_tokens = store.tokenizer().tokenize(question);

    let mut breakdowns = Vec::with_capacity(choices.len());
    for (i, choice) in choices.iter().enumerate() {
        let a_tokens = store.tokenizer().tokenize(choice);
        let qa = QaPair::new(
            q_tokens.clone(),
            a_tokens,
            config.conj_window,
            config.context_window,
        );
        let mut breakdown = score_pair(&qa, store, beam, mask)?;
        breakdown.choice_index = i;
        breakdowns.push(breakdown);
    }

    let max = breakdowns
        .iter()
        .map(|b| b.final_score)
        .fold(f64::NEG_INFINITY, f64::max);
    let argmax: Vec<usize> = breakdowns
        .iter()
        .enumerate()
        .filter(|(_, b)| b.final_score == max)
        .map(|(i, _)| i)
        .collect();
    Ok(Answer { argmax, breakdowns })
}
