//! Question ingestion, accuracy scoring, significance testing, and the
//! ablation and beam-sweep drivers.
//!
//! A question whose choices tie at the maximum score earns a fractional
//! mark of 1/n when the key is among the n tied choices, matching the
//! expected value of resolving the tie at random.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::EngineConfig;
use crate::error::{Error, Result};
use crate::scorer::{
    answer_question, AblationMask, Answer, BeamConfig, SUBSCORE_COUNT, SUBSCORE_LABELS,
};
use crate::space::SpaceStore;

/// Beam schedules exercised by the sweep driver, narrowest first.
pub const SWEEP_SCHEDULES: [(usize, usize, usize); 4] =
    [(5, 2, 1), (10, 4, 1), (20, 8, 2), (40, 16, 4)];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub id: String,
    pub question: String,
    pub choices: Vec<String>,
    pub answer_key: usize,
}

impl Question {
    fn validate(&self) -> std::result::Result<(), String> {
        if self.id.is_empty() {
            return Err("empty question id".into());
        }
        if self.choices.len() < 2 {
            return Err(format!(
                "question {} has {} choices, need at least 2",
                self.id,
                self.choices.len()
            ));
        }
        if self.answer_key >= self.choices.len() {
            return Err(format!(
                "question {} answer_key {} out of range for {} choices",
                self.id,
                self.answer_key,
                self.choices.len()
            ));
        }
        Ok(())
    }
}

/// Reads JSON-lines question records, one object per line. Blank lines are
/// skipped; any malformed or invalid record fails with its line number, and
/// duplicate ids fail on the second occurrence.
pub fn load_questions(path: &Path) -> Result<Vec<Question>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut questions = Vec::new();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let question: Question = serde_json::from_str(line)
            .map_err(|e| Error::parse(path, lineno + 1, e.to_string()))?;
        question
            .validate()
            .map_err(|msg| Error::parse(path, lineno + 1, msg))?;
        if !seen.insert(question.id.clone()) {
            return Err(Error::parse(
                path,
                lineno + 1,
                format!("duplicate question id {}", question.id),
            ));
        }
        questions.push(question);
    }
    Ok(questions)
}

pub fn save_questions(path: &Path, questions: &[Question]) -> Result<()> {
    let mut out = String::new();
    for question in questions {
        out.push_str(&serde_json::to_string(question)?);
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// 1/|argmax| when the key is among the tied best choices, else 0.
pub fn mark(question: &Question, argmax: &[usize]) -> f64 {
    debug_assert!(!argmax.is_empty());
    if argmax.contains(&question.answer_key) {
        1.0 / argmax.len() as f64
    } else {
        0.0
    }
}

/// Two-tailed Fisher's exact test for the 2x2 table (a, b; c, d): the sum
/// of hypergeometric probabilities, at fixed margins, of every table no
/// more probable than the observed one (with a 1 + 1e-7 slack factor for
/// rounding). An all-zero table carries no evidence and returns 1.
pub fn fisher_exact_2x2(a: u64, b: u64, c: u64, d: u64) -> f64 {
    let n = a + b + c + d;
    if n == 0 {
        return 1.0;
    }
    let row1 = a + b;
    let row2 = c + d;
    let col1 = a + c;

    // ln_fact[i] = ln(i!)
    let mut ln_fact = vec![0.0f64; (n + 1) as usize];
    for i in 1..=n as usize {
        ln_fact[i] = ln_fact[i - 1] + (i as f64).ln();
    }
    let ln_choose = |n: u64, k: u64| -> f64 {
        ln_fact[n as usize] - ln_fact[k as usize] - ln_fact[(n - k) as usize]
    };
    let table_prob = |x: u64| -> f64 {
        (ln_choose(row1, x) + ln_choose(row2, col1 - x) - ln_choose(n, col1)).exp()
    };

    let p_obs = table_prob(a);
    let cutoff = p_obs * (1.0 + 1e-7);
    let lo = col1.saturating_sub(row2);
    let hi = row1.min(col1);
    let mut p = 0.0;
    for x in lo..=hi {
        let px = table_prob(x);
        if px <= cutoff {
            p += px;
        }
    }
    p.min(1.0)
}

/// Wall-clock seconds per question.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimingStats {
    pub mean_seconds: f64,
    pub p95_seconds: f64,
}

impl TimingStats {
    /// p95 is the smallest sample that at least 95% of samples do not
    /// exceed (index ceil(0.95 n) in the sorted order).
    pub fn from_seconds(samples: &[f64]) -> TimingStats {
        if samples.is_empty() {
            return TimingStats {
                mean_seconds: 0.0,
                p95_seconds: 0.0,
            };
        }
        let mean = samples.iter().sum::<f64>() / samples.len() as f64;
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let rank = (0.95 * samples.len() as f64).ceil() as usize;
        let index = rank.clamp(1, samples.len()) - 1;
        TimingStats {
            mean_seconds: mean,
            p95_seconds: sorted[index],
        }
    }
}

/// One question scored: its mark, the elapsed wall-clock time, and the full
/// answer with per-choice breakdowns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionOutcome {
    pub id: String,
    pub mark: f64,
    pub seconds: f64,
    pub answer: Answer,
}

/// Scores every question in parallel over the shared immutable store.
/// Outcomes come back in input order.
pub fn evaluate_questions(
    store: &SpaceStore,
    questions: &[Question],
    beam: &BeamConfig,
    mask: &AblationMask,
) -> Result<Vec<QuestionOutcome>> {
    questions
        .par_iter()
        .map(|question| {
            let start = Instant::now();
            let answer = answer_question(&question.question, &question.choices, store, beam, mask)?;
            let seconds = start.elapsed().as_secs_f64();
            Ok(QuestionOutcome {
                id: question.id.clone(),
                mark: mark(question, &answer.argmax),
                seconds,
                answer,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub config: EngineConfig,
    pub beam: BeamConfig,
    pub mask: AblationMask,
    pub question_count: usize,
    /// Per-question marks keyed by question id, so aggregation does not
    /// depend on evaluation order.
    pub marks: BTreeMap<String, f64>,
    /// Mean of the marks.
    pub accuracy: f64,
    pub timing: TimingStats,
}

/// Folds per-question outcomes into a report. Marks are keyed and summed by
/// ascending question id, so the aggregate is independent of scoring order.
pub fn summarize(
    config: &EngineConfig,
    beam: &BeamConfig,
    mask: &AblationMask,
    outcomes: &[QuestionOutcome],
) -> EvalReport {
    let marks: BTreeMap<String, f64> = outcomes.iter().map(|o| (o.id.clone(), o.mark)).collect();
    let accuracy = if marks.is_empty() {
        0.0
    } else {
        marks.values().sum::<f64>() / marks.len() as f64
    };
    let seconds: Vec<f64> = outcomes.iter().map(|o| o.seconds).collect();
    EvalReport {
        config: config.clone(),
        beam: *beam,
        mask: *mask,
        question_count: outcomes.len(),
        marks,
        accuracy,
        timing: TimingStats::from_seconds(&seconds),
    }
}

pub fn run_evaluation(
    store: &SpaceStore,
    questions: &[Question],
    beam: &BeamConfig,
    mask: &AblationMask,
) -> Result<EvalReport> {
    let outcomes = evaluate_questions(store, questions, beam, mask)?;
    Ok(summarize(store.config(), beam, mask, &outcomes))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationRow {
    /// Label of the one disabled subscore.
    pub disabled: String,
    pub accuracy: f64,
    /// Ablated accuracy minus baseline accuracy.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationReport {
    pub baseline: EvalReport,
    pub rows: Vec<AblationRow>,
}

/// Baseline with all subscores enabled, then one row per subscore with that
/// subscore excluded from every ranking and the final mean.
pub fn run_ablation(
    store: &SpaceStore,
    questions: &[Question],
    beam: &BeamConfig,
) -> Result<AblationReport> {
    let baseline = run_evaluation(store, questions, beam, &AblationMask::all())?;
    let mut rows = Vec::with_capacity(SUBSCORE_COUNT);
    for (index, label) in SUBSCORE_LABELS.iter().enumerate() {
        let report = run_evaluation(store, questions, beam, &AblationMask::without(index))?;
        rows.push(AblationRow {
            disabled: label.to_string(),
            accuracy: report.accuracy,
            delta: report.accuracy - baseline.accuracy,
        });
    }
    Ok(AblationReport { baseline, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub beam: BeamConfig,
    pub accuracy: f64,
    pub timing: TimingStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

/// Evaluates the question set under each beam schedule, holding the
/// sentence-step parameters fixed.
pub fn run_sweep(
    store: &SpaceStore,
    questions: &[Question],
    base: &BeamConfig,
    mask: &AblationMask,
) -> Result<SweepReport> {
    let mut rows = Vec::with_capacity(SWEEP_SCHEDULES.len());
    for &(step1, step2, step3) in &SWEEP_SCHEDULES {
        let beam = BeamConfig {
            step1_keep: step1,
            step2_keep: step2,
            step3_keep: step3,
            ..*base
        };
        let report = run_evaluation(store, questions, &beam, mask)?;
        rows.push(SweepRow {
            beam,
            accuracy: report.accuracy,
            timing: report.timing,
        });
    }
    Ok(SweepReport { rows })
}

impl EvalReport {
    /// Plain-text rendering: a summary block and one line per question.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("questions  {}\n", self.question_count));
        out.push_str(&format!("accuracy   {:.4}\n", self.accuracy));
        out.push_str(&format!(
            "time/q     mean {:.4}s  p95 {:.4}s\n",
            self.timing.mean_seconds, self.timing.p95_seconds
        ));
        let disabled = self.mask.disabled_labels();
        if !disabled.is_empty() {
            out.push_str(&format!("disabled   {}\n", disabled.join(" ")));
        }
        out.push('\n');
        for (id, mark) in &self.marks {
            out.push_str(&format!("{id}\t{mark}\n"));
        }
        out
    }
}

impl AblationReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "baseline accuracy {:.4} over {} questions\n\n",
            self.baseline.accuracy, self.baseline.question_count
        ));
        out.push_str("disabled  accuracy    delta\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{:<8}  {:>8.4}  {:>+8.4}\n",
                row.disabled, row.accuracy, row.delta
            ));
        }
        out
    }
}

impl SweepReport {
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str("beam          accuracy  mean s/q   p95 s/q\n");
        for row in &self.rows {
            out.push_str(&format!(
                "({:>2},{:>2},{:>2})  {:>8.4}  {:>8.4}  {:>8.4}\n",
                row.beam.step1_keep,
                row.beam.step2_keep,
                row.beam.step3_keep,
                row.accuracy,
                row.timing.mean_seconds,
                row.timing.p95_seconds
            ));
        }
        out
    }
}
