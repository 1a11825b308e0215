//! Multiple-choice question answering over term-modulated sparse vector
//! spaces.
//!
//! The engine ingests a flat term bank and a plain-text corpus, collects a
//! pseudo-document of corpus sentences per term, and derives three sparse
//! spaces from them: one terminology matrix over unigram and conjunction
//! features, a per-term word space of context n-grams, and a per-term binary
//! sentence space. A question paired with a candidate answer is scored by
//! eight overlap subscores against those spaces, narrowing the term
//! candidates in stages, and the choice with the best final score wins.
//!
//! Everything is deterministic: ordered maps throughout, fixed accumulation
//! orders, and persisted spaces that reload bit-exactly.

pub mod config;
pub mod error;
pub mod eval;
pub mod pdocs;
pub mod scorer;
pub mod space;
pub mod text;

pub use config::EngineConfig;
pub use error::{Error, Result};
pub use eval::{load_questions, run_ablation, run_evaluation, run_sweep, EvalReport, Question};
pub use pdocs::{build_pseudo_documents, CorpusReader, PseudoDocument, TermBank};
pub use scorer::{answer_question, AblationMask, Answer, BeamConfig, ScoreBreakdown};
pub use space::{SpaceStore, TermId};
pub use text::Tokenizer;
