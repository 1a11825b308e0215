use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use lexcohere::eval::{
    evaluate_questions, fisher_exact_2x2, load_questions, run_ablation, run_sweep, summarize,
    EvalReport,
};
use lexcohere::pdocs::{
    build_pseudo_documents, load_pseudo_documents, save_pseudo_documents, CorpusReader, TermBank,
};
use lexcohere::scorer::{answer_question, AblationMask, SUBSCORE_LABELS};
use lexcohere::space::SpaceStore;
use lexcohere::text::{Segmenter, Tokenizer};
use lexcohere::EngineConfig;

#[derive(Parser)]
#[command(
    name = "lexcohere",
    version,
    about = "Answer restricted-domain multiple-choice questions from term-bank vector spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Collect per-term pseudo-documents from corpus text
    BuildPdocs(BuildPdocsArgs),
    /// Build terminology, word, and sentence spaces from pseudo-documents
    BuildSpaces(BuildSpacesArgs),
    /// Score one question's choices and print the winner
    Answer(AnswerArgs),
    /// Score a JSONL question set and report accuracy and timing
    Evaluate(EvaluateArgs),
    /// Evaluate once per disabled subscore and report accuracy deltas
    Ablate(AblateArgs),
    /// Evaluate under each beam schedule
    Sweep(SweepArgs),
}

#[derive(Args)]
struct BuildPdocsArgs {
    /// Term bank: one term phrase per line
    #[arg(long, value_name = "FILE")]
    term_bank: PathBuf,
    /// Corpus text file; repeat for multiple files, read in order
    #[arg(long, value_name = "FILE", required = true)]
    corpus: Vec<PathBuf>,
    /// Output directory for pseudo-documents
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// TOML config file; defaults apply for unset keys
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Treat each input line as one sentence instead of segmenting
    #[arg(long)]
    pre_segmented: bool,
}

#[derive(Args)]
struct BuildSpacesArgs {
    /// Directory written by build-pdocs
    #[arg(long, value_name = "DIR")]
    pdocs: PathBuf,
    /// Output directory for the spaces
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// TOML config file, snapshotted into the output directory
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct AnswerArgs {
    /// Directory written by build-spaces
    #[arg(long, value_name = "DIR")]
    spaces: PathBuf,
    /// Question text
    #[arg(long)]
    question: String,
    /// Candidate answer; repeat at least twice
    #[arg(long = "choice", value_name = "TEXT", required = true)]
    choices: Vec<String>,
    /// Disable one subscore (label like 1.2); repeatable
    #[arg(long = "disable", value_name = "LABEL")]
    disabled: Vec<String>,
    /// Emit the full result as JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long, value_name = "DIR")]
    spaces: PathBuf,
    /// Questions as JSON lines: {id, question, choices, answer_key}
    #[arg(long, value_name = "FILE")]
    questions: PathBuf,
    /// Disable one subscore (label like 1.2); repeatable
    #[arg(long = "disable", value_name = "LABEL")]
    disabled: Vec<String>,
    /// Write per-question outcomes with breakdowns as JSON lines
    #[arg(long, value_name = "FILE")]
    breakdowns: Option<PathBuf>,
    /// Earlier evaluate --json report to test against with Fisher's exact
    /// test (a question counts as correct when its mark is positive)
    #[arg(long, value_name = "FILE")]
    compare: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct AblateArgs {
    #[arg(long, value_name = "DIR")]
    spaces: PathBuf,
    #[arg(long, value_name = "FILE")]
    questions: PathBuf,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long, value_name = "DIR")]
    spaces: PathBuf,
    #[arg(long, value_name = "FILE")]
    questions: PathBuf,
    /// Disable one subscore (label like 1.2); repeatable
    #[arg(long = "disable", value_name = "LABEL")]
    disabled: Vec<String>,
    #[arg(long)]
    json: bool,
}

fn main() -> Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    match Cli::parse().command {
        Command::BuildPdocs(args) => build_pdocs(args),
        Command::BuildSpaces(args) => build_spaces(args),
        Command::Answer(args) => answer(args),
        Command::Evaluate(args) => evaluate(args),
        Command::Ablate(args) => ablate(args),
        Command::Sweep(args) => sweep(args),
    }
}

fn load_config(path: &Option<PathBuf>) -> Result<EngineConfig> {
    match path {
        Some(path) => EngineConfig::from_toml_file(path)
            .with_context(|| format!("loading config {}", path.display())),
        None => Ok(EngineConfig::default()),
    }
}

fn parse_mask(disabled: &[String]) -> Result<AblationMask> {
    let mut enabled = [true; SUBSCORE_LABELS.len()];
    for label in disabled {
        let index = SUBSCORE_LABELS
            .iter()
            .position(|l| l == label)
            .with_context(|| {
                format!(
                    "unknown subscore label {label:?}; valid labels: {}",
                    SUBSCORE_LABELS.join(" ")
                )
            })?;
        enabled[index] = false;
    }
    Ok(AblationMask::new(enabled)?)
}

fn open_store(dir: &Path) -> Result<SpaceStore> {
    SpaceStore::open(dir).with_context(|| format!("opening spaces at {}", dir.display()))
}

fn build_pdocs(args: BuildPdocsArgs) -> Result<()> {
    let config = load_config(&args.config)?;
    let tokenizer = Tokenizer::bundled();
    let segmenter = if args.pre_segmented {
        Segmenter::passthrough()
    } else {
        Segmenter::bundled()
    };
    let bank = TermBank::load(&args.term_bank, &tokenizer)
        .with_context(|| format!("loading term bank {}", args.term_bank.display()))?;
    if bank.is_empty() {
        bail!("term bank {} has no terms", args.term_bank.display());
    }

    let reader = CorpusReader::new(&tokenizer, &segmenter, config.min_stopword_count);
    let (sentences, corpus_stats) = reader.read_files(&args.corpus)?;
    let (pdocs, stats) = build_pseudo_documents(sentences.into_iter().map(Ok), &bank, &config)?;
    save_pseudo_documents(&args.out, &pdocs, &stats)?;

    println!(
        "read {} sentences ({} skipped as non-English, {} invalid UTF-8 spans)",
        corpus_stats.sentences, corpus_stats.skipped_non_english, corpus_stats.invalid_utf8_spans
    );
    println!(
        "kept {} of {} terms ({} dropped below {} sentences, {} capped at {})",
        stats.kept_terms,
        bank.len(),
        stats.dropped.len(),
        config.min_sentences,
        stats.capped.len(),
        config.sentence_cap
    );
    println!("wrote pseudo-documents to {}", args.out.display());
    Ok(())
}

fn build_spaces(args: BuildSpacesArgs) -> Result<()> {
    let config = load_config(&args.config)?;
    let tokenizer = Tokenizer::bundled();
    let pdocs = load_pseudo_documents(&args.pdocs, &tokenizer)
        .with_context(|| format!("loading pseudo-documents from {}", args.pdocs.display()))?;
    if pdocs.is_empty() {
        bail!("no pseudo-documents in {}", args.pdocs.display());
    }
    let count = pdocs.len();
    let store = SpaceStore::build(pdocs, &config)?;
    store.save(&args.out)?;
    println!(
        "built spaces for {} terms ({} terminology features) at {}",
        count,
        store.terminology().feature_count(),
        args.out.display()
    );
    Ok(())
}

fn answer(args: AnswerArgs) -> Result<()> {
    let store = open_store(&args.spaces)?;
    let mask = parse_mask(&args.disabled)?;
    let beam = store.config().beam();
    let answer = answer_question(&args.question, &args.choices, &store, &beam, &mask)?;

    if args.json {
        println!("{}", serde_json::to_string_pretty(&answer)?);
        return Ok(());
    }

    for breakdown in &answer.breakdowns {
        let marker = if answer.argmax.contains(&breakdown.choice_index) {
            "*"
        } else {
            " "
        };
        let term = breakdown.term_phrase.as_deref().unwrap_or("-");
        println!(
            "{marker} choice {}  score {:.6}  term {}",
            breakdown.choice_index, breakdown.final_score, term
        );
        let cells: Vec<String> = SUBSCORE_LABELS
            .iter()
            .zip(breakdown.subscores)
            .map(|(label, score)| format!("{label}={score:.4}"))
            .collect();
        println!("    {}", cells.join(" "));
    }
    if answer.argmax.len() > 1 {
        println!(
            "tie between choices {:?}; a marked evaluation would credit 1/{}",
            answer.argmax,
            answer.argmax.len()
        );
    }
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<()> {
    let store = open_store(&args.spaces)?;
    let mask = parse_mask(&args.disabled)?;
    let beam = store.config().beam();
    let questions = load_questions(&args.questions)?;
    let outcomes = evaluate_questions(&store, &questions, &beam, &mask)?;
    let report = summarize(store.config(), &beam, &mask, &outcomes);

    if let Some(path) = &args.breakdowns {
        let mut lines = String::new();
        for outcome in &outcomes {
            lines.push_str(&serde_json::to_string(outcome)?);
            lines.push('\n');
        }
        fs::write(path, lines).with_context(|| format!("writing {}", path.display()))?;
    }

    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", report.render_text());
    }

    if let Some(path) = &args.compare {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let other: EvalReport = serde_json::from_str(&text)
            .with_context(|| format!("parsing report {}", path.display()))?;
        print_comparison(&report, &other);
    }
    Ok(())
}

/// 2x2 table: rows are the two systems, columns are correct/incorrect
/// counts, where a question is correct when its mark is positive.
fn print_comparison(ours: &EvalReport, other: &EvalReport) {
    let count_positive = |r: &EvalReport| r.marks.values().filter(|&&m| m > 0.0).count() as u64;
    let a = count_positive(ours);
    let b = ours.marks.len() as u64 - a;
    let c = count_positive(other);
    let d = other.marks.len() as u64 - c;
    let p = fisher_exact_2x2(a, b, c, d);
    println!();
    println!(
        "this run   {a} correct, {b} incorrect (accuracy {:.4})",
        ours.accuracy
    );
    println!(
        "comparison {c} correct, {d} incorrect (accuracy {:.4})",
        other.accuracy
    );
    println!("Fisher's exact two-tailed p = {p:.6}");
}

fn ablate(args: AblateArgs) -> Result<()> {
    let store = open_store(&args.spaces)?;
    let beam = store.config().beam();
    let questions = load_questions(&args.questions)?;
    let report = run_ablation(&store, &questions, &beam)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", report.render_text());
    }
    Ok(())
}

fn sweep(args: SweepArgs) -> Result<()> {
    let store = open_store(&args.spaces)?;
    let mask = parse_mask(&args.disabled)?;
    let beam = store.config().beam();
    let questions = load_questions(&args.questions)?;
    let report = run_sweep(&store, &questions, &beam, &mask)?;
    if args.json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print!("{}", report.render_text());
    }
    Ok(())
}
