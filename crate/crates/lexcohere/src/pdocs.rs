//! Term bank and pseudo-document assembly.
//!
//! The corpus is streamed once. Every sentence that contains a term phrase
//! lands in that term's pseudo-document (a sentence with several terms lands
//! in several). Terms with too few matches are dropped; matches beyond the
//! cap are discarded in corpus order.

use std::collections::{HashMap, HashSet};
use std::io::{BufWriter, Write as _};
use std::path::Path;

use crate::config::EngineConfig;
use crate::error::{Error, Result};
use crate::space::TermId;
use crate::text::{Segmenter, Sentence, Token, Tokenizer};

#[derive(Debug, Clone)]
pub struct TermEntry {
    pub id: TermId,
    /// Whitespace-normalized phrase as read from the bank.
    pub phrase: String,
    /// Lowercased surface words of the phrase.
    pub words: Vec<String>,
    /// Stems of the phrase words, for stemmed-match mode.
    pub stems: Vec<String>,
}

/// Flat list of domain term phrases with dense ids.
#[derive(Debug, Clone)]
pub struct TermBank {
    entries: Vec<TermEntry>,
}

impl TermBank {
    /// Builds a bank from phrases, dropping duplicates (first occurrence
    /// wins) and assigning ids in input order.
    pub fn from_phrases<I, S>(phrases: I, tokenizer: &Tokenizer) -> Result<TermBank>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for raw in phrases {
            let raw = raw.as_ref().trim();
            if raw.is_empty() {
                continue;
            }
            let tokens = tokenizer.tokenize(raw);
            if tokens.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "term phrase {raw:?} contains no tokens"
                )));
            }
            let words: Vec<String> = tokens.iter().map(|t| t.surface.to_lowercase()).collect();
            if !seen.insert(words.clone()) {
                log::warn!("duplicate term phrase {raw:?} dropped");
                continue;
            }
            let stems = tokens.iter().map(|t| t.stem.clone()).collect();
            let phrase = words.join(" ");
            entries.push(TermEntry {
                id: TermId(entries.len() as u32),
                phrase,
                words,
                stems,
            });
        }
        Ok(TermBank { entries })
    }

    /// One term phrase per line; blank lines skipped.
    pub fn load(path: &Path, tokenizer: &Tokenizer) -> Result<TermBank> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        TermBank::from_phrases(text.lines(), tokenizer)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[TermEntry] {
        &self.entries
    }

    pub fn get(&self, id: TermId) -> Option<&TermEntry> {
        self.entries.get(id.0 as usize)
    }
}

/// All sentences of the corpus that contain one term, in corpus order.
#[derive(Debug, Clone)]
pub struct PseudoDocument {
    pub term: TermId,
    pub phrase: String,
    pub sentences: Vec<Sentence>,
}

impl PseudoDocument {
    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }
}

fn token_matches(token: &Token, word: &str) -> bool {
    // `word` is already lowercase
    token.surface.len() == word.len() && token.surface.to_lowercase() == word
}

/// True iff the phrase occurs as a contiguous run of the sentence's
/// lowercased surface tokens. With `match_stems`, stems are compared instead
/// ("earthquakes" then matches "earthquake").
pub fn match_term(sentence: &Sentence, entry: &TermEntry, match_stems: bool) -> bool {
    let needle_len = entry.words.len();
    if needle_len == 0 || sentence.tokens.len() < needle_len {
        return false;
    }
    sentence.tokens.windows(needle_len).any(|window| {
        if match_stems {
            window.iter().zip(&entry.stems).all(|(t, s)| &t.stem == s)
        } else {
            window
                .iter()
                .zip(&entry.words)
                .all(|(t, w)| token_matches(t, w))
        }
    })
}

/// Per-term outcome counters from a pseudo-document build.
#[derive(Debug, Clone, Default)]
pub struct BuildStats {
    pub sentences_seen: u64,
    pub kept_terms: usize,
    /// (term, phrase, match count) for terms below the sentence minimum.
    pub dropped: Vec<(TermId, String, usize)>,
    /// Terms whose matches hit the cap (extra matches discarded).
    pub capped: Vec<TermId>,
}

/// Index from a phrase's first word to the bank entries starting with it.
struct PhraseIndex<'a> {
    by_first: HashMap<&'a str, Vec<&'a TermEntry>>,
    match_stems: bool,
}

impl<'a> PhraseIndex<'a> {
    fn new(bank: &'a TermBank, match_stems: bool) -> PhraseIndex<'a> {
        let mut by_first: HashMap<&str, Vec<&TermEntry>> = HashMap::new();
        for entry in bank.entries() {
            let key = if match_stems {
                entry.stems[0].as_str()
            } else {
                entry.words[0].as_str()
            };
            by_first.entry(key).or_default().push(entry);
        }
        PhraseIndex {
            by_first,
            match_stems,
        }
    }

    /// Distinct terms matching anywhere in the sentence.
    fn matches(&self, sentence: &Sentence, out: &mut Vec<&'a TermEntry>) {
        out.clear();
        let mut seen: HashSet<u32> = HashSet::new();
        for (pos, token) in sentence.tokens.iter().enumerate() {
            let key = if self.match_stems {
                token.stem.clone()
            } else {
                token.surface.to_lowercase()
            };
            let Some(candidates) = self.by_first.get(key.as_str()) else {
                continue;
            };
            for entry in candidates {
                let needle = if self.match_stems {
                    &entry.stems
                } else {
                    &entry.words
                };
                if pos + needle.len() > sentence.tokens.len() {
                    continue;
                }
                let window = &sentence.tokens[pos..pos + needle.len()];
                let hit = if self.match_stems {
                    window.iter().zip(needle).all(|(t, s)| &t.stem == s)
                } else {
                    window.iter().zip(needle).all(|(t, w)| token_matches(t, w))
                };
                if hit && seen.insert(entry.id.0) {
                    out.push(entry);
                }
            }
        }
    }
}

/// Stream sentences, route them into per-term buffers, and emit one
/// pseudo-document per term with at least `cfg.min_sentences` matches.
/// Results are ordered by term id.
pub fn build_pseudo_documents<I>(
    sentences: I,
    bank: &TermBank,
    cfg: &EngineConfig,
) -> Result<(Vec<PseudoDocument>, BuildStats)>
where
    I: IntoIterator<Item = Result<Sentence>>,
{
    let index = PhraseIndex::new(bank, cfg.match_stems);
    let mut buffers: Vec<Vec<Sentence>> = vec![Vec::new(); bank.len()];
    let mut capped: HashSet<u32> = HashSet::new();
    let mut stats = BuildStats::default();
    let mut hits = Vec::new();

    for sentence in sentences {
        let sentence = sentence?;
        stats.sentences_seen += 1;
        index.matches(&sentence, &mut hits);
        for entry in &hits {
            let buf = &mut buffers[entry.id.0 as usize];
            if buf.len() >= cfg.sentence_cap {
                capped.insert(entry.id.0);
                continue;
            }
            buf.push(sentence.clone());
        }
    }

    if stats.sentences_seen == 0 {
        log::warn!("empty corpus: every term dropped");
    }

    let mut pdocs = Vec::new();
    for (entry, buf) in bank.entries().iter().zip(buffers) {
        if buf.len() < cfg.min_sentences {
            log::warn!(
                "term {} {:?}: {} matching sentences (< {}), dropped",
                entry.id,
                entry.phrase,
                buf.len(),
                cfg.min_sentences
            );
            stats
                .dropped
                .push((entry.id, entry.phrase.clone(), buf.len()));
            continue;
        }
        pdocs.push(PseudoDocument {
            term: entry.id,
            phrase: entry.phrase.clone(),
            sentences: buf,
        });
    }
    stats.kept_terms = pdocs.len();
    stats.capped = {
        let mut v: Vec<TermId> = capped.into_iter().map(TermId).collect();
        v.sort_unstable();
        v
    };
    Ok((pdocs, stats))
}

/// Counters from corpus ingestion.
#[derive(Debug, Clone, Copy, Default)]
pub struct CorpusStats {
    pub sentences: u64,
    pub skipped_non_english: u64,
    pub invalid_utf8_spans: u64,
}

/// Reads corpus files into filtered, tokenized sentences.
///
/// A sentence passes the English filter when it has at least
/// `min_stopword_count` stopword tokens. Source ids number every segmented
/// sentence (including filtered ones) across all files in order.
pub struct CorpusReader<'a> {
    tokenizer: &'a Tokenizer,
    segmenter: &'a Segmenter,
    min_stopword_count: usize,
}

impl<'a> CorpusReader<'a> {
    pub fn new(
        tokenizer: &'a Tokenizer,
        segmenter: &'a Segmenter,
        min_stopword_count: usize,
    ) -> CorpusReader<'a> {
        CorpusReader {
            tokenizer,
            segmenter,
            min_stopword_count,
        }
    }

    /// Reads every file in order, returning all passing sentences.
    pub fn read_files<P: AsRef<Path>>(&self, paths: &[P]) -> Result<(Vec<Sentence>, CorpusStats)> {
        let mut out = Vec::new();
        let mut stats = CorpusStats::default();
        let mut next_id = 0u64;
        for path in paths {
            let path = path.as_ref();
            let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
            let mut stream = self.segmenter.split(file);
            for raw in stream.by_ref() {
                let raw = raw.map_err(|e| Error::io(path, e))?;
                let sentence = self.tokenizer.sentence(next_id, raw);
                next_id += 1;
                stats.sentences += 1;
                if self.is_english(&sentence) {
                    out.push(sentence);
                } else {
                    stats.skipped_non_english += 1;
                }
            }
            stats.invalid_utf8_spans += stream.invalid_utf8_spans();
        }
        Ok((out, stats))
    }

    pub fn is_english(&self, sentence: &Sentence) -> bool {
        sentence.tokens.iter().filter(|t| t.is_stop).count() >= self.min_stopword_count
    }
}

// ---- persistence ----

const PDOC_MANIFEST: &str = "manifest.tsv";
const PDOC_DROPPED: &str = "dropped.tsv";

fn pdoc_file(term: TermId) -> String {
    format!("term_{}.txt", term.0)
}

/// Writes `term_<id>.txt` (one sentence per line) per pseudo-document plus a
/// manifest of `term_id <TAB> sentence_count <TAB> phrase` rows. Dropped
/// terms go to a separate file with their match counts.
pub fn save_pseudo_documents(
    dir: &Path,
    pdocs: &[PseudoDocument],
    stats: &BuildStats,
) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let manifest_path = dir.join(PDOC_MANIFEST);
    let mut manifest = BufWriter::new(
        std::fs::File::create(&manifest_path).map_err(|e| Error::io(&manifest_path, e))?,
    );
    for pdoc in pdocs {
        writeln!(manifest, "{}\t{}\t{}", pdoc.term, pdoc.len(), pdoc.phrase)
            .map_err(|e| Error::io(&manifest_path, e))?;
        let path = dir.join(pdoc_file(pdoc.term));
        let mut file =
            BufWriter::new(std::fs::File::create(&path).map_err(|e| Error::io(&path, e))?);
        for sentence in &pdoc.sentences {
            debug_assert!(!sentence.text.contains('\n'));
            writeln!(file, "{}", sentence.text).map_err(|e| Error::io(&path, e))?;
        }
        file.flush().map_err(|e| Error::io(&path, e))?;
    }
    manifest.flush().map_err(|e| Error::io(&manifest_path, e))?;

    let dropped_path = dir.join(PDOC_DROPPED);
    let mut dropped = BufWriter::new(
        std::fs::File::create(&dropped_path).map_err(|e| Error::io(&dropped_path, e))?,
    );
    for (id, phrase, count) in &stats.dropped {
        writeln!(dropped, "{id}\t{count}\t{phrase}").map_err(|e| Error::io(&dropped_path, e))?;
    }
    dropped.flush().map_err(|e| Error::io(&dropped_path, e))?;
    Ok(())
}

/// Manifest rows as (term, sentence_count, phrase), ordered by term id.
pub fn read_pdoc_manifest(dir: &Path) -> Result<Vec<(TermId, usize, String)>> {
    let path = dir.join(PDOC_MANIFEST);
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut parts = line.splitn(3, '\t');
        let missing = || Error::parse(&path, lineno + 1, "expected term_id<TAB>count<TAB>phrase");
        let id: u32 = parts
            .next()
            .ok_or_else(missing)?
            .parse()
            .map_err(|e| Error::parse(&path, lineno + 1, format!("bad term id: {e}")))?;
        let count: usize = parts
            .next()
            .ok_or_else(missing)?
            .parse()
            .map_err(|e| Error::parse(&path, lineno + 1, format!("bad count: {e}")))?;
        let phrase = parts.next().ok_or_else(missing)?.to_string();
        rows.push((TermId(id), count, phrase));
    }
    rows.sort_by_key(|r| r.0);
    Ok(rows)
}

/// Loads one persisted pseudo-document, re-tokenizing its sentences.
/// Source ids are line numbers within the file.
pub fn load_pseudo_document(
    dir: &Path,
    term: TermId,
    phrase: String,
    expected_len: Option<usize>,
    tokenizer: &Tokenizer,
) -> Result<PseudoDocument> {
    let path = dir.join(pdoc_file(term));
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let sentences: Vec<Sentence> = text
        .lines()
        .enumerate()
        .filter(|(_, line)| !line.is_empty())
        .map(|(i, line)| tokenizer.sentence(i as u64, line))
        .collect();
    if let Some(expected) = expected_len {
        if sentences.len() != expected {
            return Err(Error::parse(
                &path,
                0,
                format!(
                    "manifest says {expected} sentences, file has {}",
                    sentences.len()
                ),
            ));
        }
    }
    Ok(PseudoDocument {
        term,
        phrase,
        sentences,
    })
}

/// Loads every pseudo-document listed in the manifest.
pub fn load_pseudo_documents(dir: &Path, tokenizer: &Tokenizer) -> Result<Vec<PseudoDocument>> {
    read_pdoc_manifest(dir)?
        .into_iter()
        .map(|(term, count, phrase)| {
            load_pseudo_document(dir, term, phrase, Some(count), tokenizer)
        })
        .collect()
}

/// Convenience for tests and small corpora: segment, tokenize, filter, and
/// build pseudo-documents from in-memory text.
pub fn build_from_text(
    corpus: &str,
    bank: &TermBank,
    tokenizer: &Tokenizer,
    segmenter: &Segmenter,
    cfg: &EngineConfig,
) -> Result<(Vec<PseudoDocument>, BuildStats)> {
    let reader = CorpusReader::new(tokenizer, segmenter, cfg.min_stopword_count);
    let mut next_id = 0u64;
    let sentences: Vec<Result<Sentence>> = segmenter
        .split_str(corpus)
        .into_iter()
        .map(|raw| {
            let s = tokenizer.sentence(next_id, raw);
            next_id += 1;
            s
        })
        .filter(|s| reader.is_english(s))
        .map(Ok)
        .collect();
    build_pseudo_documents(sentences, bank, cfg)
}
