//! One handle over the three spaces of a built engine.
//!
//! A store is either fully in memory (fresh build) or backed by a directory
//! (reopened later). The terminology space always stays resident; word and
//! sentence spaces are fetched per term, with a small FIFO cache in disk
//! mode since scoring only ever touches the few beam survivors.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::EngineConfig;
use crate::error::{Error, Result};
use crate::pdocs::{self, PseudoDocument};
use crate::space::persist;
use crate::space::sentence::{build_sentence_space, SentenceSpace};
use crate::space::terminology::{build_terminology_space, TerminologySpace};
use crate::space::word::{build_word_space, WordSpace};
use crate::space::TermId;
use crate::text::Tokenizer;

const MANIFEST: &str = "manifest.json";
const PDOCS_DIR: &str = "pdocs";
const TERMINOLOGY_DIR: &str = "terminology";
const WORDS_DIR: &str = "words";
const SENTENCE_MANIFEST: &str = "sentence_manifest.tsv";
const CACHE_CAP: usize = 16;

#[derive(Serialize, Deserialize)]
struct StoreManifest {
    format_version: u32,
    config: EngineConfig,
    term_count: usize,
}

struct FifoCache<T> {
    map: HashMap<TermId, Arc<T>>,
    order: VecDeque<TermId>,
}

impl<T> FifoCache<T> {
    fn new() -> Self {
        FifoCache {
            map: HashMap::new(),
            order: VecDeque::new(),
        }
    }

    fn get(&self, term: TermId) -> Option<Arc<T>> {
        self.map.get(&term).cloned()
    }

    fn insert(&mut self, term: TermId, value: Arc<T>) {
        if self.map.insert(term, value).is_none() {
            self.order.push_back(term);
            if self.order.len() > CACHE_CAP {
                if let Some(evicted) = self.order.pop_front() {
                    self.map.remove(&evicted);
                }
            }
        }
    }
}

enum Backing {
    Memory {
        pdocs: BTreeMap<TermId, PseudoDocument>,
        words: BTreeMap<TermId, Arc<WordSpace>>,
        sentences: BTreeMap<TermId, Arc<SentenceSpace>>,
    },
    Disk {
        dir: PathBuf,
        /// term → (sentence count, phrase), from the pseudo-document manifest
        pdoc_meta: BTreeMap<TermId, (usize, String)>,
        /// term → (row count, feature count)
        sentence_meta: BTreeMap<TermId, (usize, usize)>,
        word_cache: Mutex<FifoCache<WordSpace>>,
        sentence_cache: Mutex<FifoCache<SentenceSpace>>,
    },
}

pub struct SpaceStore {
    config: EngineConfig,
    tokenizer: Tokenizer,
    terminology: TerminologySpace,
    backing: Backing,
}

impl SpaceStore {
    /// Builds all three space types from pseudo-documents, in memory.
    pub fn build(pdocs: Vec<PseudoDocument>, config: &EngineConfig) -> Result<SpaceStore> {
        config.validate()?;
        let terminology = build_terminology_space(&pdocs, config.min_support, config.conj_window)?;
        let words: BTreeMap<TermId, Arc<WordSpace>> = pdocs
            .par_iter()
            .map(|p| {
                (
                    p.term,
                    Arc::new(build_word_space(
                        p,
                        config.context_window,
                        config.min_occurrences,
                    )),
                )
            })
            .collect::<Vec<_>>()
            .into_iter()
            .collect();
        let sentences: BTreeMap<TermId, Arc<SentenceSpace>> = pdocs
            .par_iter()
            .map(|p| (p.term, Arc::new(build_sentence_space(p))))
            .collect::<Vec<_>>()
            .into_iter()
            .collect();
        let pdocs: BTreeMap<TermId, PseudoDocument> =
            pdocs.into_iter().map(|p| (p.term, p)).collect();
        Ok(SpaceStore {
            config: config.clone(),
            tokenizer: Tokenizer::bundled(),
            terminology,
            backing: Backing::Memory {
                pdocs,
                words,
                sentences,
            },
        })
    }

    /// Writes the store to a self-contained directory: top manifest with the
    /// config snapshot, pseudo-document text, the terminology space, one
    /// word-space directory per term, and the sentence-space count manifest.
    pub fn save(&self, dir: &Path) -> Result<()> {
        let Backing::Memory {
            pdocs,
            words,
            sentences,
        } = &self.backing
        else {
            return Err(Error::InvalidInput(
                "store is already disk-backed; copy the directory instead".into(),
            ));
        };
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        persist::write_json(
            &dir.join(MANIFEST),
            &StoreManifest {
                format_version: persist::FORMAT_VERSION,
                config: self.config.clone(),
                term_count: self.terminology.len(),
            },
        )?;

        let pdoc_list: Vec<PseudoDocument> = pdocs.values().cloned().collect();
        pdocs::save_pseudo_documents(&dir.join(PDOCS_DIR), &pdoc_list, &Default::default())?;

        self.terminology.save(&dir.join(TERMINOLOGY_DIR))?;
        for (term, word) in words {
            word.save(&dir.join(WORDS_DIR).join(format!("term_{}", term.0)))?;
        }

        let manifest_path = dir.join(PDOCS_DIR).join(SENTENCE_MANIFEST);
        let mut file = persist::create(&manifest_path)?;
        for (term, space) in sentences {
            writeln!(file, "{term}\t{}\t{}", space.len(), space.feature_count())
                .map_err(|e| Error::io(&manifest_path, e))?;
        }
        file.flush().map_err(|e| Error::io(&manifest_path, e))?;
        Ok(())
    }

    /// Opens a saved store. The terminology space loads eagerly (with its
    /// consistency checks); word and sentence spaces load on demand.
    pub fn open(dir: &Path) -> Result<SpaceStore> {
        let manifest_path = dir.join(MANIFEST);
        let manifest: StoreManifest = persist::read_json(&manifest_path)?;
        persist::check_version(&manifest_path, manifest.format_version)?;
        manifest.config.validate()?;

        let terminology = TerminologySpace::load(&dir.join(TERMINOLOGY_DIR))?;
        if terminology.len() != manifest.term_count {
            return Err(Error::parse(
                &manifest_path,
                0,
                format!(
                    "manifest says {} terms, terminology space has {}",
                    manifest.term_count,
                    terminology.len()
                ),
            ));
        }

        let pdoc_meta: BTreeMap<TermId, (usize, String)> =
            pdocs::read_pdoc_manifest(&dir.join(PDOCS_DIR))?
                .into_iter()
                .map(|(term, count, phrase)| (term, (count, phrase)))
                .collect();
        let sentence_meta = read_sentence_manifest(&dir.join(PDOCS_DIR).join(SENTENCE_MANIFEST))?;
        for term in terminology.term_ids() {
            if !pdoc_meta.contains_key(&term) {
                return Err(Error::parse(
                    &manifest_path,
                    0,
                    format!("term {term} has no pseudo-document entry"),
                ));
            }
            if !sentence_meta.contains_key(&term) {
                return Err(Error::parse(
                    &manifest_path,
                    0,
                    format!("term {term} has no sentence-space entry"),
                ));
            }
        }

        Ok(SpaceStore {
            config: manifest.config,
            tokenizer: Tokenizer::bundled(),
            terminology,
            backing: Backing::Disk {
                dir: dir.to_path_buf(),
                pdoc_meta,
                sentence_meta,
                word_cache: Mutex::new(FifoCache::new()),
                sentence_cache: Mutex::new(FifoCache::new()),
            },
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn tokenizer(&self) -> &Tokenizer {
        &self.tokenizer
    }

    pub fn terminology(&self) -> &TerminologySpace {
        &self.terminology
    }

    pub fn len(&self) -> usize {
        self.terminology.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terminology.is_empty()
    }

    pub fn term_ids(&self) -> impl Iterator<Item = TermId> + '_ {
        self.terminology.term_ids()
    }

    pub fn phrase(&self, term: TermId) -> Option<&str> {
        self.terminology.phrase(term)
    }

    pub fn word(&self, term: TermId) -> Result<Arc<WordSpace>> {
        match &self.backing {
            Backing::Memory { words, .. } => {
                words.get(&term).cloned().ok_or(Error::UnknownTerm(term.0))
            }
            Backing::Disk {
                dir, word_cache, ..
            } => {
                if let Some(hit) = word_cache.lock().expect("cache lock").get(term) {
                    return Ok(hit);
                }
                if !self.terminology.contains_term(term) {
                    return Err(Error::UnknownTerm(term.0));
                }
                let path = dir.join(WORDS_DIR).join(format!("term_{}", term.0));
                let space = WordSpace::load(&path)?;
                if space.term() != term {
                    return Err(Error::parse(
                        &path,
                        0,
                        format!(
                            "directory is term {} but manifest says {term}",
                            space.term()
                        ),
                    ));
                }
                let space = Arc::new(space);
                word_cache
                    .lock()
                    .expect("cache lock")
                    .insert(term, space.clone());
                Ok(space)
            }
        }
    }

    pub fn sentence(&self, term: TermId) -> Result<Arc<SentenceSpace>> {
        match &self.backing {
            Backing::Memory { sentences, .. } => sentences
                .get(&term)
                .cloned()
                .ok_or(Error::UnknownTerm(term.0)),
            Backing::Disk {
                dir,
                pdoc_meta,
                sentence_meta,
                sentence_cache,
                ..
            } => {
                if let Some(hit) = sentence_cache.lock().expect("cache lock").get(term) {
                    return Ok(hit);
                }
                let (count, phrase) = pdoc_meta.get(&term).ok_or(Error::UnknownTerm(term.0))?;
                let (rows, features) =
                    sentence_meta.get(&term).ok_or(Error::UnknownTerm(term.0))?;
                let pdoc = pdocs::load_pseudo_document(
                    &dir.join(PDOCS_DIR),
                    term,
                    phrase.clone(),
                    Some(*count),
                    &self.tokenizer,
                )?;
                let space = build_sentence_space(&pdoc);
                if space.len() != *rows || space.feature_count() != *features {
                    return Err(Error::parse(
                        dir.join(PDOCS_DIR).join(SENTENCE_MANIFEST),
                        0,
                        format!(
                            "term {term}: rebuilt space is {}x{}, manifest says {rows}x{features}",
                            space.len(),
                            space.feature_count()
                        ),
                    ));
                }
                let space = Arc::new(space);
                sentence_cache
                    .lock()
                    .expect("cache lock")
                    .insert(term, space.clone());
                Ok(space)
            }
        }
    }
}

fn read_sentence_manifest(path: &Path) -> Result<BTreeMap<TermId, (usize, usize)>> {
    let text = persist::read_to_string(path)?;
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split('\t').collect();
        let &[term, rows, features] = parts.as_slice() else {
            return Err(Error::parse(
                path,
                lineno + 1,
                "expected term<TAB>rows<TAB>features",
            ));
        };
        let parse_num = |s: &str, what: &str| -> Result<usize> {
            s.parse()
                .map_err(|e| Error::parse(path, lineno + 1, format!("bad {what}: {e}")))
        };
        let term = TermId(parse_num(term, "term id")? as u32);
        let value = (
            parse_num(rows, "row count")?,
            parse_num(features, "feature count")?,
        );
        if out.insert(term, value).is_some() {
            return Err(Error::parse(path, lineno + 1, "duplicate term"));
        }
    }
    Ok(out)
}
