//! Sentence segmentation over byte streams.
//!
//! Rule mode splits after `.`, `?`, or `!` when the terminator is followed by
//! whitespace and an uppercase letter or an opening quote, with an
//! abbreviation list (and single-letter initials) suppressing false splits at
//! periods. Passthrough mode treats every non-empty input line as one
//! sentence, for corpora that are already segmented.
//!
//! Bytes that do not decode as UTF-8 are skipped and counted, never fatal.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use super::parse_word_list;
use crate::error::{Error, Result};

fn is_terminator(c: char) -> bool {
    matches!(c, '.' | '?' | '!')
}

fn is_closing(c: char) -> bool {
    matches!(c, '"' | '\'' | '\u{201d}' | '\u{2019}' | ')' | ']')
}

fn is_opening_quote(c: char) -> bool {
    matches!(c, '"' | '\'' | '\u{201c}' | '\u{2018}')
}

/// Pending text larger than this without a boundary is flushed as one
/// sentence, so a terminator-free stream cannot grow the buffer unboundedly.
const MAX_PENDING_CHARS: usize = 1 << 20;

const READ_CHUNK: usize = 8192;

#[derive(Debug, Clone)]
pub struct Segmenter {
    abbreviations: HashSet<String>,
    passthrough: bool,
}

impl Segmenter {
    /// Rule-based segmenter with the bundled abbreviation list.
    pub fn bundled() -> Segmenter {
        let list = include_str!("../../data/abbreviations.txt");
        Segmenter::with_abbreviations(parse_word_list(list))
    }

    /// One sentence per input line; no terminator rules apply.
    pub fn passthrough() -> Segmenter {
        Segmenter {
            abbreviations: HashSet::new(),
            passthrough: true,
        }
    }

    pub fn with_abbreviations<I, S>(abbreviations: I) -> Segmenter
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Segmenter {
            abbreviations: abbreviations
                .into_iter()
                .map(|w| w.into().to_lowercase())
                .collect(),
            passthrough: false,
        }
    }

    /// Loads one abbreviation per line; `#` lines and blanks are ignored.
    pub fn from_abbreviation_file(path: &Path) -> Result<Segmenter> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Segmenter::with_abbreviations(parse_word_list(&text)))
    }

    pub fn is_passthrough(&self) -> bool {
        self.passthrough
    }

    /// Stream sentences out of `reader`. Sentences come back
    /// whitespace-normalized and trimmed; empty ones are dropped.
    pub fn split<R: Read>(&self, reader: R) -> SentenceStream<'_, R> {
        SentenceStream {
            seg: self,
            reader,
            buf: Vec::new(),
            scan: 0,
            carry: Vec::new(),
            eof: false,
            finished: false,
            invalid_spans: 0,
        }
    }

    /// Convenience for in-memory text.
    pub fn split_str(&self, text: &str) -> Vec<String> {
        self.split(text.as_bytes())
            .map(|r| r.expect("reading from a string slice cannot fail"))
            .collect()
    }

    /// Word immediately before the period at `buf[dot]`, with internal
    /// periods kept ("e.g" for "e.g."), lowercased.
    fn preceding_word(buf: &[char], dot: usize) -> String {
        let mut start = dot;
        while start > 0 {
            let c = buf[start - 1];
            if c.is_alphanumeric() || c == '.' {
                start -= 1;
            } else {
                break;
            }
            if dot - start > 40 {
                break;
            }
        }
        buf[start..dot]
            .iter()
            .flat_map(|c| c.to_lowercase())
            .collect()
    }

    fn suppresses_split(&self, buf: &[char], dot: usize) -> bool {
        let word = Segmenter::preceding_word(buf, dot);
        let bare: String = word.chars().filter(|&c| c != '.').collect();
        if bare.is_empty() {
            return false;
        }
        // single-letter initials ("J. Smith") and dotted forms ("e.g.")
        if bare.chars().count() == 1 && bare.chars().all(|c| c.is_alphabetic()) {
            return true;
        }
        self.abbreviations.contains(&word) || self.abbreviations.contains(&bare)
    }
}

enum Scan {
    /// Sentence is `buf[..end]`; drop everything before `resume`.
    Boundary { end: usize, resume: usize },
    /// No boundary decidable yet; restart scanning at `scan` once more
    /// input arrives.
    NeedMore { scan: usize },
}

/// Iterator over segmented sentences; see [`Segmenter::split`].
pub struct SentenceStream<'a, R: Read> {
    seg: &'a Segmenter,
    reader: R,
    buf: Vec<char>,
    scan: usize,
    carry: Vec<u8>,
    eof: bool,
    finished: bool,
    invalid_spans: u64,
}

impl<R: Read> SentenceStream<'_, R> {
    /// Invalid UTF-8 sequences skipped so far (one per rejected unit).
    pub fn invalid_utf8_spans(&self) -> u64 {
        self.invalid_spans
    }

    fn fill(&mut self) -> std::io::Result<()> {
        let mut chunk = [0u8; READ_CHUNK];
        let n = self.reader.read(&mut chunk)?;
        if n == 0 {
            self.eof = true;
            if !self.carry.is_empty() {
                // dangling partial code point at end of stream
                self.invalid_spans += 1;
                self.carry.clear();
            }
            return Ok(());
        }
        self.carry.extend_from_slice(&chunk[..n]);
        let input = std::mem::take(&mut self.carry);
        let mut pos = 0;
        while pos < input.len() {
            match std::str::from_utf8(&input[pos..]) {
                Ok(s) => {
                    self.buf.extend(s.chars());
                    pos = input.len();
                }
                Err(e) => {
                    let valid = e.valid_up_to();
                    let s = std::str::from_utf8(&input[pos..pos + valid]).unwrap();
                    self.buf.extend(s.chars());
                    pos += valid;
                    match e.error_len() {
                        Some(bad) => {
                            self.invalid_spans += 1;
                            pos += bad;
                        }
                        None => {
                            // incomplete code point; wait for the next chunk
                            self.carry = input[pos..].to_vec();
                            break;
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn find_boundary(&self) -> Scan {
        if self.seg.passthrough {
            for i in self.scan..self.buf.len() {
                if self.buf[i] == '\n' {
                    return Scan::Boundary {
                        end: i,
                        resume: i + 1,
                    };
                }
            }
            return Scan::NeedMore {
                scan: self.buf.len(),
            };
        }

        let buf = &self.buf;
        let n = buf.len();
        let mut i = self.scan;
        while i < n {
            if !is_terminator(buf[i]) {
                i += 1;
                continue;
            }
            let mut j = i + 1;
            while j < n && is_terminator(buf[j]) {
                j += 1;
            }
            if j == n {
                // the terminator run may continue in the next chunk
                return Scan::NeedMore { scan: i };
            }
            let run = j - i;
            let mut k = j;
            if is_closing(buf[k]) {
                k += 1;
                if k == n {
                    return Scan::NeedMore { scan: i };
                }
            }
            let mut w = k;
            while w < n && buf[w].is_whitespace() {
                w += 1;
            }
            if w == k {
                // no whitespace after the terminator: "3.5", "e.g.test"
                i = j;
                continue;
            }
            if w == n {
                return Scan::NeedMore { scan: i };
            }
            let next = buf[w];
            if !(next.is_uppercase() || is_opening_quote(next)) {
                i = j;
                continue;
            }
            if run == 1 && buf[i] == '.' && self.seg.suppresses_split(buf, i) {
                i = j;
                continue;
            }
            return Scan::Boundary { end: k, resume: w };
        }
        Scan::NeedMore { scan: n }
    }

    /// Extract the next complete sentence from the buffer, if any.
    fn try_extract(&mut self) -> Option<String> {
        loop {
            match self.find_boundary() {
                Scan::Boundary { end, resume } => {
                    let sentence = normalize(&self.buf[..end]);
                    self.buf.drain(..resume);
                    self.scan = 0;
                    if !sentence.is_empty() {
                        return Some(sentence);
                    }
                }
                Scan::NeedMore { scan } => {
                    self.scan = scan;
                    return None;
                }
            }
        }
    }

    fn flush(&mut self) -> Option<String> {
        if self.buf.is_empty() {
            return None;
        }
        let sentence = normalize(&self.buf);
        self.buf.clear();
        self.scan = 0;
        if sentence.is_empty() {
            None
        } else {
            Some(sentence)
        }
    }
}

impl<R: Read> Iterator for SentenceStream<'_, R> {
    type Item = std::io::Result<String>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.finished {
            return None;
        }
        loop {
            if let Some(s) = self.try_extract() {
                return Some(Ok(s));
            }
            if self.buf.len() > MAX_PENDING_CHARS {
                if let Some(s) = self.flush() {
                    return Some(Ok(s));
                }
            }
            if self.eof {
                match self.flush() {
                    Some(s) => return Some(Ok(s)),
                    None => {
                        self.finished = true;
                        return None;
                    }
                }
            }
            if let Err(e) = self.fill() {
                self.finished = true;
                return Some(Err(e));
            }
        }
    }
}

fn normalize(chars: &[char]) -> String {
    let text: String = chars.iter().collect();
    let mut out = String::with_capacity(text.len());
    for part in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(part);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split(text: &str) -> Vec<String> {
        Segmenter::bundled().split_str(text)
    }

    #[test]
    fn splits_on_terminator_whitespace_uppercase() {
        assert_eq!(
            split("It rains. Plants grow."),
            ["It rains.", "Plants grow."]
        );
        assert_eq!(split("Why? Because. So!"), ["Why?", "Because.", "So!"]);
    }

    #[test]
    fn abbreviation_does_not_split() {
        assert_eq!(split("Dr. Smith left."), ["Dr. Smith left."]);
        assert_eq!(
            split("See Fig. 3 for details. The curve rises."),
            ["See Fig. 3 for details.", "The curve rises."]
        );
        assert_eq!(split("E.g. Basalt is dark."), ["E.g. Basalt is dark."]);
    }

    #[test]
    fn initials_do_not_split() {
        assert_eq!(split("J. Smith agreed."), ["J. Smith agreed."]);
    }

    #[test]
    fn lowercase_continuation_does_not_split() {
        assert_eq!(split("It rains. and pours."), ["It rains. and pours."]);
        assert_eq!(split("pH 3.5 is acidic."), ["pH 3.5 is acidic."]);
    }

    #[test]
    fn quote_can_open_a_sentence() {
        assert_eq!(
            split("He stopped. \"Run,\" she said."),
            ["He stopped.", "\"Run,\" she said."]
        );
    }

    #[test]
    fn closing_quote_stays_with_sentence() {
        assert_eq!(
            split("She said \"stop.\" He ran."),
            ["She said \"stop.\"", "He ran."]
        );
    }

    #[test]
    fn terminator_runs_split_once() {
        assert_eq!(split("Really?! Yes."), ["Really?!", "Yes."]);
        assert_eq!(split("Wait... Now go."), ["Wait...", "Now go."]);
    }

    #[test]
    fn internal_newlines_normalize_to_spaces() {
        assert_eq!(
            split("A wrapped\nsentence here. Another one."),
            ["A wrapped sentence here.", "Another one."]
        );
    }

    #[test]
    fn trailing_text_without_terminator_flushes() {
        assert_eq!(
            split("First one. trailing tail"),
            ["First one. trailing tail"]
        );
        assert_eq!(split("no terminator at all"), ["no terminator at all"]);
        assert_eq!(split(""), Vec::<String>::new());
        assert_eq!(split("   \n\t "), Vec::<String>::new());
    }

    #[test]
    fn passthrough_takes_lines_verbatim() {
        let seg = Segmenter::passthrough();
        let got = seg.split_str("line one. still line one\n\n  line two  \r\nline three");
        assert_eq!(got, ["line one. still line one", "line two", "line three"]);
    }

    #[test]
    fn invalid_utf8_is_skipped_and_counted() {
        let seg = Segmenter::bundled();
        let bytes = b"It rains.\xFF\xFE Plants grow.".to_vec();
        let mut stream = seg.split(&bytes[..]);
        let sentences: Vec<String> = stream.by_ref().map(|r| r.unwrap()).collect();
        assert_eq!(sentences, ["It rains.", "Plants grow."]);
        assert_eq!(stream.invalid_utf8_spans(), 2);
    }

    #[test]
    fn multibyte_chars_across_chunk_boundaries_survive() {
        // force the 4-byte emoji to straddle the read chunk boundary
        let mut text = String::new();
        while text.len() < READ_CHUNK - 2 {
            text.push('a');
        }
        text.push('\u{1F30B}');
        text.push_str(" done. Next One.");
        let seg = Segmenter::bundled();
        let mut stream = seg.split(text.as_bytes());
        let sentences: Vec<String> = stream.by_ref().map(|r| r.unwrap()).collect();
        assert_eq!(sentences.len(), 2, "{sentences:?}");
        assert!(sentences[0].contains('\u{1F30B}'));
        assert_eq!(stream.invalid_utf8_spans(), 0);
    }

    #[test]
    fn truncated_final_code_point_counts_once() {
        let seg = Segmenter::passthrough();
        let mut bytes = "ok line".as_bytes().to_vec();
        bytes.push(0xE2); // first byte of a 3-byte sequence
        let mut stream = seg.split(&bytes[..]);
        let sentences: Vec<String> = stream.by_ref().map(|r| r.unwrap()).collect();
        assert_eq!(sentences, ["ok line"]);
        assert_eq!(stream.invalid_utf8_spans(), 1);
    }
}
