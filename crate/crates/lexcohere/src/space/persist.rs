//! Shared on-disk helpers for the space stores.
//!
//! Formats are versioned through a `format_version` field in each manifest
//! (JSON) or a magic string (binary postings). Floats are written in Rust's
//! shortest round-trip notation, so a load reproduces bit-identical values.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::text::FeatureId;

pub(crate) const FORMAT_VERSION: u32 = 1;

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    Ok(BufWriter::new(
        File::create(path).map_err(|e| Error::io(path, e))?,
    ))
}

pub(crate) fn read_to_string(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut file = create(path)?;
    serde_json::to_writer_pretty(&mut file, value)?;
    file.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    file.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub(crate) fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = read_to_string(path)?;
    serde_json::from_str(&text)
        .map_err(|e| Error::parse(path, e.line(), format!("invalid manifest: {e}")))
}

pub(crate) fn check_version(path: &Path, found: u32) -> Result<()> {
    if found != FORMAT_VERSION {
        return Err(Error::parse(
            path,
            0,
            format!("format version {found} unsupported (expected {FORMAT_VERSION})"),
        ));
    }
    Ok(())
}

/// Writes `feature<TAB>count` rows in map order.
pub(crate) fn write_count_tsv(path: &Path, counts: &BTreeMap<FeatureId, u32>) -> Result<()> {
    let mut file = create(path)?;
    for (feature, count) in counts {
        writeln!(file, "{}\t{}", feature.encode(), count).map_err(|e| Error::io(path, e))?;
    }
    file.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

pub(crate) fn read_count_tsv(path: &Path) -> Result<BTreeMap<FeatureId, u32>> {
    let text = read_to_string(path)?;
    let mut out = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (key, count) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(path, lineno + 1, "expected feature<TAB>count"))?;
        let feature =
            FeatureId::decode(key).map_err(|e| Error::parse(path, lineno + 1, e.to_string()))?;
        let count: u32 = count
            .parse()
            .map_err(|e| Error::parse(path, lineno + 1, format!("bad count: {e}")))?;
        if out.insert(feature, count).is_some() {
            return Err(Error::parse(path, lineno + 1, "duplicate feature key"));
        }
    }
    Ok(out)
}

const POSTINGS_MAGIC: &[u8; 8] = b"LXPOST01";

/// Posting lists as a length-prefixed binary file:
/// magic, u64 feature count, then per feature a u32-length-prefixed UTF-8
/// feature key and a u64-length-prefixed array of u32 ids. Little-endian.
pub(crate) fn write_postings(path: &Path, postings: &BTreeMap<FeatureId, Vec<u32>>) -> Result<()> {
    let mut file = create(path)?;
    let io = |e| Error::io(path, e);
    file.write_all(POSTINGS_MAGIC).map_err(io)?;
    file.write_all(&(postings.len() as u64).to_le_bytes())
        .map_err(io)?;
    for (feature, ids) in postings {
        debug_assert!(ids.windows(2).all(|w| w[0] < w[1]), "postings sorted");
        let key = feature.encode();
        file.write_all(&(key.len() as u32).to_le_bytes())
            .map_err(io)?;
        file.write_all(key.as_bytes()).map_err(io)?;
        file.write_all(&(ids.len() as u64).to_le_bytes())
            .map_err(io)?;
        for id in ids {
            file.write_all(&id.to_le_bytes()).map_err(io)?;
        }
    }
    file.flush().map_err(io)?;
    Ok(())
}

pub(crate) fn read_postings(path: &Path) -> Result<BTreeMap<FeatureId, Vec<u32>>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let bad = |msg: &str| Error::parse(path, 0, msg);

    let mut magic = [0u8; 8];
    reader
        .read_exact(&mut magic)
        .map_err(|e| Error::io(path, e))?;
    if &magic != POSTINGS_MAGIC {
        return Err(bad("bad magic (not a postings file)"));
    }
    let mut out = BTreeMap::new();
    let n_features = read_u64(&mut reader, path)?;
    for _ in 0..n_features {
        let key_len = read_u32(&mut reader, path)? as usize;
        if key_len > 1 << 20 {
            return Err(bad("feature key length out of range"));
        }
        let mut key = vec![0u8; key_len];
        reader
            .read_exact(&mut key)
            .map_err(|e| Error::io(path, e))?;
        let key = String::from_utf8(key).map_err(|_| bad("feature key not UTF-8"))?;
        let feature = FeatureId::decode(&key).map_err(|e| Error::parse(path, 0, e.to_string()))?;
        let n_ids = read_u64(&mut reader, path)? as usize;
        let mut ids = Vec::with_capacity(n_ids.min(1 << 20));
        for _ in 0..n_ids {
            ids.push(read_u32(&mut reader, path)?);
        }
        if !ids.windows(2).all(|w| w[0] < w[1]) {
            return Err(bad("posting list not strictly ascending"));
        }
        if out.insert(feature, ids).is_some() {
            return Err(bad("duplicate feature in postings"));
        }
    }
    let mut rest = [0u8; 1];
    match reader.read(&mut rest) {
        Ok(0) => Ok(out),
        Ok(_) => Err(bad("trailing bytes after postings")),
        Err(e) => Err(Error::io(path, e)),
    }
}

fn read_u32<R: Read>(reader: &mut R, path: &Path) -> Result<u32> {
    let mut buf = [0u8; 4];
    reader
        .read_exact(&mut buf)
        .map_err(|e| Error::io(path, e))?;
    Ok(u32::from_le_bytes(buf))
}

fn read_u64<R: Read>(reader: &mut R, path: &Path) -> Result<u64> {
    let mut buf = [0u8; 8];
    reader
        .read_exact(&mut buf)
        .map_err(|e| Error::io(path, e))?;
    Ok(u64::from_le_bytes(buf))
}
