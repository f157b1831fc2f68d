//! The features directory: one record file per item plus `index.json`.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use meshspectra_core::descriptors::{decode_binary, encode_binary, DescriptorRecord, FeatureRecord};
use meshspectra_core::retrieval::{CorpusItem, Feature};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const INDEX_FILE: &str = "index.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Bin,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndexEntry {
    pub id: String,
    pub class: String,
    pub file: String,
}

/// Writes `bytes` to `path` through a temporary file in the same directory,
/// so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("writing in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// File stem for an id: anything outside `[A-Za-z0-9._-]` becomes `_`.
pub fn file_stem(id: &str) -> String {
    id.chars()
        .map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-') { c } else { '_' })
        .collect()
}

/// Persists records under `dir` and writes the index. Descriptors go to
/// binary when `format` is `Bin`; curves are always JSON.
pub fn save(dir: &Path, records: &[FeatureRecord], format: Format) -> Result<()> {
    let mut stems = HashSet::new();
    let mut index = Vec::with_capacity(records.len());
    for record in records {
        let stem = file_stem(record.id());
        if !stems.insert(stem.clone()) {
            bail!(CliError::FileNameClash(record.id().to_string()));
        }
        let (file, bytes) = match (record, format) {
            (FeatureRecord::Descriptor(d), Format::Bin) => (format!("{stem}.bin"), encode_binary(&d.descriptor())?),
            _ => (format!("{stem}.json"), serde_json::to_vec(record)?),
        };
        write_atomic(&dir.join(&file), &bytes)?;
        index.push(IndexEntry {
            id: record.id().to_string(),
            class: record.class().unwrap_or_default().to_string(),
            file,
        });
    }
    write_atomic(&dir.join(INDEX_FILE), &serde_json::to_vec_pretty(&index)?)
}

fn read_record(path: &Path, entry: &IndexEntry) -> Result<FeatureRecord> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if path.extension().is_some_and(|e| e == "bin") {
        let d = decode_binary(&bytes).with_context(|| format!("decoding {}", path.display()))?;
        return Ok(FeatureRecord::Descriptor(DescriptorRecord::new(
            entry.id.clone(),
            Some(entry.class.clone()),
            d,
        )));
    }
    serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", path.display()))
}

/// Loads every record listed in `dir/index.json`, or every `*.json` record
/// in `dir` when there is no index.
pub fn load(dir: &Path) -> Result<Vec<FeatureRecord>> {
    let index_path = dir.join(INDEX_FILE);
    if index_path.exists() {
        let text = fs::read_to_string(&index_path).with_context(|| format!("reading {}", index_path.display()))?;
        let index: Vec<IndexEntry> =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", index_path.display()))?;
        return index
            .iter()
            .map(|e| read_record(&dir.join(&e.file), e))
            .collect();
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        bail!(CliError::NoFeatures(dir.to_path_buf()));
    }
    paths
        .iter()
        .map(|p| {
            let bytes = fs::read(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_slice(&bytes).with_context(|| format!("parsing {}", p.display()))
        })
        .collect()
}

/// Converts records to corpus items, requiring one kind, one parameter set
/// and one feature type throughout.
pub fn to_corpus(records: Vec<FeatureRecord>) -> Result<Vec<CorpusItem>> {
    let Some(first) = records.first() else {
        bail!(CliError::EmptyCorpus);
    };
    let signature = |r: &FeatureRecord| match r {
        FeatureRecord::Descriptor(d) => (d.kind, d.params, false),
        FeatureRecord::Curve(c) => (c.kind, c.params, true),
    };
    let expected = signature(first);
    if let Some(other) = records.iter().find(|r| signature(r) != expected) {
        bail!(CliError::MixedKinds {
            first: first.id().to_string(),
            other: other.id().to_string(),
        });
    }
    records
        .into_iter()
        .map(|r| {
            let label = r.class().unwrap_or_default().to_string();
            let (id, feature) = match r {
                FeatureRecord::Descriptor(d) => (d.id.clone(), Feature::Vector(d.descriptor())),
                FeatureRecord::Curve(c) => (c.id.clone(), Feature::Curve(c.curve()?)),
            };
            Ok(CorpusItem { id, label, feature })
        })
        .collect()
}
