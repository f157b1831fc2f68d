//! Dataset manifests: a single JSON file listing pose meshes and mesh
//! sequences with their class labels.
//!
//! ```json
//! {"entries": [
//!   {"id": "p0", "class": "stand", "path": "poses/p0.obj"},
//!   {"id": "s0", "class": "walk", "frame_glob": "walk0/*.off", "fps": 25},
//!   {"id": "s1", "class": "run", "frames": [{"path": "a.ply", "t": 0.0}, {"path": "b.ply", "t": 0.04}]}
//! ]}
//! ```
//!
//! Relative paths resolve against the manifest's directory. Globs expand in
//! lexicographic order; missing timestamps default to `frame_index / fps`
//! with `fps = 25`.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{load_mesh, TriMesh};
use crate::motion::{MeshSequence, DEFAULT_FPS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRef {
    pub path: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EntrySource {
    Mesh {
        path: PathBuf,
    },
    Glob {
        frame_glob: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fps: Option<f64>,
    },
    Frames {
        frames: Vec<FrameRef>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    pub class: String,
    #[serde(flatten)]
    pub source: EntrySource,
}

impl ManifestEntry {
    pub fn is_sequence(&self) -> bool {
        !matches!(self.source, EntrySource::Mesh { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
    /// Directory relative paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

/// A manifest entry with its meshes read from disk.
#[derive(Debug, Clone)]
pub enum LoadedEntry {
    Pose(TriMesh),
    Sequence(MeshSequence),
}

impl DatasetManifest {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut manifest: DatasetManifest = serde_json::from_str(&text)
            .map_err(|e| Error::Manifest(format!("{}: {e}", path.display())))?;
        manifest.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        manifest.validate()?;
        Ok(manifest)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for e in &self.entries {
            if !seen.insert(e.id.as_str()) {
                return Err(Error::DuplicateId(e.id.clone()));
            }
            match &e.source {
                EntrySource::Glob { fps: Some(fps), .. } if !(*fps > 0.0) => {
                    return Err(Error::Manifest(format!("{}: fps must be positive", e.id)));
                }
                EntrySource::Frames { frames } if frames.is_empty() => {
                    return Err(Error::Manifest(format!("{}: empty frame list", e.id)));
                }
                _ => {}
            }
        }
        Ok(())
    }

    fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    /// Frame paths and timestamps of a sequence entry, or the single path
    /// of a pose entry (with time 0).
    pub fn frame_paths(&self, entry: &ManifestEntry) -> Result<Vec<(PathBuf, f64)>> {
        match &entry.source {
            EntrySource::Mesh { path } => Ok(vec![(self.resolve(path), 0.0)]),
            EntrySource::Glob { frame_glob, fps } => {
                let fps = fps.unwrap_or(DEFAULT_FPS);
                let pattern = self.resolve(Path::new(frame_glob));
                let pattern = pattern.to_string_lossy();
                let mut paths: Vec<PathBuf> = glob::glob(&pattern)
                    .map_err(|e| Error::Manifest(format!("{}: bad glob: {e}", entry.id)))?
                    .filter_map(std::result::Result::ok)
                    .collect();
                paths.sort();
                if paths.is_empty() {
                    return Err(Error::Manifest(format!("{}: glob {frame_glob:?} matched nothing", entry.id)));
                }
                Ok(paths
                    .into_iter()
                    .enumerate()
                    .map(|(i, p)| (p, i as f64 / fps))
                    .collect())
            }
            EntrySource::Frames { frames } => Ok(frames
                .iter()
                .enumerate()
                .map(|(i, f)| (self.resolve(&f.path), f.t.unwrap_or(i as f64 / DEFAULT_FPS)))
                .collect()),
        }
    }

    pub fn load_entry(&self, entry: &ManifestEntry) -> Result<LoadedEntry> {
        let frames = self.frame_paths(entry)?;
        if !entry.is_sequence() {
            return Ok(LoadedEntry::Pose(load_mesh(&frames[0].0, None)?));
        }
        let meshes = frames
            .into_iter()
            .map(|(p, t)| Ok((load_mesh(&p, None)?, t)))
            .collect::<Result<Vec<_>>>()?;
        Ok(LoadedEntry::Sequence(MeshSequence::new(meshes)?))
    }
}
