use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use meshspectra_core::descriptors::{CurveRecord, DescriptorRecord, FeatureRecord};
use meshspectra_core::manifest::{DatasetManifest, LoadedEntry, ManifestEntry};
use meshspectra_core::motion::motion_curve;
use meshspectra_core::{DescriptorKind, Extractor};
use rayon::prelude::*;

use crate::store::{self, Format};
use crate::{CliError, DescriptorArgs};

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Dataset manifest (JSON).
    #[arg(long)]
    pub manifest: PathBuf,
    #[command(flatten)]
    pub descriptor: DescriptorArgs,
    /// Output directory for the feature files.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write what succeeded and exit 0 even if some entries fail.
    #[arg(long)]
    pub keep_going: bool,
}

/// Descriptor for a pose entry, motion curve for a sequence entry.
pub fn entry_record(
    manifest: &DatasetManifest,
    entry: &ManifestEntry,
    kind: DescriptorKind,
    extractor: &Extractor,
    window: usize,
) -> meshspectra_core::Result<FeatureRecord> {
    let class = Some(entry.class.clone());
    Ok(match manifest.load_entry(entry)? {
        LoadedEntry::Pose(mesh) => {
            FeatureRecord::Descriptor(DescriptorRecord::new(entry.id.clone(), class, extractor.extract(&mesh, kind)?))
        }
        LoadedEntry::Sequence(seq) => {
            let curve = motion_curve(&seq, kind, extractor, window)?;
            FeatureRecord::Curve(CurveRecord::new(entry.id.clone(), class, Some(window), &curve))
        }
    })
}

/// Extracts every entry in parallel. Failures are reported on stderr with
/// their id; they abort unless `keep_going`.
pub fn extract_manifest(path: &Path, args: &DescriptorArgs, keep_going: bool) -> Result<Vec<FeatureRecord>> {
    let extractor = args.extractor()?;
    let manifest = DatasetManifest::load(path).with_context(|| format!("loading manifest {}", path.display()))?;
    let results: Vec<_> = manifest
        .entries
        .par_iter()
        .map(|e| (e, entry_record(&manifest, e, args.kind, &extractor, args.window)))
        .collect();
    let total = results.len();
    let mut records = Vec::with_capacity(total);
    let mut failed = 0;
    for (entry, result) in results {
        match result {
            Ok(r) => records.push(r),
            Err(e) => {
                failed += 1;
                eprintln!("error: {}: {e}", entry.id);
            }
        }
    }
    if failed > 0 && !keep_going {
        bail!(CliError::EntriesFailed { failed, total });
    }
    Ok(records)
}

pub fn run(args: &ExtractArgs) -> Result<()> {
    let records = extract_manifest(&args.manifest, &args.descriptor, args.keep_going)?;
    store::save(&args.out, &records, args.format)?;
    println!(
        "wrote {} {} feature(s) to {}",
        records.len(),
        args.descriptor.kind,
        args.out.display()
    );
    Ok(())
}
