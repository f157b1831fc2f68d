use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use meshspectra_core::manifest::{DatasetManifest, EntrySource, ManifestEntry};
use meshspectra_core::mesh::write_obj;
use meshspectra_core::synth::{articulated_figure, jitter, seeded_rng, Pose};
use rand::Rng;

use crate::store::write_atomic;

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Output directory; receives the meshes and `manifest.json`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Instances per pose class.
    #[arg(long, default_value_t = 8)]
    pub instances: usize,
    /// Vertex jitter as a fraction of the bounding-box diagonal.
    #[arg(long, default_value_t = 0.005)]
    pub noise: f64,
    /// Box subdivision of each figure.
    #[arg(long, default_value_t = 1)]
    pub subdiv: usize,
    /// Write motion sequences of this many frames instead of static poses.
    #[arg(long)]
    pub frames: Option<usize>,
}

pub fn run(args: &SynthArgs) -> Result<()> {
    let mut rng = seeded_rng(args.seed);
    let mut entries = Vec::new();
    for (class, target) in Pose::classes() {
        for i in 0..args.instances {
            let id = format!("{class}_{i:02}");
            let source = match args.frames {
                None => {
                    let mesh = jitter(&articulated_figure(&target, args.subdiv), args.noise, &mut rng);
                    let path = format!("{id}.obj");
                    write_atomic(&args.out.join(&path), write_obj(&mesh).as_bytes())?;
                    EntrySource::Mesh { path: path.into() }
                }
                Some(frames) => {
                    // A move from standing into the class pose, at a
                    // per-instance speed.
                    let speed = rng.gen_range(0.8..1.25);
                    for f in 0..frames {
                        let t = (speed * f as f64 / (frames.max(2) - 1) as f64).min(1.0);
                        let pose = Pose::STANDING.lerp(&target, t);
                        let mesh = jitter(&articulated_figure(&pose, args.subdiv), args.noise, &mut rng);
                        let path = args.out.join(&id).join(format!("f{f:04}.obj"));
                        write_atomic(&path, write_obj(&mesh).as_bytes())?;
                    }
                    EntrySource::Glob {
                        frame_glob: format!("{id}/*.obj"),
                        fps: None,
                    }
                }
            };
            entries.push(ManifestEntry {
                id,
                class: class.to_string(),
                source,
            });
        }
    }
    let manifest = DatasetManifest {
        entries,
        base_dir: PathBuf::new(),
    };
    let path = args.out.join("manifest.json");
    write_atomic(&path, &serde_json::to_vec_pretty(&manifest)?)?;
    println!("wrote {} entries to {}", manifest.entries.len(), path.display());
    Ok(())
}
