use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::Args;
use meshspectra_core::{load_mesh, DescriptorKind, Extractor};
use serde::Serialize;

use crate::store::write_atomic;

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Mesh file (OBJ, OFF or ASCII PLY).
    #[arg(long)]
    pub mesh: PathBuf,
    /// Timed runs per kind; the median is reported.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    pub repeat: u32,
    /// Comma-separated kinds; all kinds by default.
    #[arg(long, value_delimiter = ',', value_parser = |s: &str| s.parse::<DescriptorKind>())]
    pub kinds: Vec<DescriptorKind>,
    #[arg(long, default_value_t = meshspectra_core::descriptors::DEFAULT_N)]
    pub n: usize,
    /// JSON report path; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Machine {
    os: &'static str,
    arch: &'static str,
    cpu: Option<String>,
    logical_cpus: usize,
    threads: usize,
}

#[derive(Debug, Serialize)]
struct Timing {
    kind: DescriptorKind,
    median_ms: f64,
    min_ms: f64,
    max_ms: f64,
}

#[derive(Debug, Serialize)]
struct BenchReport {
    mesh: String,
    vertices: usize,
    faces: usize,
    n: usize,
    repeat: u32,
    /// Set when a single run makes the median meaningless.
    noisy: bool,
    machine: Machine,
    timings: Vec<Timing>,
}

fn cpu_model() -> Option<String> {
    let info = std::fs::read_to_string("/proc/cpuinfo").ok()?;
    info.lines()
        .find(|l| l.starts_with("model name"))
        .and_then(|l| l.split(':').nth(1))
        .map(|s| s.trim().to_string())
}

fn median(sorted: &[f64]) -> f64 {
    let m = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[m]
    } else {
        0.5 * (sorted[m - 1] + sorted[m])
    }
}

pub fn run(args: &BenchArgs) -> Result<()> {
    let mesh = load_mesh(&args.mesh, None).with_context(|| format!("loading {}", args.mesh.display()))?;
    let extractor = Extractor::new(args.n.max(1));
    let kinds = if args.kinds.is_empty() {
        DescriptorKind::ALL.to_vec()
    } else {
        args.kinds.clone()
    };
    let mut timings = Vec::with_capacity(kinds.len());
    for kind in kinds {
        // One untimed run warms caches and the thread pool.
        extractor.extract(&mesh, kind)?;
        let mut runs: Vec<f64> = (0..args.repeat)
            .map(|_| {
                let start = Instant::now();
                extractor.extract(&mesh, kind).map(|_| start.elapsed().as_secs_f64() * 1e3)
            })
            .collect::<meshspectra_core::Result<_>>()?;
        runs.sort_by(f64::total_cmp);
        timings.push(Timing {
            kind,
            median_ms: median(&runs),
            min_ms: runs[0],
            max_ms: runs[runs.len() - 1],
        });
    }
    let report = BenchReport {
        mesh: args.mesh.display().to_string(),
        vertices: mesh.vertices().len(),
        faces: mesh.faces().len(),
        n: extractor.n(),
        repeat: args.repeat,
        noisy: args.repeat < 2,
        machine: Machine {
            os: std::env::consts::OS,
            arch: std::env::consts::ARCH,
            cpu: cpu_model(),
            logical_cpus: std::thread::available_parallelism().map_or(1, |n| n.get()),
            threads: rayon::current_num_threads(),
        },
        timings,
    };
    let json = serde_json::to_string_pretty(&report)?;
    match &args.out {
        Some(path) => {
            write_atomic(path, json.as_bytes())?;
            for t in &report.timings {
                println!("{:<20} {:>9.3} ms", t.kind.name(), t.median_ms);
            }
        }
        None => println!("{json}"),
    }
    Ok(())
}
