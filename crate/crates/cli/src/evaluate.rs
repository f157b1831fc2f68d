use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use meshspectra_core::retrieval::{distance_matrix_with, evaluate, Feature, LabeledCorpus, RetrievalReport};
use meshspectra_core::motion::DtwOptions;
use meshspectra_core::{DescriptorKind, Metric};
use serde::Serialize;

use crate::extract::extract_manifest;
use crate::store::{self, write_atomic};
use crate::{parse_metric, CliError, DescriptorArgs};

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["features", "manifest"])))]
pub struct EvaluateArgs {
    /// Directory written by `extract`.
    #[arg(long)]
    pub features: Option<PathBuf>,
    /// Extract from this manifest in memory instead.
    #[arg(long, requires = "kind")]
    pub manifest: Option<PathBuf>,
    #[arg(long, value_parser = |s: &str| s.parse::<DescriptorKind>())]
    pub kind: Option<DescriptorKind>,
    #[arg(long, default_value_t = meshspectra_core::descriptors::DEFAULT_N)]
    pub n: usize,
    #[arg(long, default_value_t = meshspectra_core::descriptors::DEFAULT_LAMBDA)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0)]
    pub window: usize,
    /// Distance; defaults to euclidean for descriptors and dtw for curves.
    #[arg(long, value_parser = parse_metric)]
    pub metric: Option<Metric>,
    /// Sakoe-Chiba band radius for DTW.
    #[arg(long)]
    pub dtw_window: Option<usize>,
    /// Divide DTW cost by the summed curve lengths.
    #[arg(long)]
    pub dtw_normalize: bool,
    /// JSON report path.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Report {
    kind: DescriptorKind,
    #[serde(flatten)]
    retrieval: RetrievalReport,
}

pub fn run(args: &EvaluateArgs) -> Result<()> {
    let records = match (&args.features, &args.manifest) {
        (Some(dir), _) => store::load(dir)?,
        (None, Some(manifest)) => {
            let descriptor = DescriptorArgs {
                kind: args.kind.expect("clap enforces --kind with --manifest"),
                n: args.n,
                lambda: args.lambda,
                window: args.window,
            };
            extract_manifest(manifest, &descriptor, false)?
        }
        (None, None) => anyhow::bail!(CliError::Usage("give --features or --manifest".into())),
    };
    let items = store::to_corpus(records)?;
    let kind = match &items[0].feature {
        Feature::Vector(v) => v.kind,
        Feature::Curve(c) => c.kind(),
    };
    let metric = args.metric.unwrap_or(match items[0].feature {
        Feature::Vector(_) => Metric::Euclidean,
        Feature::Curve(_) => Metric::Dtw,
    });
    let corpus = LabeledCorpus::new(items)?;
    let dtw = DtwOptions {
        window: args.dtw_window,
        normalize: args.dtw_normalize,
    };
    let matrix = distance_matrix_with(&corpus, metric, &dtw)?;
    let labels = corpus.labels();
    let evaluation = evaluate(&matrix, &labels)?;
    let report = RetrievalReport::new(metric, &corpus.ids(), &evaluation);
    print!("{}", RetrievalReport::table(&[(kind.name(), report.means)]));
    if let Some(out) = &args.out {
        let json = serde_json::to_vec_pretty(&Report { kind, retrieval: report })?;
        write_atomic(out, &json)?;
    }
    Ok(())
}
