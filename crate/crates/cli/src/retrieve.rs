use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use meshspectra_core::motion::DtwOptions;
use meshspectra_core::retrieval::{feature_distance, Feature};
use meshspectra_core::Metric;
use serde::Serialize;

use crate::store;
use crate::{parse_metric, CliError};

#[derive(Debug, Args)]
pub struct RetrieveArgs {
    /// Directory written by `extract`.
    #[arg(long)]
    pub features: PathBuf,
    /// Id of the query item.
    #[arg(long)]
    pub query: String,
    /// Number of rows to print.
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    /// Distance; defaults to euclidean for descriptors and dtw for curves.
    #[arg(long, value_parser = parse_metric)]
    pub metric: Option<Metric>,
    /// Emit JSON rows instead of a table.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Serialize)]
struct Row<'a> {
    rank: usize,
    id: &'a str,
    distance: f64,
    class: &'a str,
}

pub fn run(args: &RetrieveArgs) -> Result<()> {
    let items = store::to_corpus(store::load(&args.features)?)?;
    let Some(q) = items.iter().position(|i| i.id == args.query) else {
        bail!(CliError::UnknownQueryId(args.query.clone()));
    };
    let metric = args.metric.unwrap_or(match items[q].feature {
        Feature::Vector(_) => Metric::Euclidean,
        Feature::Curve(_) => Metric::Dtw,
    });
    let dtw = DtwOptions::default();
    let distances = items
        .iter()
        .map(|i| feature_distance(&items[q].feature, &i.feature, metric, &dtw))
        .collect::<meshspectra_core::Result<Vec<f64>>>()?;
    // The query itself wins ties, then lower index.
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&a, &b| {
        distances[a]
            .total_cmp(&distances[b])
            .then((a != q).cmp(&(b != q)))
            .then(a.cmp(&b))
    });
    let rows: Vec<Row> = order
        .iter()
        .take(args.top)
        .enumerate()
        .map(|(r, &i)| Row {
            rank: r + 1,
            id: &items[i].id,
            distance: distances[i],
            class: &items[i].label,
        })
        .collect();
    if args.json {
        println!("{}", serde_json::to_string_pretty(&rows)?);
    } else {
        println!("rank\tid\tdistance\tclass");
        for row in &rows {
            println!("{}\t{}\t{:.6}\t{}", row.rank, row.id, row.distance, row.class);
        }
    }
    Ok(())
}
