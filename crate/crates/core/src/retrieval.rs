//! Pairwise distances over a labeled corpus and nearest-neighbor,
//! first-tier and second-tier scoring.

use std::collections::{HashMap, HashSet};
use std::fmt::{self, Write as _};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::descriptors::DescriptorVector;
use crate::error::{Error, Result};
use crate::motion::{dtw_distance_with, DtwOptions, MotionCurve};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Euclidean,
    Dtw,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Euclidean => "euclidean",
            Metric::Dtw => "dtw",
        })
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(Metric::Euclidean),
            "dtw" => Ok(Metric::Dtw),
            other => Err(format!("unknown metric {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Feature {
    Vector(DescriptorVector),
    Curve(MotionCurve),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusItem {
    pub id: String,
    pub label: String,
    pub feature: Feature,
}

#[derive(Debug, Clone)]
pub struct LabeledCorpus {
    items: Vec<CorpusItem>,
}

impl LabeledCorpus {
    pub fn new(items: Vec<CorpusItem>) -> Result<Self> {
        if items.len() < 2 {
            return Err(Error::CorpusTooSmall);
        }
        let mut seen = HashSet::new();
        for item in &items {
            if !seen.insert(item.id.as_str()) {
                return Err(Error::DuplicateId(item.id.clone()));
            }
        }
        Ok(LabeledCorpus { items })
    }

    pub fn items(&self) -> &[CorpusItem] {
        &self.items
    }

    pub fn labels(&self) -> Vec<&str> {
        self.items.iter().map(|i| i.label.as_str()).collect()
    }

    pub fn ids(&self) -> Vec<&str> {
        self.items.iter().map(|i| i.id.as_str()).collect()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.items.iter().position(|i| i.id == id)
    }
}

/// Square, symmetric, zero-diagonal matrix of pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    size: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Validates symmetry (within 1e-9), a zero diagonal and nonnegativity.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let size = rows.len();
        if rows.iter().any(|r| r.len() != size) {
            return Err(Error::InvalidParameter("distance matrix must be square".into()));
        }
        for i in 0..size {
            if rows[i][i] != 0.0 {
                return Err(Error::InvalidParameter(format!("nonzero diagonal at {i}")));
            }
            for j in 0..size {
                let d = rows[i][j];
                if !(d >= 0.0) || (d - rows[j][i]).abs() > 1e-9 * d.abs().max(1.0) {
                    return Err(Error::InvalidParameter(format!(
                        "entry ({i}, {j}) is negative or asymmetric"
                    )));
                }
            }
        }
        Ok(DistanceMatrix {
            size,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.size..(i + 1) * self.size]
    }

    /// Applies `f` to every entry. `f` must map 0 to 0 and keep values
    /// nonnegative.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> DistanceMatrix {
        DistanceMatrix {
            size: self.size,
            data: self.data.iter().map(|&d| f(d)).collect(),
        }
    }
}

/// Distance between two features under `metric`.
pub fn feature_distance(a: &Feature, b: &Feature, metric: Metric, dtw: &DtwOptions) -> Result<f64> {
    match (metric, a, b) {
        (Metric::Euclidean, Feature::Vector(x), Feature::Vector(y)) => x.euclidean_distance(y),
        (Metric::Dtw, Feature::Curve(x), Feature::Curve(y)) => dtw_distance_with(x, y, dtw),
        _ => Err(Error::MixedTypes),
    }
}

pub fn distance_matrix(corpus: &LabeledCorpus, metric: Metric) -> Result<DistanceMatrix> {
    distance_matrix_with(corpus, metric, &DtwOptions::default())
}

/// Fills the upper triangle in parallel and mirrors it.
pub fn distance_matrix_with(corpus: &LabeledCorpus, metric: Metric, dtw: &DtwOptions) -> Result<DistanceMatrix> {
    let items = corpus.items();
    let size = items.len();
    let expected_curve = metric == Metric::Dtw;
    if items
        .iter()
        .any(|i| matches!(i.feature, Feature::Curve(_)) != expected_curve)
    {
        return Err(Error::MixedTypes);
    }
    let upper: Vec<Vec<f64>> = (0..size)
        .into_par_iter()
        .map(|i| {
            (i + 1..size)
                .map(|j| feature_distance(&items[i].feature, &items[j].feature, metric, dtw))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut data = vec![0.0; size * size];
    for (i, row) in upper.iter().enumerate() {
        for (offset, &d) in row.iter().enumerate() {
            let j = i + 1 + offset;
            data[i * size + j] = d;
            data[j * size + i] = d;
        }
    }
    Ok(DistanceMatrix { size, data })
}

/// Other items by ascending distance, ties broken by ascending index.
fn ranking(matrix: &DistanceMatrix, query: usize) -> Vec<usize> {
    let row = matrix.row(query);
    let mut order: Vec<usize> = (0..matrix.size).filter(|&j| j != query).collect();
    order.sort_by(|&a, &b| row[a].total_cmp(&row[b]).then(a.cmp(&b)));
    order
}

/// The `top_k` closest items to `query`, excluding the query itself.
pub fn rank_query(matrix: &DistanceMatrix, query: usize, top_k: usize) -> Result<Vec<usize>> {
    if query >= matrix.size {
        return Err(Error::IndexOutOfRange {
            index: query,
            len: matrix.size,
        });
    }
    let mut order = ranking(matrix, query);
    order.truncate(top_k);
    Ok(order)
}

/// Scores of one query, in percent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QueryScore {
    pub index: usize,
    pub nn_hit: bool,
    pub ft: f64,
    pub st: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scores {
    #[serde(rename = "NN")]
    pub nn: f64,
    #[serde(rename = "FT")]
    pub ft: f64,
    #[serde(rename = "ST")]
    pub st: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    /// One entry per query whose class has at least two members.
    pub per_query: Vec<QueryScore>,
    pub means: Scores,
}

/// NN / FT / ST averaged over queries, in percent. Each query is excluded
/// from its own ranking; queries from singleton classes are skipped.
pub fn evaluate<L: AsRef<str>>(matrix: &DistanceMatrix, labels: &[L]) -> Result<Evaluation> {
    if labels.len() != matrix.size {
        return Err(Error::LabelMismatch {
            labels: labels.len(),
            size: matrix.size,
        });
    }
    let mut class_size: HashMap<&str, usize> = HashMap::new();
    for l in labels {
        *class_size.entry(l.as_ref()).or_default() += 1;
    }
    let mut per_query = Vec::new();
    for q in 0..matrix.size {
        let label = labels[q].as_ref();
        let relevant = class_size[label] - 1;
        if relevant == 0 {
            continue;
        }
        let order = ranking(matrix, q);
        let hits_within = |k: usize| {
            order
                .iter()
                .take(k)
                .filter(|&&j| labels[j].as_ref() == label)
                .count()
        };
        per_query.push(QueryScore {
            index: q,
            nn_hit: labels[order[0]].as_ref() == label,
            ft: 100.0 * hits_within(relevant) as f64 / relevant as f64,
            st: 100.0 * hits_within(2 * relevant) as f64 / relevant as f64,
        });
    }
    if per_query.is_empty() {
        return Err(Error::ExplainedSingletons);
    }
    let count = per_query.len() as f64;
    let means = Scores {
        nn: per_query.iter().map(|s| if s.nn_hit { 100.0 } else { 0.0 }).sum::<f64>() / count,
        ft: per_query.iter().map(|s| s.ft).sum::<f64>() / count,
        st: per_query.iter().map(|s| s.st).sum::<f64>() / count,
    };
    Ok(Evaluation { per_query, means })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryReport {
    pub id: String,
    pub nn_hit: bool,
    pub ft: f64,
    pub st: f64,
}

/// Serializable evaluation summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrievalReport {
    pub metric: Metric,
    pub per_query: Vec<QueryReport>,
    pub means: Scores,
}

impl RetrievalReport {
    pub fn new<S: AsRef<str>>(metric: Metric, ids: &[S], evaluation: &Evaluation) -> Self {
        RetrievalReport {
            metric,
            per_query: evaluation
                .per_query
                .iter()
                .map(|q| QueryReport {
                    id: ids[q.index].as_ref().to_string(),
                    nn_hit: q.nn_hit,
                    ft: q.ft,
                    st: q.st,
                })
                .collect(),
            means: evaluation.means,
        }
    }

    /// Plain-text table with one row per representation.
    pub fn table(rows: &[(&str, Scores)]) -> String {
        let width = rows
            .iter()
            .map(|(name, _)| name.len())
            .chain(["Representation".len()])
            .max()
            .unwrap_or(0);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$} | {:>5} | {:>5} | {:>5}", "Representation", "NN", "FT", "ST");
        let _ = writeln!(out, "{}", "-".repeat(width + 24));
        for (name, s) in rows {
            let _ = writeln!(out, "{:<width$} | {:>5.1} | {:>5.1} | {:>5.1}", name, s.nn, s.ft, s.st);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::descriptors::{DescriptorKind, DescriptorParams};
    use proptest::prelude::*;

    fn vector(values: Vec<f64>) -> Feature {
        Feature::Vector(DescriptorVector {
            kind: DescriptorKind::Breadths,
            params: DescriptorParams { n: 1, lambda: None },
            values,
        })
    }

    fn corpus(points: &[f64], labels: &[&str]) -> LabeledCorpus {
        LabeledCorpus::new(
            points
                .iter()
                .zip(labels)
                .enumerate()
                .map(|(i, (p, l))| CorpusItem {
                    id: format!("item{i}"),
                    label: l.to_string(),
                    feature: vector(vec![*p]),
                })
                .collect(),
        )
        .unwrap()
    }

    fn matrix(rows: &[&[f64]]) -> DistanceMatrix {
        DistanceMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn one_dimensional_distances() {
        let m = distance_matrix(&corpus(&[0.0, 3.0, 4.0], &["a", "b", "c"]), Metric::Euclidean).unwrap();
        assert_eq!((m.get(0, 1), m.get(0, 2), m.get(1, 2)), (3.0, 4.0, 1.0));
        for i in 0..3 {
            assert_eq!(m.get(i, i), 0.0);
            for j in 0..3 {
                assert_eq!(m.get(i, j), m.get(j, i));
            }
        }
    }

    #[test]
    fn identical_items_are_at_zero() {
        let m = distance_matrix(&corpus(&[2.0, 2.0], &["a", "a"]), Metric::Euclidean).unwrap();
        assert_eq!(m.get(0, 1), 0.0);
    }

    #[test]
    fn mixed_types_rejected() {
        let c = corpus(&[0.0, 1.0], &["a", "b"]);
        assert!(matches!(distance_matrix(&c, Metric::Dtw), Err(Error::MixedTypes)));
    }

    #[test]
    fn corpus_validation() {
        let item = |id: &str| CorpusItem {
            id: id.into(),
            label: "a".into(),
            feature: vector(vec![0.0]),
        };
        assert!(matches!(LabeledCorpus::new(vec![item("x")]), Err(Error::CorpusTooSmall)));
        assert!(matches!(
            LabeledCorpus::new(vec![item("x"), item("x")]),
            Err(Error::DuplicateId(_))
        ));
    }

    #[test]
    fn perfect_separation() {
        let m = matrix(&[
            &[0.0, 1.0, 10.0, 10.0],
            &[1.0, 0.0, 10.0, 10.0],
            &[10.0, 10.0, 0.0, 1.0],
            &[10.0, 10.0, 1.0, 0.0],
        ]);
        let e = evaluate(&m, &["A", "A", "B", "B"]).unwrap();
        assert_eq!(e.means, Scores { nn: 100.0, ft: 100.0, st: 100.0 });
    }

    #[test]
    fn all_ties_follow_index_order() {
        let m = matrix(&[
            &[0.0, 1.0, 1.0, 1.0],
            &[1.0, 0.0, 1.0, 1.0],
            &[1.0, 1.0, 0.0, 1.0],
            &[1.0, 1.0, 1.0, 0.0],
        ]);
        let e = evaluate(&m, &["A", "A", "B", "B"]).unwrap();
        // Rankings: q0 -> 1,2,3; q1 -> 0,2,3; q2 -> 0,1,3; q3 -> 0,1,2.
        let hits: Vec<bool> = e.per_query.iter().map(|q| q.nn_hit).collect();
        assert_eq!(hits, [true, true, false, false]);
        assert_eq!(e.means.nn, 50.0);
        assert_eq!(e.means.ft, 50.0);
        // Top two: q0 {1,2}, q1 {0,2}, q2 {0,1}, q3 {0,1}.
        assert_eq!(e.means.st, 50.0);
    }

    #[test]
    fn equidistant_member_of_three() {
        // Class A = {0, 1, 2}; query 1 sits 1.0 from both 0 and 2 and 1.0
        // from item 3 (class B), which ties and loses the index order only
        // against 0 and 2.
        let m = matrix(&[
            &[0.0, 1.0, 2.0, 5.0],
            &[1.0, 0.0, 1.0, 1.0],
            &[2.0, 1.0, 0.0, 5.0],
            &[5.0, 1.0, 5.0, 0.0],
        ]);
        let e = evaluate(&m, &["A", "A", "A", "B"]).unwrap();
        let q1 = e.per_query.iter().find(|q| q.index == 1).unwrap();
        assert_eq!(q1.ft, 100.0);
        let m2 = matrix(&[
            &[0.0, 1.0, 2.0, 5.0],
            &[1.0, 0.0, 1.0, 0.5],
            &[2.0, 1.0, 0.0, 5.0],
            &[5.0, 0.5, 5.0, 0.0],
        ]);
        let e2 = evaluate(&m2, &["A", "A", "A", "B"]).unwrap();
        let q1 = e2.per_query.iter().find(|q| q.index == 1).unwrap();
        // Top 2 for query 1 are {3, 0}: one of two relevant.
        assert_eq!(q1.ft, 50.0);
        assert!(!q1.nn_hit);
        // Singleton class B is skipped.
        assert_eq!(e2.per_query.len(), 3);
    }

    #[test]
    fn singletons_only() {
        let m = matrix(&[&[0.0, 1.0], &[1.0, 0.0]]);
        assert!(matches!(evaluate(&m, &["A", "B"]), Err(Error::ExplainedSingletons)));
        assert!(matches!(evaluate(&m, &["A"]), Err(Error::LabelMismatch { .. })));
    }

    #[test]
    fn rank_query_rules() {
        let m = matrix(&[&[0.0, 2.0, 1.0, 2.0], &[2.0, 0.0, 1.0, 1.0], &[1.0, 1.0, 0.0, 1.0], &[2.0, 1.0, 1.0, 0.0]]);
        assert_eq!(rank_query(&m, 0, 1).unwrap(), [2]);
        assert_eq!(rank_query(&m, 0, 10).unwrap(), [2, 1, 3]);
        assert_eq!(rank_query(&m, 2, 3).unwrap(), [0, 1, 3]);
        assert!(matches!(rank_query(&m, 4, 1), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn report_json_shape() {
        let m = matrix(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = evaluate(&m, &["A", "A"]).unwrap();
        let r = RetrievalReport::new(Metric::Euclidean, &["x", "y"], &e);
        let v: serde_json::Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["metric"], "euclidean");
        assert_eq!(v["means"]["NN"], 100.0);
        assert_eq!(v["per_query"][1]["id"], "y");
        assert!(RetrievalReport::table(&[("Breadths", e.means)]).contains("Breadths"));
    }

    proptest! {
        #[test]
        fn ranking_only_invariances(
            points in prop::collection::vec(-10.0f64..10.0, 4..16),
            labels in prop::collection::vec(0u8..3, 16),
        ) {
            let n = points.len();
            let labels: Vec<String> = labels[..n].iter().map(|l| format!("c{l}")).collect();
            prop_assume!(labels.iter().any(|l| labels.iter().filter(|m| *m == l).count() > 1));
            let c = LabeledCorpus::new(
                points.iter().zip(&labels).enumerate().map(|(i, (p, l))| CorpusItem {
                    id: i.to_string(),
                    label: l.clone(),
                    feature: vector(vec![*p]),
                }).collect(),
            ).unwrap();
            let m = distance_matrix(&c, Metric::Euclidean).unwrap();
            let base = evaluate(&m, &labels).unwrap();
            prop_assert_eq!(&evaluate(&m.map(|d| d * d), &labels).unwrap(), &base);
            let renamed: Vec<String> = labels.iter().map(|l| format!("renamed-{l}")).collect();
            prop_assert_eq!(&evaluate(&m, &renamed).unwrap(), &base);
            let s = base.means;
            prop_assert!(s.ft <= s.st);
            for v in [s.nn, s.ft, s.st] {
                prop_assert!((0.0..=100.0).contains(&v));
            }
        }
    }
}
