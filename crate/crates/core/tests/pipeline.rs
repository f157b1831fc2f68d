//! End-to-end use of the public API: meshes from disk, descriptors,
//! motion curves and retrieval scores.

use std::fs;

use meshspectra_core::descriptors::{decode_binary, encode_binary};
use meshspectra_core::manifest::{DatasetManifest, LoadedEntry};
use meshspectra_core::mesh::{parse_mesh, write_obj, MeshFormat};
use meshspectra_core::motion::{dtw_distance, motion_curve};
use meshspectra_core::retrieval::{distance_matrix, evaluate, rank_query, CorpusItem, Feature, LabeledCorpus};
use meshspectra_core::synth::{articulated_figure, icosphere, jitter, seeded_rng, unit_cube, Pose};
use meshspectra_core::{DescriptorKind, Extractor, Metric};

const TETRA: &str = "\
# regular-ish tetrahedron
v 0 0 0
v 1 0 0
v 0 1 0
v 0 0 1
f 1 3 2
f 1 2 4
f 1 4 3
f 2 3 4
";

#[test]
fn every_kind_has_its_documented_length() {
    let mesh = parse_mesh(TETRA, MeshFormat::Obj).unwrap();
    for n in [1, 4, 8] {
        let ex = Extractor::new(n);
        for kind in DescriptorKind::ALL {
            let d = ex.extract(&mesh, kind).unwrap();
            assert_eq!(d.values.len(), kind.len(n), "{kind} n={n}");
            assert!(d.values.iter().all(|v| v.is_finite() && *v >= 0.0), "{kind}");
            let back = decode_binary(&encode_binary(&d).unwrap()).unwrap();
            assert_eq!(back.values, d.values);
            assert_eq!(back.kind, kind);
        }
    }
}

#[test]
fn obj_round_trip_preserves_descriptors() {
    let mesh = articulated_figure(&Pose::classes()[4].1, 1);
    let again = parse_mesh(&write_obj(&mesh), MeshFormat::Obj).unwrap();
    let ex = Extractor::new(8);
    for kind in [DescriptorKind::AreasBreadths, DescriptorKind::ShapeInvariant] {
        let (a, b) = (ex.extract(&mesh, kind).unwrap(), ex.extract(&again, kind).unwrap());
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0), "{kind}: {x} vs {y}");
        }
    }
}

#[test]
fn manifest_sequences_become_comparable_curves() {
    let dir = tempfile::TempDir::new().unwrap();
    let mut entries = Vec::new();
    for (id, grow) in [("slow", 0.02), ("fast", 0.05), ("still", 0.0)] {
        fs::create_dir(dir.path().join(id)).unwrap();
        for f in 0..7 {
            let mesh = icosphere(1, 1.0 + grow * f as f64);
            fs::write(dir.path().join(id).join(format!("f{f:02}.obj")), write_obj(&mesh)).unwrap();
        }
        entries.push(serde_json::json!({"id": id, "class": "sphere", "frame_glob": format!("{id}/*.obj"), "fps": 10.0}));
    }
    let path = dir.path().join("manifest.json");
    fs::write(&path, serde_json::to_vec(&serde_json::json!({"entries": entries})).unwrap()).unwrap();

    let manifest = DatasetManifest::load(&path).unwrap();
    let ex = Extractor::new(4);
    let curves: Vec<_> = manifest
        .entries
        .iter()
        .map(|e| match manifest.load_entry(e).unwrap() {
            LoadedEntry::Sequence(seq) => motion_curve(&seq, DescriptorKind::Breadths, &ex, 1).unwrap(),
            LoadedEntry::Pose(_) => panic!("expected a sequence"),
        })
        .collect();
    for c in &curves {
        assert_eq!(c.len(), 5);
        assert_eq!(c.dim(), 16);
        assert!((c.points()[0].0 - 0.1).abs() < 1e-12);
    }
    let slow_fast = dtw_distance(&curves[0], &curves[1]).unwrap();
    let slow_still = dtw_distance(&curves[0], &curves[2]).unwrap();
    let fast_still = dtw_distance(&curves[1], &curves[2]).unwrap();
    assert!(slow_still < fast_still);
    assert!(slow_fast > 0.0);
    assert_eq!(dtw_distance(&curves[2], &curves[2]).unwrap(), 0.0);
}

#[test]
fn lightly_jittered_shapes_retrieve_their_own_class() {
    let mut rng = seeded_rng(11);
    let ex = Extractor::new(8);
    let shapes = [("cube", unit_cube()), ("ball", icosphere(2, 0.6)), ("figure", articulated_figure(&Pose::STANDING, 1))];
    let mut items = Vec::new();
    for (label, mesh) in &shapes {
        for i in 0..4 {
            let m = jitter(mesh, 0.002, &mut rng);
            items.push(CorpusItem {
                id: format!("{label}{i}"),
                label: label.to_string(),
                feature: Feature::Vector(ex.extract(&m, DescriptorKind::Breadths).unwrap()),
            });
        }
    }
    let corpus = LabeledCorpus::new(items).unwrap();
    let matrix = distance_matrix(&corpus, Metric::Euclidean).unwrap();
    let scores = evaluate(&matrix, &corpus.labels()).unwrap().means;
    assert_eq!((scores.nn, scores.ft, scores.st), (100.0, 100.0, 100.0));
    let top = rank_query(&matrix, 0, 3).unwrap();
    assert!(top.iter().all(|&j| corpus.labels()[j] == "cube"));
}
