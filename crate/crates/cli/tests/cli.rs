use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use meshspectra_core::descriptors::{decode_binary, FeatureRecord};
use meshspectra_core::mesh::write_obj;
use meshspectra_core::synth::{articulated_figure, icosphere, unit_cube, Pose};
use meshspectra_core::{load_mesh, DescriptorKind, Extractor, TriMesh};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_meshspectra"));
    cmd.env_remove("MESHSPECTRA_THREADS");
    cmd
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write_mesh(dir: &Path, name: &str, mesh: &TriMesh) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, write_obj(mesh)).unwrap();
    path
}

fn write_manifest(dir: &Path, entries: Value) -> PathBuf {
    let path = dir.join("manifest.json");
    fs::write(&path, serde_json::to_vec_pretty(&serde_json::json!({ "entries": entries })).unwrap()).unwrap();
    path
}

/// Three pose entries in two classes.
fn pose_manifest(dir: &Path) -> PathBuf {
    let poses = Pose::classes();
    write_mesh(dir, "a.obj", &articulated_figure(&poses[0].1, 1));
    write_mesh(dir, "b.obj", &articulated_figure(&poses[1].1, 1));
    write_mesh(dir, "c.obj", &unit_cube());
    write_manifest(
        dir,
        serde_json::json!([
            {"id": "a", "class": "figure", "path": "a.obj"},
            {"id": "b", "class": "figure", "path": "b.obj"},
            {"id": "c", "class": "box", "path": "c.obj"},
        ]),
    )
}

/// Small synthetic corpus written by the binary itself.
fn synth_corpus(dir: &Path, instances: usize, extra: &[&str]) -> PathBuf {
    let mut args = vec!["synth", "--out", s(dir), "--instances"];
    let count = instances.to_string();
    args.push(&count);
    args.extend_from_slice(extra);
    let out = run(&args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    dir.join("manifest.json")
}

fn extract(manifest: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["extract", "--manifest", s(manifest), "--out", s(out)];
    args.extend_from_slice(extra);
    run(&args)
}

fn read_json_record(path: &Path) -> FeatureRecord {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

#[test]
fn extracted_breadths_have_64_values_and_match_memory() {
    let tmp = TempDir::new().unwrap();
    let manifest = pose_manifest(tmp.path());
    let json_dir = tmp.path().join("json");
    let bin_dir = tmp.path().join("bin");
    let out = extract(&manifest, &json_dir, &["--kind", "breadths", "--n", "8"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = extract(&manifest, &bin_dir, &["--kind", "breadths", "--n", "8", "--format", "bin"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let extractor = Extractor::new(8);
    for id in ["a", "b", "c"] {
        let mesh = load_mesh(tmp.path().join(format!("{id}.obj")), None).unwrap();
        let expected = extractor.extract(&mesh, DescriptorKind::Breadths).unwrap();
        assert_eq!(expected.values.len(), 64);

        let FeatureRecord::Descriptor(rec) = read_json_record(&json_dir.join(format!("{id}.json"))) else {
            panic!("expected a descriptor record");
        };
        assert_eq!(rec.kind, DescriptorKind::Breadths);
        assert_eq!(rec.values.len(), 64);
        for (a, b) in rec.values.iter().zip(&expected.values) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0), "{a} vs {b}");
        }

        let decoded = decode_binary(&fs::read(bin_dir.join(format!("{id}.bin"))).unwrap()).unwrap();
        assert_eq!(decoded.kind, DescriptorKind::Breadths);
        let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&decoded.values), bits(&expected.values));
    }
}

#[test]
fn extraction_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let manifest = pose_manifest(tmp.path());
    let (d1, d2) = (tmp.path().join("one"), tmp.path().join("two"));
    for d in [&d1, &d2] {
        let out = extract(&manifest, d, &["--kind", "shape", "--format", "bin"]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    for id in ["a", "b", "c"] {
        let f = format!("{id}.bin");
        assert_eq!(fs::read(d1.join(&f)).unwrap(), fs::read(d2.join(&f)).unwrap());
    }
}

#[test]
fn q_shape_curves_with_window_four_live_in_r24() {
    let tmp = TempDir::new().unwrap();
    let manifest = synth_corpus(tmp.path(), 1, &["--frames", "11"]);
    let dir = tmp.path().join("features");
    let out = extract(&manifest, &dir, &["--kind", "q-shape", "--lambda", "75", "--window", "4"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let index: Vec<Value> = serde_json::from_slice(&fs::read(dir.join("index.json")).unwrap()).unwrap();
    assert_eq!(index.len(), 5);
    for entry in index {
        let FeatureRecord::Curve(c) = read_json_record(&dir.join(entry["file"].as_str().unwrap())) else {
            panic!("expected a curve record");
        };
        assert_eq!(c.kind, DescriptorKind::QShapeInvariant);
        assert_eq!(c.window, Some(4));
        assert_eq!(c.points.len(), 11 - 8);
        assert!(c.points.iter().all(|p| p.values.len() == 24));
    }
}

fn short_sequence_manifest(dir: &Path) -> PathBuf {
    let frames: Vec<Value> = (0..5)
        .map(|i| {
            let name = format!("f{i}.obj");
            write_mesh(dir, &name, &icosphere(1, 1.0 + 0.1 * i as f64));
            serde_json::json!({"path": name})
        })
        .collect();
    write_mesh(dir, "pose.obj", &unit_cube());
    write_manifest(
        dir,
        serde_json::json!([
            {"id": "short", "class": "s", "frames": frames},
            {"id": "pose", "class": "p", "path": "pose.obj"},
        ]),
    )
}

#[test]
fn oversized_window_fails_the_entry() {
    let tmp = TempDir::new().unwrap();
    let manifest = short_sequence_manifest(tmp.path());
    let dir = tmp.path().join("features");
    let out = extract(&manifest, &dir, &["--kind", "breadths", "--window", "3"]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("short"), "{err}");
    assert!(err.contains("window radius 3 needs at least 7 frames"), "{err}");
    assert!(!dir.join("index.json").exists());
}

#[test]
fn keep_going_writes_the_entries_that_succeeded() {
    let tmp = TempDir::new().unwrap();
    let manifest = short_sequence_manifest(tmp.path());
    let dir = tmp.path().join("features");
    let out = extract(&manifest, &dir, &["--kind", "breadths", "--window", "3", "--keep-going"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stderr(&out).contains("short"));
    let index: Vec<Value> = serde_json::from_slice(&fs::read(dir.join("index.json")).unwrap()).unwrap();
    assert_eq!(index.len(), 1);
    assert_eq!(index[0]["id"], "pose");

    // Radius 2 fits five frames exactly.
    let out = extract(&manifest, &dir, &["--kind", "breadths", "--window", "2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
}

fn breadth_features(tmp: &Path) -> PathBuf {
    let manifest = synth_corpus(&tmp.join("corpus"), 2, &[]);
    let dir = tmp.join("breadths");
    let out = extract(&manifest, &dir, &["--kind", "breadths"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    dir
}

#[test]
fn retrieve_lists_the_query_first_and_honours_top() {
    let tmp = TempDir::new().unwrap();
    let dir = breadth_features(tmp.path());
    let out = run(&["retrieve", "--features", s(&dir), "--query", "stand_00", "--top", "7", "--json"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let rows: Vec<Value> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[0]["id"], "stand_00");
    assert_eq!(rows[0]["distance"], 0.0);
    assert_eq!(rows[1]["class"], "stand");
    let ranks: Vec<u64> = rows.iter().map(|r| r["rank"].as_u64().unwrap()).collect();
    assert_eq!(ranks, (1..=7).collect::<Vec<_>>());
    let d: Vec<f64> = rows.iter().map(|r| r["distance"].as_f64().unwrap()).collect();
    assert!(d.windows(2).all(|w| w[0] <= w[1]));

    let out = run(&["retrieve", "--features", s(&dir), "--query", "stand_00", "--top", "3"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 4, "{text}");
    assert!(text.lines().nth(1).unwrap().starts_with("1\tstand_00\t0.000000\tstand"));
}

#[test]
fn retrieve_rejects_unknown_ids_and_mixed_kinds() {
    let tmp = TempDir::new().unwrap();
    let dir = breadth_features(tmp.path());
    let out = run(&["retrieve", "--features", s(&dir), "--query", "nobody"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("unknown query id"));

    let shape = tmp.path().join("shape");
    let out = extract(&tmp.path().join("corpus/manifest.json"), &shape, &["--kind", "shape"]);
    assert_eq!(code(&out), 0);
    let mixed = tmp.path().join("mixed");
    fs::create_dir(&mixed).unwrap();
    fs::copy(dir.join("stand_00.json"), mixed.join("x.json")).unwrap();
    fs::copy(shape.join("stand_01.json"), mixed.join("y.json")).unwrap();
    let out = run(&["retrieve", "--features", s(&mixed), "--query", "stand_00"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("mix kinds"), "{}", stderr(&out));
}

#[test]
fn evaluate_separated_corpus_scores_100_and_reports_means() {
    let tmp = TempDir::new().unwrap();
    let dir = breadth_features(tmp.path());
    let report = tmp.path().join("report.json");
    let out = run(&["evaluate", "--features", s(&dir), "--metric", "euclidean", "--out", s(&report)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("breadths"), "{text}");
    assert!(text.contains("100.0 | 100.0 | 100.0"), "{text}");

    let json: Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    let per_query = json["per_query"].as_array().unwrap();
    assert_eq!(per_query.len(), 10);
    let mean = |key: &str| per_query.iter().map(|q| q[key].as_f64().unwrap()).sum::<f64>() / per_query.len() as f64;
    assert!((json["means"]["FT"].as_f64().unwrap() - mean("ft")).abs() < 1e-9);
    assert!((json["means"]["ST"].as_f64().unwrap() - mean("st")).abs() < 1e-9);
    let hits = per_query.iter().filter(|q| q["nn_hit"] == true).count();
    assert_eq!(json["means"]["NN"].as_f64().unwrap(), 100.0 * hits as f64 / per_query.len() as f64);
    assert_eq!(json["means"]["NN"].as_f64().unwrap(), 100.0);
    assert_eq!(json["metric"], "euclidean");
}

#[test]
fn evaluate_from_manifest_matches_evaluate_from_features() {
    let tmp = TempDir::new().unwrap();
    let dir = breadth_features(tmp.path());
    let manifest = tmp.path().join("corpus/manifest.json");
    let a = run(&["evaluate", "--features", s(&dir)]);
    let b = run(&["evaluate", "--manifest", s(&manifest), "--kind", "breadths"]);
    assert_eq!(code(&b), 0, "{}", stderr(&b));
    assert_eq!(stdout(&a), stdout(&b));
}

#[test]
fn evaluate_rejects_all_singleton_corpus() {
    let tmp = TempDir::new().unwrap();
    write_mesh(tmp.path(), "a.obj", &unit_cube());
    write_mesh(tmp.path(), "b.obj", &icosphere(1, 1.0));
    let manifest = write_manifest(
        tmp.path(),
        serde_json::json!([
            {"id": "a", "class": "x", "path": "a.obj"},
            {"id": "b", "class": "y", "path": "b.obj"},
        ]),
    );
    let out = run(&["evaluate", "--manifest", s(&manifest), "--kind", "areas"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("singleton"), "{}", stderr(&out));
}

#[test]
fn bench_single_repeat_is_flagged_noisy() {
    let tmp = TempDir::new().unwrap();
    let mesh = write_mesh(tmp.path(), "m.obj", &articulated_figure(&Pose::STANDING, 2));
    let report = tmp.path().join("bench.json");
    let out = run(&["bench", "--mesh", s(&mesh), "--repeat", "1", "--kinds", "areas,breadths", "--out", s(&report)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let json: Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    assert_eq!(json["noisy"], true);
    assert_eq!(json["repeat"], 1);
    let kinds: Vec<&str> = json["timings"].as_array().unwrap().iter().map(|t| t["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["areas", "breadths"]);
    assert!(json["machine"]["logical_cpus"].as_u64().unwrap() >= 1);
}

#[test]
fn bench_defaults_to_every_kind() {
    let tmp = TempDir::new().unwrap();
    let mesh = write_mesh(tmp.path(), "m.obj", &unit_cube());
    let out = run(&["bench", "--mesh", s(&mesh), "--repeat", "2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let json: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(json["noisy"], false);
    assert_eq!(json["timings"].as_array().unwrap().len(), 8);
    assert!(json["timings"].as_array().unwrap().iter().all(|t| t["median_ms"].as_f64().unwrap() >= 0.0));
}

#[test]
fn exit_codes() {
    let tmp = TempDir::new().unwrap();
    let manifest = pose_manifest(tmp.path());
    let out_dir = tmp.path().join("out");
    let m = s(&manifest);
    let o = s(&out_dir);

    assert_eq!(code(&run(&[])), 1);
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["extract", "--manifest", m, "--out", o, "--kind", "nonsense"])), 1);
    assert_eq!(code(&run(&["extract", "--manifest", m, "--out", o, "--kind", "areas", "--n", "0"])), 1);
    assert_eq!(code(&run(&["extract", "--manifest", m, "--out", o, "--kind", "q-shape", "--lambda", "120"])), 1);
    assert_eq!(code(&run(&["bench", "--mesh", m, "--repeat", "0"])), 1);
    assert_eq!(code(&run(&["evaluate", "--metric", "euclidean"])), 1);
    assert_eq!(code(&run(&["evaluate", "--manifest", m])), 1);

    let missing = tmp.path().join("missing.json");
    assert_eq!(code(&run(&["extract", "--manifest", s(&missing), "--out", o, "--kind", "areas"])), 2);
    assert_eq!(code(&run(&["retrieve", "--features", s(&tmp.path().join("nothing")), "--query", "a"])), 2);

    let threads = bin()
        .env("MESHSPECTRA_THREADS", "zero")
        .args(["extract", "--manifest", m, "--out", o, "--kind", "areas"])
        .output()
        .unwrap();
    assert_eq!(code(&threads), 1);
    let threads = bin()
        .env("MESHSPECTRA_THREADS", "1")
        .args(["extract", "--manifest", m, "--out", o, "--kind", "areas"])
        .output()
        .unwrap();
    assert_eq!(code(&threads), 0, "{}", stderr(&threads));
}
