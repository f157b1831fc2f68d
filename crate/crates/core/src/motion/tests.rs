use approx::assert_relative_eq;
use nalgebra::{Rotation3, Vector3};
use proptest::prelude::*;

use super::*;
use crate::harmonics::GridTag;
use crate::synth::{self, seeded_rng};

fn raw(values: Vec<f64>) -> SphericalSamples {
    SphericalSamples::new(GridTag::Raw { n: 1 }, values).unwrap()
}

fn stream(values: &[f64]) -> Vec<(f64, SphericalSamples)> {
    values.iter().enumerate().map(|(i, v)| (i as f64, raw(vec![*v]))).collect()
}

fn curve(points: Vec<(f64, Vec<f64>)>) -> MotionCurve {
    MotionCurve::new(DescriptorKind::Areas, DescriptorParams { n: 1, lambda: None }, points).unwrap()
}

#[test]
fn filter_radius_zero_is_identity() {
    let s = stream(&[1.0, 5.0, 2.0]);
    let f = temporal_filter(&s, 0).unwrap();
    assert_eq!(f, s);
}

#[test]
fn filter_averages_window() {
    let f = temporal_filter(&stream(&[0.0, 3.0, 6.0]), 1).unwrap();
    assert_eq!(f.len(), 1);
    assert_eq!(f[0].0, 1.0);
    assert_eq!(f[0].1.values(), &[3.0]);
    let constant = temporal_filter(&stream(&[4.0; 7]), 2).unwrap();
    assert_eq!(constant.len(), 3);
    assert!(constant.iter().all(|(_, s)| s.values() == [4.0]));
}

#[test]
fn filter_errors() {
    assert!(matches!(
        temporal_filter(&stream(&[1.0, 2.0]), 1),
        Err(Error::WindowTooLarge { radius: 1, needed: 3, len: 2 })
    ));
    let mut s = stream(&[1.0, 2.0, 3.0]);
    s[1].1 = SphericalSamples::new(GridTag::Raw { n: 2 }, vec![0.0; 4]).unwrap();
    assert!(matches!(temporal_filter(&s, 1), Err(Error::GridMismatch)));
}

#[test]
fn sequence_validation() {
    let m = synth::unit_cube();
    assert!(matches!(MeshSequence::new(vec![]), Err(Error::EmptyCurve)));
    assert!(matches!(
        MeshSequence::new(vec![(m.clone(), 0.0), (m.clone(), 0.0)]),
        Err(Error::NonMonotonicTime)
    ));
    let seq = MeshSequence::at_rate(vec![m.clone(), m.clone()], DEFAULT_FPS).unwrap();
    assert_eq!(seq.frames()[1].1, 0.04);
    assert!(MeshSequence::at_rate(vec![m], 0.0).is_err());
}

#[test]
fn static_sequence_gives_constant_curve() {
    let mesh = synth::articulated_figure(&synth::Pose::STANDING, 1);
    let seq = MeshSequence::at_rate(vec![mesh.clone(); 5], DEFAULT_FPS).unwrap();
    let ex = Extractor::new(8);
    let single = ex.extract(&mesh, DescriptorKind::ShapeInvariant).unwrap();
    let c = motion_curve(&seq, DescriptorKind::ShapeInvariant, &ex, 1).unwrap();
    assert_eq!(c.len(), 3);
    for v in c.vectors() {
        for (a, b) in v.iter().zip(&single.values) {
            assert_relative_eq!(*a, *b, max_relative = 1e-12);
        }
    }
}

#[test]
fn unfiltered_curve_has_one_point_per_frame() {
    let mut rng = seeded_rng(4);
    let meshes: Vec<_> = (0..4).map(|_| synth::random_convex_polytope(&mut rng)).collect();
    let seq = MeshSequence::at_rate(meshes, DEFAULT_FPS).unwrap();
    let c = motion_curve(&seq, DescriptorKind::ShapeInvariant, &Extractor::new(8), 0).unwrap();
    assert_eq!(c.len(), 4);
    assert_eq!(c.dim(), 24);
    assert!(matches!(
        motion_curve(&seq, DescriptorKind::Areas, &Extractor::new(8), 2),
        Err(Error::WindowTooLarge { .. })
    ));
}

#[test]
fn filtering_precedes_descriptor() {
    let mut rng = seeded_rng(9);
    let meshes: Vec<_> = (0..3).map(|_| synth::random_convex_polytope(&mut rng)).collect();
    let ex = Extractor::new(8);
    let kind = DescriptorKind::ShapeInvariant;
    let seq = MeshSequence::at_rate(meshes.clone(), DEFAULT_FPS).unwrap();
    let filtered = motion_curve(&seq, kind, &ex, 1).unwrap();
    let mut averaged = vec![0.0; kind.len(8)];
    for m in &meshes {
        let d = ex.extract(m, kind).unwrap();
        for (acc, v) in averaged.iter_mut().zip(&d.values) {
            *acc += v / 3.0;
        }
    }
    let gap = euclidean(&filtered.points()[0].1, &averaged);
    assert!(gap > 1e-6, "{gap}");
}

#[test]
fn raw_kinds_commute_with_filter() {
    let mut rng = seeded_rng(10);
    let meshes: Vec<_> = (0..3).map(|_| synth::random_convex_polytope(&mut rng)).collect();
    let ex = Extractor::new(4);
    let kind = DescriptorKind::Areas;
    let seq = MeshSequence::at_rate(meshes.clone(), DEFAULT_FPS).unwrap();
    let filtered = motion_curve(&seq, kind, &ex, 1).unwrap();
    let mut averaged = vec![0.0; kind.len(4)];
    for m in &meshes {
        for (acc, v) in averaged.iter_mut().zip(ex.extract(m, kind).unwrap().values) {
            *acc += v;
        }
    }
    for (a, b) in filtered.points()[0].1.iter().zip(&averaged) {
        assert_relative_eq!(*a, b / 3.0, max_relative = 1e-12);
    }
}

#[test]
fn evaluate_interpolates() {
    let c = curve(vec![(0.0, vec![0.0, 0.0]), (1.0, vec![2.0, 4.0]), (3.0, vec![0.0, 0.0])]);
    assert_eq!(evaluate_curve(&c, 0.25).unwrap(), vec![0.5, 1.0]);
    assert_eq!(evaluate_curve(&c, 1.0).unwrap(), vec![2.0, 4.0]);
    assert_eq!(evaluate_curve(&c, 0.0).unwrap(), vec![0.0, 0.0]);
    assert_eq!(evaluate_curve(&c, 2.0).unwrap(), vec![1.0, 2.0]);
    assert!(matches!(evaluate_curve(&c, 3.5), Err(Error::OutOfRange { .. })));
    assert!(matches!(evaluate_curve(&c, -0.1), Err(Error::OutOfRange { .. })));
}

#[test]
fn curve_validation() {
    let p = DescriptorParams { n: 1, lambda: None };
    assert!(matches!(MotionCurve::new(DescriptorKind::Areas, p, vec![]), Err(Error::EmptyCurve)));
    assert!(matches!(
        MotionCurve::new(DescriptorKind::Areas, p, vec![(1.0, vec![0.0]), (0.5, vec![0.0])]),
        Err(Error::NonMonotonicTime)
    ));
    assert!(MotionCurve::new(DescriptorKind::Areas, p, vec![(0.0, vec![0.0]), (1.0, vec![0.0, 1.0])]).is_err());
}

fn scalars(v: &[f64]) -> Vec<Vec<f64>> {
    v.iter().map(|x| vec![*x]).collect()
}

#[test]
fn dtw_examples() {
    let opts = DtwOptions::default();
    assert_eq!(dtw(&scalars(&[0.0]), &scalars(&[0.0, 0.0, 0.0]), &opts), 0.0);
    assert_eq!(dtw(&scalars(&[0.0, 1.0]), &scalars(&[0.0, 2.0]), &opts), 1.0);
    assert_eq!(dtw(&scalars(&[0.0, 1.0, 2.0]), &scalars(&[0.0, 1.0, 2.0]), &opts), 0.0);
    let norm = DtwOptions { window: None, normalize: true };
    assert_eq!(dtw(&scalars(&[0.0, 1.0]), &scalars(&[0.0, 2.0]), &norm), 0.25);
}

/// Minimum over every monotone lattice path, by exhaustive recursion.
fn dtw_brute(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    fn walk(a: &[Vec<f64>], b: &[Vec<f64>], i: usize, j: usize) -> f64 {
        let here = euclidean(&a[i], &b[j]);
        if i + 1 == a.len() && j + 1 == b.len() {
            return here;
        }
        let mut best = f64::INFINITY;
        if i + 1 < a.len() {
            best = best.min(walk(a, b, i + 1, j));
        }
        if j + 1 < b.len() {
            best = best.min(walk(a, b, i, j + 1));
        }
        if i + 1 < a.len() && j + 1 < b.len() {
            best = best.min(walk(a, b, i + 1, j + 1));
        }
        here + best
    }
    walk(a, b, 0, 0)
}

#[test]
fn dtw_three_by_three_matches_enumeration() {
    let a = scalars(&[0.0, 2.0, 1.0]);
    let b = scalars(&[1.0, 1.0, 3.0]);
    assert_relative_eq!(dtw(&a, &b, &DtwOptions::default()), dtw_brute(&a, &b), epsilon = 1e-12);
}

#[test]
fn dtw_band_is_widened() {
    let a = scalars(&[0.0, 1.0, 2.0, 3.0, 4.0]);
    let b = scalars(&[0.0, 4.0]);
    let banded = dtw(&a, &b, &DtwOptions { window: Some(0), normalize: false });
    assert!(banded.is_finite());
    assert!(banded >= dtw(&a, &b, &DtwOptions::default()));
}

#[test]
fn dtw_curve_checks() {
    let a = curve(vec![(0.0, vec![0.0]), (1.0, vec![1.0])]);
    assert_eq!(dtw_distance(&a, &a).unwrap(), 0.0);
    let other = MotionCurve::new(DescriptorKind::Breadths, a.params(), a.points().to_vec()).unwrap();
    assert!(matches!(dtw_distance(&a, &other), Err(Error::KindMismatch(_))));
}

fn arb_seq() -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 1..7)
}

proptest! {
    #[test]
    fn dtw_properties(a in arb_seq(), b in arb_seq()) {
        let opts = DtwOptions::default();
        let ab = dtw(&a, &b, &opts);
        prop_assert_eq!(dtw(&a, &a, &opts), 0.0);
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - dtw(&b, &a, &opts)).abs() <= 1e-12 * ab.max(1.0));
        prop_assert!((ab - dtw_brute(&a, &b)).abs() <= 1e-9 * ab.max(1.0));
    }

    #[test]
    fn appending_a_far_frame_costs_more(a in arb_seq(), b in arb_seq()) {
        let opts = DtwOptions::default();
        let mut longer = a.clone();
        longer.push(vec![1e3, 1e3]);
        prop_assert!(dtw(&longer, &b, &opts) > dtw(&a, &b, &opts));
    }
}

#[test]
fn translation_commutes_with_curve() {
    let mut rng = seeded_rng(12);
    let meshes: Vec<_> = (0..3).map(|_| synth::random_convex_polytope(&mut rng)).collect();
    let shift = Vector3::new(5.0, -1.0, 2.0);
    let moved: Vec<_> = meshes.iter().map(|m| m.translated(&shift)).collect();
    let ex = Extractor::new(6);
    for kind in [DescriptorKind::Breadths, DescriptorKind::ShapeInvariant] {
        let a = motion_curve(&MeshSequence::at_rate(meshes.clone(), 25.0).unwrap(), kind, &ex, 1).unwrap();
        let b = motion_curve(&MeshSequence::at_rate(moved.clone(), 25.0).unwrap(), kind, &ex, 1).unwrap();
        for (x, y) in a.vectors().zip(b.vectors()) {
            assert!(euclidean(x, y) <= 1e-9 * x.iter().map(|v| v.abs()).sum::<f64>().max(1.0), "{kind}");
        }
    }
}

#[test]
fn spinning_body_is_static_only_for_invariant_kinds() {
    let mesh = synth::random_convex_polytope(&mut seeded_rng(13));
    let frames: Vec<_> = (0..5)
        .map(|i| mesh.rotated(&Rotation3::from_axis_angle(&Vector3::y_axis(), 0.3 * i as f64)))
        .collect();
    let seq = MeshSequence::at_rate(frames, DEFAULT_FPS).unwrap();
    let ex = Extractor::new(8);
    let inv = motion_curve(&seq, DescriptorKind::ShapeInvariant, &ex, 0).unwrap();
    let first = &inv.points()[0].1;
    for v in inv.vectors() {
        for (a, b) in v.iter().zip(first) {
            assert!((a - b).abs() <= 1e-4 * a.abs().max(b.abs()), "{a} vs {b}");
        }
    }
    let raw = motion_curve(&seq, DescriptorKind::Breadths, &ex, 0).unwrap();
    assert!(euclidean(&raw.points()[0].1, &raw.points()[4].1) > 1e-3);
}
