use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::flat_surface::library::*;

fn rotated_torus() -> FlatSurface {
    square_torus().rotate(0.3)
}

fn random_weight(t: &TrainTrack, rng: &mut ChaCha8Rng) -> Weight {
    let basis = t.weight_space_basis();
    let mut w = vec![0.0; t.num_branches()];
    for b in &basis {
        let c: f64 = rng.gen_range(-1.0..1.0);
        for (x, y) in w.iter_mut().zip(b) {
            *x += c * y;
        }
    }
    w
}

#[test]
fn torus_track_is_trivalent() {
    let (t, m) = adapted_track(&rotated_torus()).unwrap();
    assert_eq!(t.num_switches(), 2);
    assert_eq!(t.num_branches(), 3);
    assert!(t.check_switch(&m).unwrap());
    let (c, s) = (0.3f64.cos(), 0.3f64.sin());
    // edges are the rotated 1, i and -(1 + i)
    assert!((m[0] - c).abs() < 1e-15);
    assert!((m[1] - s).abs() < 1e-15);
    assert!((m[2] - (c - s)).abs() < 1e-15);
}

#[test]
fn switch_condition_examples() {
    let (t, _) = adapted_track(&rotated_torus()).unwrap();
    assert!(t.check_switch(&[0.0; 3]).unwrap());
    let [a, b, c] = t.switch_branches(0);
    let mut w = vec![0.0; 3];
    w[a] = 2.0;
    w[b] = 1.0;
    w[c] = 1.0;
    assert!(t.check_switch(&w).unwrap());
    assert!(!t.check_switch(&[1.0, 1.0, 1.0]).unwrap());
    assert!(matches!(t.check_switch(&[1.0]), Err(Error::Structural(_))));
}

#[test]
fn vertical_side_is_rejected() {
    assert!(matches!(adapted_track(&square_torus()), Err(Error::DegenerateFoliation(_))));
}

#[test]
fn weights_scale_under_flow() {
    let s = regular_octagon().rotate(0.1);
    let (_, m) = adapted_track(&s).unwrap();
    let (_, mt) = adapted_track(&s.geodesic_flow(0.7)).unwrap();
    for (a, b) in m.iter().zip(&mt) {
        assert!((b - a * 0.7f64.exp()).abs() < 1e-12 * b);
    }
}

#[test]
fn differential_weights() {
    let s = regular_octagon().rotate(0.1);
    let (t, m) = adapted_track(&s).unwrap();
    assert_eq!(t.num_branches(), 9);
    assert!(m.iter().all(|&x| x > 0.0));
    let h = weight_from_differential(&s, Direction::Horizontal).unwrap();
    for (a, b) in h.iter().zip(&m) {
        assert_eq!(*a, 0.5 * b);
    }
    let eta = weight_from_differential(&s, Direction::VerticalImaginary).unwrap();
    assert!(t.check_switch(&eta).unwrap());
    let tor = weight_from_differential(&rotated_torus(), Direction::VerticalImaginary).unwrap();
    let (c, sn) = (0.3f64.cos(), 0.3f64.sin());
    // edge 1 rotated: Re > 0, Im = sin; edge i rotated: (-sin, cos), Re < 0
    assert!((tor[0] + 0.5 * sn).abs() < 1e-15);
    assert!((tor[1] - 0.5 * c).abs() < 1e-15);
}

#[test]
fn form_is_antisymmetric_and_bilinear() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s = random_q1111(&mut rng, 0.05).unwrap().rotate(0.2);
    let (t, _) = adapted_track(&s).unwrap();
    for _ in 0..20 {
        let (w1, w2, w3) = (random_weight(&t, &mut rng), random_weight(&t, &mut rng), random_weight(&t, &mut rng));
        assert!(t.thurston_form(&w1, &w1).unwrap().abs() < 1e-12);
        let f12 = t.thurston_form(&w1, &w2).unwrap();
        assert!((f12 + t.thurston_form(&w2, &w1).unwrap()).abs() < 1e-12);
        let sum: Weight = w2.iter().zip(&w3).map(|(a, b)| 2.0 * a + b).collect();
        let lhs = t.thurston_form(&w1, &sum).unwrap();
        let rhs = 2.0 * f12 + t.thurston_form(&w1, &w3).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }
    let bad = vec![1.0; t.num_branches()];
    assert!(matches!(t.thurston_form(&bad, &bad), Err(Error::Argument(_))));
}

#[test]
fn split_preserves_form_and_positivity() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = random_q1111(&mut rng, 0.05).unwrap().rotate(0.4);
    let (t, m) = adapted_track(&s).unwrap();
    let large = t.large_branches();
    assert!(!large.is_empty());
    for &b in &large {
        let (t2, m2) = t.split(&m, b).unwrap();
        assert!(m2.iter().all(|&x| x > 0.0));
        assert!(t2.check_switch(&m2).unwrap());
        let push = t.split_weight_map(&m, b).unwrap();
        let (w1, w2) = (random_weight(&t, &mut rng), random_weight(&t, &mut rng));
        let (p1, p2) = (push(&w1), push(&w2));
        let before = t.thurston_form(&w1, &w2).unwrap();
        let after = t2.thurston_form(&p1, &p2).unwrap();
        assert!((before - after).abs() < 1e-12, "{before} vs {after}");
    }
}

#[test]
fn split_rejects_small_branch_and_ties() {
    let (t, m) = adapted_track(&rotated_torus()).unwrap();
    let small = (0..3).find(|&b| !t.is_large(b)).unwrap();
    assert!(matches!(t.split(&m, small), Err(Error::Argument(_))));
    let big = t.large_branches()[0];
    let tie = vec![2.0, 1.0, 1.0];
    let [a, _, _] = t.switch_branches(0);
    if a == big && t.check_switch(&tie).unwrap_or(false) {
        assert!(matches!(t.split(&tie, big), Err(Error::DegenerateSplit(_))));
    }
}

#[test]
fn flip_split_square_commutes() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut checked = 0;
    for _ in 0..10 {
        let s = random_q1111(&mut rng, 0.1).unwrap().rotate(rng.gen_range(0.1..1.4));
        let (t, m) = adapted_track(&s).unwrap();
        let ids = s.edge_ids();
        for (slot, &b) in ids.iter().enumerate() {
            if slot > s.partner(slot) || !t.is_large(b) {
                continue;
            }
            let Ok(f) = s.flip(slot) else { continue };
            let (tf, mf) = adapted_track(&f).unwrap();
            let (ts, ms) = t.split(&m, b).unwrap();
            assert_eq!(tf, ts);
            for (x, y) in mf.iter().zip(&ms) {
                assert!((x - y).abs() < 1e-12);
            }
            checked += 1;
        }
    }
    assert!(checked > 10);
}

#[test]
fn reconstruction_round_trip() {
    let s = regular_octagon().rotate(0.25);
    let (t, m) = adapted_track(&s).unwrap();
    let eta = weight_from_differential(&s, Direction::VerticalImaginary).unwrap();
    let back = t.reconstruct_surface(&m, &eta).unwrap();
    for (a, b) in back.vectors().iter().zip(s.vectors()) {
        assert!((a - b).norm() < 1e-12);
    }
    assert_eq!(back.triangles(), s.triangles());
}

#[test]
fn reconstruction_of_perturbed_eta() {
    let s = regular_octagon().rotate(0.25);
    let (t, m) = adapted_track(&s).unwrap();
    let mut eta = weight_from_differential(&s, Direction::VerticalImaginary).unwrap();
    let basis = t.weight_space_basis();
    let k = (0..basis[0].len()).max_by(|&i, &j| basis[0][i].abs().total_cmp(&basis[0][j].abs())).unwrap();
    let c = 1e-3 / basis[0][k];
    for (x, y) in eta.iter_mut().zip(&basis[0]) {
        *x += c * y;
    }
    let f = t.reconstruct_surface(&m, &eta).unwrap();
    assert!(!f.same_geometry(&s, 1e-6));
    let (tf, mf) = adapted_track(&f).unwrap();
    assert_eq!(tf, t);
    let ef = weight_from_differential(&f, Direction::VerticalImaginary).unwrap();
    for i in 0..m.len() {
        assert!((mf[i] - m[i]).abs() < 1e-12);
        assert!((ef[i] - eta[i]).abs() < 1e-12);
    }
    let mut broken = eta.clone();
    broken[0] += 0.1;
    assert!(matches!(t.reconstruct_surface(&m, &broken), Err(Error::Reconstruction(_))));
}

#[test]
fn common_refinement_paths() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let s = random_octagon(&mut rng, 0.1).unwrap().rotate(0.2);
    let r = common_refinement(&s, &s).unwrap();
    assert_eq!(r.path_from_first, r.path_from_second);
    let mut a = s.clone();
    let mut b = s.clone();
    for _ in 0..6 {
        let k = rng.gen_range(0..a.num_slots());
        if let Ok(x) = a.flip(k) {
            a = x;
        }
        let k = rng.gen_range(0..b.num_slots());
        if let Ok(x) = b.flip(k) {
            b = x;
        }
    }
    let r = common_refinement(&a, &b).unwrap();
    assert!(r.canonical.same_geometry(&b.delaunay().unwrap(), 1e-9));
    assert!(r.track.check_switch(&r.weight).unwrap());
    assert_eq!(r.splits_from_first.len(), r.path_from_first.len());
    let other = random_octagon(&mut rng, 0.1).unwrap();
    assert!(matches!(common_refinement(&s, &other), Err(Error::Mismatch(_))));
}

#[test]
fn track_file_round_trip() {
    let (t, m) = adapted_track(&rotated_torus()).unwrap();
    let f = TrackFile::new(&t, Some(m.clone()));
    let back = TrackFile::from_json(&f.to_json().unwrap()).unwrap();
    assert_eq!(back, f);
    assert!(back.track().unwrap().check_switch(&m).unwrap());
}
