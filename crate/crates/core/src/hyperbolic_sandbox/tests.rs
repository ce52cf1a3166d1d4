use approx::assert_relative_eq;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;

fn pt(x: f64, y: f64) -> DiskPoint {
    DiskPoint::new(x, y).unwrap()
}

fn random_isometry(rng: &mut ChaCha8Rng) -> DiskIsometry {
    // product of a rotation about i, a dilation and a translation
    let th: f64 = rng.gen_range(0.0..std::f64::consts::PI);
    let (s, c) = th.sin_cos();
    let k: f64 = rng.gen_range(-1.5f64..1.5).exp();
    let u: f64 = rng.gen_range(-2.0..2.0);
    let rot = DiskIsometry::new(c, s, -s, c).unwrap();
    let dil = DiskIsometry::new(k.sqrt(), 0.0, 0.0, 1.0 / k.sqrt()).unwrap();
    let tr = DiskIsometry::new(1.0, u, 0.0, 1.0).unwrap();
    tr.compose(&dil).compose(&rot)
}

fn random_point(rng: &mut ChaCha8Rng) -> DiskPoint {
    pt(rng.gen_range(-3.0..3.0), rng.gen_range(0.05f64..5.0))
}

#[test]
fn distance_examples() {
    assert_eq!(dist(&pt(0.0, 1.0), &pt(0.0, 1.0)), 0.0);
    assert_relative_eq!(dist(&pt(0.0, 1.0), &pt(0.0, 2.0)), 2f64.ln(), epsilon = 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let (a, b) = (random_point(&mut rng), random_point(&mut rng));
        assert_eq!(dist(&a, &b), dist(&b, &a));
    }
    assert!(DiskPoint::new(0.0, 0.0).is_err());
}

#[test]
fn triangle_inequality() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10_000 {
        let (a, b, c) = (random_point(&mut rng), random_point(&mut rng), random_point(&mut rng));
        assert!(dist(&a, &c) <= dist(&a, &b) + dist(&b, &c) + 1e-12);
    }
}

#[test]
fn busemann_examples_and_invariance() {
    let inf = HorocyclePoint::new(Boundary::Infinity, 1.0).unwrap();
    assert_eq!(busemann_h2(&inf, &pt(0.0, 1.0)), 0.0);
    assert_relative_eq!(busemann_h2(&inf, &pt(0.3, 1f64.exp())), -1.0, epsilon = 1e-15);
    assert_relative_eq!(busemann_h2(&inf.rescaled(0.7), &pt(0.0, 1.0)), 0.7, epsilon = 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let g = random_isometry(&mut rng);
        let z = HorocyclePoint::new(Boundary::Finite(rng.gen_range(-2.0..2.0)), rng.gen_range(0.1..3.0)).unwrap();
        let x = random_point(&mut rng);
        let gz = g.apply_horocycle(&z);
        assert_relative_eq!(busemann_h2(&gz, &g.apply(&x)), busemann_h2(&z, &x), epsilon = 1e-9);
        // the transported boundary point is the image of the old one
        match (gz.xi, g.apply_boundary(z.xi)) {
            (Boundary::Finite(a), Boundary::Finite(b)) => assert!((a - b).abs() < 1e-9 * a.abs().max(1.0)),
            (a, b) => assert_eq!(a, b),
        }
    }
}

#[test]
fn axis_examples() {
    let cat = DiskIsometry::new(2.0, 1.0, 1.0, 1.0).unwrap();
    let ax = axis(&cat).unwrap();
    assert_relative_eq!(ax.translation_length, 1.9248473002384139, epsilon = 1e-14);
    let e = 1f64.exp();
    let diag = DiskIsometry::new(e, 0.0, 0.0, 1.0 / e).unwrap();
    let ax = axis(&diag).unwrap();
    assert_relative_eq!(ax.translation_length, 2.0, epsilon = 1e-14);
    assert_eq!(ax.attracting, Boundary::Infinity);
    assert_eq!(ax.repelling, Boundary::Finite(0.0));
    assert!(matches!(axis(&DiskIsometry::new(1.0, 1.0, 0.0, 1.0).unwrap()), Err(crate::Error::Argument(_))));
    // the normalised isometry is a pure dilation by e^L toward infinity
    let ax = axis(&cat).unwrap();
    let std = ax.to_standard.compose(&cat).compose(&ax.to_standard.inverse());
    assert!(std.c.abs() < 1e-12 && std.b.abs() < 1e-12);
    assert_relative_eq!((std.a / std.d).abs(), ax.translation_length.exp(), epsilon = 1e-12);
    // g moves axis points forward by L
    let p = ax.point_at(0.4);
    assert_relative_eq!(ax.arclength(&cat.apply(&p)), 0.4 + ax.translation_length, epsilon = 1e-12);
}

#[test]
fn projection_examples() {
    let ax = Axis::imaginary();
    let h = project_to_axis(&pt(1.0, 1.0), &ax);
    assert_relative_eq!(h.x, 0.0, epsilon = 1e-15);
    assert_relative_eq!(h.y, 2f64.sqrt(), epsilon = 1e-15);
    let on = pt(0.0, 3.0);
    let p = project_to_axis(&on, &ax);
    assert_relative_eq!(p.y, 3.0, epsilon = 1e-15);
    let x = pt(1.0, 1.0);
    for k in 0..50 {
        let y = ax.point_at(-5.0 + 0.2 * k as f64);
        assert!(dist(&x, &y) >= dist(&x, &h) - 1e-15);
    }
}

#[test]
fn projection_is_one_lipschitz() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let ax = axis(&DiskIsometry::new(2.0, 1.0, 1.0, 1.0).unwrap()).unwrap();
    for _ in 0..1000 {
        let (a, b) = (random_point(&mut rng), random_point(&mut rng));
        let (ha, hb) = (project_to_axis(&a, &ax), project_to_axis(&b, &ax));
        assert!(dist(&ha, &hb) <= dist(&a, &b) + 1e-12);
    }
}

fn vshape_samples() -> Vec<f64> {
    (0..200).map(|k| -5.0 + 10.0 * k as f64 / 199.0).collect()
}

#[test]
fn v_shape_examples() {
    let ax = Axis::imaginary();
    let r = v_shape_check(&pt(0.0, 2.0), &ax, &vshape_samples());
    assert!(r.c_emp < 1e-12);
    let r = v_shape_check(&pt(1.0, 1.0), &ax, &vshape_samples());
    // independent high-precision evaluation
    assert_relative_eq!(r.c_emp, 0.5347886466927196, epsilon = 1e-12);
    assert!(r.c_emp <= 2f64.ln() + 0.2);
    let inf = HorocyclePoint::new(Boundary::Infinity, 1.0).unwrap();
    let r = v_shape_busemann_check(&inf, &ax, &vshape_samples()).unwrap();
    assert!(r.c_emp < 1e-9);
    let one = HorocyclePoint::new(Boundary::Finite(1.0), 1.0).unwrap();
    let r = v_shape_busemann_check(&one, &ax, &vshape_samples()).unwrap();
    assert!(r.foot.abs() < 1e-12);
    assert!(r.c_emp <= 2f64.ln() + 1e-12);
}

#[test]
fn ray_convergence_examples() {
    let inf = HorocyclePoint::new(Boundary::Infinity, 1.0).unwrap();
    let grid: Vec<f64> = (1..=8).map(f64::from).collect();
    let r = ray_convergence_check(&pt(0.0, 1.0), &pt(1.0, 1.0), &inf, &grid).unwrap();
    let slope = r.slope.unwrap();
    assert!((-1.1..=-0.9).contains(&slope), "{slope}");
    assert!(r.decreasing);
    let r = ray_convergence_check(&pt(0.0, 1.0), &pt(0.0, 1.0), &inf, &grid).unwrap();
    assert!(r.distances.iter().all(|&d| d == 0.0));
    assert!(r.slope.is_none());
    // a finite boundary point and a starting point off the horocycle
    let z = HorocyclePoint::new(Boundary::Finite(0.5), 2.0).unwrap();
    let r = ray_convergence_check(&pt(-1.0, 0.5), &pt(2.0, 3.0), &z, &grid).unwrap();
    assert_relative_eq!(busemann_h2(&z, &r.y_adjusted), busemann_h2(&z, &pt(-1.0, 0.5)), epsilon = 1e-9);
    assert!((-1.1..=-0.9).contains(&r.slope.unwrap()));
}

#[test]
fn busemann_vs_distance_examples() {
    let ax = Axis::imaginary();
    let one = HorocyclePoint::new(Boundary::Finite(1.0), 1.0).unwrap();
    let (x, y) = (pt(0.0, 1.0), pt(0.0, 0.5f64.exp()));
    let grid = [0.1, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
    let r = busemann_vs_distance_check(&one, &x, &y, &ax, &grid, 0.05).unwrap();
    let last = r.rows.last().unwrap();
    assert_relative_eq!(last.distance_to_axis, 8.0, epsilon = 1e-9);
    assert_relative_eq!(last.residual, 2.403214352051884e-08, max_relative = 1e-5);
    assert_relative_eq!(r.rows[3].residual, 0.003960427692681895, max_relative = 1e-9);
    assert!(last.residual < 0.01);
    assert!(r.monotone);
    let th = r.threshold.unwrap();
    assert!(r.rows.iter().filter(|row| row.distance_to_axis >= th).all(|row| row.residual < 0.05));
}

#[test]
fn ray_endpoints() {
    assert_eq!(ray_endpoint(&pt(0.0, 1.0), &pt(0.0, 2.0)), Boundary::Infinity);
    assert_eq!(ray_endpoint(&pt(0.0, 2.0), &pt(0.0, 1.0)), Boundary::Finite(0.0));
    // the unit circle through i and (0.6, 0.8) ends at 1
    match ray_endpoint(&pt(0.0, 1.0), &pt(0.6, 0.8)) {
        Boundary::Finite(x) => assert_relative_eq!(x, 1.0, epsilon = 1e-14),
        b => panic!("{b:?}"),
    }
}

proptest! {
    #[test]
    fn mobius_equivariance(seed in 0u64..10_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_isometry(&mut rng);
        let (a, b) = (random_point(&mut rng), random_point(&mut rng));
        let z = HorocyclePoint::new(Boundary::Finite(rng.gen_range(-2.0..2.0)), 1.3).unwrap();
        prop_assert!((dist(&g.apply(&a), &g.apply(&b)) - dist(&a, &b)).abs() < 1e-9);
        let gz = g.apply_horocycle(&z);
        let before = busemann_cocycle(&z, &a, &b);
        let after = busemann_cocycle(&gz, &g.apply(&a), &g.apply(&b));
        prop_assert!((before - after).abs() < 1e-9);
    }
}
