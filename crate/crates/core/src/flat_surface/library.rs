//! Ready-made surfaces used throughout the crate and its tests.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;

use super::FlatSurface;
use crate::{Error, Result, C64};

/// Flat torus spanned by `v1` and `v2` (with `cross(v1, v2) > 0`), cut
/// along the diagonal `v1 + v2`.
///
/// Slots `0, 1, 2` carry `v1, v2, -(v1 + v2)`; slots `3, 4, 5` carry their
/// negatives.
pub fn torus(v1: C64, v2: C64) -> Result<FlatSurface> {
    FlatSurface::new(
        1,
        vec![[0, 1, 2], [3, 4, 5]],
        &[(0, 3, 1), (1, 4, 1), (2, 5, 1)],
        vec![v1, v2, -(v1 + v2), -v1, -v2, v1 + v2],
    )
}

/// The unit square torus.
pub fn square_torus() -> FlatSurface {
    torus(C64::new(1.0, 0.0), C64::new(0.0, 1.0)).expect("unit square torus is valid")
}

/// Torus of modulus `tau` in the upper half plane, rotated by the unit
/// complex number `alpha`. Slot 0 carries `alpha` and slot 1 `alpha tau`.
pub fn torus_tau(tau: C64, alpha: C64) -> Result<FlatSurface> {
    if tau.im <= 0.0 {
        return Err(Error::Domain(format!("modulus {tau} is not in the upper half plane")));
    }
    torus(alpha, alpha * tau)
}

/// Genus two surface obtained from a centrally symmetric octagon with
/// sides `s0..s3, -s0..-s3`, fan-triangulated from its first vertex.
///
/// Six triangles and nine edges; the single vertex has angle `6 pi`.
pub fn octagon_from_sides(sides: [C64; 4]) -> Result<FlatSurface> {
    let s: Vec<C64> = (0..8).map(|k| if k < 4 { sides[k] } else { -sides[k - 4] }).collect();
    // vertices P0 = 0, P_{k+1} = P_k + s_k
    let mut p = [C64::new(0.0, 0.0); 8];
    for k in 1..8 {
        p[k] = p[k - 1] + s[k - 1];
    }
    let mut triangles = Vec::with_capacity(6);
    let mut vectors = Vec::with_capacity(18);
    for k in 1..=6 {
        let base = 3 * (k - 1);
        triangles.push([base, base + 1, base + 2]);
        vectors.extend([p[k], s[k], -p[k + 1]]);
    }
    let mut pairing = vec![(0, 10, 1), (1, 13, 1), (4, 16, 1), (7, 17, 1)];
    for k in 2..=6 {
        pairing.push((3 * (k - 2) + 2, 3 * (k - 1), 1));
    }
    FlatSurface::new(2, triangles, &pairing, vectors)
}

/// Regular octagon of circumradius one with opposite sides glued.
pub fn regular_octagon() -> FlatSurface {
    let vertex = |k: usize| C64::from_polar(1.0, k as f64 * PI / 4.0);
    let sides = [0, 1, 2, 3].map(|k| vertex(k + 1) - vertex(k));
    octagon_from_sides(sides).expect("regular octagon is valid")
}

/// Octagon surface with each side of the regular octagon moved by a
/// uniform random offset of size at most `eps`.
pub fn random_octagon<R: Rng + ?Sized>(rng: &mut R, eps: f64) -> Result<FlatSurface> {
    let vertex = |k: usize| C64::from_polar(1.0, k as f64 * PI / 4.0);
    let sides = [0, 1, 2, 3].map(|k| {
        let r = eps * rng.gen::<f64>().sqrt();
        let th = rng.gen::<f64>() * 2.0 * PI;
        vertex(k + 1) - vertex(k) + C64::from_polar(r, th)
    });
    octagon_from_sides(sides)
}

/// Pairs of `(square, side)` for a six-square surface with four simple
/// zeros. Sides are numbered bottom, right, top, left.
const SQUARE_GLUING: [((usize, usize), (usize, usize)); 12] = [
    ((0, 0), (3, 0)),
    ((0, 1), (4, 3)),
    ((0, 2), (5, 0)),
    ((0, 3), (3, 3)),
    ((1, 0), (2, 0)),
    ((1, 2), (4, 2)),
    ((2, 1), (5, 1)),
    ((2, 2), (4, 0)),
    ((2, 3), (5, 3)),
    ((3, 1), (1, 3)),
    ((3, 2), (5, 2)),
    ((4, 1), (1, 1)),
];

/// A genus two half-translation surface made of six unit squares, with
/// four cone points of angle `3 pi`. Every square is cut by its diagonal
/// from bottom-left to top-right.
pub fn square_tiled_q1111() -> FlatSurface {
    let side_slot = |q: usize, side: usize| 6 * q + [0, 1, 4, 5][side];
    let mut triangles = Vec::new();
    let mut vectors = Vec::new();
    let mut pairing = Vec::new();
    for q in 0..6 {
        triangles.push([6 * q, 6 * q + 1, 6 * q + 2]);
        triangles.push([6 * q + 3, 6 * q + 4, 6 * q + 5]);
        vectors.extend([
            C64::new(1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(-1.0, -1.0),
            C64::new(1.0, 1.0),
            C64::new(-1.0, 0.0),
            C64::new(0.0, -1.0),
        ]);
        pairing.push((6 * q + 2, 6 * q + 3, 1));
    }
    for &((qa, sa), (qb, sb)) in SQUARE_GLUING.iter() {
        let (a, b) = (side_slot(qa, sa), side_slot(qb, sb));
        // v(b) = -sign v(a)
        let sign = if (vectors[a] + vectors[b]).norm() < 1e-12 { 1 } else { -1 };
        pairing.push((a, b, sign));
    }
    FlatSurface::new(2, triangles, &pairing, vectors).expect("square-tiled surface is valid")
}

/// Real basis of the period space: each vector assigns a real number to
/// every edge id so that all triangles close. Complex combinations of the
/// basis are exactly the admissible edge deformations.
pub fn period_basis(surface: &FlatSurface) -> Vec<Vec<f64>> {
    let pairs = surface.pairs();
    let ids = surface.edge_ids();
    let ne = pairs.len();
    let nt = surface.num_triangles();
    // coefficient of edge e in slot s: +1 on the first slot of the pair,
    // -sign on the second
    let coeff = |s: usize| -> f64 {
        let (a, _, sg) = pairs[ids[s]];
        if s == a {
            1.0
        } else {
            -f64::from(sg)
        }
    };
    let mut m = DMatrix::<f64>::zeros(nt.max(ne), ne);
    for t in 0..nt {
        for s in surface.triangle(t) {
            m[(t, ids[s])] += coeff(s);
        }
    }
    let svd = m.svd(false, true);
    let v_t = svd.v_t.expect("requested right singular vectors");
    let smax = svd.singular_values.max();
    (0..ne)
        .filter(|&i| svd.singular_values[i] <= 1e-10 * smax.max(1.0))
        .map(|i| v_t.row(i).iter().copied().collect())
        .collect()
}

/// Expands per-edge values into per-slot vectors.
pub fn edge_to_slot(surface: &FlatSurface, per_edge: &[C64]) -> Vec<C64> {
    let pairs = surface.pairs();
    let mut out = vec![C64::new(0.0, 0.0); surface.num_slots()];
    for (e, &(a, b, sg)) in pairs.iter().enumerate() {
        out[a] = per_edge[e];
        out[b] = -f64::from(sg) * per_edge[e];
    }
    out
}

/// Moves a surface by a random period deformation of relative size `eps`.
pub fn perturb<R: Rng + ?Sized>(surface: &FlatSurface, rng: &mut R, eps: f64) -> Result<FlatSurface> {
    let basis = period_basis(surface);
    let scale = surface.max_edge_length();
    let mut per_edge = vec![C64::new(0.0, 0.0); surface.num_edges()];
    for b in &basis {
        let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * (eps * scale);
        for (pe, &x) in per_edge.iter_mut().zip(b) {
            *pe += c * x;
        }
    }
    let delta = edge_to_slot(surface, &per_edge);
    let vectors = surface.vectors().iter().zip(&delta).map(|(v, d)| v + d).collect();
    surface.with_vectors(vectors)
}

/// A random surface with four simple zeros near the square-tiled one.
pub fn random_q1111<R: Rng + ?Sized>(rng: &mut R, eps: f64) -> Result<FlatSurface> {
    perturb(&square_tiled_q1111(), rng, eps)
}

/// Random genus two surface: even instances near the regular octagon,
/// odd ones near the six-square surface with four simple zeros.
pub fn random_genus_two<R: Rng>(rng: &mut R, i: usize) -> Result<FlatSurface> {
    let s = if i.is_multiple_of(2) { random_octagon(rng, 0.1)? } else { random_q1111(rng, 0.1)? };
    Ok(s.rotate(rng.gen_range(0.05..1.5)))
}
