//! Triangulated half-translation surfaces stored in period coordinates.
//!
//! A surface is a set of triangles whose sides are *slots*. Slot `s` of a
//! triangle carries the edge vector `vector(s)`; the three slots of a
//! triangle are listed counterclockwise and their vectors sum to zero.
//! Slots are glued in pairs. A pair carries a sign: `+1` for a translation
//! gluing (`v(s') = -v(s)`) and `-1` for a half-translation gluing
//! (`v(s') = v(s)`), so squares of abelian differentials and genuine
//! quadratic differentials share one representation.

mod io;
pub mod library;
mod saddle;

use std::f64::consts::PI;

pub use io::SurfaceFile;
pub use saddle::SaddleConnection;

use crate::{cross, dot, Error, Mat2, Result, C64};

/// Relative tolerance for triangle closure and pairing consistency.
pub const CLOSURE_TOL: f64 = 1e-11;
/// Relative tolerance below which a holonomy counts as vertical.
pub const VERTICAL_TOL: f64 = 1e-9;
/// Determinant tolerance accepted by [`FlatSurface::apply_matrix`].
pub const DET_TOL: f64 = 1e-12;

/// Cone point of the flat metric.
#[derive(Clone, Debug, PartialEq)]
pub struct ConeData {
    pub vertex: usize,
    /// Total angle in radians, a positive multiple of pi.
    pub angle: f64,
    /// Zero order of the quadratic differential (`-1` for a pole).
    pub order: i32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlatSurface {
    genus: u32,
    triangles: Vec<[usize; 3]>,
    partner: Vec<usize>,
    sign: Vec<i8>,
    vectors: Vec<C64>,
    /// slot -> (triangle, position)
    location: Vec<(usize, usize)>,
}

impl FlatSurface {
    /// Builds and validates a surface.
    ///
    /// `pairing` lists each glued slot pair once together with its sign.
    pub fn new(
        genus: u32,
        triangles: Vec<[usize; 3]>,
        pairing: &[(usize, usize, i8)],
        vectors: Vec<C64>,
    ) -> Result<Self> {
        let n = triangles.len() * 3;
        if triangles.is_empty() {
            return Err(Error::Structural("surface has no triangles".into()));
        }
        if vectors.len() != n {
            return Err(Error::Structural(format!("{} vectors for {} slots", vectors.len(), n)));
        }
        let mut location = vec![(usize::MAX, 0); n];
        for (t, tri) in triangles.iter().enumerate() {
            for (k, &s) in tri.iter().enumerate() {
                if s >= n || location[s].0 != usize::MAX {
                    return Err(Error::Structural(format!("slot {s} out of range or used twice")));
                }
                location[s] = (t, k);
            }
        }
        let mut partner = vec![usize::MAX; n];
        let mut sign = vec![0i8; n];
        for &(a, b, sg) in pairing {
            if a >= n || b >= n || a == b {
                return Err(Error::Structural(format!("bad pair ({a}, {b})")));
            }
            if sg != 1 && sg != -1 {
                return Err(Error::Structural(format!("pair sign {sg} is not +-1")));
            }
            if partner[a] != usize::MAX || partner[b] != usize::MAX {
                return Err(Error::Structural(format!("slot in pair ({a}, {b}) is paired twice")));
            }
            partner[a] = b;
            partner[b] = a;
            sign[a] = sg;
            sign[b] = sg;
        }
        if let Some(s) = partner.iter().position(|&p| p == usize::MAX) {
            return Err(Error::Structural(format!("slot {s} is unpaired")));
        }
        let surface = FlatSurface { genus, triangles, partner, sign, vectors, location };
        surface.validate()?;
        Ok(surface)
    }

    /// Re-checks every invariant: pairing consistency, closure, positive
    /// areas and the Euler characteristic.
    pub fn validate(&self) -> Result<()> {
        let scale = self.max_edge_length();
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Structural("edge vectors are not finite".into()));
        }
        for s in 0..self.num_slots() {
            let p = self.partner[s];
            if self.partner[p] != s || p == s {
                return Err(Error::Structural(format!("pairing is not an involution at {s}")));
            }
            let expect = -f64::from(self.sign[s]) * self.vectors[s];
            if (self.vectors[p] - expect).norm() > CLOSURE_TOL * scale {
                return Err(Error::Structural(format!("paired slots {s} and {p} carry inconsistent vectors")));
            }
        }
        for (t, tri) in self.triangles.iter().enumerate() {
            let sum: C64 = tri.iter().map(|&s| self.vectors[s]).sum();
            if sum.norm() > CLOSURE_TOL * scale {
                return Err(Error::Structural(format!("triangle {t} does not close")));
            }
            if self.triangle_area(t) <= 0.0 {
                return Err(Error::Structural(format!("triangle {t} has non-positive area")));
            }
        }
        let chi = self.euler_characteristic();
        if chi != 2 - 2 * self.genus as i64 {
            return Err(Error::Structural(format!("Euler characteristic {chi} does not match genus {}", self.genus)));
        }
        Ok(())
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_slots(&self) -> usize {
        self.vectors.len()
    }

    pub fn num_edges(&self) -> usize {
        self.vectors.len() / 2
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn vector(&self, slot: usize) -> C64 {
        self.vectors[slot]
    }

    pub fn vectors(&self) -> &[C64] {
        &self.vectors
    }

    pub fn partner(&self, slot: usize) -> usize {
        self.partner[slot]
    }

    /// `+1` for a translation gluing, `-1` for a half-translation gluing.
    pub fn pairing_sign(&self, slot: usize) -> i8 {
        self.sign[slot]
    }

    pub fn triangle_of(&self, slot: usize) -> usize {
        self.location[slot].0
    }

    /// The slot following `slot` counterclockwise in its triangle.
    pub fn next(&self, slot: usize) -> usize {
        let (t, k) = self.location[slot];
        self.triangles[t][(k + 1) % 3]
    }

    pub fn prev(&self, slot: usize) -> usize {
        let (t, k) = self.location[slot];
        self.triangles[t][(k + 2) % 3]
    }

    /// Glued slot pairs `(s, s', sign)` with `s < s'`, in slot order.
    /// The index of a pair in this list is its edge id.
    pub fn pairs(&self) -> Vec<(usize, usize, i8)> {
        (0..self.num_slots()).filter(|&s| s < self.partner[s]).map(|s| (s, self.partner[s], self.sign[s])).collect()
    }

    /// Edge id of every slot (both slots of a pair share it).
    pub fn edge_ids(&self) -> Vec<usize> {
        let mut ids = vec![usize::MAX; self.num_slots()];
        for (e, (a, b, _)) in self.pairs().into_iter().enumerate() {
            ids[a] = e;
            ids[b] = e;
        }
        ids
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, _] = self.triangles[t];
        0.5 * cross(self.vectors[a], self.vectors[b])
    }

    /// Total flat area, the norm of the quadratic differential.
    pub fn area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn max_edge_length(&self) -> f64 {
        self.vectors.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Interior angle at the corner where `slot` starts.
    pub fn corner_angle(&self, slot: usize) -> f64 {
        let u = self.vectors[slot];
        let w = -self.vectors[self.prev(slot)];
        cross(u, w).atan2(dot(u, w))
    }

    /// Vertex id of the starting point of each slot.
    pub fn slot_vertices(&self) -> Vec<usize> {
        let n = self.num_slots();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for s in 0..n {
            // the gluing reverses the edge: start(s) = end(partner) = start(next(partner))
            let a = find(&mut parent, s);
            let b = find(&mut parent, self.next(self.partner[s]));
            parent[a] = b;
        }
        let mut label = vec![usize::MAX; n];
        let mut next_id = 0;
        let mut out = vec![0; n];
        for (s, o) in out.iter_mut().enumerate() {
            let r = find(&mut parent, s);
            if label[r] == usize::MAX {
                label[r] = next_id;
                next_id += 1;
            }
            *o = label[r];
        }
        out
    }

    pub fn num_vertices(&self) -> usize {
        self.slot_vertices().into_iter().max().map_or(0, |m| m + 1)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices() as i64 - self.num_edges() as i64 + self.num_triangles() as i64
    }

    /// Cone angle and zero order of every vertex.
    pub fn cone_data(&self) -> Vec<ConeData> {
        let verts = self.slot_vertices();
        let nv = verts.iter().max().map_or(0, |m| m + 1);
        let mut angle = vec![0.0; nv];
        for (s, &v) in verts.iter().enumerate() {
            angle[v] += self.corner_angle(s);
        }
        angle
            .into_iter()
            .enumerate()
            .map(|(vertex, angle)| ConeData { vertex, angle, order: (angle / PI).round() as i32 - 2 })
            .collect()
    }

    /// Acts on every edge vector by a real matrix of determinant one.
    pub fn apply_matrix(&self, m: &Mat2) -> Result<FlatSurface> {
        let det = m.determinant();
        if (det - 1.0).abs() > DET_TOL {
            return Err(Error::Argument(format!("matrix determinant {det} is not 1")));
        }
        let mut out = self.clone();
        for v in out.vectors.iter_mut() {
            *v = C64::new(m[(0, 0)] * v.re + m[(0, 1)] * v.im, m[(1, 0)] * v.re + m[(1, 1)] * v.im);
        }
        Ok(out)
    }

    /// Teichmüller geodesic flow `diag(e^t, e^-t)`.
    pub fn geodesic_flow(&self, t: f64) -> FlatSurface {
        self.apply_matrix(&geodesic_flow_matrix(t)).expect("diagonal flow matrix has determinant one")
    }

    /// Rotation `r_theta`.
    pub fn rotate(&self, theta: f64) -> FlatSurface {
        self.apply_matrix(&rotation_matrix(theta)).expect("rotation matrix has determinant one")
    }

    /// Replaces the edge vectors while keeping the combinatorics; the result
    /// is re-validated.
    pub fn with_vectors(&self, vectors: Vec<C64>) -> Result<FlatSurface> {
        if vectors.len() != self.num_slots() {
            return Err(Error::Structural("vector count does not match slots".into()));
        }
        let out = FlatSurface { vectors, ..self.clone() };
        out.validate()?;
        Ok(out)
    }

    /// Flips the diagonal of the quadrilateral formed by the two triangles
    /// adjacent to `slot`. The slot keeps naming the new diagonal.
    pub fn flip(&self, slot: usize) -> Result<FlatSurface> {
        if slot >= self.num_slots() {
            return Err(Error::Argument(format!("slot {slot} out of range")));
        }
        let s = slot;
        let sp = self.partner[s];
        let t1 = self.triangle_of(s);
        let t2 = self.triangle_of(sp);
        if t1 == t2 {
            return Err(Error::Geometric(format!("edge {s} borders the same triangle twice")));
        }
        let (a, b) = (self.next(s), self.prev(s));
        let (c, d) = (self.next(sp), self.prev(sp));
        let m = f64::from(self.sign[s]);
        let diag = self.vectors[b] + m * self.vectors[c];

        let mut out = self.clone();
        out.vectors[s] = diag;
        out.vectors[sp] = -diag;
        out.sign[s] = 1;
        out.sign[sp] = 1;
        if m < 0.0 {
            for z in [c, d] {
                out.vectors[z] = -out.vectors[z];
                out.sign[z] = -out.sign[z];
                let pz = out.partner[z];
                out.sign[pz] = -out.sign[pz];
            }
        }
        out.triangles[t1] = [s, d, a];
        out.triangles[t2] = [sp, b, c];
        for t in [t1, t2] {
            for (k, &x) in out.triangles[t].iter().enumerate() {
                out.location[x] = (t, k);
            }
        }
        let scale = self.max_edge_length();
        for t in [t1, t2] {
            if out.triangle_area(t) <= 1e-14 * scale * scale {
                return Err(Error::Geometric(format!("flipping edge {s} creates a degenerate triangle")));
            }
        }
        Ok(out)
    }

    /// Whether the dual quadrilateral of `slot` is strictly convex, i.e. the
    /// edge can be flipped.
    pub fn is_flippable(&self, slot: usize) -> bool {
        self.flip(slot).is_ok()
    }

    /// Sum of the two angles opposite the edge of `slot`.
    fn opposite_angle_sum(&self, slot: usize) -> f64 {
        let sp = self.partner[slot];
        self.corner_angle(self.prev(slot)) + self.corner_angle(self.prev(sp))
    }

    /// Flips non-Delaunay edges until every edge satisfies the
    /// empty-circumdisk condition. Returns the surface and the flip path.
    pub fn delaunay_with_path(&self) -> Result<(FlatSurface, Vec<usize>)> {
        const ANGLE_TOL: f64 = 1e-10;
        let cap = 10_000 * self.num_triangles().max(1);
        let mut cur = self.clone();
        let mut path = Vec::new();
        loop {
            let candidate = (0..cur.num_slots()).find(|&s| {
                s < cur.partner[s]
                    && cur.triangle_of(s) != cur.triangle_of(cur.partner[s])
                    && cur.opposite_angle_sum(s) > PI + ANGLE_TOL
            });
            let Some(s) = candidate else {
                return Ok((cur, path));
            };
            if path.len() >= cap {
                return Err(Error::Canonicalization(format!("no Delaunay triangulation after {cap} flips")));
            }
            cur = cur.flip(s)?;
            path.push(s);
        }
    }

    pub fn delaunay(&self) -> Result<FlatSurface> {
        self.delaunay_with_path().map(|(s, _)| s)
    }

    /// Semi-decision for genericity of the vertical foliation: every vertex
    /// is a simple zero (angle 3pi) and no saddle connection of length at
    /// most `length_bound` is vertical.
    pub fn is_generic(&self, length_bound: f64) -> Result<bool> {
        if length_bound <= 0.0 {
            return Err(Error::Argument("length bound must be positive".into()));
        }
        let simple = self.cone_data().iter().all(|c| (c.angle - 3.0 * PI).abs() < 1e-9);
        if !simple {
            return Ok(false);
        }
        let conns = self.saddle_connections(length_bound)?;
        Ok(!conns.iter().any(|c| c.holonomy.re.abs() < VERTICAL_TOL * c.holonomy.norm()))
    }

    /// Default length bound for [`FlatSurface::is_generic`]: twenty times
    /// the longest edge of the Delaunay triangulation.
    pub fn default_genericity_bound(&self) -> f64 {
        let d = self.delaunay().unwrap_or_else(|_| self.clone());
        20.0 * d.max_edge_length()
    }

    /// Geometric equality up to relabelling: the multisets of triangles,
    /// each taken as a cyclic vector triple up to a global sign, agree.
    pub fn same_geometry(&self, other: &FlatSurface, tol: f64) -> bool {
        if self.num_triangles() != other.num_triangles() {
            return false;
        }
        let key = |s: &FlatSurface| {
            let mut ks: Vec<[f64; 6]> =
                (0..s.num_triangles()).map(|t| canonical_triangle(s.triangle(t).map(|x| s.vector(x)))).collect();
            ks.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
            ks
        };
        let (ka, kb) = (key(self), key(other));
        let mut used = vec![false; kb.len()];
        ka.iter().all(|a| {
            if let Some(j) =
                (0..kb.len()).find(|&j| !used[j] && a.iter().zip(kb[j].iter()).all(|(x, y)| (x - y).abs() <= tol))
            {
                used[j] = true;
                true
            } else {
                false
            }
        })
    }
}

fn canonical_triangle(v: [C64; 3]) -> [f64; 6] {
    let mut best: Option<[f64; 6]> = None;
    for sgn in [1.0, -1.0] {
        for r in 0..3 {
            let w = [v[r] * sgn, v[(r + 1) % 3] * sgn, v[(r + 2) % 3] * sgn];
            let k = [w[0].re, w[0].im, w[1].re, w[1].im, w[2].re, w[2].im];
            // round away float noise before ordering
            let kr = k.map(|x| (x * 1e8).round() / 1e8);
            if best.is_none_or(|b| kr < b) {
                best = Some(kr);
            }
        }
    }
    best.expect("six candidates")
}

pub fn geodesic_flow_matrix(t: f64) -> Mat2 {
    Mat2::new(t.exp(), 0.0, 0.0, (-t).exp())
}

pub fn rotation_matrix(theta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    Mat2::new(c, -s, s, c)
}
