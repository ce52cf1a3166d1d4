//! Orbits of `PSL(2, Z)` by breadth-first search over words, counts in
//! neighbourhoods of an axis, and exponential fits.
//!
//! The search grows words by right multiplication, `h -> h s`, and keeps
//! `h` while `d(hP, P) <= rho`. When the generators contain the side
//! pairings of the Dirichlet domain `D` of `P`, this finds every orbit
//! point in `B(P, rho)`: the segment from `P` to `gP` crosses a chain of
//! tiles `hD`, consecutive tiles differ by a side pairing, and every point
//! `w` of the segment in `hD` satisfies `d(w, hP) <= d(w, P)` and
//! `d(w, hP) <= d(w, gP)`, so `d(hP, P) <= d(P, gP)`. For `P = iy` with
//! `y > 1`, `D` is the standard fundamental domain, paired by `S` and `T`.

use std::collections::HashSet;

use serde::Serialize;

use crate::hyperbolic_sandbox::{axis, dist, least_squares, DiskIsometry, DiskPoint};
use crate::{Error, Exec, Result, SCHEMA_VERSION};

/// Integer matrix `[a, b, c, d]`, normalised up to sign.
pub type IMat = [i64; 4];

pub const IDENTITY: IMat = [1, 0, 0, 1];
pub const S: IMat = [0, -1, 1, 0];
pub const T: IMat = [1, 1, 0, 1];
pub const T_INV: IMat = [1, -1, 0, 1];

/// Largest radius accepted by [`enumerate_orbit`].
pub const R_MAX: f64 = 16.0;
/// Default cap on the number of group elements visited.
pub const DEFAULT_BUDGET: usize = 40_000_000;
/// The growth exponent of a neighbourhood of a geodesic in the hyperbolic
/// plane. In the moduli-space setting the corresponding entropy is `6g - 6`.
pub const SANDBOX_ENTROPY: f64 = 1.0;

pub fn mul(x: &IMat, y: &IMat) -> IMat {
    [x[0] * y[0] + x[1] * y[2], x[0] * y[1] + x[1] * y[3], x[2] * y[0] + x[3] * y[2], x[2] * y[1] + x[3] * y[3]]
}

pub fn inverse(x: &IMat) -> IMat {
    normalize([x[3], -x[1], -x[2], x[0]])
}

/// Representative with `c > 0`, or `c = 0` and `d > 0`.
pub fn normalize(x: IMat) -> IMat {
    if x[2] < 0 || (x[2] == 0 && x[3] < 0) {
        [-x[0], -x[1], -x[2], -x[3]]
    } else {
        x
    }
}

pub fn to_isometry(x: &IMat) -> DiskIsometry {
    DiskIsometry { a: x[0] as f64, b: x[1] as f64, c: x[2] as f64, d: x[3] as f64 }
}

pub fn parse_imat(v: &[f64]) -> Result<IMat> {
    if v.len() != 4 || v.iter().any(|x| x.fract() != 0.0 || x.abs() > 1e9) {
        return Err(Error::Argument("expected four integers a,b,c,d".into()));
    }
    let m = [v[0] as i64, v[1] as i64, v[2] as i64, v[3] as i64];
    if m[0] * m[3] - m[1] * m[2] != 1 {
        return Err(Error::Argument("matrix is not in SL(2,Z)".into()));
    }
    Ok(m)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrbitPoint {
    pub element: IMat,
    pub point: DiskPoint,
}

fn apply(m: &IMat, p: &DiskPoint) -> DiskPoint {
    to_isometry(m).apply(p)
}

/// Every `(g, gP)` with `d(gP, center) <= radius`, one entry per element
/// of `PSL(2, Z)`, sorted by element.
pub fn enumerate_orbit(
    gens: &[IMat],
    p: &DiskPoint,
    center: &DiskPoint,
    radius: f64,
    budget: usize,
    exec: Exec,
) -> Result<Vec<OrbitPoint>> {
    if !(0.0..=R_MAX).contains(&radius) {
        return Err(Error::Argument(format!("radius {radius} outside [0, {R_MAX}]")));
    }
    let mut all: Vec<IMat> = gens.iter().map(|g| normalize(*g)).collect();
    all.extend(gens.iter().map(inverse));
    all.sort();
    all.dedup();
    let rho = radius + dist(p, center);
    let keep = |m: &IMat| dist(&apply(m, p), p) <= rho + 1e-12;

    let mut seen: HashSet<IMat> = HashSet::from([IDENTITY]);
    let mut frontier = vec![IDENTITY];
    let mut overflow = false;
    while !frontier.is_empty() {
        let children: Vec<IMat> = exec
            .flat_map(&frontier, |h| all.iter().map(|s| normalize(mul(h, s))).filter(|c| keep(c)).collect::<Vec<_>>());
        let mut next = Vec::new();
        for c in children {
            if seen.insert(c) {
                next.push(c);
            }
        }
        if seen.len() > budget {
            overflow = true;
            break;
        }
        frontier = next;
    }
    let mut out: Vec<OrbitPoint> = seen
        .into_iter()
        .filter(|m| keep(m))
        .map(|m| OrbitPoint { element: m, point: apply(&m, p) })
        .filter(|o| dist(&o.point, center) <= radius + 1e-12)
        .collect();
    out.sort_by_key(|o| o.element);
    if overflow {
        return Err(Error::Resource {
            what: format!("orbit enumeration exceeded {budget} elements"),
            partial: out.len(),
        });
    }
    Ok(out)
}

/// Exhaustive search over every word of length at most `max_len` in the
/// generators and their inverses, without pruning.
pub fn orbit_by_word_length(
    gens: &[IMat],
    p: &DiskPoint,
    center: &DiskPoint,
    radius: f64,
    max_len: usize,
) -> Vec<OrbitPoint> {
    let mut all: Vec<IMat> = gens.iter().map(|g| normalize(*g)).collect();
    all.extend(gens.iter().map(inverse));
    let mut seen: HashSet<IMat> = HashSet::from([IDENTITY]);
    let mut layer = vec![IDENTITY];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for h in &layer {
            for s in &all {
                let c = normalize(mul(h, s));
                if seen.insert(c) {
                    next.push(c);
                }
            }
        }
        layer = next;
    }
    let mut out: Vec<OrbitPoint> = seen
        .into_iter()
        .map(|m| OrbitPoint { element: m, point: apply(&m, p) })
        .filter(|o| dist(&o.point, center) <= radius + 1e-12)
        .collect();
    out.sort_by_key(|o| o.element);
    out
}

/// Every element of `SL(2, Z)` (up to sign) with `d(gP, center) <= radius`,
/// found by bounding matrix entries. With `P = A i` and `center = B i`,
/// `2 cosh d = |B^-1 g A|_F^2`, which bounds `|g|_F`.
pub fn orbit_by_entries(p: &DiskPoint, center: &DiskPoint, radius: f64) -> Vec<OrbitPoint> {
    let frob = |x: &DiskPoint| {
        // |A|_F^2 for A = [[sqrt y, x / sqrt y], [0, 1 / sqrt y]]
        x.y + (x.x * x.x + 1.0) / x.y
    };
    // spectral norms are bounded by Frobenius norms
    let bound = ((2.0 * radius.cosh()) * frob(p) * frob(center)).sqrt().ceil() as i64 + 1;
    let mut out = Vec::new();
    for a in -bound..=bound {
        for c in 0..=bound {
            if c == 0 && a <= 0 {
                continue;
            }
            // solutions of a d - b c = 1 form (b0 + k a, d0 + k c)
            let (g, x, y) = ext_gcd(a, c);
            if g.abs() != 1 {
                continue;
            }
            // a x + c y = g; take d0 = x g, b0 = -y g
            let (d0, b0) = (x * g, -y * g);
            let step = a.abs().max(c).max(1);
            let kmax = (2 * bound) / step + 2;
            let k0 = if c != 0 { -d0 / c } else { -b0 / a };
            for k in (k0 - kmax)..=(k0 + kmax) {
                let m = normalize([a, b0 + k * a, c, d0 + k * c]);
                let q = apply(&m, p);
                if dist(&q, center) <= radius + 1e-12 {
                    out.push(OrbitPoint { element: m, point: q });
                }
            }
        }
    }
    out.sort_by_key(|o| o.element);
    out.dedup_by(|a, b| a.element == b.element);
    out
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// Orbit points near the axis of `gamma`, with the data needed to count
/// them with and without the `<gamma>` quotient.
#[derive(Clone, Debug)]
pub struct AxisOrbit {
    pub gamma: IMat,
    pub base: DiskPoint,
    /// Arclength where the fundamental window `[w0, w0 + L)` starts.
    pub window_start: f64,
    pub length: f64,
    /// Radius of the ball about the base point that was enumerated.
    pub ball_radius: f64,
    /// `(distance to axis, arclength of the foot)` of every enumerated
    /// point in the ball within the largest requested distance of the axis.
    pub points: Vec<(f64, f64)>,
    pub elements: Vec<OrbitPoint>,
}

/// Offset of the fundamental window, away from any symmetric position.
pub const WINDOW_OFFSET: f64 = 0.1234567;

/// Enumerates `Gamma P` far enough to see every class of
/// `<gamma> \ (Gamma P ∩ B(axis, r_max))`.
pub fn axis_orbit(gamma: &IMat, p: &DiskPoint, r_max: f64, exec: Exec) -> Result<AxisOrbit> {
    axis_orbit_covering(gamma, p, r_max, &[], exec)
}

/// As [`axis_orbit`], with a ball large enough to also contain every orbit
/// point within `r_max` of each point of `extra`.
pub fn axis_orbit_covering(
    gamma: &IMat,
    p: &DiskPoint,
    r_max: f64,
    extra: &[DiskPoint],
    exec: Exec,
) -> Result<AxisOrbit> {
    if p.x.abs() > 1e-12 || p.y <= 1.0 {
        return Err(Error::Argument(format!(
            "base point ({}, {}) must be iy with y > 1 so that S and T pair the sides of its Dirichlet domain",
            p.x, p.y
        )));
    }
    let g = to_isometry(gamma);
    let ax = axis(&g)?;
    let length = ax.translation_length;
    let window_start = ax.arclength(p) + WINDOW_OFFSET * length;
    // distance from P to the axis is largest at an end of the window
    let reach = [ax.point_at(window_start), ax.point_at(window_start + length)]
        .iter()
        .chain(extra)
        .map(|q| dist(p, q))
        .fold(0.0, f64::max);
    let ball_radius = r_max + reach;
    let elements = enumerate_orbit(&[S, T], p, p, ball_radius, DEFAULT_BUDGET, exec)?;
    let points = elements
        .iter()
        .map(|o| (ax.distance_to(&o.point), ax.arclength(&o.point)))
        .filter(|&(d, _)| d <= r_max + 1e-12)
        .collect();
    Ok(AxisOrbit { gamma: *gamma, base: *p, window_start, length, ball_radius, points, elements })
}

impl AxisOrbit {
    fn in_window(&self, s: f64) -> bool {
        s >= self.window_start && s < self.window_start + self.length
    }

    /// Number of `<gamma>`-classes within `r` of the axis.
    pub fn quotient_count(&self, r: f64) -> usize {
        self.points.iter().filter(|&&(d, s)| d <= r && self.in_window(s)).count()
    }

    /// Orbit points in the enumerated ball within `r` of the axis.
    pub fn raw_count(&self, r: f64) -> usize {
        self.points.iter().filter(|&&(d, _)| d <= r).count()
    }

    /// Raw count rebuilt from the class representatives: each one
    /// contributes the number of its `gamma`-translates inside the ball.
    pub fn raw_count_from_translates(&self, r: f64) -> usize {
        let g = to_isometry(&self.gamma);
        let gi = g.inverse();
        let inside = |q: &DiskPoint| dist(q, &self.base) <= self.ball_radius + 1e-12;
        self.elements
            .iter()
            .filter(|o| {
                let ax = axis(&g).expect("hyperbolic");
                ax.distance_to(&o.point) <= r && self.in_window(ax.arclength(&o.point))
            })
            .map(|o| {
                let mut n = 1;
                for step in [g, gi] {
                    let mut q = step.apply(&o.point);
                    while inside(&q) {
                        n += 1;
                        q = step.apply(&q);
                    }
                }
                n
            })
            .sum()
    }
}

/// Least-squares fit of `ln count = ln a + h R`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ExpFit {
    pub exponent: f64,
    pub prefactor: f64,
}

pub fn fit_exponential(radii: &[f64], counts: &[f64]) -> Result<ExpFit> {
    let pts: Vec<(f64, f64)> = radii.iter().zip(counts).filter(|(_, &c)| c > 0.0).map(|(&r, &c)| (r, c.ln())).collect();
    if pts.len() < 4 {
        return Err(Error::Fit(format!("{} usable grid points; the fit needs at least 4", pts.len())));
    }
    let (h, c) = least_squares(&pts);
    Ok(ExpFit { exponent: h, prefactor: c.exp() })
}

#[derive(Clone, Debug, Serialize)]
pub struct CountReport {
    pub schema_version: u32,
    pub gamma: IMat,
    pub base: DiskPoint,
    pub translation_length: f64,
    pub radii: Vec<f64>,
    pub raw_counts: Vec<usize>,
    pub quotient_counts: Vec<usize>,
    pub fit: ExpFit,
    /// Exponent of the sandbox growth law.
    pub sandbox_entropy: f64,
    pub exponent_tolerance: f64,
    pub ball_radius: f64,
    pub window_start: f64,
    pub passed: bool,
}

pub const EXPONENT_TOL: f64 = 0.1;

/// Counts of `<gamma> \ (Gamma P ∩ B(axis, R))` over the grid, and the
/// exponential fit.
pub fn count_near_axis(gamma: &IMat, p: &DiskPoint, radii: &[f64], exec: Exec) -> Result<CountReport> {
    if radii.len() < 4 {
        return Err(Error::Fit(format!("{} grid points; the fit needs at least 4", radii.len())));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] < 0.0 {
        return Err(Error::Argument("radius grid must be nonnegative and increasing".into()));
    }
    let orbit = axis_orbit(gamma, p, *radii.last().expect("nonempty"), exec)?;
    report_from_orbit(&orbit, radii)
}

pub fn report_from_orbit(orbit: &AxisOrbit, radii: &[f64]) -> Result<CountReport> {
    let raw: Vec<usize> = radii.iter().map(|&r| orbit.raw_count(r)).collect();
    let quotient: Vec<usize> = radii.iter().map(|&r| orbit.quotient_count(r)).collect();
    let fit = fit_exponential(radii, &quotient.iter().map(|&c| c as f64).collect::<Vec<_>>())?;
    Ok(CountReport {
        schema_version: SCHEMA_VERSION,
        gamma: orbit.gamma,
        base: orbit.base,
        translation_length: orbit.length,
        radii: radii.to_vec(),
        raw_counts: raw,
        quotient_counts: quotient,
        passed: (fit.exponent - SANDBOX_ENTROPY).abs() <= EXPONENT_TOL,
        fit,
        sandbox_entropy: SANDBOX_ENTROPY,
        exponent_tolerance: EXPONENT_TOL,
        ball_radius: orbit.ball_radius,
        window_start: orbit.window_start,
    })
}
