//! The sector scheme: orbit points seen from net points, sorted by the cell
//! of the direction in which they are seen.
//!
//! `Y` lies in the sector `S(X_i, W, R)` when `d(X_i, Y) <= R` and the
//! geodesic ray from `X_i` through `Y` ends at a boundary point whose
//! direction lies in `W`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::net::{build_net, CellKind, NetPartition};
use super::orbit::{axis_orbit_covering, mul, normalize, to_isometry, IMat, S, T, T_INV};
use crate::hyperbolic_sandbox::{dist, ray_endpoint, DiskPoint, HorocyclePoint};
use crate::{Error, Exec, Result, SCHEMA_VERSION};

/// Step of the distance grid used for the near-axis radius.
const NEAR_AXIS_STEP: f64 = 0.01;

#[derive(Clone, Debug, Serialize)]
pub struct SectorReport {
    pub schema_version: u32,
    pub gamma: IMat,
    pub eps: f64,
    pub delta: f64,
    pub n: usize,
    pub radius: f64,
    pub k_proxy_radius: f64,
    /// Orbit points within `R + eps` of the axis that were examined.
    pub orbit_points: usize,
    /// Orbit points lying in inner sectors of two different net points.
    pub collisions: usize,
    /// Smallest `C` with every collision inside `B(X_i, C)` for one of the
    /// two net points involved.
    pub c_disjoint: f64,
    pub disjoint_pass: bool,
    /// Distance from the axis beyond which coverage holds for every point
    /// of the plane, from the continuous geometry of one cell.
    pub c_near: f64,
    pub coverage_exceptions: usize,
    pub max_exception_distance: f64,
    pub coverage_pass: bool,
    pub lower: usize,
    pub quotient_count: usize,
    pub upper: usize,
    pub near_axis_remainder: usize,
    /// The typicality remainder, identically zero in the hyperbolic plane.
    pub kappa_remainder: f64,
    pub sandwich_pass: bool,
    pub passed: bool,
}

/// Direction, relative to the net, of the ray from `x` through `y`.
fn seen_direction(net: &NetPartition, x: &DiskPoint, y: &DiskPoint) -> Option<f64> {
    if x == y {
        return None;
    }
    let zeta = HorocyclePoint::new(ray_endpoint(x, y), 1.0).ok()?;
    net.direction(&zeta).ok()
}

/// Smallest distance from the axis beyond which every point whose foot is
/// in the cell of `X_0` is seen from `X_0` in a direction of `V_0^delta`.
/// Computed on a grid of distances up to `r_max`.
pub fn near_axis_radius(net: &NetPartition, delta: f64, r_max: f64) -> f64 {
    let g = net.gap();
    let covered = |rho: f64| {
        (0..=40).all(|k| {
            let u = -g / 2.0 + g * k as f64 / 40.0;
            // standard coordinates, X_0 at i
            let y = DiskPoint { x: u.exp() * rho.tanh(), y: u.exp() / rho.cosh() };
            let x0 = DiskPoint { x: 0.0, y: 1.0 };
            if rho == 0.0 && u == 0.0 {
                return false;
            }
            match ray_endpoint(&x0, &y) {
                crate::hyperbolic_sandbox::Boundary::Finite(xi) if xi != 0.0 => {
                    net.cell_level(CellKind::Outer, xi.abs().ln(), delta) > 0.0
                }
                _ => false,
            }
        })
    };
    let steps = (r_max / NEAR_AXIS_STEP).ceil() as usize;
    let mut threshold = 0.0;
    for k in 0..=steps {
        let rho = k as f64 * NEAR_AXIS_STEP;
        if !covered(rho) {
            threshold = rho + NEAR_AXIS_STEP;
        }
    }
    threshold
}

/// Runs the three clauses of the sector scheme over the orbit of `p`.
pub fn sector_scheme_check(
    gamma: &IMat,
    p: &DiskPoint,
    net: &NetPartition,
    delta: f64,
    k_proxy_radius: f64,
    radius: f64,
    exec: Exec,
) -> Result<SectorReport> {
    if !(delta > 0.0) || !(radius > 0.0) {
        return Err(Error::Argument("delta and R must be positive".into()));
    }
    let g_iso = to_isometry(gamma);
    if (g_iso.a - net.gamma.a).abs()
        + (g_iso.b - net.gamma.b).abs()
        + (g_iso.c - net.gamma.c).abs()
        + (g_iso.d - net.gamma.d).abs()
        > 1e-9
    {
        return Err(Error::Argument("net was built for a different isometry".into()));
    }
    let n = net.n as i64;
    let outer = radius + net.eps;
    let net_points: Vec<DiskPoint> = (0..=n).map(|i| net.point(i)).collect();
    let orbit = axis_orbit_covering(gamma, p, outer, &net_points, exec)?;
    let ax = &net.axis;
    let gap = net.gap();
    let candidates: Vec<DiskPoint> =
        orbit.elements.iter().map(|o| o.point).filter(|q| ax.distance_to(q) <= outer + 1e-12).collect();

    // per orbit point: the inner sectors (any index) containing it, and
    // whether it counts toward the lower and upper sums for 0 <= i < N
    struct Seen {
        inner: Vec<(i64, f64)>,
        lower: usize,
        upper: usize,
    }
    let seen: Vec<Seen> = exec.map(&candidates, |y| {
        let foot = ((ax.arclength(y) - net.origin) / gap).round() as i64;
        let mut s = Seen { inner: Vec::new(), lower: 0, upper: 0 };
        for i in (foot - n - 2)..=(foot + n + 2) {
            let x = net.point(i);
            let d = dist(&x, y);
            let Some(t0) = seen_direction(net, &x, y) else { continue };
            if d <= radius && net.in_cell(CellKind::Inner, i, t0, delta) {
                s.inner.push((i, d));
                if (0..n).contains(&i) {
                    s.lower += 1;
                }
            }
            if (0..n).contains(&i) && d <= outer && net.in_cell(CellKind::Outer, i, t0, delta) {
                s.upper += 1;
            }
        }
        s
    });

    let mut collisions = 0;
    let mut c_disjoint: f64 = 0.0;
    for s in &seen {
        if s.inner.len() > 1 {
            collisions += 1;
            // the collision is excused once C reaches the nearer point of
            // every pair; the second smallest distance covers all pairs
            let mut ds: Vec<f64> = s.inner.iter().map(|&(_, d)| d).collect();
            ds.sort_by(f64::total_cmp);
            c_disjoint = c_disjoint.max(ds[ds.len() - 2]);
        }
    }
    let lower: usize = seen.iter().map(|s| s.lower).sum();
    let upper_cells: usize = seen.iter().map(|s| s.upper).sum();

    // coverage over class representatives within R of the axis
    let c_near = near_axis_radius(net, delta, radius);
    let window = |t: f64| t >= orbit.window_start && t < orbit.window_start + orbit.length;
    let mut exceptions = 0;
    let mut max_exc: f64 = 0.0;
    let mut quotient = 0;
    let mut near = 0;
    for y in &candidates {
        let (d_axis, t) = (ax.distance_to(y), ax.arclength(y));
        if d_axis > radius || !window(t) {
            continue;
        }
        quotient += 1;
        if d_axis <= c_near {
            near += 1;
        }
        let i0 = net.cell_of_direction(t);
        let x = net.point(i0);
        let ok = dist(&x, y) <= outer
            && seen_direction(net, &x, y).is_some_and(|t0| net.in_cell(CellKind::Outer, i0, t0, delta));
        if !ok {
            exceptions += 1;
            max_exc = max_exc.max(d_axis);
        }
    }
    let disjoint_pass = c_disjoint <= k_proxy_radius;
    let coverage_pass = exceptions == 0 || max_exc <= c_near;
    let upper = upper_cells + near;
    let sandwich_pass = lower <= quotient && quotient <= upper;
    Ok(SectorReport {
        schema_version: SCHEMA_VERSION,
        gamma: *gamma,
        eps: net.eps,
        delta,
        n: net.n,
        radius,
        k_proxy_radius,
        orbit_points: candidates.len(),
        collisions,
        c_disjoint,
        disjoint_pass,
        c_near,
        coverage_exceptions: exceptions,
        max_exception_distance: max_exc,
        coverage_pass,
        lower,
        quotient_count: quotient,
        upper,
        near_axis_remainder: near,
        kappa_remainder: 0.0,
        sandwich_pass,
        passed: disjoint_pass && coverage_pass && sandwich_pass,
    })
}

/// A net whose cells `0..N` tile the counting window of the orbit of `p`.
pub fn aligned_net(gamma: &IMat, p: &DiskPoint, eps: f64) -> Result<NetPartition> {
    let g = to_isometry(gamma);
    let ax = crate::hyperbolic_sandbox::axis(&g)?;
    let length = ax.translation_length;
    let n = ((length / eps) * (1.0 - 1e-12)).ceil().max(1.0);
    let start = ax.arclength(p) + super::orbit::WINDOW_OFFSET * length;
    build_net(&g, &ax.point_at(start + length / n / 2.0), eps)
}

/// Instance used by the acceptance check: the cat map, `P = 2i`,
/// `eps = 0.4`, `delta = 0.05`, `R = 8`.
pub struct SectorInstance {
    pub gamma: IMat,
    pub p: DiskPoint,
    pub eps: f64,
    pub delta: f64,
    pub radius: f64,
    pub k_proxy_radius: f64,
}

pub const CAT_MAP: IMat = [2, 1, 1, 1];

impl SectorInstance {
    pub fn standard() -> Self {
        SectorInstance {
            gamma: CAT_MAP,
            p: DiskPoint { x: 0.0, y: 2.0 },
            eps: 0.4,
            delta: 0.05,
            radius: 8.0,
            k_proxy_radius: 4.0,
        }
    }

    /// The cat map conjugated by a short random word, with random mesh and
    /// margin.
    pub fn random(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut w = [1, 0, 0, 1];
        for _ in 0..rng.gen_range(1..=3) {
            w = normalize(mul(&w, &[S, T, T_INV][rng.gen_range(0..3)]));
        }
        let winv = super::orbit::inverse(&w);
        SectorInstance {
            gamma: normalize(mul(&mul(&w, &CAT_MAP), &winv)),
            p: DiskPoint { x: 0.0, y: 2.0 },
            eps: rng.gen_range(0.3..0.6),
            delta: rng.gen_range(0.03..0.08),
            radius: 7.0,
            k_proxy_radius: 3.5,
        }
    }

    pub fn run(&self, exec: Exec) -> Result<SectorReport> {
        let net = aligned_net(&self.gamma, &self.p, self.eps)?;
        sector_scheme_check(&self.gamma, &self.p, &net, self.delta, self.k_proxy_radius, self.radius, exec)
    }
}
