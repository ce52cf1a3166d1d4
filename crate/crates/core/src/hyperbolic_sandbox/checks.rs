//! Numerical statements about thick geodesics, evaluated exactly in the
//! hyperbolic plane, where they hold with explicit constants.

use serde::Serialize;

use super::{along_ray, busemann_h2, dist, project_to_axis, Axis, Boundary, DiskPoint, HorocyclePoint};
use crate::{Error, Result};

#[derive(Clone, Debug, Serialize)]
pub struct VShapeReport {
    /// Arclength of the reference point `H`.
    pub foot: f64,
    pub samples: Vec<f64>,
    pub deviations: Vec<f64>,
    /// Empirical constant `C`: the largest deviation.
    pub c_emp: f64,
}

fn v_report(foot: f64, samples: &[f64], deviations: Vec<f64>) -> VShapeReport {
    VShapeReport { foot, samples: samples.to_vec(), c_emp: deviations.iter().copied().fold(0.0, f64::max), deviations }
}

/// `|d(X, Y) - d(X, H) - d(H, Y)|` over axis points `Y` at the given
/// arclengths, with `H` the projection of `X`.
pub fn v_shape_check(x: &DiskPoint, axis: &Axis, samples: &[f64]) -> VShapeReport {
    let h = project_to_axis(x, axis);
    let dxh = dist(x, &h);
    let dev = samples
        .iter()
        .map(|&t| {
            let y = axis.point_at(t);
            (dist(x, &y) - dxh - dist(&h, &y)).abs()
        })
        .collect();
    v_report(axis.arclength(&h), samples, dev)
}

/// Busemann version: `|beta(zeta, Y) - beta(zeta, H) - d(H, Y)|` with `H`
/// the minimiser of `beta(zeta, .)` on the sampled stretch of the axis.
pub fn v_shape_busemann_check(zeta: &HorocyclePoint, axis: &Axis, samples: &[f64]) -> Result<VShapeReport> {
    let (lo, hi) = samples.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &t| (a.min(t), b.max(t)));
    if !(lo <= hi) {
        return Err(Error::Argument("no axis samples".into()));
    }
    let foot = match axis.busemann_minimizer(zeta) {
        Some(t) => t.clamp(lo, hi),
        None => {
            // zeta is an axis endpoint and beta is monotone along the axis
            if busemann_h2(zeta, &axis.point_at(hi)) < busemann_h2(zeta, &axis.point_at(lo)) {
                hi
            } else {
                lo
            }
        }
    };
    let h = axis.point_at(foot);
    let bh = busemann_h2(zeta, &h);
    let dev = samples
        .iter()
        .map(|&t| {
            let y = axis.point_at(t);
            (busemann_h2(zeta, &y) - bh - dist(&h, &y)).abs()
        })
        .collect();
    Ok(v_report(foot, samples, dev))
}

#[derive(Clone, Debug, Serialize)]
pub struct RayConvergenceReport {
    /// Start of the second ray after moving it to the level of `X`.
    pub y_adjusted: DiskPoint,
    pub t_grid: Vec<f64>,
    pub distances: Vec<f64>,
    /// Least-squares slope of `ln d` against `T`; `None` when the rays
    /// coincide.
    pub slope: Option<f64>,
    pub decreasing: bool,
}

/// Distance between the rays from `X` and `Y` toward the boundary point of
/// `zeta`, after `Y` is slid along its ray to the horocycle of `X`.
pub fn ray_convergence_check(
    x: &DiskPoint,
    y: &DiskPoint,
    zeta: &HorocyclePoint,
    t_grid: &[f64],
) -> Result<RayConvergenceReport> {
    if t_grid.len() < 2 || t_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Argument("time grid must be increasing with two or more points".into()));
    }
    // beta decreases at unit speed along the ray
    let shift = busemann_h2(zeta, y) - busemann_h2(zeta, x);
    let y0 = along_ray(y, zeta.xi, shift);
    let distances: Vec<f64> =
        t_grid.iter().map(|&t| dist(&along_ray(x, zeta.xi, t), &along_ray(&y0, zeta.xi, t))).collect();
    let decreasing = distances.windows(2).all(|w| w[1] <= w[0] + 1e-15);
    let slope = if distances.iter().all(|&d| d > 0.0) {
        let pts: Vec<(f64, f64)> = t_grid.iter().zip(&distances).map(|(&t, &d)| (t, d.ln())).collect();
        Some(least_squares(&pts).0)
    } else {
        None
    };
    Ok(RayConvergenceReport { y_adjusted: y0, t_grid: t_grid.to_vec(), distances, slope, decreasing })
}

/// Slope and intercept of the least-squares line through `pts`.
pub fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[derive(Clone, Debug, Serialize)]
pub struct BusemannDistanceRow {
    pub t: f64,
    pub distance_to_axis: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct BusemannDistanceReport {
    pub epsilon: f64,
    pub rows: Vec<BusemannDistanceRow>,
    /// Smallest sampled distance from the axis beyond which every residual
    /// is below `epsilon`; `None` if the last sample still fails.
    pub threshold: Option<f64>,
    pub monotone: bool,
}

/// `|(d(Z, Y) - d(Z, X)) - (beta(zeta, Y) - beta(zeta, X))|` for `Z` at
/// distance `t` along the ray from `X` toward `zeta`, for `t` in the grid.
pub fn busemann_vs_distance_check(
    zeta: &HorocyclePoint,
    x: &DiskPoint,
    y: &DiskPoint,
    axis: &Axis,
    t_grid: &[f64],
    epsilon: f64,
) -> Result<BusemannDistanceReport> {
    for p in [x, y] {
        if axis.distance_to(p) > 1e-9 {
            return Err(Error::Argument("X and Y must lie on the axis".into()));
        }
    }
    if matches!(zeta.xi, Boundary::Infinity) && axis.attracting == Boundary::Infinity {
        return Err(Error::Argument("zeta is an endpoint of the axis".into()));
    }
    let db = busemann_h2(zeta, y) - busemann_h2(zeta, x);
    let rows: Vec<BusemannDistanceRow> = t_grid
        .iter()
        .map(|&t| {
            let z = along_ray(x, zeta.xi, t);
            BusemannDistanceRow {
                t,
                distance_to_axis: axis.distance_to(&z),
                residual: ((dist(&z, y) - dist(&z, x)) - db).abs(),
            }
        })
        .collect();
    let mut threshold = None;
    for (k, row) in rows.iter().enumerate().rev() {
        if row.residual >= epsilon {
            threshold = rows.get(k + 1).map(|r| r.distance_to_axis);
            break;
        }
        threshold = Some(row.distance_to_axis);
    }
    let monotone = rows.windows(2).all(|w| w[1].residual <= w[0].residual + 1e-15);
    Ok(BusemannDistanceReport { epsilon, rows, threshold, monotone })
}
