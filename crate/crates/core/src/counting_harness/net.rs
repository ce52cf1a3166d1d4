//! Invariant nets on an axis and the cells of horocycle space they induce.
//!
//! Everything is computed in the standard coordinates of the axis (the
//! imaginary axis, attracting end at infinity). A horocycle point there
//! has a *direction* `t0`: the arclength of the axis point where its
//! Busemann function is smallest. Along the axis
//! `beta(zeta, i e^t) = m + ln cosh(t - t0)`, so every comparison between
//! net points depends on `t0` alone, and cells are unions of directions.

use serde::Serialize;

use crate::hyperbolic_sandbox::{axis, Axis, DiskIsometry, DiskPoint, HorocyclePoint};
use crate::{Error, Result};

/// Two Busemann values closer than this count as a tie.
pub const TIE_TOL: f64 = 1e-12;

/// `ln cosh x` without overflow.
pub fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

#[derive(Clone, Debug, Serialize)]
pub struct NetPartition {
    pub axis: Axis,
    pub gamma: DiskIsometry,
    /// Arclength of `O = X_0`.
    pub origin: f64,
    pub eps: f64,
    /// Net points per period.
    pub n: usize,
    /// Translation length of `gamma`.
    pub length: f64,
}

/// Which approximation of a cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CellKind {
    /// `A_i`: `X_i` minimises `beta` over the net.
    Exact,
    /// `U_i^delta`: `X_i` beats every other net point by more than `delta`.
    Inner,
    /// `V_i^delta`: no other net point beats `X_i` by `delta` or more.
    Outer,
}

/// Equally spaced `gamma`-invariant net through `o` with mesh at most `eps`.
pub fn build_net(gamma: &DiskIsometry, o: &DiskPoint, eps: f64) -> Result<NetPartition> {
    let ax = axis(gamma)?;
    if ax.distance_to(o) > 1e-9 {
        return Err(Error::Argument("base point is not on the axis".into()));
    }
    let length = ax.translation_length;
    if !(eps > 0.0 && eps <= length * (1.0 + 1e-12)) {
        return Err(Error::Argument(format!("mesh {eps} outside (0, {length}]")));
    }
    let n = ((length / eps) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    Ok(NetPartition { origin: ax.arclength(o), axis: ax, gamma: *gamma, eps, n, length })
}

impl NetPartition {
    pub fn gap(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn arclength_of(&self, i: i64) -> f64 {
        self.origin + i as f64 * self.gap()
    }

    pub fn point(&self, i: i64) -> DiskPoint {
        self.axis.point_at(self.arclength_of(i))
    }

    /// Direction `t0` of a horocycle point.
    pub fn direction(&self, zeta: &HorocyclePoint) -> Result<f64> {
        self.axis
            .busemann_minimizer(zeta)
            .ok_or_else(|| Error::Domain("horocycle point sits at an end of the axis".into()))
    }

    /// Index of the net point minimising `beta(zeta, .)`; ties go to the
    /// smaller index.
    pub fn assign_cell(&self, zeta: &HorocyclePoint) -> Result<i64> {
        Ok(self.cell_of_direction(self.direction(zeta)?))
    }

    pub fn cell_of_direction(&self, t0: f64) -> i64 {
        let k = ((t0 - self.origin) / self.gap()).floor() as i64;
        let (lo, hi) = (k, k + 1);
        let b = |i: i64| ln_cosh(self.arclength_of(i) - t0);
        if b(lo) <= b(hi) + TIE_TOL {
            lo
        } else {
            hi
        }
    }

    /// `min_{j != i} beta(X_j) - beta(X_i)` for direction `t0`, as a
    /// function of the offset `x = t0 - t_i`.
    pub fn beta_margin(&self, x: f64) -> f64 {
        let g = self.gap();
        let k = (x / g).round();
        let nearest_other = if k == 0.0 { g - x.abs() } else { (x - k * g).abs() };
        ln_cosh(nearest_other) - ln_cosh(x)
    }

    /// Whether direction `t0` belongs to the given cell of index `i`.
    pub fn in_cell(&self, kind: CellKind, i: i64, t0: f64, delta: f64) -> bool {
        let m = self.beta_margin(t0 - self.arclength_of(i));
        match kind {
            CellKind::Exact => m >= -TIE_TOL,
            CellKind::Inner => m > delta,
            CellKind::Outer => m > -delta,
        }
    }

    /// Level function of a cell: positive exactly inside it.
    pub fn cell_level(&self, kind: CellKind, x: f64, delta: f64) -> f64 {
        let m = self.beta_margin(x);
        match kind {
            CellKind::Exact => m,
            CellKind::Inner => m - delta,
            CellKind::Outer => m + delta,
        }
    }
}
