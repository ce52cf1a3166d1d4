//! Invariant measure of cells, by tensor Gauss–Legendre quadrature.
//!
//! Horocycle space is `R^2 \ 0` modulo `±1`; in polar form `v = e^b (cos θ,
//! sin θ)` the SL(2,R)-invariant measure is `e^{2b} db dθ`. In standard axis
//! coordinates a vector has direction `t0 = ln|cot θ|`, and `θ` and `π - θ`
//! give the same direction, so a cell measure is twice an integral over
//! `θ ∈ (0, π/2)`. The outer variable is `t0` itself
//! (`dθ = dt0 / (2 cosh t0)`), the inner one is `b ∈ [b* - 20, b*]`, where
//! `b*` is the largest scale with `beta(zeta, X_i) <= 0`; the tail below
//! `b* - 20` weighs `e^{-40}`.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use super::net::{ln_cosh, CellKind, NetPartition};
use crate::{Error, Result, SCHEMA_VERSION};

pub const MIN_RESOLUTION: usize = 64;
/// Largest relative change allowed when the resolution is doubled.
pub const REFINEMENT_TOL: f64 = 0.01;
const INNER_DEPTH: f64 = 20.0;

/// Gauss–Legendre nodes and weights on `[-1, 1]` via Golub–Welsch.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        j[(k, k - 1)] = b;
        j[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut pairs: Vec<(f64, f64)> =
        (0..n).map(|k| (eig.eigenvalues[k], 2.0 * eig.eigenvectors[(0, k)].powi(2))).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
}

impl Rule {
    fn new(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        Rule { x, w }
    }

    fn integrate(&self, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        let (m, h) = ((lo + hi) / 2.0, (hi - lo) / 2.0);
        h * self.x.iter().zip(&self.w).map(|(&x, &w)| w * f(m + h * x)).sum::<f64>()
    }
}

/// Intervals of `[lo, hi]` where `level > 0`, from a scan refined by
/// bisection at every sign change.
fn positive_intervals(level: impl Fn(f64) -> f64, lo: f64, hi: f64, scan: usize) -> Vec<(f64, f64)> {
    let root = |mut a: f64, mut b: f64| {
        let sa = level(a) > 0.0;
        for _ in 0..200 {
            let m = (a + b) / 2.0;
            if (level(m) > 0.0) == sa {
                a = m;
            } else {
                b = m;
            }
        }
        (a + b) / 2.0
    };
    let xs: Vec<f64> = (0..=scan).map(|k| lo + (hi - lo) * k as f64 / scan as f64).collect();
    let mut out = Vec::new();
    let mut start = (level(lo) > 0.0).then_some(lo);
    for w in xs.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (ia, ib) = (level(a) > 0.0, level(b) > 0.0);
        if ia != ib {
            let r = root(a, b);
            if ib {
                start = Some(r);
            } else if let Some(s) = start.take() {
                out.push((s, r));
            }
        }
    }
    if let Some(s) = start {
        out.push((s, hi));
    }
    out
}

#[derive(Clone, Debug, Serialize)]
pub struct CellMeasure {
    pub index: i64,
    pub nu_a: f64,
    pub nu_u: f64,
    pub nu_v: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellMeasures {
    pub schema_version: u32,
    pub delta: f64,
    pub resolution: usize,
    pub cells: Vec<CellMeasure>,
    /// `sum_i nu(A_i)` over one period.
    pub sum_a: f64,
    /// Measure of `{beta(zeta, axis) <= 0}` per period, by quadrature with
    /// the continuous minimum over the axis.
    pub nu_c_ext: f64,
    /// `L / 2`.
    pub nu_c_ext_closed: f64,
    /// Largest relative change between resolution `n` and `2n`.
    pub quadrature_error: f64,
    /// Lower end of the sandwich, `e^{-2 eps} nu(C_ext)`.
    pub sandwich_lower: f64,
    pub sandwich_holds: bool,
}

struct Quadrature<'a> {
    net: &'a NetPartition,
    outer: Rule,
    inner: Rule,
}

impl Quadrature<'_> {
    /// `2 ∫∫ e^{2b} db dθ` over directions `t0` in `[lo, hi]` and
    /// `b <= b*(t0)`, with `2 b* = -min_beta(t0)`.
    fn region(&self, lo: f64, hi: f64, min_beta: impl Fn(f64) -> f64) -> f64 {
        self.outer.integrate(lo, hi, |t0| {
            let top = -min_beta(t0) / 2.0;
            let mass = self.inner.integrate(top - INNER_DEPTH, top, |b| (2.0 * b).exp());
            2.0 * mass / (2.0 * t0.cosh())
        })
    }

    /// `beta` at `X_i` of the unit vector with direction `t0`:
    /// `ln(cos^2θ / y_i + sin^2θ y_i) = ln cosh(t0 - t_i) - ln cosh t0`.
    fn beta_at(&self, i: i64, t0: f64) -> f64 {
        ln_cosh(t0 - self.net.arclength_of(i)) - ln_cosh(t0)
    }

    fn cell(&self, kind: CellKind, i: i64, delta: f64) -> f64 {
        let g = self.net.gap();
        let reach = g * (2.0 + delta / g.min(1.0)) + 1.0;
        let scan = 64 + (reach / g * 16.0) as usize;
        let ti = self.net.arclength_of(i);
        positive_intervals(|x| self.net.cell_level(kind, x, delta), -reach, reach, scan)
            .into_iter()
            .map(|(a, b)| self.region(ti + a, ti + b, |t0| self.beta_at(i, t0)))
            .fold(0.0, |acc, x| acc + x)
    }

    fn c_ext(&self) -> f64 {
        // min over the axis of ln cosh(t0 - t) is 0
        let lo = self.net.arclength_of(0) - self.net.gap() / 2.0;
        self.region(lo, lo + self.net.length, |t0| -ln_cosh(t0))
    }

    fn all(&self, delta: f64) -> (Vec<CellMeasure>, f64) {
        let cells = (0..self.net.n as i64)
            .map(|i| CellMeasure {
                index: i,
                nu_a: self.cell(CellKind::Exact, i, delta),
                nu_u: self.cell(CellKind::Inner, i, delta),
                nu_v: self.cell(CellKind::Outer, i, delta),
            })
            .collect();
        (cells, self.c_ext())
    }
}

/// Cell measures `nu(A_i)`, `nu(U_i^delta)`, `nu(V_i^delta)` for one
/// period, and `nu(C_ext)`; each is recomputed at twice the resolution.
pub fn measure_cells(net: &NetPartition, delta: f64, resolution: usize) -> Result<CellMeasures> {
    if resolution < MIN_RESOLUTION {
        return Err(Error::Argument(format!("quadrature resolution {resolution} is below {MIN_RESOLUTION}")));
    }
    if !(delta > 0.0) {
        return Err(Error::Argument("delta must be positive".into()));
    }
    let q = |n: usize| Quadrature { net, outer: Rule::new(n), inner: Rule::new(n) };
    let (cells, c_ext) = q(resolution).all(delta);
    let (fine, c_fine) = q(2 * resolution).all(delta);
    let rel = |a: f64, b: f64| if b == 0.0 { a.abs() } else { ((a - b) / b).abs() };
    let mut err = rel(c_ext, c_fine);
    for (c, f) in cells.iter().zip(&fine) {
        for (a, b) in [(c.nu_a, f.nu_a), (c.nu_u, f.nu_u), (c.nu_v, f.nu_v)] {
            err = err.max(rel(a, b));
        }
    }
    if err > REFINEMENT_TOL {
        return Err(Error::Precision(format!("cell quadrature changed by {:.3}% under refinement", 100.0 * err)));
    }
    let sum_a: f64 = fine.iter().map(|c| c.nu_a).sum();
    let lower = (-2.0 * net.eps).exp() * c_fine;
    Ok(CellMeasures {
        schema_version: SCHEMA_VERSION,
        delta,
        resolution,
        sandwich_holds: lower <= sum_a && sum_a <= c_fine * (1.0 + 1e-12),
        sandwich_lower: lower,
        cells: fine,
        sum_a,
        nu_c_ext: c_fine,
        nu_c_ext_closed: net.length / 2.0,
        quadrature_error: err,
    })
}
