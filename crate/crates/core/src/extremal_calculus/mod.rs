//! Derivative identities on period coordinates: the pairing `omega_phi`,
//! the derivative of the norm, Douady–Hubbard derivatives of track weights
//! and the closed-form torus oracle for the derivative of extremal length.

mod sweeps;
mod torus;

use rand::Rng;
use serde::Serialize;

pub use sweeps::*;
pub use torus::*;

use crate::flat_surface::library::{edge_to_slot, period_basis};
use crate::flat_surface::FlatSurface;
use crate::train_track::{adapted_track, weight_from_edge_derivative};
use crate::{Error, Result, C64};

/// Default central-difference step.
pub const DEFAULT_STEP: f64 = 1e-5;

/// Constant `K` in `dE(v) = K * omega_Th(eta, v)` and in the pushforward
/// identity `omega_phi = K * omega_Th`, as fitted on the torus by
/// [`fit_chain_constant`]. The sign records the clockwise switch order.
pub const CHAIN_CONSTANT: f64 = -1.0;

/// A tangent vector in period coordinates, stored as a derivative of every
/// slot vector. On each triangle the derivative is the real-linear map
/// `e -> A' e + B' conj(e)`; `A'` is the holomorphic part and `psi = 2 A' phi`
/// is the tangent quadratic differential on that triangle.
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodTangent {
    de: Vec<C64>,
    a: Vec<C64>,
    b: Vec<C64>,
}

impl PeriodTangent {
    /// Builds a tangent from per-slot edge derivatives, checking that they
    /// respect pairings and triangle closure.
    pub fn from_edge_derivatives(s: &FlatSurface, de: Vec<C64>) -> Result<Self> {
        if de.len() != s.num_slots() {
            return Err(Error::Argument("one derivative per slot expected".into()));
        }
        let scale = de.iter().map(|z| z.norm()).fold(0.0, f64::max).max(1.0);
        for x in 0..s.num_slots() {
            let p = s.partner(x);
            let expect = -f64::from(s.pairing_sign(x)) * de[x];
            if (de[p] - expect).norm() > 1e-12 * scale {
                return Err(Error::Argument(format!("tangent disagrees across the edge of slot {x}")));
            }
        }
        let mut a = Vec::with_capacity(s.num_triangles());
        let mut b = Vec::with_capacity(s.num_triangles());
        for t in 0..s.num_triangles() {
            let [x, y, z] = s.triangle(t);
            if (de[x] + de[y] + de[z]).norm() > 1e-12 * scale {
                return Err(Error::Argument(format!("tangent does not close on triangle {t}")));
            }
            let (ex, ey) = (s.vector(x), s.vector(y));
            let det = ex * ey.conj() - ex.conj() * ey;
            a.push((de[x] * ey.conj() - ex.conj() * de[y]) / det);
            b.push((ex * de[y] - de[x] * ey) / det);
        }
        Ok(PeriodTangent { de, a, b })
    }

    /// The tangent `c * phi`-direction: every edge moves by `c e`. The
    /// `phi`-direction is `c = 1/2` and the `i phi`-direction `c = i/2`.
    pub fn scaling(s: &FlatSurface, c: C64) -> Self {
        let de: Vec<C64> = s.vectors().iter().map(|v| c * v).collect();
        let n = s.num_triangles();
        PeriodTangent { de, a: vec![c; n], b: vec![C64::new(0.0, 0.0); n] }
    }

    pub fn phi_direction(s: &FlatSurface) -> Self {
        Self::scaling(s, C64::new(0.5, 0.0))
    }

    pub fn i_phi_direction(s: &FlatSurface) -> Self {
        Self::scaling(s, C64::new(0.0, 0.5))
    }

    pub fn zero(s: &FlatSurface) -> Self {
        Self::scaling(s, C64::new(0.0, 0.0))
    }

    /// Straight-line tangent from `s0` to `s1`, two surfaces sharing their
    /// combinatorics.
    pub fn between(s0: &FlatSurface, s1: &FlatSurface) -> Result<Self> {
        if s0.triangles() != s1.triangles() || s0.pairs() != s1.pairs() {
            return Err(Error::Argument("surfaces have different combinatorics".into()));
        }
        let de = s1.vectors().iter().zip(s0.vectors()).map(|(a, b)| a - b).collect();
        Self::from_edge_derivatives(s0, de)
    }

    /// Random admissible tangent, rescaled so that the largest `|A'|` equals
    /// `size`.
    pub fn random<R: Rng + ?Sized>(s: &FlatSurface, rng: &mut R, size: f64) -> Result<Self> {
        let basis = period_basis(s);
        let mut per_edge = vec![C64::new(0.0, 0.0); s.num_edges()];
        for b in &basis {
            let c = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            for (pe, &x) in per_edge.iter_mut().zip(b) {
                *pe += c * x;
            }
        }
        let raw = Self::from_edge_derivatives(s, edge_to_slot(s, &per_edge))?;
        let amax = raw.a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if amax == 0.0 {
            return Err(Error::Argument("surface has no holomorphic tangent directions".into()));
        }
        Ok(raw.scaled(C64::new(size / amax, 0.0)))
    }

    /// Complex multiple of the tangent, acting on edge derivatives.
    pub fn scaled(&self, c: C64) -> Self {
        // e -> c (A' e + B' conj e): the holomorphic part scales by c
        PeriodTangent {
            de: self.de.iter().map(|z| c * z).collect(),
            a: self.a.iter().map(|z| c * z).collect(),
            b: self.b.iter().map(|z| c * z).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let zip = |x: &[C64], y: &[C64]| x.iter().zip(y).map(|(p, q)| p + q).collect();
        PeriodTangent { de: zip(&self.de, &other.de), a: zip(&self.a, &other.a), b: zip(&self.b, &other.b) }
    }

    pub fn edge_derivatives(&self) -> &[C64] {
        &self.de
    }

    /// Holomorphic coefficient `A'` per triangle.
    pub fn holomorphic_part(&self) -> &[C64] {
        &self.a
    }

    /// Antiholomorphic coefficient `B'` per triangle.
    pub fn antiholomorphic_part(&self) -> &[C64] {
        &self.b
    }

    fn check_on(&self, s: &FlatSurface) -> Result<()> {
        if self.de.len() != s.num_slots() || self.a.len() != s.num_triangles() {
            return Err(Error::Argument("tangent belongs to another surface".into()));
        }
        Ok(())
    }
}

impl FlatSurface {
    /// The surface with every edge moved to `v + t dv`.
    pub fn perturbed(&self, p: &PeriodTangent, t: f64) -> Result<FlatSurface> {
        p.check_on(self)?;
        let v = self.vectors().iter().zip(&p.de).map(|(v, d)| v + d * t).collect();
        self.with_vectors(v).map_err(|e| Error::Geometric(format!("perturbed surface is degenerate: {e}")))
    }
}

/// The pairing `(1/4) Im sum_T (2 A'_1)(conj 2 A'_2) area(T)`.
pub fn omega_phi(s: &FlatSurface, p1: &PeriodTangent, p2: &PeriodTangent) -> Result<f64> {
    p1.check_on(s)?;
    p2.check_on(s)?;
    Ok((0..s.num_triangles()).map(|t| (p1.a[t] * p2.a[t].conj()).im * s.triangle_area(t)).sum())
}

/// `4 omega_phi(i phi, p)`.
pub fn d_norm_formula(s: &FlatSurface, p: &PeriodTangent) -> Result<f64> {
    Ok(4.0 * omega_phi(s, &PeriodTangent::i_phi_direction(s), p)?)
}

/// Norm of `phi + t psi`, with `psi = 2 A' phi` on every triangle.
pub fn norm_along(s: &FlatSurface, p: &PeriodTangent, t: f64) -> Result<f64> {
    p.check_on(s)?;
    let mut total = 0.0;
    for (k, a) in p.a.iter().enumerate() {
        let factor = (C64::new(1.0, 0.0) + a * (2.0 * t)).norm();
        if factor == 0.0 {
            return Err(Error::Geometric(format!("phi + t psi vanishes on triangle {k}")));
        }
        total += factor * s.triangle_area(k);
    }
    Ok(total)
}

fn check_step(step: f64) -> Result<()> {
    if !(1e-8..=1e-2).contains(&step) {
        return Err(Error::Argument(format!("step {step} outside [1e-8, 1e-2]")));
    }
    Ok(())
}

/// Central difference of the norm along `p`.
pub fn d_norm_fd(s: &FlatSurface, p: &PeriodTangent, step: f64) -> Result<f64> {
    check_step(step)?;
    Ok((norm_along(s, p, step)? - norm_along(s, p, -step)?) / (2.0 * step))
}

/// Richardson-extrapolated central difference (fourth order).
pub fn d_norm_fd_richardson(s: &FlatSurface, p: &PeriodTangent, step: f64) -> Result<f64> {
    let coarse = d_norm_fd(s, p, step)?;
    let fine = d_norm_fd(s, p, step / 2.0)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

#[derive(Clone, Debug, Serialize)]
pub struct BranchResidual {
    pub branch: usize,
    pub finite_difference: f64,
    pub formula: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodDerivativeReport {
    pub step: f64,
    pub branches: Vec<BranchResidual>,
    /// Largest branch residual divided by the largest formula weight.
    pub max_relative_residual: f64,
}

/// Compares the finite-difference derivative of the adapted measure along
/// `p` with the Douady–Hubbard weight `sgn(Re e) Re(de)`.
pub fn period_derivative_check(s: &FlatSurface, p: &PeriodTangent, step: f64) -> Result<PeriodDerivativeReport> {
    check_step(step)?;
    let (track, _) = adapted_track(s)?;
    let side = |t: f64| -> Result<Vec<f64>> {
        let moved = s.perturbed(p, t).map_err(|e| Error::NonSmooth(e.to_string()))?;
        let (tt, m) = adapted_track(&moved).map_err(|e| Error::NonSmooth(e.to_string()))?;
        if tt != track {
            return Err(Error::NonSmooth("adapted track changes within the difference step".into()));
        }
        Ok(m)
    };
    let plus = side(step)?;
    let minus = side(-step)?;
    let w = weight_from_edge_derivative(s, &p.de)?;
    let scale = w.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);
    let branches: Vec<BranchResidual> = (0..w.len())
        .map(|b| {
            let fd = (plus[b] - minus[b]) / (2.0 * step);
            BranchResidual { branch: b, finite_difference: fd, formula: w[b], residual: (fd - w[b]).abs() }
        })
        .collect();
    let max_relative_residual = branches.iter().map(|r| r.residual).fold(0.0, f64::max) / scale;
    Ok(PeriodDerivativeReport { step, branches, max_relative_residual })
}

/// `(1/2) ln ext`.
pub fn busemann(ext: f64) -> Result<f64> {
    if !(ext > 0.0) {
        return Err(Error::Domain(format!("extremal length {ext} is not positive")));
    }
    Ok(0.5 * ext.ln())
}

/// Kerckhoff's bound `ext(Y) / ext(X) <= e^{2 d(X, Y)}`.
pub fn kerckhoff_check(ext_x: f64, ext_y: f64, d_xy: f64) -> bool {
    ext_y / ext_x <= (2.0 * d_xy).exp() + 1e-9
}
