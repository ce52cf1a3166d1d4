//! Closed-form extremal length on flat tori, used as an oracle for the
//! derivative of extremal length in train-track coordinates.
//!
//! A measured foliation on the marked torus `C / (Z + tau Z)` is recorded by
//! its signed horizontal periods `x = (x1, x2)` along the curves `1` and
//! `tau`. It is the vertical foliation of `alpha^2 dz^2` with
//! `Re alpha = x1` and `Re(alpha tau) = x2`, and its extremal length is the
//! area `|x1 tau - x2|^2 / Im tau`.

use serde::Serialize;

use super::CHAIN_CONSTANT;
use crate::flat_surface::library::torus_tau;
use crate::flat_surface::FlatSurface;
use crate::train_track::{adapted_track, weight_from_differential, Direction, TrainTrack, Weight};
use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TorusPoint {
    pub tau: C64,
}

impl TorusPoint {
    pub fn new(tau: C64) -> Result<Self> {
        if !(tau.im > 0.0) {
            return Err(Error::Domain(format!("modulus {tau} is not in the upper half plane")));
        }
        Ok(TorusPoint { tau })
    }

    /// Teichmüller distance, half the hyperbolic distance between moduli.
    pub fn teichmuller_distance(&self, other: &TorusPoint) -> f64 {
        let (a, b) = (self.tau, other.tau);
        0.5 * (1.0 + (a - b).norm_sqr() / (2.0 * a.im * b.im)).acosh()
    }

    /// The flat torus whose vertical foliation has horizontal periods `x`.
    pub fn surface(&self, x: [f64; 2]) -> Result<FlatSurface> {
        let alpha = C64::new(x[0], (x[0] * self.tau.re - x[1]) / self.tau.im);
        torus_tau(self.tau, alpha)
    }

    /// Extremal length of the foliation with horizontal periods `x`.
    pub fn extremal_length(&self, x: [f64; 2]) -> f64 {
        (self.tau * x[0] - x[1]).norm_sqr() / self.tau.im
    }
}

/// Extremal length `scale^2 |p + q tau|^2 / Im tau` of `scale` times the
/// simple closed curve `(p, q)`.
pub fn torus_extremal(x: &TorusPoint, p: i64, q: i64, scale: f64) -> Result<f64> {
    if p == 0 && q == 0 {
        return Err(Error::Domain("curve class (0, 0) is degenerate".into()));
    }
    if !(scale > 0.0) {
        return Err(Error::Domain(format!("scale {scale} is not positive")));
    }
    let z = C64::new(p as f64, 0.0) + x.tau * q as f64;
    Ok(scale * scale * z.norm_sqr() / x.tau.im)
}

/// Adapted track, measure and `eta = 4 w(Delta, i phi)` of a torus
/// foliation.
pub fn torus_track_data(x: &TorusPoint, periods: [f64; 2]) -> Result<(TrainTrack, Weight, Weight)> {
    let s = x.surface(periods)?;
    let (track, mu) = adapted_track(&s).map_err(|e| Error::NonSmooth(e.to_string()))?;
    let eta = weight_from_differential(&s, Direction::VerticalImaginary)?.into_iter().map(|w| 4.0 * w).collect();
    Ok((track, mu, eta))
}

/// Horizontal periods carried by a measure on the torus track; `sign` is
/// `sgn Re` of the first two edges.
fn periods_of(mu: &[f64], sign: [f64; 2]) -> [f64; 2] {
    [sign[0] * mu[0], sign[1] * mu[1]]
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainCase {
    pub direction: Weight,
    pub finite_difference: f64,
    pub formula: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct TorusChainReport {
    pub tau: [f64; 2],
    pub periods: [f64; 2],
    pub step: f64,
    pub constant: f64,
    pub cases: Vec<ChainCase>,
    pub max_residual: f64,
}

/// Finite-difference derivative of `E_X` in track coordinates against
/// `constant * omega_Th(eta, v)` for every direction `v`.
///
/// The residual is relative to `max(|fd|, E |v| / |mu|)`, the natural size
/// of a directional derivative of a quadratic function.
pub fn torus_derivative_chain_check(
    x: &TorusPoint,
    periods: [f64; 2],
    directions: &[Weight],
    step: f64,
    constant: f64,
) -> Result<TorusChainReport> {
    let (track, mu, eta) = torus_track_data(x, periods)?;
    let sign = [periods[0].signum(), periods[1].signum()];
    let e0 = x.extremal_length(periods);
    let norm = |w: &[f64]| w.iter().map(|a| a * a).sum::<f64>().sqrt();
    let mut cases = Vec::with_capacity(directions.len());
    for v in directions {
        if !track.check_switch(v)? {
            return Err(Error::Argument("direction violates the switch condition".into()));
        }
        let moved = |t: f64| -> Result<f64> {
            let w: Weight = mu.iter().zip(v).map(|(a, b)| a + t * b).collect();
            if w.iter().any(|&a| a <= 0.0) {
                return Err(Error::NonSmooth("difference step leaves the track's cone".into()));
            }
            Ok(x.extremal_length(periods_of(&w, sign)))
        };
        let fd = (moved(step)? - moved(-step)?) / (2.0 * step);
        let formula = constant * track.thurston_form(&eta, v)?;
        let denom = fd.abs().max(e0 * norm(v) / norm(&mu));
        cases.push(ChainCase {
            direction: v.clone(),
            finite_difference: fd,
            formula,
            residual: (fd - formula).abs() / denom,
        });
    }
    let max_residual = cases.iter().map(|c| c.residual).fold(0.0, f64::max);
    Ok(TorusChainReport { tau: [x.tau.re, x.tau.im], periods, step, constant, cases, max_residual })
}

/// Fits the chain constant on the square torus with the foliation of
/// direction 0.3, along the scaling direction of the measure.
pub fn fit_chain_constant() -> Result<f64> {
    let x = TorusPoint::new(C64::new(0.0, 1.0))?;
    let periods = [0.3f64.cos(), -0.3f64.sin()];
    let (track, mu, eta) = torus_track_data(&x, periods)?;
    let h = 1e-5;
    let sign = [1.0, -1.0];
    let e = |t: f64| {
        let w: Weight = mu.iter().map(|a| a * (1.0 + t)).collect();
        x.extremal_length(periods_of(&w, sign))
    };
    let fd = (e(h) - e(-h)) / (2.0 * h);
    Ok(fd / track.thurston_form(&eta, &mu)?)
}

/// Whether `eta_X` and `eta_Y` differ for the foliation with horizontal
/// periods `periods`, certifying that `d(E_X - E_Y)` does not vanish there.
pub fn level_set_transversality(x: &TorusPoint, y: &TorusPoint, periods: [f64; 2]) -> Result<bool> {
    if (x.tau - y.tau).norm() <= 1e-9 {
        return Err(Error::Argument("X and Y coincide".into()));
    }
    let (tx, _, ex) = torus_track_data(x, periods)?;
    let (ty, _, ey) = torus_track_data(y, periods)?;
    if tx != ty {
        return Err(Error::Mismatch("adapted tracks of X and Y differ".into()));
    }
    let gap = ex.iter().zip(&ey).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(gap > 1e-9)
}

/// Pushforward identity on scalar tangents: `omega_phi(c1 phi, c2 phi)` against
/// `CHAIN_CONSTANT * omega_Th` of the derivative weights. Returns both sides.
pub fn pushforward_pair(s: &FlatSurface, c1: C64, c2: C64) -> Result<(f64, f64)> {
    use super::{omega_phi, PeriodTangent};
    use crate::train_track::weight_from_edge_derivative;
    let (track, _) = adapted_track(s)?;
    let p1 = PeriodTangent::scaling(s, c1);
    let p2 = PeriodTangent::scaling(s, c2);
    let w1 = weight_from_edge_derivative(s, p1.edge_derivatives())?;
    let w2 = weight_from_edge_derivative(s, p2.edge_derivatives())?;
    Ok((omega_phi(s, &p1, &p2)?, CHAIN_CONSTANT * track.thurston_form(&w1, &w2)?))
}
