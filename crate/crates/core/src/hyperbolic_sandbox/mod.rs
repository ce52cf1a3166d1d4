//! The upper half-plane model, where every estimate about axes, Busemann
//! functions and rays has a closed form.
//!
//! A horocycle point `zeta` (the stand-in for a measured foliation) is a
//! nonzero vector `v = (p, q)` up to sign, with Busemann function
//! `beta(zeta, z) = ln(|p + q z|^2 / Im z)`. Its boundary point is
//! `xi = -p / q` and its scale `s` is `q^2` (or `p^2` when `xi = inf`), so
//! `beta = ln s + ln(|z - xi|^2 / Im z)`, and `beta = ln s - ln y` for
//! `xi = inf`. Multiplying `v` by `e^{c/2}` adds `c` to `beta`.

mod checks;

use serde::Serialize;

pub use checks::*;

use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiskPoint {
    pub x: f64,
    pub y: f64,
}

impl DiskPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::Domain(format!("({x}, {y}) is not in the upper half plane")));
        }
        Ok(DiskPoint { x, y })
    }

    pub fn z(&self) -> C64 {
        C64::new(self.x, self.y)
    }

    fn from_c(z: C64) -> Self {
        DiskPoint { x: z.re, y: z.im }
    }
}

/// Hyperbolic distance `arcosh(1 + |X - Y|^2 / (2 y_X y_Y))`.
pub fn dist(a: &DiskPoint, b: &DiskPoint) -> f64 {
    let d2 = (a.x - b.x).powi(2) + (a.y - b.y).powi(2);
    // 2 asinh(|X - Y| / (2 sqrt(y_X y_Y))) is the same value without the
    // cancellation of arcosh near 1
    2.0 * (d2.sqrt() / (2.0 * (a.y * b.y).sqrt())).asinh()
}

/// A point of the boundary `R + {inf}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Boundary {
    Finite(f64),
    Infinity,
}

/// Orientation-preserving isometry `z -> (a z + b) / (c z + d)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiskIsometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl DiskIsometry {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if (det - 1.0).abs() > 1e-12 {
            return Err(Error::Argument(format!("determinant {det} is not 1")));
        }
        Ok(DiskIsometry { a, b, c, d })
    }

    pub fn identity() -> Self {
        DiskIsometry { a: 1.0, b: 0.0, c: 0.0, d: 1.0 }
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.trace().abs() > 2.0
    }

    /// `self * other`, acting as `self(other(z))`.
    pub fn compose(&self, o: &DiskIsometry) -> DiskIsometry {
        DiskIsometry {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    pub fn inverse(&self) -> DiskIsometry {
        DiskIsometry { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn apply(&self, p: &DiskPoint) -> DiskPoint {
        let z = p.z();
        DiskPoint::from_c((z * self.a + self.b) / (z * self.c + self.d))
    }

    pub fn apply_boundary(&self, xi: Boundary) -> Boundary {
        match xi {
            Boundary::Infinity if self.c == 0.0 => Boundary::Infinity,
            Boundary::Infinity => Boundary::Finite(self.a / self.c),
            Boundary::Finite(x) => {
                let den = self.c * x + self.d;
                if den == 0.0 {
                    Boundary::Infinity
                } else {
                    Boundary::Finite((self.a * x + self.b) / den)
                }
            }
        }
    }

    pub fn apply_horocycle(&self, h: &HorocyclePoint) -> HorocyclePoint {
        // beta(g zeta, g z) = beta(zeta, z) forces v -> [[a, -b], [-c, d]] v
        let (p, q) = h.vector();
        HorocyclePoint::from_vector(self.a * p - self.b * q, -self.c * p + self.d * q)
            .expect("isometries keep vectors nonzero")
    }
}

/// Sandbox stand-in for a measured foliation: a boundary point and a
/// positive scale.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HorocyclePoint {
    pub xi: Boundary,
    pub scale: f64,
}

impl HorocyclePoint {
    pub fn new(xi: Boundary, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::Domain(format!("scale {scale} is not positive")));
        }
        Ok(HorocyclePoint { xi, scale })
    }

    /// The vector `(p, q)` with `beta = ln(|p + q z|^2 / Im z)`.
    pub fn vector(&self) -> (f64, f64) {
        let r = self.scale.sqrt();
        match self.xi {
            Boundary::Infinity => (r, 0.0),
            Boundary::Finite(x) => (-x * r, r),
        }
    }

    pub fn from_vector(p: f64, q: f64) -> Result<Self> {
        if q != 0.0 {
            Self::new(Boundary::Finite(-p / q), q * q)
        } else {
            Self::new(Boundary::Infinity, p * p)
        }
    }

    /// Adds `c` to the Busemann function.
    pub fn rescaled(&self, c: f64) -> Self {
        HorocyclePoint { xi: self.xi, scale: self.scale * c.exp() }
    }
}

/// Closed-form horocyclic Busemann function.
pub fn busemann_h2(h: &HorocyclePoint, p: &DiskPoint) -> f64 {
    let (a, b) = h.vector();
    let w = C64::new(a, 0.0) + p.z() * b;
    (w.norm_sqr() / p.y).ln()
}

/// `beta(zeta, Y) - beta(zeta, X)`.
pub fn busemann_cocycle(h: &HorocyclePoint, x: &DiskPoint, y: &DiskPoint) -> f64 {
    busemann_h2(h, y) - busemann_h2(h, x)
}

/// Axis of a hyperbolic isometry, with a normalising isometry that sends
/// it to the imaginary axis (repelling end to 0, attracting end to inf).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Axis {
    pub repelling: Boundary,
    pub attracting: Boundary,
    pub translation_length: f64,
    pub to_standard: DiskIsometry,
}

/// Fixed points and translation length `2 arcosh(|tr| / 2)`.
pub fn axis(g: &DiskIsometry) -> Result<Axis> {
    if !g.is_hyperbolic() {
        return Err(Error::Argument(format!("isometry with trace {} is not hyperbolic", g.trace())));
    }
    let length = 2.0 * (g.trace().abs() / 2.0).acosh();
    let (repelling, attracting) = if g.c == 0.0 {
        let finite = Boundary::Finite(g.b / (g.d - g.a));
        if g.a.abs() > g.d.abs() {
            (finite, Boundary::Infinity)
        } else {
            (Boundary::Infinity, finite)
        }
    } else {
        // c z^2 + (d - a) z - b = 0
        let disc = ((g.d - g.a).powi(2) + 4.0 * g.b * g.c).sqrt();
        let z1 = (g.a - g.d + disc) / (2.0 * g.c);
        let z2 = (g.a - g.d - disc) / (2.0 * g.c);
        // attracting where |c z + d| > 1
        if (g.c * z1 + g.d).abs() > 1.0 {
            (Boundary::Finite(z2), Boundary::Finite(z1))
        } else {
            (Boundary::Finite(z1), Boundary::Finite(z2))
        }
    };
    let to_standard = match (repelling, attracting) {
        (Boundary::Finite(r), Boundary::Infinity) => DiskIsometry::new(1.0, -r, 0.0, 1.0)?,
        (Boundary::Infinity, Boundary::Finite(a)) => DiskIsometry::new(0.0, -1.0, 1.0, -a)?,
        (Boundary::Finite(r), Boundary::Finite(a)) => {
            let k = (r - a).abs().sqrt();
            let sg = (r - a).signum();
            DiskIsometry::new(sg / k, -sg * r / k, 1.0 / k, -a / k)?
        }
        _ => unreachable!("a hyperbolic isometry has two distinct fixed points"),
    };
    Ok(Axis { repelling, attracting, translation_length: length, to_standard })
}

impl Axis {
    /// The imaginary axis, traversed upwards.
    pub fn imaginary() -> Axis {
        Axis {
            repelling: Boundary::Finite(0.0),
            attracting: Boundary::Infinity,
            translation_length: 0.0,
            to_standard: DiskIsometry::identity(),
        }
    }

    /// Axis point at signed arclength `t` from the image of `i`.
    pub fn point_at(&self, t: f64) -> DiskPoint {
        self.to_standard.inverse().apply(&DiskPoint { x: 0.0, y: t.exp() })
    }

    /// Arclength coordinate of the foot point of `p`.
    pub fn arclength(&self, p: &DiskPoint) -> f64 {
        self.to_standard.apply(p).z().norm().ln()
    }

    pub fn distance_to(&self, p: &DiskPoint) -> f64 {
        let w = self.to_standard.apply(p);
        let r = w.z().norm();
        (r / w.y).acosh()
    }

    /// Arclength of the point of the axis where `beta(zeta, .)` is
    /// smallest, or `None` when `zeta` is an endpoint of the axis.
    pub fn busemann_minimizer(&self, h: &HorocyclePoint) -> Option<f64> {
        let (p, q) = self.to_standard.apply_horocycle(h).vector();
        // beta(i e^t) = ln(p^2 e^-t + q^2 e^t)
        if p == 0.0 || q == 0.0 {
            None
        } else {
            Some((p / q).abs().ln())
        }
    }
}

/// Foot of the perpendicular from `p` to the axis.
pub fn project_to_axis(p: &DiskPoint, axis: &Axis) -> DiskPoint {
    axis.point_at(axis.arclength(p))
}

/// Boundary point reached by the geodesic ray from `from` through
/// `through`.
pub fn ray_endpoint(from: &DiskPoint, through: &DiskPoint) -> Boundary {
    let dx = through.x - from.x;
    let scale = from.z().norm().max(through.z().norm()).max(1.0);
    if dx.abs() <= 1e-14 * scale {
        return if through.y > from.y { Boundary::Infinity } else { Boundary::Finite(from.x) };
    }
    let c = (from.z().norm_sqr() - through.z().norm_sqr()) / (2.0 * (from.x - through.x));
    let r = (from.z() - c).norm();
    Boundary::Finite(if dx > 0.0 { c + r } else { c - r })
}

/// Point at distance `t` from `p` on the geodesic ray toward `xi`.
pub fn along_ray(p: &DiskPoint, xi: Boundary, t: f64) -> DiskPoint {
    let h = match xi {
        Boundary::Infinity => DiskIsometry::identity(),
        Boundary::Finite(x) => DiskIsometry { a: 0.0, b: -1.0, c: 1.0, d: -x },
    };
    let w = h.apply(p);
    h.inverse().apply(&DiskPoint { x: w.x, y: w.y * t.exp() })
}

#[cfg(test)]
mod tests;
