//! Seeded randomized sweeps behind the derivative acceptance checks. Every
//! instance draws from its own generator, so results do not depend on the
//! execution mode.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::torus::{level_set_transversality, torus_derivative_chain_check, torus_track_data, TorusPoint};
use super::{d_norm_fd, d_norm_formula, period_derivative_check, PeriodTangent, CHAIN_CONSTANT};
use crate::flat_surface::library::random_genus_two;
use crate::flat_surface::FlatSurface;
use crate::train_track::Weight;
use crate::{Error, Exec, Result, C64, SCHEMA_VERSION};

/// Size of the largest `|A'|` of sweep tangents. Large enough that the
/// truncation error of central differences dominates rounding.
pub const TANGENT_SIZE: f64 = 3.0;

#[derive(Clone, Debug, Serialize)]
pub struct DerivativeReport {
    pub schema_version: u32,
    pub check: String,
    pub instances: usize,
    pub step: f64,
    pub max_residual: f64,
    pub tolerance: f64,
    pub constant: Option<f64>,
    pub residuals: Vec<f64>,
    /// Residual at `step` over residual at `step / 2`, per instance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub halving_ratios: Option<Vec<f64>>,
    pub passed: bool,
}

impl DerivativeReport {
    fn new(check: &str, step: f64, tolerance: f64, constant: Option<f64>, residuals: Vec<f64>) -> Self {
        let max_residual = residuals.iter().copied().fold(0.0, f64::max);
        DerivativeReport {
            schema_version: SCHEMA_VERSION,
            check: check.into(),
            instances: residuals.len(),
            step,
            max_residual,
            tolerance,
            constant,
            passed: max_residual < tolerance,
            residuals,
            halving_ratios: None,
        }
    }
}

pub(crate) fn instance_rng(seed: u64, i: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn norm_instance(seed: u64, i: usize, step: f64) -> Result<(f64, f64)> {
    let mut rng = instance_rng(seed, i);
    let s = random_genus_two(&mut rng, i)?;
    let p = PeriodTangent::random(&s, &mut rng, TANGENT_SIZE)?;
    let exact = d_norm_formula(&s, &p)?;
    let r1 = (d_norm_fd(&s, &p, step)? - exact).abs() / exact.abs();
    let r2 = (d_norm_fd(&s, &p, step / 2.0)? - exact).abs() / exact.abs();
    Ok((r1, r2))
}

/// Derivative of the norm: formula against central differences on random
/// genus two surfaces and tangents.
pub fn norm_derivative_sweep(instances: usize, seed: u64, step: f64, exec: Exec) -> Result<DerivativeReport> {
    let rows: Vec<Result<(f64, f64)>> = exec.map_range(instances, |i| norm_instance(seed, i, step));
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut report = DerivativeReport::new("norm-derivative", step, 1e-6, None, rows.iter().map(|r| r.0).collect());
    report.halving_ratios = Some(rows.iter().map(|r| r.0 / r.1).collect());
    Ok(report)
}

/// Derivative of the norm on one given surface, along seeded random
/// tangents.
pub fn surface_norm_check(
    s: &FlatSurface,
    tangents: usize,
    seed: u64,
    step: f64,
    exec: Exec,
) -> Result<DerivativeReport> {
    let rows: Vec<Result<(f64, f64)>> = exec.map_range(tangents, |i| {
        let mut rng = instance_rng(seed, i);
        let p = PeriodTangent::random(s, &mut rng, TANGENT_SIZE)?;
        let exact = d_norm_formula(s, &p)?;
        let r1 = (d_norm_fd(s, &p, step)? - exact).abs() / exact.abs();
        let r2 = (d_norm_fd(s, &p, step / 2.0)? - exact).abs() / exact.abs();
        Ok((r1, r2))
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut report =
        DerivativeReport::new("surface-norm-derivative", step, 1e-6, None, rows.iter().map(|r| r.0).collect());
    report.halving_ratios = Some(rows.iter().map(|r| r.0 / r.1).collect());
    Ok(report)
}

fn period_instance(seed: u64, i: usize, step: f64) -> Result<f64> {
    let mut rng = instance_rng(seed, i);
    for _ in 0..100 {
        let s = random_genus_two(&mut rng, i)?;
        let p = PeriodTangent::random(&s, &mut rng, TANGENT_SIZE)?;
        match period_derivative_check(&s, &p, step) {
            Ok(r) => return Ok(r.max_relative_residual),
            Err(Error::NonSmooth(_) | Error::DegenerateFoliation(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Resource { what: format!("no smooth instance for seed {seed}, index {i}"), partial: 0 })
}

/// Douady–Hubbard derivative of adapted measures on random genus two
/// surfaces.
pub fn period_derivative_sweep(instances: usize, seed: u64, step: f64, exec: Exec) -> Result<DerivativeReport> {
    let rows: Vec<Result<f64>> = exec.map_range(instances, |i| period_instance(seed, i, step));
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(DerivativeReport::new("period-derivative", step, 1e-6, None, rows))
}

/// Random torus modulus and foliation periods with no vertical edge.
pub fn random_torus_case(rng: &mut ChaCha8Rng) -> Result<(TorusPoint, [f64; 2])> {
    let tau = C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.6..2.0));
    loop {
        let x1: f64 = rng.gen_range(0.2..1.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        let x2: f64 = rng.gen_range(0.2..1.0) * if rng.gen::<bool>() { 1.0 } else { -1.0 };
        if (x1 + x2).abs() > 0.1 {
            return Ok((TorusPoint::new(tau)?, [x1, x2]));
        }
    }
}

fn chain_instance(seed: u64, i: usize, step: f64, constant: f64) -> Result<f64> {
    let mut rng = instance_rng(seed, i);
    let (x, periods) = random_torus_case(&mut rng)?;
    let (track, _, _) = torus_track_data(&x, periods)?;
    let basis = track.weight_space_basis();
    let direction: Weight = {
        let (c1, c2): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        basis[0].iter().zip(&basis[1]).map(|(a, b)| c1 * a + c2 * b).collect()
    };
    let r = torus_derivative_chain_check(&x, periods, &[direction], step, constant)?;
    Ok(r.max_residual)
}

/// Torus full chain with the frozen constant.
pub fn torus_chain_sweep(instances: usize, seed: u64, step: f64, exec: Exec) -> Result<DerivativeReport> {
    let rows: Vec<Result<f64>> = exec.map_range(instances, |i| chain_instance(seed, i, step, CHAIN_CONSTANT));
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(DerivativeReport::new("torus-chain", step, 1e-5, Some(CHAIN_CONSTANT), rows))
}

#[derive(Clone, Debug, Serialize)]
pub struct TransversalityReport {
    pub schema_version: u32,
    pub instances: usize,
    pub transverse: usize,
    pub min_gap: f64,
    pub passed: bool,
}

/// Random pairs of distinct tori and a shared foliation; counts how many
/// give distinct `eta`.
pub fn transversality_sweep(instances: usize, seed: u64, exec: Exec) -> Result<TransversalityReport> {
    let rows: Vec<Result<(bool, f64)>> = exec.map_range(instances, |i| {
        let mut rng = instance_rng(seed, i);
        let (x, periods) = random_torus_case(&mut rng)?;
        let (y, _) = random_torus_case(&mut rng)?;
        let ok = level_set_transversality(&x, &y, periods)?;
        let (_, _, ex) = torus_track_data(&x, periods)?;
        let (_, _, ey) = torus_track_data(&y, periods)?;
        let gap = ex.iter().zip(&ey).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        Ok((ok, gap))
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let transverse = rows.iter().filter(|r| r.0).count();
    Ok(TransversalityReport {
        schema_version: SCHEMA_VERSION,
        instances,
        transverse,
        min_gap: rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min),
        passed: transverse == instances,
    })
}

/// Kerckhoff's inequality on random torus pairs and curves. Returns the
/// number of violations.
pub fn kerckhoff_sweep(samples: usize, seed: u64) -> Result<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut violations = 0;
    for _ in 0..samples {
        let x = TorusPoint::new(C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.2..3.0)))?;
        let y = TorusPoint::new(C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(0.2..3.0)))?;
        let (p, q) = loop {
            let p: i64 = rng.gen_range(-5..=5);
            let q: i64 = rng.gen_range(-5..=5);
            if (p, q) != (0, 0) {
                break (p, q);
            }
        };
        let ex = super::torus_extremal(&x, p, q, 1.0)?;
        let ey = super::torus_extremal(&y, p, q, 1.0)?;
        if !super::kerckhoff_check(ex, ey, x.teichmuller_distance(&y)) {
            violations += 1;
        }
    }
    Ok(violations)
}
