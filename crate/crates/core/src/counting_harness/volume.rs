//! Area of `B(axis, R)` modulo `<gamma>`: closed form `2 L sinh R`, a Monte
//! Carlo cross-check, and comparison with orbit counts.
//!
//! In standard coordinates `z = ρ e^{iφ}`, the foot arclength is `ln ρ`,
//! the distance to the axis is `arcosh(1 / sin φ)`, and the area element is
//! `d(ln ρ) dφ / sin^2 φ`. A period is `ln ρ ∈ [0, L)`, so the area is
//! `L ∫ dφ / sin^2 φ` over `sin φ >= 1 / cosh R`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::orbit::{fit_exponential, to_isometry, ExpFit, IMat};
use crate::hyperbolic_sandbox::axis;
use crate::{Error, Exec, Result, SCHEMA_VERSION};

pub const MIN_SAMPLES: usize = 100_000;
const CHUNK: usize = 8192;

pub fn tube_area(length: f64, r: f64) -> f64 {
    2.0 * length * r.sinh()
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeRow {
    pub r: f64,
    pub closed_form: f64,
    pub monte_carlo: f64,
    pub std_error: f64,
    pub area_over_exp: f64,
    pub count: Option<usize>,
    pub area_over_count: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeReport {
    pub schema_version: u32,
    pub translation_length: f64,
    pub samples: usize,
    pub seed: u64,
    pub rows: Vec<VolumeRow>,
    pub fit: ExpFit,
    /// Spread `(max - min) / mean` of area/count over the three largest
    /// radii, when counts were supplied.
    pub ratio_spread: Option<f64>,
}

/// Sample mean and standard error of the area estimator: `φ` uniform on
/// `[φ_R, π - φ_R]`, weight `L (π - 2 φ_R) / sin^2 φ`.
fn monte_carlo(length: f64, r: f64, samples: usize, seed: u64, exec: Exec) -> (f64, f64) {
    let phi_r = (1.0 / r.cosh()).asin();
    let span = std::f64::consts::PI - 2.0 * phi_r;
    let chunks = samples.div_ceil(CHUNK);
    let sums = exec.map_range(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let m = CHUNK.min(samples - c * CHUNK);
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..m {
            let phi = phi_r + span * rng.gen::<f64>();
            let w = length * span / phi.sin().powi(2);
            s += w;
            s2 += w * w;
        }
        (s, s2)
    });
    let (s, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = samples as f64;
    let mean = s / n;
    let var = (s2 / n - mean * mean).max(0.0) * n / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Tube areas over the grid, Monte Carlo within 3σ, the exponential fit,
/// and area/count ratios when `counts` (one per radius) are given.
pub fn volume_near_axis(
    gamma: &IMat,
    radii: &[f64],
    samples: usize,
    seed: u64,
    counts: Option<&[usize]>,
    exec: Exec,
) -> Result<VolumeReport> {
    if samples < MIN_SAMPLES {
        return Err(Error::Argument(format!("{samples} samples; at least {MIN_SAMPLES} required")));
    }
    if counts.is_some_and(|c| c.len() != radii.len()) {
        return Err(Error::Argument("one count per radius is required".into()));
    }
    let length = axis(&to_isometry(gamma))?.translation_length;
    let mut rows = Vec::new();
    for (k, &r) in radii.iter().enumerate() {
        let closed = tube_area(length, r);
        let (mc, se) = monte_carlo(length, r, samples, seed.wrapping_add(k as u64), exec);
        if (mc - closed).abs() > 3.0 * se {
            return Err(Error::Sampling(format!(
                "Monte Carlo area {mc} differs from {closed} by more than 3σ = {}",
                3.0 * se
            )));
        }
        let count = counts.map(|c| c[k]);
        rows.push(VolumeRow {
            r,
            closed_form: closed,
            monte_carlo: mc,
            std_error: se,
            area_over_exp: closed / r.exp(),
            count,
            area_over_count: count.filter(|&c| c > 0).map(|c| closed / c as f64),
        });
    }
    let fit = fit_exponential(radii, &rows.iter().map(|r| r.closed_form).collect::<Vec<_>>())?;
    let ratio_spread = counts.and_then(|_| {
        let top: Vec<f64> = rows.iter().rev().take(3).filter_map(|r| r.area_over_count).collect();
        (top.len() == 3).then(|| {
            let mean = top.iter().sum::<f64>() / 3.0;
            let (lo, hi) = top.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
            (hi - lo) / mean
        })
    });
    Ok(VolumeReport {
        schema_version: SCHEMA_VERSION,
        translation_length: length,
        samples,
        seed,
        rows,
        fit,
        ratio_spread,
    })
}
