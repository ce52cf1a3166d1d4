//! Seeded sweeps over random genus two surfaces: the Thurston form under
//! splits, the flip/split square, and reconstruction from track data.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{adapted_track, weight_from_differential, Direction, TrainTrack, Weight};
use crate::flat_surface::library::random_genus_two;
use crate::{Error, Exec, Result, SCHEMA_VERSION};

/// Random element of the weight space (switch conditions hold).
pub fn random_weight<R: Rng>(t: &TrainTrack, rng: &mut R) -> Weight {
    let mut w = vec![0.0; t.num_branches()];
    for b in t.weight_space_basis() {
        let c: f64 = rng.gen_range(-1.0..1.0);
        for (x, y) in w.iter_mut().zip(&b) {
            *x += c * y;
        }
    }
    w
}

fn rng_for(seed: u64, i: usize) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(i as u64 + 1);
    r
}

#[derive(Clone, Debug, Serialize)]
pub struct SymplecticReport {
    pub schema_version: u32,
    pub form_samples: usize,
    pub antisymmetry_max: f64,
    pub bilinearity_max: f64,
    pub splits: usize,
    pub split_invariance_max: f64,
    pub square_instances: usize,
    pub square_track_mismatches: usize,
    pub square_weight_max: f64,
    pub tolerance: f64,
    pub passed: bool,
}

const TOL: f64 = 1e-12;
const SPLITS_PER_SURFACE: usize = 10;

/// Antisymmetry, bilinearity, form samples, split invariance, splits done.
type SurfaceRow = (f64, f64, usize, f64, usize);

/// Antisymmetry and bilinearity of the form, invariance along chains of
/// random splits, and the flip/split square on random large branches.
pub fn symplectic_sweep(splits: usize, squares: usize, seed: u64, exec: Exec) -> Result<SymplecticReport> {
    let surfaces = splits.div_ceil(SPLITS_PER_SURFACE);
    let rows: Vec<Result<SurfaceRow>> = exec.map_range(surfaces, |i| {
        let mut rng = rng_for(seed, i);
        let s = random_genus_two(&mut rng, i)?;
        let (mut t, mut m) = adapted_track(&s)?;
        let (mut anti, mut bil) = (0.0f64, 0.0f64);
        for _ in 0..5 {
            let (a, b, c) = (random_weight(&t, &mut rng), random_weight(&t, &mut rng), random_weight(&t, &mut rng));
            let ab = t.thurston_form(&a, &b)?;
            anti = anti.max((ab + t.thurston_form(&b, &a)?).abs()).max(t.thurston_form(&a, &a)?.abs());
            let k: f64 = rng.gen_range(-2.0..2.0);
            let mix: Weight = b.iter().zip(&c).map(|(x, y)| k * x + y).collect();
            bil = bil.max((t.thurston_form(&a, &mix)? - k * ab - t.thurston_form(&a, &c)?).abs());
        }
        let (mut w1, mut w2) = (random_weight(&t, &mut rng), random_weight(&t, &mut rng));
        let mut worst = 0.0f64;
        let mut done = 0;
        let target = SPLITS_PER_SURFACE.min(splits - i * SPLITS_PER_SURFACE);
        let mut attempts = 0;
        while done < target && attempts < 100 {
            attempts += 1;
            let large = t.large_branches();
            if large.is_empty() {
                break;
            }
            let b = large[rng.gen_range(0..large.len())];
            let push = match t.split_weight_map(&m, b) {
                Ok(f) => f,
                Err(Error::DegenerateSplit(_)) => continue,
                Err(e) => return Err(e),
            };
            let (t2, m2) = t.split(&m, b)?;
            let (p1, p2) = (push(&w1), push(&w2));
            worst = worst.max((t.thurston_form(&w1, &w2)? - t2.thurston_form(&p1, &p2)?).abs());
            (t, m, w1, w2) = (t2, m2, p1, p2);
            done += 1;
        }
        Ok((anti, bil, 5, worst, done))
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;

    let mut square_instances = 0;
    let mut mismatches = 0;
    let mut square_max = 0.0f64;
    let mut k = 0;
    while square_instances < squares && k < 50 * squares.max(1) {
        let mut rng = rng_for(seed ^ 0x5151, k);
        let s = random_genus_two(&mut rng, k)?;
        k += 1;
        let (t, m) = adapted_track(&s)?;
        let ids = s.edge_ids();
        for (slot, &b) in ids.iter().enumerate() {
            if slot > s.partner(slot) || !t.is_large(b) || square_instances >= squares {
                continue;
            }
            let Ok(f) = s.flip(slot) else { continue };
            let (tf, mf) = adapted_track(&f)?;
            let (ts, ms) = match t.split(&m, b) {
                Ok(x) => x,
                Err(Error::DegenerateSplit(_)) => continue,
                Err(e) => return Err(e),
            };
            square_instances += 1;
            if tf != ts {
                mismatches += 1;
            }
            for (x, y) in mf.iter().zip(&ms) {
                square_max = square_max.max((x - y).abs());
            }
        }
    }

    let antisymmetry_max = rows.iter().map(|r| r.0).fold(0.0, f64::max);
    let bilinearity_max = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let split_invariance_max = rows.iter().map(|r| r.3).fold(0.0, f64::max);
    let done: usize = rows.iter().map(|r| r.4).sum();
    Ok(SymplecticReport {
        schema_version: SCHEMA_VERSION,
        form_samples: rows.iter().map(|r| r.2).sum(),
        antisymmetry_max,
        bilinearity_max,
        splits: done,
        split_invariance_max,
        square_instances,
        square_track_mismatches: mismatches,
        square_weight_max: square_max,
        tolerance: TOL,
        passed: antisymmetry_max <= TOL
            && bilinearity_max <= TOL
            && split_invariance_max <= TOL
            && done == splits
            && square_instances == squares
            && mismatches == 0
            && square_max <= TOL,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ReconstructionReport {
    pub schema_version: u32,
    pub instances: usize,
    pub max_edge_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Surface to (track, horizontal measure, `eta`) and back.
pub fn reconstruction_sweep(instances: usize, seed: u64, exec: Exec) -> Result<ReconstructionReport> {
    let rows: Vec<Result<f64>> = exec.map_range(instances, |i| {
        let mut rng = rng_for(seed, i);
        let s = random_genus_two(&mut rng, i)?;
        let (t, m) = adapted_track(&s)?;
        let eta = weight_from_differential(&s, Direction::VerticalImaginary)?;
        let back = t.reconstruct_surface(&m, &eta)?;
        if back.triangles() != s.triangles() {
            return Ok(f64::INFINITY);
        }
        Ok(back.vectors().iter().zip(s.vectors()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let max_edge_error = rows.iter().copied().fold(0.0, f64::max);
    Ok(ReconstructionReport {
        schema_version: SCHEMA_VERSION,
        instances,
        max_edge_error,
        tolerance: TOL,
        passed: max_edge_error <= TOL,
    })
}
