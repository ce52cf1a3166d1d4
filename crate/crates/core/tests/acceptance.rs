//! Acceptance run: one line per criterion with its runtime budget. Exits
//! nonzero when any criterion fails.

use std::time::Instant;

use teich_core::counting_harness::{
    aligned_net, axis_orbit, build_net, count_near_axis, enumerate_orbit, measure_cells, orbit_by_word_length,
    report_from_orbit, volume_near_axis, SectorInstance, CAT_MAP, DEFAULT_BUDGET, S, T,
};
use teich_core::extremal_calculus::{
    fit_chain_constant, norm_derivative_sweep, period_derivative_sweep, torus_chain_sweep, transversality_sweep,
    CHAIN_CONSTANT, DEFAULT_STEP,
};
use teich_core::hyperbolic_sandbox::{
    busemann_vs_distance_check, ray_convergence_check, v_shape_busemann_check, v_shape_check, Axis, Boundary,
    DiskIsometry, DiskPoint, HorocyclePoint,
};
use teich_core::report::CheckResult;
use teich_core::train_track::{reconstruction_sweep, symplectic_sweep};
use teich_core::{Exec, Result};

const SEED: u64 = 20240611;

// Tolerances
const NORM_TOL: f64 = 1e-6;
const HALVING_STEP: f64 = 1e-3;
const HALVING_RANGE: (f64, f64) = (2.0, 6.0);
const PERIOD_TOL: f64 = 1e-6;
const CHAIN_TOL: f64 = 1e-5;
const CONSTANT_TOL: f64 = 1e-8;
const GAP_TOL: f64 = 1e-9;
const SLOPE_RANGE: (f64, f64) = (-1.1, -0.9);
const BUSEMANN_EPS: f64 = 0.05;
const EXPONENT_TOL: f64 = 0.1;
const QUADRATURE_TOL: f64 = 0.01;
const PROPORTION_TOL: f64 = 0.01;
const VOLUME_EXPONENT_TOL: f64 = 0.05;
const RATIO_SPREAD_TOL: f64 = 0.10;

fn pt(x: f64, y: f64) -> DiskPoint {
    DiskPoint::new(x, y).expect("upper half plane")
}

fn criterion_1() -> Result<(bool, String)> {
    let at = norm_derivative_sweep(50, SEED, DEFAULT_STEP, Exec::Parallel)?;
    let coarse = norm_derivative_sweep(50, SEED, HALVING_STEP, Exec::Parallel)?;
    let ratios = coarse.halving_ratios.clone().unwrap_or_default();
    let (lo, hi) = ratios.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &r| (a.min(r), b.max(r)));
    let ok = at.max_residual < NORM_TOL && lo >= HALVING_RANGE.0 && hi <= HALVING_RANGE.1;
    Ok((ok, format!("max residual {:.2e} at h=1e-5; halving ratio in [{lo:.3}, {hi:.3}] at h=1e-3", at.max_residual)))
}

fn criterion_2() -> Result<(bool, String)> {
    let r = period_derivative_sweep(50, SEED, DEFAULT_STEP, Exec::Parallel)?;
    Ok((
        r.max_residual < PERIOD_TOL,
        format!("max branch residual {:.2e} over {} instances", r.max_residual, r.instances),
    ))
}

fn criterion_3() -> Result<(bool, String)> {
    let k = fit_chain_constant()?;
    let r = torus_chain_sweep(100, SEED, DEFAULT_STEP, Exec::Parallel)?;
    let ok = (k - CHAIN_CONSTANT).abs() < CONSTANT_TOL && r.max_residual < CHAIN_TOL;
    Ok((ok, format!("fitted K = {k:.10}, frozen {CHAIN_CONSTANT}; max residual {:.2e}", r.max_residual)))
}

fn criterion_4() -> Result<(bool, String)> {
    let r = transversality_sweep(100, SEED, Exec::Parallel)?;
    let ok = r.passed && r.min_gap > GAP_TOL;
    Ok((ok, format!("{}/{} transverse, min branch gap {:.2e}", r.transverse, r.instances, r.min_gap)))
}

fn criterion_5() -> Result<(bool, String)> {
    let r = symplectic_sweep(200, 50, SEED, Exec::Parallel)?;
    Ok((
        r.passed,
        format!(
            "antisym {:.1e}, bilinear {:.1e}, {} splits max drift {:.1e}, {} squares ({} track mismatches, weight {:.1e})",
            r.antisymmetry_max, r.bilinearity_max, r.splits, r.split_invariance_max, r.square_instances,
            r.square_track_mismatches, r.square_weight_max
        ),
    ))
}

fn criterion_6() -> Result<(bool, String)> {
    let r = reconstruction_sweep(50, SEED, Exec::Parallel)?;
    Ok((r.passed, format!("max edge error {:.2e} over {} surfaces", r.max_edge_error, r.instances)))
}

fn criterion_7() -> Result<(bool, String)> {
    let ax = Axis::imaginary();
    let samples: Vec<f64> = (0..200).map(|k| -5.0 + 10.0 * k as f64 / 199.0).collect();
    let v = v_shape_check(&pt(1.0, 1.0), &ax, &samples);
    let one = HorocyclePoint::new(Boundary::Finite(1.0), 1.0)?;
    let vb = v_shape_busemann_check(&one, &ax, &samples)?;
    let inf = HorocyclePoint::new(Boundary::Infinity, 1.0)?;
    let grid: Vec<f64> = (1..=8).map(f64::from).collect();
    let ray = ray_convergence_check(&pt(0.0, 1.0), &pt(1.0, 1.0), &inf, &grid)?;
    let slope = ray.slope.unwrap_or(f64::NAN);
    let t_grid = [0.1, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
    let b = busemann_vs_distance_check(&one, &pt(0.0, 1.0), &pt(0.0, 0.5f64.exp()), &ax, &t_grid, BUSEMANN_EPS)?;
    let beyond_ok = b
        .threshold
        .is_some_and(|th| b.rows.iter().filter(|r| r.distance_to_axis >= th).all(|r| r.residual < BUSEMANN_EPS));
    let ok =
        v.c_emp.is_finite() && vb.c_emp.is_finite() && (SLOPE_RANGE.0..=SLOPE_RANGE.1).contains(&slope) && beyond_ok;
    Ok((
        ok,
        format!(
            "V-shape C = {:.4} (Busemann {:.2e}); ray slope {slope:.4}; threshold {:.3}",
            v.c_emp,
            vb.c_emp,
            b.threshold.unwrap_or(f64::NAN)
        ),
    ))
}

fn criterion_8() -> Result<(bool, String)> {
    let p = pt(0.0, 2.0);
    let radii = [5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
    let rep = count_near_axis(&CAT_MAP, &p, &radii, Exec::Parallel)?;
    let mut oracle_ok = true;
    for r in [1.0, 2.0, 3.0, 4.0] {
        let bfs = enumerate_orbit(&[S, T], &p, &p, r, DEFAULT_BUDGET, Exec::Parallel)?;
        let words = orbit_by_word_length(&[S, T], &p, &p, r, 20);
        oracle_ok &= bfs.iter().map(|o| o.element).eq(words.iter().map(|o| o.element));
    }
    let ok = (rep.fit.exponent - 1.0).abs() <= EXPONENT_TOL && oracle_ok;
    Ok((
        ok,
        format!(
            "exponent {:.4}, prefactor {:.4}, counts {:?}; word oracle {}",
            rep.fit.exponent,
            rep.fit.prefactor,
            rep.quotient_counts,
            if oracle_ok { "equal" } else { "DIFFERS" }
        ),
    ))
}

fn criterion_9() -> Result<(bool, String)> {
    let p = pt(0.0, 2.0);
    let mut ok = true;
    let mut parts = Vec::new();
    for eps in [0.8, 0.4, 0.2] {
        let m = measure_cells(&aligned_net(&CAT_MAP, &p, eps)?, 0.05, 64)?;
        ok &= m.sandwich_holds && m.quadrature_error < QUADRATURE_TOL;
        parts.push(format!("eps {eps}: {:.4}<={:.4}<={:.4}", m.sandwich_lower, m.sum_a, m.nu_c_ext));
    }
    let o = pt(0.0, 1.0);
    let g1 = DiskIsometry::new(1f64.exp(), 0.0, 0.0, (-1f64).exp())?;
    let g2 = DiskIsometry::new(2f64.exp(), 0.0, 0.0, (-2f64).exp())?;
    let c1 = measure_cells(&build_net(&g1, &o, 0.5)?, 0.05, 64)?.nu_c_ext;
    let c2 = measure_cells(&build_net(&g2, &o, 0.5)?, 0.05, 64)?.nu_c_ext;
    let ratio = c2 / c1;
    ok &= (ratio - 2.0).abs() <= 2.0 * PROPORTION_TOL;
    parts.push(format!("nu(C_ext) ratio {ratio:.6}"));
    Ok((ok, parts.join("; ")))
}

fn criterion_10() -> Result<(bool, String)> {
    let std = SectorInstance::standard().run(Exec::Parallel)?;
    let rnd = SectorInstance::random(SEED).run(Exec::Parallel)?;
    let ok = std.passed && rnd.passed;
    let fmt = |r: &teich_core::counting_harness::SectorReport| {
        format!(
            "C_disj {:.3}, C_near {:.2}, {} exceptions (max {:.3}), {}<={}<={}",
            r.c_disjoint, r.c_near, r.coverage_exceptions, r.max_exception_distance, r.lower, r.quotient_count, r.upper
        )
    };
    Ok((ok, format!("standard: {}; random: {}", fmt(&std), fmt(&rnd))))
}

fn criterion_11() -> Result<(bool, String)> {
    let fit_grid = [4.0, 5.0, 6.0, 7.0, 8.0, 9.0];
    let v = volume_near_axis(&CAT_MAP, &fit_grid, 100_000, SEED, None, Exec::Parallel)?;
    let count_grid = [5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
    let orbit = axis_orbit(&CAT_MAP, &pt(0.0, 2.0), 10.0, Exec::Parallel)?;
    let counts = report_from_orbit(&orbit, &count_grid)?.quotient_counts;
    let vc = volume_near_axis(&CAT_MAP, &count_grid, 100_000, SEED + 1, Some(&counts), Exec::Parallel)?;
    let spread = vc.ratio_spread.unwrap_or(f64::INFINITY);
    let last = vc.rows.last().and_then(|r| r.area_over_count).unwrap_or(f64::NAN);
    let ok = (v.fit.exponent - 1.0).abs() <= VOLUME_EXPONENT_TOL && spread <= RATIO_SPREAD_TOL;
    Ok((
        ok,
        format!(
            "MC within 3 sigma; exponent {:.4}; area/count {last:.4} at R=10 (spread {:.2}%)",
            v.fit.exponent,
            100.0 * spread
        ),
    ))
}

type Criterion = (u32, &'static str, f64, fn() -> Result<(bool, String)>);

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "norm derivative", 10.0, criterion_1),
        (2, "period derivatives", 10.0, criterion_2),
        (3, "torus full chain", 30.0, criterion_3),
        (4, "transversality", 10.0, criterion_4),
        (5, "symplectic structure", 10.0, criterion_5),
        (6, "reconstruction round trip", 5.0, criterion_6),
        (7, "sandbox estimates", 10.0, criterion_7),
        (8, "counting growth law", 300.0, criterion_8),
        (9, "sandwich lemma", 60.0, criterion_9),
        (10, "sector scheme", 300.0, criterion_10),
        (11, "tube volume", 120.0, criterion_11),
    ];
    let mut failed = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let seconds = start.elapsed().as_secs_f64();
        let (passed, detail) = match outcome {
            Ok((ok, d)) => (ok && seconds < budget, d),
            Err(e) => (false, format!("error: {e}")),
        };
        let line = CheckResult { id, name: name.into(), passed, seconds, budget_seconds: budget, detail };
        println!("{}", line.line());
        failed += usize::from(!passed);
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
