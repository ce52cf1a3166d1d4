use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{ensure, Context, Result};
use clap::{ArgAction, Args, Subcommand, ValueEnum};
use serde::Serialize;

use teich_core::counting_harness::{
    aligned_net, axis_orbit, build_net, count_near_axis, measure_cells, parse_imat, report_from_orbit,
    sector_scheme_check, to_isometry, volume_near_axis, CellMeasures, CountReport, IMat, NetPartition, SectorInstance,
};
use teich_core::extremal_calculus::{
    norm_derivative_sweep, period_derivative_sweep, surface_norm_check, torus_chain_sweep, transversality_sweep,
    DEFAULT_STEP,
};
use teich_core::flat_surface::library::{random_genus_two, regular_octagon, square_tiled_q1111, square_torus};
use teich_core::flat_surface::FlatSurface;
use teich_core::hyperbolic_sandbox::{
    axis, busemann_vs_distance_check, ray_convergence_check, v_shape_busemann_check, v_shape_check, Axis, Boundary,
    BusemannDistanceReport, DiskPoint, HorocyclePoint, RayConvergenceReport, VShapeReport,
};
use teich_core::report::{counts_csv, to_json, Envelope};
use teich_core::train_track::{adapted_track, reconstruction_sweep, symplectic_sweep, TrackFile, TrainTrack, Weight};
use teich_core::Error;

use crate::{Cli, Command, Failures, Format, Global};

const VOLUME_EXPONENT_TOL: f64 = 0.05;
const RATIO_SPREAD_TOL: f64 = 0.10;
const QUADRATURE_TOL: f64 = 0.01;
const SWITCH_TOL: f64 = 1e-12;
const SLOPE_RANGE: (f64, f64) = (-1.1, -0.9);

/// A report ready to be written: JSON always, CSV when the data is tabular.
struct Output {
    stem: &'static str,
    json: String,
    csv: Option<String>,
}

fn emit(g: &Global, out: Output) -> Result<()> {
    match &g.out {
        Some(dir) => {
            std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
            std::fs::write(dir.join(format!("{}.json", out.stem)), &out.json)?;
            if let Some(csv) = &out.csv {
                std::fs::write(dir.join(format!("{}.csv", out.stem)), csv)?;
            }
        }
        None => match g.format {
            Format::Json => print!("{}", out.json),
            Format::Csv => {
                let csv = out.csv.ok_or_else(|| Error::Argument(format!("`{}` has no CSV form", out.stem)))?;
                print!("{csv}");
            }
        },
    }
    Ok(())
}

fn envelope<T: Serialize>(
    g: &Global,
    command: &'static str,
    seeded: bool,
    checks: &[(&str, bool)],
    report: &T,
    csv: Option<String>,
) -> Result<Failures> {
    let failures: Failures = checks.iter().filter(|c| !c.1).map(|c| c.0.to_string()).collect();
    let seed = seeded.then_some(g.seed);
    let json = to_json(&Envelope::new(command, seed, failures.is_empty(), report))?;
    emit(g, Output { stem: command, json, csv })?;
    Ok(failures)
}

fn disk_point(v: &[f64]) -> Result<DiskPoint> {
    ensure!(v.len() == 2, Error::Argument(format!("a point needs two coordinates, got {}", v.len())));
    Ok(DiskPoint::new(v[0], v[1])?)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

// ---------------------------------------------------------------- surface

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum SurfaceName {
    Octagon,
    SquareTorus,
    Q1111,
    GenusTwo,
}

#[derive(Args, Debug)]
pub struct SurfaceArgs {
    #[arg(long, value_enum, default_value_t = SurfaceName::Octagon)]
    name: SurfaceName,
    /// Rotation angle applied to the surface.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    rotate: f64,
    /// Instance index for `genus-two` (drawn from `--seed`).
    #[arg(long, default_value_t = 0)]
    index: usize,
}

fn surface(g: &Global, a: &SurfaceArgs) -> Result<Failures> {
    use rand::SeedableRng;
    let s = match a.name {
        SurfaceName::Octagon => regular_octagon(),
        SurfaceName::SquareTorus => square_torus(),
        SurfaceName::Q1111 => square_tiled_q1111(),
        SurfaceName::GenusTwo => {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(g.seed);
            random_genus_two(&mut rng, a.index)?
        }
    };
    let s = s.rotate(a.rotate);
    s.validate()?;
    let mut json = s.to_json()?;
    json.push('\n');
    emit(g, Output { stem: "surface", json, csv: None })?;
    Ok(Vec::new())
}

// ---------------------------------------------------------------- train tracks

#[derive(Subcommand, Debug)]
pub enum TtCommand {
    /// Track dual to a surface's triangulation, weighted by the horizontal measure.
    Adapted {
        #[arg(long)]
        surface: PathBuf,
    },
    /// Switch conditions and large branches of a weighted track.
    Check {
        #[arg(long)]
        track: PathBuf,
        /// Weights overriding those stored in the file.
        #[arg(long, action = ArgAction::Set, value_delimiter = ',', allow_hyphen_values = true)]
        weights: Option<Vec<f64>>,
    },
    /// Split a large branch according to the stored weights.
    Split {
        #[arg(long)]
        track: PathBuf,
        #[arg(long)]
        branch: usize,
    },
    /// Thurston form of two weights.
    Form {
        #[arg(long)]
        track: PathBuf,
        #[arg(long, action = ArgAction::Set, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        w1: Vec<f64>,
        #[arg(long, action = ArgAction::Set, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        w2: Vec<f64>,
    },
    /// Form invariance under random splits, the flip/split square and
    /// surface reconstruction.
    Sweep {
        #[arg(long, default_value_t = 200)]
        splits: usize,
        #[arg(long, default_value_t = 50)]
        squares: usize,
        #[arg(long, default_value_t = 20)]
        instances: usize,
    },
}

fn load_track(path: &Path) -> Result<(TrainTrack, Option<Weight>)> {
    let f = TrackFile::from_json(&read(path)?)?;
    let t = f.track()?;
    if let Some(w) = &f.weights {
        ensure!(
            w.len() == t.num_branches(),
            Error::Argument(format!("{} weights for {} branches", w.len(), t.num_branches()))
        );
    }
    Ok((t, f.weights))
}

fn emit_track(g: &Global, t: &TrainTrack, w: Option<Weight>) -> Result<()> {
    let mut json = TrackFile::new(t, w).to_json()?;
    json.push('\n');
    emit(g, Output { stem: "track", json, csv: None })
}

#[derive(Serialize)]
struct TrackCheck {
    switches: usize,
    branches: usize,
    weights: Weight,
    switch_residual: f64,
    tolerance: f64,
    large_branches: Vec<usize>,
}

#[derive(Serialize)]
struct FormValue {
    value: f64,
}

#[derive(Serialize)]
struct TrackSweep<A, B> {
    symplectic: A,
    reconstruction: B,
}

fn tt(g: &Global, cmd: &TtCommand) -> Result<Failures> {
    match cmd {
        TtCommand::Adapted { surface } => {
            let s = FlatSurface::from_json(&read(surface)?)?;
            let (t, m) = adapted_track(&s)?;
            emit_track(g, &t, Some(m))?;
            Ok(Vec::new())
        }
        TtCommand::Check { track, weights } => {
            let (t, stored) = load_track(track)?;
            let w = weights.clone().or(stored).ok_or_else(|| Error::Argument("no weights given".into()))?;
            let scale = w.iter().fold(1.0f64, |m, x| m.max(x.abs()));
            let report = TrackCheck {
                switches: t.num_switches(),
                branches: t.num_branches(),
                switch_residual: t.switch_residual(&w)?,
                tolerance: SWITCH_TOL * scale,
                large_branches: t.large_branches(),
                weights: w,
            };
            let ok = report.switch_residual <= report.tolerance;
            envelope(g, "tt-check", false, &[("switch-conditions", ok)], &report, None)
        }
        TtCommand::Split { track, branch } => {
            let (t, m) = load_track(track)?;
            let m = m.ok_or_else(|| Error::Argument("splitting needs stored weights".into()))?;
            ensure!(*branch < t.num_branches(), Error::Argument(format!("no branch {branch}")));
            let (t2, m2) = t.split(&m, *branch)?;
            emit_track(g, &t2, Some(m2))?;
            Ok(Vec::new())
        }
        TtCommand::Form { track, w1, w2 } => {
            let (t, _) = load_track(track)?;
            let value = t.thurston_form(w1, w2)?;
            envelope(g, "tt-form", false, &[], &FormValue { value }, None)
        }
        TtCommand::Sweep { splits, squares, instances } => {
            let sym = symplectic_sweep(*splits, *squares, g.seed, g.exec())?;
            let rec = reconstruction_sweep(*instances, g.seed, g.exec())?;
            let checks = [("symplectic", sym.passed), ("reconstruction", rec.passed)];
            envelope(g, "tt-sweep", true, &checks, &TrackSweep { symplectic: sym, reconstruction: rec }, None)
        }
    }
}

// ---------------------------------------------------------------- derivatives

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum DerivativeCheck {
    Norm,
    Period,
    TorusChain,
    Transversality,
}

#[derive(Args, Debug)]
pub struct DerivativeArgs {
    /// Surface to check along random tangents; without it a seeded sweep
    /// over random surfaces runs.
    #[arg(long)]
    surface: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_STEP)]
    step: f64,
    /// Random tangents per surface.
    #[arg(long, default_value_t = 10)]
    tangents: usize,
    #[arg(long, value_enum, default_value_t = DerivativeCheck::Norm)]
    check: DerivativeCheck,
    #[arg(long, default_value_t = 50)]
    instances: usize,
}

fn verify_derivative(g: &Global, a: &DerivativeArgs) -> Result<Failures> {
    ensure!(a.step > 0.0, Error::Argument("step must be positive".into()));
    let exec = g.exec();
    if let Some(path) = &a.surface {
        let s = FlatSurface::from_json(&read(path)?)?;
        let r = surface_norm_check(&s, a.tangents, g.seed, a.step, exec)?;
        return envelope(g, "verify-derivative", true, &[("norm-derivative", r.passed)], &r, None);
    }
    match a.check {
        DerivativeCheck::Norm => {
            let r = norm_derivative_sweep(a.instances, g.seed, a.step, exec)?;
            envelope(g, "verify-derivative", true, &[("norm-derivative", r.passed)], &r, None)
        }
        DerivativeCheck::Period => {
            let r = period_derivative_sweep(a.instances, g.seed, a.step, exec)?;
            envelope(g, "verify-derivative", true, &[("period-derivative", r.passed)], &r, None)
        }
        DerivativeCheck::TorusChain => {
            let r = torus_chain_sweep(a.instances, g.seed, a.step, exec)?;
            envelope(g, "verify-derivative", true, &[("torus-chain", r.passed)], &r, None)
        }
        DerivativeCheck::Transversality => {
            let r = transversality_sweep(a.instances, g.seed, exec)?;
            envelope(g, "verify-derivative", true, &[("transversality", r.passed)], &r, None)
        }
    }
}

// ---------------------------------------------------------------- sandbox

#[derive(Args, Debug)]
pub struct SandboxArgs {
    /// Axis of this SL(2,Z) element (`a,b,c,d`); the imaginary axis by default.
    #[arg(long, action = ArgAction::Set, value_delimiter = ',', allow_hyphen_values = true)]
    gamma: Option<Vec<f64>>,
    /// Point whose projection is checked.
    #[arg(long, action = ArgAction::Set, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,1")]
    point: Vec<f64>,
    /// Boundary point of the horocycle, a real number or `inf`.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    boundary: String,
    /// Busemann tolerance beyond the distance threshold.
    #[arg(long, default_value_t = 0.05)]
    epsilon: f64,
}

#[derive(Serialize)]
struct SandboxReport {
    axis: Axis,
    v_shape: VShapeReport,
    v_shape_busemann: VShapeReport,
    ray_convergence: RayConvergenceReport,
    busemann_distance: BusemannDistanceReport,
}

fn sandbox(g: &Global, a: &SandboxArgs) -> Result<Failures> {
    let ax = match &a.gamma {
        Some(v) => axis(&to_isometry(&parse_imat(v)?))?,
        None => Axis::imaginary(),
    };
    let xi = match a.boundary.as_str() {
        "inf" | "infinity" => Boundary::Infinity,
        s => Boundary::Finite(s.parse().map_err(|_| Error::Argument(format!("bad boundary point `{s}`")))?),
    };
    let x = disk_point(&a.point)?;
    let zeta = HorocyclePoint::new(xi, 1.0)?;
    let base = ax.point_at(0.0);
    let samples: Vec<f64> = (0..200).map(|k| -5.0 + 10.0 * k as f64 / 199.0).collect();
    let v_shape = v_shape_check(&x, &ax, &samples);
    let v_shape_busemann = v_shape_busemann_check(&zeta, &ax, &samples)?;
    let grid: Vec<f64> = (1..=8).map(f64::from).collect();
    let ray_convergence = ray_convergence_check(&base, &x, &HorocyclePoint::new(Boundary::Infinity, 1.0)?, &grid)?;
    let t_grid = [0.1, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
    let busemann_distance = busemann_vs_distance_check(&zeta, &base, &ax.point_at(0.5), &ax, &t_grid, a.epsilon)?;
    let slope = ray_convergence.slope.unwrap_or(f64::NAN);
    let beyond = busemann_distance.threshold.is_some_and(|th| {
        busemann_distance.rows.iter().filter(|r| r.distance_to_axis >= th).all(|r| r.residual < a.epsilon)
    });
    let checks = [
        ("v-shape", v_shape.c_emp.is_finite()),
        ("v-shape-busemann", v_shape_busemann.c_emp.is_finite()),
        ("ray-convergence", (SLOPE_RANGE.0..=SLOPE_RANGE.1).contains(&slope)),
        ("busemann-distance", beyond),
    ];
    let report = SandboxReport { axis: ax, v_shape, v_shape_busemann, ray_convergence, busemann_distance };
    envelope(g, "sandbox", false, &checks, &report, None)
}

// ---------------------------------------------------------------- counting

#[derive(Args, Debug, Clone)]
pub struct AxisArgs {
    /// Hyperbolic element of SL(2,Z) as `a,b,c,d`.
    #[arg(long, action = ArgAction::Set, value_delimiter = ',', allow_hyphen_values = true, default_value = "2,1,1,1")]
    gamma: Vec<f64>,
    /// Base point `x,y` of the orbit.
    #[arg(long, action = ArgAction::Set, value_delimiter = ',', allow_hyphen_values = true, default_value = "0,2")]
    base: Vec<f64>,
}

impl AxisArgs {
    fn parse(&self) -> Result<(IMat, DiskPoint)> {
        let gamma = parse_imat(&self.gamma)?;
        ensure!(to_isometry(&gamma).is_hyperbolic(), Error::Argument(format!("{gamma:?} is not hyperbolic")));
        Ok((gamma, disk_point(&self.base)?))
    }
}

#[derive(Args, Debug)]
pub struct SectorArgs {
    #[command(flatten)]
    axis: AxisArgs,
    #[arg(long, default_value_t = 0.4)]
    eps: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, default_value_t = 8.0)]
    radius: f64,
    /// Largest allowed constant in the disjointness clause.
    #[arg(long, default_value_t = 4.0)]
    k_radius: f64,
    /// Run a random conjugate of the cat map drawn from `--seed` instead.
    #[arg(long)]
    random: bool,
}

fn sectors(g: &Global, a: &SectorArgs) -> Result<Failures> {
    let r = if a.random {
        SectorInstance::random(g.seed).run(g.exec())?
    } else {
        let (gamma, p) = a.axis.parse()?;
        let net = aligned_net(&gamma, &p, a.eps)?;
        sector_scheme_check(&gamma, &p, &net, a.delta, a.k_radius, a.radius, g.exec())?
    };
    let checks = [("disjointness", r.disjoint_pass), ("coverage", r.coverage_pass), ("sandwich", r.sandwich_pass)];
    envelope(g, "sectors", a.random, &checks, &r, None)
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[command(flatten)]
    axis: AxisArgs,
    #[arg(long, default_value_t = 5.0)]
    rmin: f64,
    #[arg(long, default_value_t = 10.0)]
    rmax: f64,
    #[arg(long, default_value_t = 1.0)]
    rstep: f64,
    /// Explicit radius grid, overriding `--rmin/--rmax/--rstep`.
    #[arg(long, action = ArgAction::Set, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.4)]
    eps: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Quadrature nodes per interval.
    #[arg(long, default_value_t = 64)]
    resolution: usize,
}

impl CountArgs {
    fn grid(&self) -> Result<Vec<f64>> {
        if let Some(r) = &self.radii {
            return Ok(r.clone());
        }
        ensure!(self.rstep > 0.0 && self.rmax >= self.rmin, Error::Argument("need rstep > 0 and rmax >= rmin".into()));
        let n = ((self.rmax - self.rmin) / self.rstep + 1e-9).floor() as usize;
        Ok((0..=n).map(|k| self.rmin + k as f64 * self.rstep).collect())
    }
}

#[derive(Serialize)]
struct CountOutput<'a> {
    counts: &'a CountReport,
    cells: &'a CellMeasures,
}

fn count_orbit(g: &Global, a: &CountArgs) -> Result<Failures> {
    let (gamma, p) = a.axis.parse()?;
    let radii = a.grid()?;
    let counts = count_near_axis(&gamma, &p, &radii, g.exec())?;
    let cells = measure_cells(&aligned_net(&gamma, &p, a.eps)?, a.delta, a.resolution)?;
    let checks = [
        ("growth-exponent", counts.passed),
        ("cell-sandwich", cells.sandwich_holds),
        ("quadrature", cells.quadrature_error < QUADRATURE_TOL),
    ];
    let csv = counts_csv(&counts);
    envelope(g, "count-orbit", false, &checks, &CountOutput { counts: &counts, cells: &cells }, Some(csv))
}

#[derive(Args, Debug)]
pub struct NetArgs {
    #[command(flatten)]
    axis: AxisArgs,
    #[arg(long, default_value_t = 0.4)]
    eps: f64,
    /// Net origin on the axis; by default the net aligned with the base point.
    #[arg(long, action = ArgAction::Set, value_delimiter = ',', allow_hyphen_values = true)]
    origin: Option<Vec<f64>>,
}

#[derive(Serialize)]
struct NetOutput<'a> {
    net: &'a NetPartition,
    gap: f64,
    points: Vec<DiskPoint>,
}

fn net_partition(g: &Global, a: &NetArgs) -> Result<Failures> {
    let (gamma, p) = a.axis.parse()?;
    let net = match &a.origin {
        Some(o) => build_net(&to_isometry(&gamma), &disk_point(o)?, a.eps)?,
        None => aligned_net(&gamma, &p, a.eps)?,
    };
    let points: Vec<DiskPoint> = (0..net.n as i64).map(|i| net.point(i)).collect();
    let mut csv = String::from("index,arclength,x,y\n");
    for (i, q) in points.iter().enumerate() {
        writeln!(csv, "{i},{},{},{}", net.arclength_of(i as i64), q.x, q.y)?;
    }
    let report = NetOutput { net: &net, gap: net.gap(), points };
    envelope(g, "net-partition", false, &[("mesh", net.gap() <= a.eps)], &report, Some(csv))
}

#[derive(Args, Debug)]
pub struct MeasureArgs {
    #[command(flatten)]
    axis: AxisArgs,
    #[arg(long, default_value_t = 0.4)]
    eps: f64,
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    #[arg(long, default_value_t = 64)]
    resolution: usize,
}

fn measure(g: &Global, a: &MeasureArgs) -> Result<Failures> {
    let (gamma, p) = a.axis.parse()?;
    let m = measure_cells(&aligned_net(&gamma, &p, a.eps)?, a.delta, a.resolution)?;
    let mut csv = String::from("index,nu_a,nu_u,nu_v\n");
    for c in &m.cells {
        writeln!(csv, "{},{},{},{}", c.index, c.nu_a, c.nu_u, c.nu_v)?;
    }
    let checks = [("cell-sandwich", m.sandwich_holds), ("quadrature", m.quadrature_error < QUADRATURE_TOL)];
    envelope(g, "measure-cells", false, &checks, &m, Some(csv))
}

#[derive(Args, Debug)]
pub struct VolumeArgs {
    #[command(flatten)]
    axis: AxisArgs,
    #[arg(long, action = ArgAction::Set, value_delimiter = ',', default_value = "5,6,7,8,9,10")]
    radii: Vec<f64>,
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Also count orbit points of the base point and compare.
    #[arg(long)]
    with_counts: bool,
}

fn volume(g: &Global, a: &VolumeArgs) -> Result<Failures> {
    let (gamma, p) = a.axis.parse()?;
    let r_max = a.radii.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let counts = if a.with_counts {
        let orbit = axis_orbit(&gamma, &p, r_max, g.exec())?;
        Some(report_from_orbit(&orbit, &a.radii)?.quotient_counts)
    } else {
        None
    };
    let v = volume_near_axis(&gamma, &a.radii, a.samples, g.seed, counts.as_deref(), g.exec())?;
    let mut csv = String::from("R,closed_form,monte_carlo,std_error,count\n");
    for r in &v.rows {
        let count = r.count.map(|c| c.to_string()).unwrap_or_default();
        writeln!(csv, "{},{},{},{},{count}", r.r, r.closed_form, r.monte_carlo, r.std_error)?;
    }
    let mut checks = vec![("growth-exponent", (v.fit.exponent - 1.0).abs() <= VOLUME_EXPONENT_TOL)];
    if let Some(spread) = v.ratio_spread {
        checks.push(("area-count-ratio", spread <= RATIO_SPREAD_TOL));
    }
    envelope(g, "volume", true, &checks, &v, Some(csv))
}

pub fn run(cli: &Cli) -> Result<Failures> {
    let g = &cli.global;
    match &cli.command {
        Command::Surface(a) => surface(g, a),
        Command::Tt(c) => tt(g, c),
        Command::VerifyDerivative(a) => verify_derivative(g, a),
        Command::Sandbox(a) => sandbox(g, a),
        Command::Sectors(a) => sectors(g, a),
        Command::CountOrbit(a) => count_orbit(g, a),
        Command::NetPartition(a) => net_partition(g, a),
        Command::MeasureCells(a) => measure(g, a),
        Command::Volume(a) => volume(g, a),
    }
}
