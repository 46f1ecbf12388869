//! `run`, `compare` and `convergence`.
//!
//! Output layout of a run directory:
//!
//! * `snapshot_NNNN.csv` (1-D) or `snapshot_NNNN.dat` (2-D), one per output time
//! * `report.txt`: diagnostics as `key = value` lines
//! * `steps.csv`: one line per accepted time step
//! * `abort_state.*`: last accepted state, only when a run is aborted

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use ldcu::diagnostics::{
    self, conserved_totals_1d, conserved_totals_2d, DiagnosticsReport, Quantity, Window,
};
use ldcu::integrator::{run, Euler1D, Euler2D, RunFailure, StepRecord};
use ldcu::problems::ProblemSpec;
use ldcu::{Field1D, Field2D, SchemeFlavor, SolverError};

use crate::config::RunConfig;
use crate::snapshot::{Snapshot1D, Snapshot2D, SnapshotMeta};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum SolutionField {
    OneD(Field1D),
    TwoD(Field2D),
}

/// Result of a completed integration.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub initial: SolutionField,
    pub field: SolutionField,
    pub t: f64,
    pub records: Vec<StepRecord>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub report: DiagnosticsReport,
    pub snapshots: Vec<PathBuf>,
    pub steps: usize,
}

fn meta(cfg: &RunConfig, t: f64) -> SnapshotMeta {
    let s = &cfg.scheme;
    let extra: BTreeMap<String, String> = [
        ("cfl", format!("{}", cfg.integrator.cfl)),
        ("theta", format!("{}", s.limiter.theta())),
        ("epsilon", format!("{:e}", s.eps.epsilon())),
        ("initialization", "cell_center".to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    SnapshotMeta {
        problem: cfg.problem.name().to_string(),
        scheme: s.flavor,
        t,
        gamma: s.gas.gamma(),
        extra,
    }
}

/// Writes one snapshot file; returns its path.
pub fn write_snapshot(cfg: &RunConfig, field: &SolutionField, t: f64, path_stem: &Path) -> Result<PathBuf, CliError> {
    let gas = cfg.gas();
    match field {
        SolutionField::OneD(f) => {
            let path = path_stem.with_extension("csv");
            Snapshot1D::from_field(f, &gas, meta(cfg, t))?.write(&path)?;
            Ok(path)
        }
        SolutionField::TwoD(f) => {
            let path = path_stem.with_extension("dat");
            Snapshot2D::from_field(f, &gas, meta(cfg, t))?.write(&path)?;
            Ok(path)
        }
    }
}

/// A failed integration: the error, plus the last state when the solver itself stopped.
pub type SimulationFailure = (CliError, Option<Box<RunFailure<SolutionField>>>);

/// Integrates `cfg`; `on_snapshot` is called at every output time.
pub fn simulate(
    cfg: &RunConfig,
    mut on_snapshot: impl FnMut(f64, &SolutionField) -> Result<(), CliError>,
) -> Result<Simulation, SimulationFailure> {
    // sink errors are parked here so the I/O error survives the solver's error type
    let parked: RefCell<Option<CliError>> = RefCell::new(None);
    let park = |e: CliError| {
        let msg = e.to_string();
        *parked.borrow_mut() = Some(e);
        SolverError::Sink(msg)
    };
    let unpark = |f: RunFailure<SolutionField>| match parked.borrow_mut().take() {
        Some(e) => (e, None),
        None => (CliError::Solver(f.error.clone()), Some(Box::new(f))),
    };
    let config = |e: SolverError| (CliError::Config(e.to_string()), None);

    match cfg.problem {
        ProblemSpec::OneD(p) => {
            let initial = p.initial_field().map_err(config)?;
            let system = Euler1D::new(initial.grid, p.bc, cfg.scheme);
            let mut sink = |t: f64, f: &Field1D| {
                on_snapshot(t, &SolutionField::OneD(f.clone())).map_err(park)
            };
            match run(&system, initial.clone(), &cfg.integrator, &cfg.snapshot_times, &mut sink) {
                Ok(out) => Ok(Simulation {
                    initial: SolutionField::OneD(initial),
                    field: SolutionField::OneD(out.field),
                    t: out.t,
                    records: out.records,
                }),
                Err(f) => Err(unpark(RunFailure {
                    error: f.error,
                    field: SolutionField::OneD(f.field),
                    t: f.t,
                    records: f.records,
                })),
            }
        }
        ProblemSpec::TwoD(p) => {
            let initial = p.initial_field().map_err(config)?;
            let system = Euler2D::new(initial.grid, p.bc, cfg.scheme);
            let mut sink = |t: f64, f: &Field2D| {
                on_snapshot(t, &SolutionField::TwoD(f.clone())).map_err(park)
            };
            match run(&system, initial.clone(), &cfg.integrator, &cfg.snapshot_times, &mut sink) {
                Ok(out) => Ok(Simulation {
                    initial: SolutionField::TwoD(initial),
                    field: SolutionField::TwoD(out.field),
                    t: out.t,
                    records: out.records,
                }),
                Err(f) => Err(unpark(RunFailure {
                    error: f.error,
                    field: SolutionField::TwoD(f.field),
                    t: f.t,
                    records: f.records,
                })),
            }
        }
    }
}

fn window_key(prefix: &str, w: &crate::config::WindowSpec) -> String {
    match w.y {
        Some(y) => format!("{prefix}[{},{}]x[{},{}]", w.x[0], w.x[1], y[0], y[1]),
        None => format!("{prefix}[{},{}]", w.x[0], w.x[1]),
    }
}

const COMPONENTS_1D: [&str; 3] = ["mass", "momentum", "energy"];
const COMPONENTS_2D: [&str; 4] = ["mass", "momentum_x", "momentum_y", "energy"];

/// Diagnostics of a finished run.
pub fn build_report(cfg: &RunConfig, sim: &Simulation) -> Result<DiagnosticsReport, CliError> {
    let gas = cfg.gas();
    let mut r = DiagnosticsReport::new();
    r.push("t", sim.t)?;
    r.push("steps", sim.records.len() as f64)?;
    r.push("dropped_interfaces", sim.records.iter().map(|s| s.dropped).sum::<usize>() as f64)?;

    let (before, after, names, rho, p): (_, _, &[&str], _, _) = match (&sim.initial, &sim.field) {
        (SolutionField::OneD(a), SolutionField::OneD(b)) => (
            conserved_totals_1d(a),
            conserved_totals_1d(b),
            &COMPONENTS_1D,
            diagnostics::values_1d(b, Quantity::Density, &gas)?,
            diagnostics::values_1d(b, Quantity::Pressure, &gas)?,
        ),
        (SolutionField::TwoD(a), SolutionField::TwoD(b)) => (
            conserved_totals_2d(a),
            conserved_totals_2d(b),
            &COMPONENTS_2D,
            diagnostics::values_2d(b, Quantity::Density, &gas)?,
            diagnostics::values_2d(b, Quantity::Pressure, &gas)?,
        ),
        _ => unreachable!("initial and final fields share a dimension"),
    };
    for ((name, a), b) in names.iter().zip(&before).zip(&after) {
        r.push(format!("total.{name}.initial"), *a)?;
        r.push(format!("total.{name}.final"), *b)?;
    }
    r.push("total.max_relative_drift", diagnostics::max_relative_drift(&before, &after))?;
    let (rho_min, rho_max) = diagnostics::min_max(&rho);
    let (p_min, p_max) = diagnostics::min_max(&p);
    r.push("rho.min", rho_min)?;
    r.push("rho.max", rho_max)?;
    r.push("p.min", p_min)?;
    r.push("p.max", p_max)?;

    match (&cfg.problem, &sim.field) {
        (ProblemSpec::OneD(prob), SolutionField::OneD(f)) => {
            for w in &cfg.windows {
                let win = Window::new(w.x[0], w.x[1]);
                r.push(window_key("tv.rho", w), diagnostics::total_variation_1d(&f.grid, &rho, win)?)?;
                if let Some([lo, hi]) = w.bounds {
                    let o = diagnostics::overshoot_1d(&f.grid, &rho, win, lo, hi)?;
                    r.push(window_key("overshoot.rho.excess", w), o.excess)?;
                    r.push(window_key("overshoot.rho.deficit", w), o.deficit)?;
                }
            }
            if let Some(exact) = prob.exact_field(sim.t)? {
                r.push("l1.rho", diagnostics::l1_error_1d(f, &exact)?[0])?;
            }
        }
        (ProblemSpec::TwoD(_), SolutionField::TwoD(f)) => {
            let g = f.grid;
            for w in &cfg.windows {
                let wy = w.y.unwrap_or([g.y_lo, g.y_hi]);
                let tv = diagnostics::total_variation_2d(f, &rho, Window::new(w.x[0], w.x[1]), Window::new(wy[0], wy[1]))?;
                r.push(window_key("tv.rho", w), tv)?;
                if let Some([lo, hi]) = w.bounds {
                    let xs = Window::new(w.x[0], w.x[1]).cells(&g.x_axis())?;
                    let ys = Window::new(wy[0], wy[1]).cells(&g.y_axis())?;
                    let vals: Vec<f64> = ys.flat_map(|k| xs.clone().map(move |j| (j, k))).map(|(j, k)| rho[k * g.nx + j]).collect();
                    let o = diagnostics::overshoot(&vals, lo, hi);
                    r.push(window_key("overshoot.rho.excess", w), o.excess)?;
                    r.push(window_key("overshoot.rho.deficit", w), o.deficit)?;
                }
            }
            if g.nx == g.ny {
                r.push("symmetry_error", diagnostics::symmetry_error(f)?)?;
            }
        }
        _ => unreachable!("problem and field share a dimension"),
    }
    Ok(r)
}

fn steps_csv(records: &[StepRecord]) -> String {
    let mut s = String::from("step,t,dt,max_speed,min_rho,min_p,dropped\n");
    for r in records {
        let _ = writeln!(
            s,
            "{},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.step, r.t, r.dt, r.max_speed, r.min_rho, r.min_p, r.dropped
        );
    }
    s
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(CliError::io(path))
}

/// Runs one configuration, writing snapshots, `report.txt` and `steps.csv`
/// into `out`. On an aborted run the last accepted state is written to
/// `abort_state.*` before the error is returned.
pub fn cmd_run(cfg: &RunConfig, out: &Path) -> Result<RunSummary, CliError> {
    fs::create_dir_all(out).map_err(CliError::io(out))?;
    let mut snapshots = Vec::new();
    let result = simulate(cfg, |t, field| {
        let stem = out.join(format!("snapshot_{:04}", snapshots.len()));
        snapshots.push(write_snapshot(cfg, field, t, &stem)?);
        Ok(())
    });
    match result {
        Ok(sim) => {
            log::info!("{}: {} steps to t = {}", cfg.problem.name(), sim.records.len(), sim.t);
            let report = build_report(cfg, &sim)?;
            write_file(&out.join("report.txt"), &report.to_string())?;
            write_file(&out.join("steps.csv"), &steps_csv(&sim.records))?;
            Ok(RunSummary { report, snapshots, steps: sim.records.len() })
        }
        Err((err, failure)) => {
            if let Some(f) = failure {
                write_file(&out.join("steps.csv"), &steps_csv(&f.records))?;
                let dump = write_snapshot(cfg, &f.field, f.t, &out.join("abort_state"))?;
                log::error!("run aborted at t = {}; last state written to {}", f.t, dump.display());
            }
            Err(err)
        }
    }
}

fn unique_labels(flavors: &[SchemeFlavor]) -> Vec<String> {
    let mut labels: Vec<String> = Vec::new();
    for f in flavors {
        let base = f.name().to_string();
        let count = labels.iter().filter(|l| l.split('_').next() == Some(&base)).count();
        labels.push(if count == 0 { base } else { format!("{base}_{}", count + 1) });
    }
    labels
}

/// Runs every flavor on the same configuration into `out/<flavor>/` and
/// writes the side-by-side metrics to `out/compare.txt`.
pub fn cmd_compare(cfg: &RunConfig, flavors: &[SchemeFlavor], out: &Path) -> Result<DiagnosticsReport, CliError> {
    if flavors.is_empty() {
        return Err(CliError::Config("no flavors to compare".into()));
    }
    fs::create_dir_all(out).map_err(CliError::io(out))?;
    let mut joint = DiagnosticsReport::new();
    for (flavor, label) in flavors.iter().zip(unique_labels(flavors)) {
        let summary = cmd_run(&cfg.with_flavor(*flavor), &out.join(&label))?;
        joint.extend_prefixed(&format!("{label}."), &summary.report);
    }
    write_file(&out.join("compare.txt"), &joint.to_string())?;
    Ok(joint)
}

/// L1 density errors at each resolution and the observed orders between
/// successive ones, written to `out/convergence.txt`.
///
/// The error is measured against the exact solution when the problem has
/// one, otherwise against the finest run restricted to each coarser grid
/// (which must then divide it).
pub fn cmd_convergence(cfg: &RunConfig, resolutions: &[usize], out: &Path) -> Result<DiagnosticsReport, CliError> {
    if resolutions.is_empty() {
        return Err(CliError::Config("no resolutions given".into()));
    }
    if resolutions.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CliError::Config("resolutions must increase".into()));
    }
    fs::create_dir_all(out).map_err(CliError::io(out))?;
    let finals: Vec<Simulation> = resolutions
        .iter()
        .map(|&n| {
            let mut c = cfg.with_resolution(n);
            c.snapshot_times.clear();
            simulate(&c, |_, _| Ok(())).map_err(|(e, _)| e)
        })
        .collect::<Result<_, _>>()?;

    let has_exact = matches!(&cfg.problem, ProblemSpec::OneD(p) if p.initial.exact(0.0, 0.0).is_some());
    let mut errors = Vec::new();
    for (i, (&n, sim)) in resolutions.iter().zip(&finals).enumerate() {
        let c = cfg.with_resolution(n);
        let e = match (&c.problem, &sim.field) {
            (ProblemSpec::OneD(p), SolutionField::OneD(f)) if has_exact => {
                let exact = p.exact_field(sim.t)?.expect("problem has an exact solution");
                diagnostics::l1_error_1d(f, &exact)?[0]
            }
            _ if i + 1 == resolutions.len() => break,
            (_, field) => reference_error(field, &finals.last().expect("non-empty").field, n, resolutions[resolutions.len() - 1])?,
        };
        errors.push(e);
    }
    if errors.is_empty() {
        return Err(CliError::Config(
            "without an exact solution at least two resolutions are needed".into(),
        ));
    }
    let mut r = DiagnosticsReport::new();
    for (n, e) in resolutions.iter().zip(&errors) {
        r.push(format!("l1.rho.n{n}"), *e)?;
    }
    for (i, w) in errors.windows(2).enumerate() {
        let (n0, n1) = (resolutions[i], resolutions[i + 1]);
        let rate = (w[0] / w[1]).ln() / (n1 as f64 / n0 as f64).ln();
        r.push(format!("rate.n{n0}_n{n1}"), rate)?;
    }
    write_file(&out.join("convergence.txt"), &r.to_string())?;
    Ok(r)
}

fn reference_error(field: &SolutionField, reference: &SolutionField, n: usize, n_ref: usize) -> Result<f64, CliError> {
    if !n_ref.is_multiple_of(n) {
        return Err(CliError::Config(format!("finest resolution {n_ref} is not a multiple of {n}")));
    }
    let factor = n_ref / n;
    Ok(match (field, reference) {
        (SolutionField::OneD(f), SolutionField::OneD(r)) => diagnostics::l1_error_1d(f, &r.restrict(factor)?)?[0],
        (SolutionField::TwoD(f), SolutionField::TwoD(r)) => diagnostics::l1_error_2d(f, &r.restrict(factor)?)?[0],
        _ => unreachable!("all resolutions share a dimension"),
    })
}
