//! End-to-end acceptance checks. Runs as a plain binary (`harness = false`)
//! so every criterion prints exactly one PASS/FAIL line; the process exits
//! non-zero if any criterion fails.
//!
//! Regression values marked "pinned" were produced by this implementation on
//! first run and are held fixed to catch unintended changes.

use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use ldcu::diagnostics::{
    conserved_totals_1d, max_relative_drift, min_max, overshoot, symmetry_error, total_variation_1d, values_1d,
    values_2d, Quantity, Window,
};
use ldcu::flux::{
    anti_diffusion_1d, anti_diffusion_2d_x, local_speeds_1d, local_speeds_2d_x, numerical_flux_1d,
    numerical_flux_2d_x, numerical_flux_2d_y, star_state_1d, star_state_2d_x,
};
use ldcu::{ConservedState1D, ConservedState2D, GasModel, Primitive1D, Primitive2D, SchemeConfig, SchemeFlavor};
use ldcu_cli::{cmd_convergence, cmd_run, parse_config, simulate, RunConfig, Simulation, SolutionField, Snapshot1D};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// `|measured − pinned| ≤ tol · max(1, |pinned|)`.
fn pinned(name: &str, measured: f64, expected: f64, tol: f64) -> Result<(), String> {
    ensure((measured - expected).abs() <= tol * expected.abs().max(1.0), || {
        format!("{name} = {measured:.17e}, pinned {expected:.17e}")
    })
}

fn within_budget(start: Instant, budget: Duration) -> Result<(), String> {
    let spent = start.elapsed();
    ensure(spent <= budget, || format!("took {spent:.1?}, budget {budget:?}"))
}

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn load(name: &str, overrides: &[&str]) -> RunConfig {
    let text = fs::read_to_string(configs_dir().join(name)).expect("config readable");
    let overrides: Vec<String> = overrides.iter().map(|s| s.to_string()).collect();
    parse_config(&text, &overrides).expect("config valid")
}

fn inline(json: &str) -> RunConfig {
    parse_config(json, &[]).expect("config valid")
}

fn sim(cfg: &RunConfig) -> Simulation {
    simulate(cfg, |_, _| Ok(())).map_err(|(e, _)| e.to_string()).expect("run completes")
}

fn one_d(s: &SolutionField) -> &ldcu::Field1D {
    match s {
        SolutionField::OneD(f) => f,
        SolutionField::TwoD(_) => panic!("expected a 1-D field"),
    }
}

fn two_d(s: &SolutionField) -> &ldcu::Field2D {
    match s {
        SolutionField::TwoD(f) => f,
        SolutionField::OneD(_) => panic!("expected a 2-D field"),
    }
}

/// `|a − b| ≤ tol (1 + |b|)` componentwise.
fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol * (1.0 + y.abs()))
}

fn random_primitive(rng: &mut ChaCha8Rng) -> Primitive2D {
    Primitive2D {
        rho: rng.gen_range(0.05..5.0),
        u: rng.gen_range(-3.0..3.0),
        v: rng.gen_range(-3.0..3.0),
        p: rng.gen_range(0.05..10.0),
    }
}

fn as_1d(w: Primitive2D) -> Primitive1D {
    Primitive1D { rho: w.rho, u: w.u, p: w.p }
}

fn s1(s: &ConservedState1D) -> [f64; 3] {
    [s.rho, s.mom, s.ener]
}

fn s2(s: &ConservedState2D) -> [f64; 4] {
    [s.rho, s.momx, s.momy, s.ener]
}

const SAMPLES: usize = 2000;

fn flux_consistency() -> Outcome {
    let start = Instant::now();
    let gas = GasModel::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0001);
    for n in 0..SAMPLES {
        let w = random_primitive(&mut rng);
        let u1 = ConservedState1D::from_primitive(as_1d(w), &gas);
        let u2 = ConservedState2D::from_primitive(w, &gas);
        let (f1, fx, fy) = (u1.flux(&gas).unwrap(), u2.flux_x(&gas).unwrap(), u2.flux_y(&gas).unwrap());
        for flavor in SchemeFlavor::ALL {
            let eps = SchemeConfig::new(flavor).eps;
            let g1 = numerical_flux_1d(&u1, &u1, &gas, flavor, eps).map_err(|e| e.to_string())?;
            let gx = numerical_flux_2d_x(&u2, &u2, &gas, flavor, eps).map_err(|e| e.to_string())?;
            let gy = numerical_flux_2d_y(&u2, &u2, &gas, flavor, eps).map_err(|e| e.to_string())?;
            ensure(close(&s1(&g1.flux), &s1(&f1), 1e-12), || format!("sample {n} {flavor} 1-D: {w:?}"))?;
            ensure(close(&s2(&gx.flux), &s2(&fx), 1e-12), || format!("sample {n} {flavor} x: {w:?}"))?;
            ensure(close(&s2(&gy.flux), &s2(&fy), 1e-12), || format!("sample {n} {flavor} y: {w:?}"))?;
        }
    }
    within_budget(start, Duration::from_secs(5))?;
    Ok(format!("{SAMPLES} states x 3 flavors x (1-D, x, y) within 1e-12 in {:.2?}", start.elapsed()))
}

/// Independent evaluation of the quantities that bound the density
/// anti-diffusion: one-sided speeds, HLL star density and momentum.
struct StarOracle {
    a_plus: f64,
    a_minus: f64,
    rho_star: f64,
    u_star: f64,
}

impl StarOracle {
    fn new(l: Primitive1D, r: Primitive1D, gamma: f64) -> Self {
        let (cl, cr) = ((gamma * l.p / l.rho).sqrt(), (gamma * r.p / r.rho).sqrt());
        let a_plus = (l.u + cl).max(r.u + cr).max(0.0);
        let a_minus = (l.u - cl).min(r.u - cr).min(0.0);
        let (ml, mr) = (l.rho * l.u, r.rho * r.u);
        let (fml, fmr) = (ml * l.u + l.p, mr * r.u + r.p);
        let da = a_plus - a_minus;
        let rho_star = (a_plus * r.rho - a_minus * l.rho - (mr - ml)) / da;
        let mom_star = (a_plus * mr - a_minus * ml - (fmr - fml)) / da;
        Self { a_plus, a_minus, rho_star, u_star: mom_star / rho_star }
    }

    /// The two minmod arguments of the density anti-diffusion.
    fn arguments(&self, rho_l: f64, rho_r: f64) -> (f64, f64) {
        (
            -(self.a_minus - self.u_star) * (self.rho_star - rho_l),
            (self.a_plus - self.u_star) * (rho_r - self.rho_star),
        )
    }
}

fn check_q_bounds(q: f64, alpha: f64, args: (f64, f64), tag: &str) -> Result<(), String> {
    let (a, b) = args;
    ensure((0.0..=1.0).contains(&alpha), || format!("{tag}: alpha* = {alpha}"))?;
    let cap = a.abs().min(b.abs());
    ensure(q.abs() <= cap * (1.0 + 1e-12) + 1e-14, || format!("{tag}: |q| = {} > {cap}", q.abs()))?;
    if a * b <= 0.0 {
        ensure(q.abs() <= 1e-14, || format!("{tag}: q = {q} with opposite-sign arguments"))
    } else {
        ensure(q * a >= 0.0, || format!("{tag}: q = {q} has the wrong sign ({a}, {b})"))
    }
}

fn anti_diffusion_bounds() -> Outcome {
    let start = Instant::now();
    let gas = GasModel::default();
    let scheme = SchemeConfig::new(SchemeFlavor::New);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let mut checked = 0;
    for n in 0..SAMPLES {
        let (wl, wr) = (random_primitive(&mut rng), random_primitive(&mut rng));
        let oracle = StarOracle::new(as_1d(wl), as_1d(wr), gas.gamma());
        let inside = oracle.a_minus <= 0.0
            && 0.0 <= oracle.a_plus
            && oracle.a_minus < oracle.u_star
            && oracle.u_star < oracle.a_plus
            && oracle.rho_star > 0.0;
        if !inside {
            continue;
        }
        let args = oracle.arguments(wl.rho, wr.rho);

        let (l, r) = (
            ConservedState1D::from_primitive(as_1d(wl), &gas),
            ConservedState1D::from_primitive(as_1d(wr), &gas),
        );
        let sp = local_speeds_1d(&l, &r, &gas).map_err(|e| e.to_string())?;
        ensure(close(&[sp.a_plus, sp.a_minus], &[oracle.a_plus, oracle.a_minus], 1e-14), || {
            format!("sample {n}: speeds {sp:?}")
        })?;
        let star = star_state_1d(&l, &r, sp, &gas).map_err(|e| e.to_string())?;
        ensure(close(&[star.rho_star, star.u_star], &[oracle.rho_star, oracle.u_star], 1e-10), || {
            format!("sample {n}: star {star:?}")
        })?;
        match anti_diffusion_1d(&l, &r, &star, sp, SchemeFlavor::New, scheme.eps) {
            Ok(ad) => check_q_bounds(ad.q_rho, ad.alpha_star, args, &format!("sample {n} 1-D"))?,
            // only the ε margin around the star velocity may suppress q here
            Err(reason) => ensure(
                (oracle.a_plus - oracle.u_star).min(oracle.u_star - oracle.a_minus) < 1e-10,
                || format!("sample {n}: q dropped ({reason:?}) away from the speed bounds"),
            )?,
        }

        let (l2, r2) = (ConservedState2D::from_primitive(wl, &gas), ConservedState2D::from_primitive(wr, &gas));
        let sp2 = local_speeds_2d_x(&l2, &r2, &gas).map_err(|e| e.to_string())?;
        let star2 = star_state_2d_x(&l2, &r2, sp2, &gas).map_err(|e| e.to_string())?;
        if let Ok(ad) = anti_diffusion_2d_x(&l2, &r2, &star2, sp2, SchemeFlavor::New, scheme.eps) {
            check_q_bounds(ad.q_rho, ad.alpha_star, args, &format!("sample {n} 2-D"))?;
        }
        checked += 1;
    }
    ensure(checked >= SAMPLES / 2, || format!("only {checked} pairs satisfied the speed ordering"))?;
    within_budget(start, Duration::from_secs(5))?;
    Ok(format!("{checked} of {SAMPLES} pairs inside the speed bounds, all bounded, in {:.2?}", start.elapsed()))
}

/// y-uniform Sod data, 20 steps of a fixed size that both CFL limits admit.
const REDUCTION_DT: f64 = 1e-3;

fn reduction_configs() -> (RunConfig, RunConfig) {
    let mut one = inline(
        r#"{"problem": {"riemann_1d": {"domain": [0, 1], "x0": 0.5,
            "left": [1, 0, 1], "right": [0.125, 0, 0.1], "n": 100, "t_final": 0.02}},
            "scheme": "new"}"#,
    );
    let mut two = inline(
        r#"{"problem": {"quadrants": {"x_domain": [0, 1], "y_domain": [0, 0.08], "center": [0.5, 0.04],
            "states": [[0.125, 0, 0, 0.1], [1, 0, 0, 1], [1, 0, 0, 1], [0.125, 0, 0, 0.1]],
            "n": [100, 8], "t_final": 0.02}},
            "scheme": "new"}"#,
    );
    one.integrator.dt_max = REDUCTION_DT;
    two.integrator.dt_max = REDUCTION_DT;
    (one, two)
}

fn dimension_reduction() -> Outcome {
    let start = Instant::now();
    let (c1, c2) = reduction_configs();
    let (a, b) = (sim(&c1), sim(&c2));
    ensure(a.records.len() == 20 && b.records.len() == 20, || {
        format!("step counts {} and {}", a.records.len(), b.records.len())
    })?;
    let (f1, f2) = (one_d(&a.field), two_d(&b.field));
    let mut worst = 0.0f64;
    for k in 0..f2.grid.ny {
        for j in 0..f2.grid.nx {
            let (x, y) = (f2.get(j, k), f1.get(j));
            worst = worst
                .max((x.rho - y.rho).abs())
                .max((x.momx - y.mom).abs())
                .max((x.ener - y.ener).abs())
                .max(x.momy.abs());
        }
    }
    ensure(worst <= 1e-12, || format!("max row deviation {worst:e}"))?;
    within_budget(start, Duration::from_secs(10))?;
    Ok(format!("100x8 vs 100 cells, 20 steps: max deviation {worst:e}"))
}

fn conservation() -> Outcome {
    let start = Instant::now();
    let cfg = load("smooth_wave.json", &[]);
    let s = sim(&cfg);
    let drift = max_relative_drift(
        &conserved_totals_1d(one_d(&s.initial)),
        &conserved_totals_1d(one_d(&s.field)),
    );
    ensure(s.t == 0.5, || format!("stopped at t = {}", s.t))?;
    ensure(drift < 1e-12, || format!("relative drift {drift:e}"))?;
    within_budget(start, Duration::from_secs(5))?;
    Ok(format!("N = 100, t = 0.5, max relative drift {drift:e}"))
}

/// Pinned: observed order between N = 100 and N = 200.
const PINNED_RATE: f64 = 2.12639464579815;

fn convergence() -> Outcome {
    let start = Instant::now();
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cfg = load("smooth_wave.json", &[]);
    let report = cmd_convergence(&cfg, &[100, 200], dir.path()).map_err(|e| e.to_string())?;
    let rate = report.get("rate.n100_n200").ok_or("rate missing from report")?;
    ensure(rate >= 1.7, || format!("rate {rate}"))?;
    pinned("rate", rate, PINNED_RATE, 1e-8)?;
    within_budget(start, Duration::from_secs(30))?;
    Ok(format!("L1(rho) rate N = 100 -> 200: {rate:.6}"))
}

/// Pinned: density TV over [-5, -4.5] at t = 5 with 800 cells.
const PINNED_TV_NEW: f64 = 0.05292016307035863;
const PINNED_TV_OLD: f64 = 0.09046953425643856;

fn density_tv(cfg: &RunConfig, field: &ldcu::Field1D, lo: f64, hi: f64) -> f64 {
    let rho = values_1d(field, Quantity::Density, &cfg.gas()).expect("admissible");
    total_variation_1d(&field.grid, &rho, Window::new(lo, hi)).expect("window has cells")
}

fn boundary_oscillations() -> Outcome {
    let start = Instant::now();
    let base = load("shock_entropy.json", &[]);
    let tv = |flavor| {
        let cfg = base.with_flavor(flavor);
        let s = sim(&cfg);
        assert_eq!(s.t, 5.0);
        density_tv(&cfg, one_d(&s.field), -5.0, -4.5)
    };
    let (new, old) = (tv(SchemeFlavor::New), tv(SchemeFlavor::Old));
    ensure(new < old, || format!("TV(NEW) = {new} is not below TV(OLD) = {old}"))?;
    pinned("TV(NEW)", new, PINNED_TV_NEW, 1e-8)?;
    pinned("TV(OLD)", old, PINNED_TV_OLD, 1e-8)?;
    within_budget(start, Duration::from_secs(60))?;
    Ok(format!("TV(NEW) = {new:.10e} < TV(OLD) = {old:.10e}"))
}

/// Pinned: density range of the 1/8000 NEW reference over [0.7, 0.8].
const PINNED_REFERENCE_RANGE: (f64, f64) = (0.5696516251728034, 1.8610304207899813);
/// Pinned: worst overshoot of the 1/200 solutions against that range.
const PINNED_OVERSHOOT_NEW: f64 = 0.0;
const PINNED_OVERSHOOT_OLD: f64 = 0.009068476622060562;

/// The fine reference is expensive, so it is cached under the test scratch
/// directory and recomputed when missing or unreadable.
fn contact_reference_range() -> Result<(f64, f64), String> {
    let cache = Path::new(env!("CARGO_TARGET_TMPDIR")).join("stationary_contact_dx8000_new.csv");
    let cfg = load("stationary_contact.json", &["nx=8000"]);
    let snapshot = match Snapshot1D::read(&cache) {
        Ok(s) if s.n == 8000 && s.meta.scheme == SchemeFlavor::New => s,
        _ => {
            let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
            let summary = cmd_run(&cfg, dir.path()).map_err(|e| e.to_string())?;
            let last = summary.snapshots.last().ok_or("reference run wrote no snapshot")?;
            fs::copy(last, &cache).map_err(|e| e.to_string())?;
            Snapshot1D::read(&cache).map_err(|e| e.to_string())?
        }
    };
    let grid = ldcu::Grid1D::new(snapshot.n, snapshot.x_lo, snapshot.x_hi).map_err(|e| e.to_string())?;
    let cells = Window::new(0.7, 0.8).cells(&grid).map_err(|e| e.to_string())?;
    Ok(min_max(&snapshot.column(1)[cells]))
}

fn contact_oscillations() -> Outcome {
    let start = Instant::now();
    let (lo, hi) = contact_reference_range()?;
    pinned("reference min", lo, PINNED_REFERENCE_RANGE.0, 1e-8)?;
    pinned("reference max", hi, PINNED_REFERENCE_RANGE.1, 1e-8)?;
    let base = load("stationary_contact.json", &[]);
    let worst = |flavor| {
        let cfg = base.with_flavor(flavor);
        let s = sim(&cfg);
        let field = one_d(&s.field);
        let rho = values_1d(field, Quantity::Density, &cfg.gas()).expect("admissible");
        let cells = Window::new(0.7, 0.8).cells(&field.grid).expect("window has cells");
        overshoot(&rho[cells], lo, hi).worst()
    };
    let (new, old) = (worst(SchemeFlavor::New), worst(SchemeFlavor::Old));
    ensure(new < old, || format!("overshoot(NEW) = {new} is not below overshoot(OLD) = {old}"))?;
    pinned("overshoot(NEW)", new, PINNED_OVERSHOOT_NEW, 1e-8)?;
    pinned("overshoot(OLD)", old, PINNED_OVERSHOOT_OLD, 1e-8)?;
    within_budget(start, Duration::from_secs(600))?;
    Ok(format!("overshoot(NEW) = {new:e} < overshoot(OLD) = {old:e} against [{lo:.6}, {hi:.6}]"))
}

fn implosion_symmetry() -> Outcome {
    let start = Instant::now();
    let cfg = load("implosion.json", &["nx=200", "ny=200", "t_final=0.5"]);
    let s = sim(&cfg);
    ensure(s.t == 0.5, || format!("stopped at t = {}", s.t))?;
    let err = symmetry_error(two_d(&s.field)).map_err(|e| e.to_string())?;
    ensure(err < 1e-10, || format!("symmetry error {err:e}"))?;
    within_budget(start, Duration::from_secs(600))?;
    Ok(format!("200^2, t = {}, {} steps: symmetry error {err:e}", s.t, s.records.len()))
}

/// Pinned density extremes of the reduced-resolution 2-D runs.
const PINNED_RIEMANN_RHO: (f64, f64) = (0.138, 1.7560394741909253);
const PINNED_EXPLOSION_RHO: (f64, f64) = (0.08780383359020184, 0.20348140043794483);

fn positive_run(config: &str, n: &str, pins: (f64, f64)) -> Result<String, String> {
    let cfg = load(config, &[&format!("nx={n}"), &format!("ny={n}")]);
    let s = sim(&cfg);
    let field = two_d(&s.field);
    let gas = cfg.gas();
    let (rho_min, rho_max) = min_max(&values_2d(field, Quantity::Density, &gas).map_err(|e| e.to_string())?);
    let (p_min, _) = min_max(&values_2d(field, Quantity::Pressure, &gas).map_err(|e| e.to_string())?);
    ensure(s.t == cfg.problem.t_final(), || format!("{config}: stopped at {}", s.t))?;
    ensure(rho_min > 0.0 && p_min > 0.0, || format!("{config}: min rho {rho_min}, min p {p_min}"))?;
    ensure(s.records.iter().all(|r| r.min_rho > 0.0 && r.min_p > 0.0), || {
        format!("{config}: a step produced a non-positive state")
    })?;
    pinned("min rho", rho_min, pins.0, 1e-8)?;
    pinned("max rho", rho_max, pins.1, 1e-8)?;
    Ok(format!("{n}^2: rho in [{rho_min:.10}, {rho_max:.10}], min p {p_min:.4e}"))
}

fn two_d_positivity() -> Outcome {
    let start = Instant::now();
    let a = positive_run("riemann2d_config3.json", "300", PINNED_RIEMANN_RHO)?;
    let mid = Instant::now();
    within_budget(start, Duration::from_secs(1800))?;
    let b = positive_run("explosion.json", "200", PINNED_EXPLOSION_RHO)?;
    within_budget(mid, Duration::from_secs(1800))?;
    Ok(format!("four-shock {a}; explosion {b}"))
}

fn identical_outputs(cfg: &RunConfig) -> Result<usize, String> {
    let dirs = [tempfile::tempdir(), tempfile::tempdir()];
    let mut listings = Vec::new();
    for dir in &dirs {
        let dir = dir.as_ref().map_err(|e| e.to_string())?;
        let summary = cmd_run(cfg, dir.path()).map_err(|e| e.to_string())?;
        ensure(!summary.snapshots.is_empty(), || "no snapshot written".to_string())?;
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir.path())
            .map_err(|e| e.to_string())?
            .map(|entry| {
                let path = entry.expect("listing").path();
                let name = path.file_name().unwrap().to_string_lossy().into_owned();
                (name, fs::read(&path).expect("readable"))
            })
            .collect();
        files.sort();
        listings.push(files);
    }
    ensure(listings[0] == listings[1], || "repeated runs wrote different files".to_string())?;
    Ok(listings[0].len())
}

fn determinism() -> Outcome {
    let (_, reduction) = reduction_configs();
    let a = identical_outputs(&reduction)?;
    let b = identical_outputs(&load("shock_entropy.json", &[]))?;
    Ok(format!("{a} and {b} output files byte-identical across repeats"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("flux consistency", flux_consistency),
        ("anti-diffusion bounds", anti_diffusion_bounds),
        ("dimension reduction", dimension_reduction),
        ("conservation", conservation),
        ("second-order convergence", convergence),
        ("boundary oscillations (shock-entropy)", boundary_oscillations),
        ("contact oscillations (stationary contact)", contact_oscillations),
        ("implosion symmetry", implosion_symmetry),
        ("2-D positivity (four-shock, explosion)", two_d_positivity),
        ("determinism", determinism),
    ];
    let only: Vec<usize> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect())
        .unwrap_or_default();
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let number = i + 1;
        if !only.is_empty() && !only.contains(&number) {
            continue;
        }
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {number} PASS {name}: {detail}"),
            Err(detail) => {
                failures += 1;
                println!("criterion {number} FAIL {name}: {detail}");
            }
        }
    }
    if failures > 0 {
        std::process::exit(1);
    }
}
