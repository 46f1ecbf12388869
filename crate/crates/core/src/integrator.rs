//! Semi-discrete right-hand sides and SSP-RK3 time stepping.
//!
//! [`Euler1D`] and [`Euler2D`] assemble `dU/dt = −(F_{j+1/2} − F_{j−1/2})/Δx
//! [− (G_{k+1/2} − G_{k−1/2})/Δy]` from ghost-filled cell averages. The time
//! step is recomputed from the state at `tⁿ` and held fixed across the three
//! stages; snapshot times are hit exactly by shortening the step.

use crate::error::{Location, SolverError};
use crate::euler::{ConservedState1D, ConservedState2D, EulerState, GasModel};
use crate::flux::{
    numerical_flux_1d, numerical_flux_2d_x, numerical_flux_2d_y, Desingularization, FluxBranch,
    InterfaceFlux, SchemeFlavor,
};
use crate::mesh::{BoundarySpec1D, BoundarySpec2D, Field1D, Field2D, Grid1D, Grid2D, NGHOST};
use crate::reconstruction::{cell_increment, interface_pair, reconstruct_line, LimiterConfig};

/// Everything that determines the spatial discretization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub flavor: SchemeFlavor,
    pub gas: GasModel,
    pub limiter: LimiterConfig,
    pub eps: Desingularization,
}

impl SchemeConfig {
    pub fn new(flavor: SchemeFlavor) -> Self {
        Self {
            flavor,
            gas: GasModel::default(),
            limiter: LimiterConfig::default(),
            eps: Desingularization::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegratorConfig {
    pub cfl: f64,
    pub t_final: f64,
    pub max_steps: usize,
    /// Upper bound on the step, used when the state has no wave motion.
    pub dt_max: f64,
}

impl IntegratorConfig {
    pub fn new(cfl: f64, t_final: f64) -> Result<Self, SolverError> {
        let cfg = Self {
            cfl,
            t_final,
            ..Self::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return Err(SolverError::Config(format!("CFL number must lie in (0, 1), got {}", self.cfl)));
        }
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(SolverError::Config(format!("invalid final time {}", self.t_final)));
        }
        if !(self.dt_max > 0.0) {
            return Err(SolverError::Config(format!("dt_max must be positive, got {}", self.dt_max)));
        }
        Ok(())
    }
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            cfl: 0.475,
            t_final: 0.0,
            max_steps: 10_000_000,
            dt_max: f64::INFINITY,
        }
    }
}

/// One accepted time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    /// Time after the step.
    pub t: f64,
    pub dt: f64,
    pub max_speed: f64,
    pub min_rho: f64,
    pub min_p: f64,
    /// Interfaces (over all three stages) where the anti-diffusion was dropped.
    pub dropped: usize,
}

/// By-products of one right-hand-side evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RhsInfo {
    pub max_speed_x: f64,
    pub max_speed_y: f64,
    pub dropped: usize,
    pub desingularized: usize,
}

impl RhsInfo {
    fn record<S>(&mut self, f: &InterfaceFlux<S>, y: bool) {
        let s = f.speeds.max_abs();
        if y {
            self.max_speed_y = self.max_speed_y.max(s);
        } else {
            self.max_speed_x = self.max_speed_x.max(s);
        }
        match f.branch {
            FluxBranch::Regular => {}
            FluxBranch::Desingularized => self.desingularized += 1,
            FluxBranch::Dropped(reason) => {
                log::trace!("anti-diffusion dropped: {reason:?}");
                self.dropped += 1;
            }
        }
    }
}

/// Minimum density and pressure over the interior.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min_rho: f64,
    pub min_p: f64,
}

/// State that SSP-RK stages can be formed from.
pub trait OdeState: Clone {
    /// `self ← base + weight · ((self − base) + dt · deriv)`.
    ///
    /// With `self = base` and `weight = 1` this is a forward Euler step; the
    /// increment form makes a zero derivative leave `base` bitwise intact.
    fn ssp_stage(&mut self, base: &Self, weight: f64, dt: f64, deriv: &Self);
}

fn stage_cells<S: EulerState>(cells: &mut [S], base: &[S], weight: f64, dt: f64, deriv: &[S]) {
    for ((u, &b), &l) in cells.iter_mut().zip(base).zip(deriv) {
        *u = b + ((*u - b) + l * dt) * weight;
    }
}

impl OdeState for Field1D {
    fn ssp_stage(&mut self, base: &Self, weight: f64, dt: f64, deriv: &Self) {
        stage_cells(&mut self.cells, &base.cells, weight, dt, &deriv.cells);
    }
}

impl OdeState for Field2D {
    fn ssp_stage(&mut self, base: &Self, weight: f64, dt: f64, deriv: &Self) {
        stage_cells(&mut self.cells, &base.cells, weight, dt, &deriv.cells);
    }
}

impl OdeState for f64 {
    fn ssp_stage(&mut self, base: &Self, weight: f64, dt: f64, deriv: &Self) {
        *self = base + ((*self - base) + deriv * dt) * weight;
    }
}

fn in_stage(stage: usize) -> impl Fn(SolverError) -> SolverError {
    move |e| SolverError::Stage {
        stage,
        source: Box::new(e),
    }
}

/// One three-stage SSP-RK3 step with a fixed `dt`:
///
/// ```text
/// U¹ = Uⁿ + Δt L(Uⁿ)
/// U² = ¾Uⁿ + ¼(U¹ + Δt L(U¹))
/// Uⁿ⁺¹ = ⅓Uⁿ + ⅔(U² + Δt L(U²))
/// ```
pub fn ssp_rk3_step<U: OdeState>(
    u: &U,
    dt: f64,
    mut rhs: impl FnMut(&mut U) -> Result<U, SolverError>,
) -> Result<U, SolverError> {
    let mut work = u.clone();
    let l0 = rhs(&mut work).map_err(in_stage(1))?;
    ssp_rk3_finish(u, &l0, dt, rhs)
}

/// Stages 2 and 3 given `L(Uⁿ)`.
fn ssp_rk3_finish<U: OdeState>(
    u: &U,
    l0: &U,
    dt: f64,
    mut rhs: impl FnMut(&mut U) -> Result<U, SolverError>,
) -> Result<U, SolverError> {
    let mut stage = u.clone();
    stage.ssp_stage(u, 1.0, dt, l0);
    let l1 = rhs(&mut stage).map_err(in_stage(2))?;
    stage.ssp_stage(u, 0.25, dt, &l1);
    let l2 = rhs(&mut stage).map_err(in_stage(3))?;
    stage.ssp_stage(u, 2.0 / 3.0, dt, &l2);
    Ok(stage)
}

/// `Δt = cfl · Δx / max speed`, or `None` when nothing moves.
pub fn dt_1d(max_speed: f64, dx: f64, cfl: f64) -> Option<f64> {
    (max_speed > 0.0).then(|| cfl * dx / max_speed)
}

/// `Δt = cfl / (s_x/Δx + s_y/Δy)`, or `None` when nothing moves.
pub fn dt_2d(speed_x: f64, speed_y: f64, dx: f64, dy: f64, cfl: f64) -> Option<f64> {
    let rate = speed_x / dx + speed_y / dy;
    (rate > 0.0).then(|| cfl / rate)
}

/// Applies `dt_max` and shortens the step so that `t + dt` does not pass
/// `target`. Returns the step and whether it lands exactly on `target`.
pub fn clip_dt(candidate: Option<f64>, t: f64, target: f64, dt_max: f64) -> (f64, bool) {
    let dt = candidate.unwrap_or(f64::INFINITY).min(dt_max);
    let remaining = target - t;
    if dt >= remaining {
        (remaining, true)
    } else {
        (dt, false)
    }
}

/// A method-of-lines system the run loop can drive.
pub trait SemiDiscrete {
    type Field: OdeState;

    /// Fills ghost cells of `u`, then returns `L(u)` (zero in the ghosts).
    fn rhs(&self, u: &mut Self::Field) -> Result<(Self::Field, RhsInfo), SolverError>;

    /// CFL step from the speeds gathered during [`SemiDiscrete::rhs`].
    fn stable_dt(&self, info: &RhsInfo, cfl: f64) -> Option<f64>;

    /// Minimum density and pressure over the interior, or the first
    /// inadmissible cell.
    fn check(&self, u: &Self::Field) -> Result<Bounds, SolverError>;

    /// CFL step for the state `u` (unclipped).
    fn compute_dt(&self, u: &mut Self::Field, cfl: f64) -> Result<Option<f64>, SolverError> {
        let (_, info) = self.rhs(u)?;
        Ok(self.stable_dt(&info, cfl))
    }
}

fn bounds_of<S: EulerState>(
    cells: impl Iterator<Item = (Location, S)>,
    gas: &GasModel,
) -> Result<Bounds, SolverError> {
    let mut b = Bounds {
        min_rho: f64::INFINITY,
        min_p: f64::INFINITY,
    };
    for (loc, s) in cells {
        let (rho, p) = s.check_admissible(gas).map_err(SolverError::at(loc))?;
        b.min_rho = b.min_rho.min(rho);
        b.min_p = b.min_p.min(p);
    }
    Ok(b)
}

/// 1-D Euler equations on a uniform grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Euler1D {
    pub grid: Grid1D,
    pub bc: BoundarySpec1D,
    pub scheme: SchemeConfig,
}

impl Euler1D {
    pub fn new(grid: Grid1D, bc: BoundarySpec1D, scheme: SchemeConfig) -> Self {
        Self { grid, bc, scheme }
    }

    /// Numerical fluxes at interfaces `0..=n` of a ghost-filled field.
    pub fn interface_fluxes(
        &self,
        u: &Field1D,
        info: &mut RhsInfo,
    ) -> Result<Vec<ConservedState1D>, SolverError> {
        let sc = &self.scheme;
        let mut pairs = Vec::with_capacity(u.grid.n + 1);
        reconstruct_line(&u.cells, sc.limiter.theta(), &mut pairs);
        pairs
            .iter()
            .enumerate()
            .map(|(i, (m, p))| {
                let f = numerical_flux_1d(m, p, &sc.gas, sc.flavor, sc.eps)
                    .map_err(SolverError::at(Location::Interface1D(i)))?;
                info.record(&f, false);
                Ok(f.flux)
            })
            .collect()
    }
}

impl SemiDiscrete for Euler1D {
    type Field = Field1D;

    fn rhs(&self, u: &mut Field1D) -> Result<(Field1D, RhsInfo), SolverError> {
        debug_assert_eq!(u.grid, self.grid);
        u.apply_bc(&self.bc);
        let mut info = RhsInfo::default();
        let fluxes = self.interface_fluxes(u, &mut info)?;
        let dx = self.grid.dx;
        let mut out = Field1D::zeros(self.grid);
        for (j, pair) in fluxes.windows(2).enumerate() {
            out.cells[j + NGHOST] = (pair[1] - pair[0]).map(|v| -v / dx);
        }
        Ok((out, info))
    }

    fn stable_dt(&self, info: &RhsInfo, cfl: f64) -> Option<f64> {
        dt_1d(info.max_speed_x, self.grid.dx, cfl)
    }

    fn check(&self, u: &Field1D) -> Result<Bounds, SolverError> {
        bounds_of(
            u.interior()
                .iter()
                .enumerate()
                .map(|(j, &s)| (Location::Cell1D(j), s)),
            &self.scheme.gas,
        )
    }
}

/// 2-D Euler equations on a uniform Cartesian grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Euler2D {
    pub grid: Grid2D,
    pub bc: BoundarySpec2D,
    pub scheme: SchemeConfig,
}

impl Euler2D {
    pub fn new(grid: Grid2D, bc: BoundarySpec2D, scheme: SchemeConfig) -> Self {
        Self { grid, bc, scheme }
    }
}

impl SemiDiscrete for Euler2D {
    type Field = Field2D;

    fn rhs(&self, u: &mut Field2D) -> Result<(Field2D, RhsInfo), SolverError> {
        debug_assert_eq!(u.grid, self.grid);
        u.apply_bc(&self.bc);
        let g = self.grid;
        let sc = &self.scheme;
        let theta = sc.limiter.theta();
        let stride = g.stride();
        let mut info = RhsInfo::default();
        let mut out = Field2D::zeros(g);
        let mut pairs = Vec::with_capacity(g.nx + 1);
        let mut fluxes = Vec::with_capacity(g.nx + 1);

        // x sweep, row by row
        for k in 0..g.ny {
            let row_start = (k + NGHOST) * stride;
            reconstruct_line(&u.cells[row_start..row_start + stride], theta, &mut pairs);
            fluxes.clear();
            for (i, (m, p)) in pairs.iter().enumerate() {
                let f = numerical_flux_2d_x(m, p, &sc.gas, sc.flavor, sc.eps)
                    .map_err(SolverError::at(Location::InterfaceX(i, k)))?;
                info.record(&f, false);
                fluxes.push(f.flux);
            }
            for (j, pair) in fluxes.windows(2).enumerate() {
                out.cells[row_start + j + NGHOST] = (pair[1] - pair[0]).map(|v| -v / g.dx);
            }
        }

        // y sweep, one row of interfaces at a time so memory is read along rows.
        // Interface row i separates storage rows i + 1 and i + 2; the arithmetic
        // matches reconstruct_line on a column exactly.
        let cells = &u.cells;
        let increments = |sk: usize, dst: &mut Vec<ConservedState2D>| {
            dst.clear();
            dst.extend((NGHOST..NGHOST + g.nx).map(|sj| {
                let at = |r: usize| cells[r * stride + sj];
                cell_increment(at(sk - 1), at(sk), at(sk + 1), theta)
            }));
        };
        let (mut lower, mut upper) = (Vec::with_capacity(g.nx), Vec::with_capacity(g.nx));
        let (mut below, mut above) = (Vec::with_capacity(g.nx), Vec::with_capacity(g.nx));
        increments(NGHOST - 1, &mut lower);
        for i in 0..=g.ny {
            let (sk_lo, sk_hi) = (i + NGHOST - 1, i + NGHOST);
            increments(sk_hi, &mut upper);
            above.clear();
            for j in 0..g.nx {
                let sj = j + NGHOST;
                let (m, p) = interface_pair(
                    cells[sk_lo * stride + sj],
                    lower[j],
                    cells[sk_hi * stride + sj],
                    upper[j],
                );
                let f = numerical_flux_2d_y(&m, &p, &sc.gas, sc.flavor, sc.eps)
                    .map_err(SolverError::at(Location::InterfaceY(j, i)))?;
                info.record(&f, true);
                above.push(f.flux);
            }
            if i > 0 {
                let row = &mut out.cells[sk_lo * stride..(sk_lo + 1) * stride];
                for (j, (hi, lo)) in above.iter().zip(&below).enumerate() {
                    let cell = &mut row[j + NGHOST];
                    *cell = *cell - (*hi - *lo).map(|v| v / g.dy);
                }
            }
            std::mem::swap(&mut lower, &mut upper);
            std::mem::swap(&mut below, &mut above);
        }
        Ok((out, info))
    }

    fn stable_dt(&self, info: &RhsInfo, cfl: f64) -> Option<f64> {
        dt_2d(info.max_speed_x, info.max_speed_y, self.grid.dx, self.grid.dy, cfl)
    }

    fn check(&self, u: &Field2D) -> Result<Bounds, SolverError> {
        let g = u.grid;
        bounds_of(
            (0..g.ny).flat_map(|k| (0..g.nx).map(move |j| (Location::Cell2D(j, k), u.get(j, k)))),
            &self.scheme.gas,
        )
    }
}

/// Receives the solution at each scheduled output time.
pub trait SnapshotSink<F> {
    fn snapshot(&mut self, t: f64, field: &F) -> Result<(), SolverError>;
}

impl<F, C: FnMut(f64, &F) -> Result<(), SolverError>> SnapshotSink<F> for C {
    fn snapshot(&mut self, t: f64, field: &F) -> Result<(), SolverError> {
        self(t, field)
    }
}

/// A sink that ignores everything.
pub struct NoSnapshots;

impl<F> SnapshotSink<F> for NoSnapshots {
    fn snapshot(&mut self, _t: f64, _field: &F) -> Result<(), SolverError> {
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput<F> {
    pub field: F,
    pub t: f64,
    pub records: Vec<StepRecord>,
}

/// A run that stopped early; `field` is the last accepted state.
#[derive(Debug, Clone)]
pub struct RunFailure<F> {
    pub error: SolverError,
    pub field: F,
    pub t: f64,
    pub records: Vec<StepRecord>,
}

/// Integrates from `t = 0` to `cfg.t_final`.
///
/// `snapshot_times` outside `[0, t_final]` are ignored; the final time is
/// always delivered to `sink`. Returns the final field and one record per
/// step.
pub fn run<S: SemiDiscrete>(
    system: &S,
    initial: S::Field,
    cfg: &IntegratorConfig,
    snapshot_times: &[f64],
    sink: &mut impl SnapshotSink<S::Field>,
) -> Result<RunOutput<S::Field>, Box<RunFailure<S::Field>>> {
    let mut targets: Vec<f64> = snapshot_times
        .iter()
        .copied()
        .filter(|&t| t >= 0.0 && t < cfg.t_final)
        .collect();
    targets.sort_by(f64::total_cmp);
    targets.dedup();
    targets.push(cfg.t_final);

    let mut u = initial;
    let mut t = 0.0;
    let mut records = Vec::new();
    let fail = |error, field, t, records| {
        Err(Box::new(RunFailure {
            error,
            field,
            t,
            records,
        }))
    };

    if let Err(e) = cfg.validate().and_then(|_| system.check(&u)) {
        return fail(e, u, t, records);
    }
    let mut next = 0;
    while next < targets.len() && targets[next] <= t {
        if let Err(e) = sink.snapshot(t, &u) {
            return fail(e, u, t, records);
        }
        next += 1;
    }

    let mut step = 0;
    while next < targets.len() {
        if step >= cfg.max_steps {
            return fail(SolverError::MaxSteps(cfg.max_steps), u, t, records);
        }
        let at_step = |e: SolverError| SolverError::Step {
            step: step + 1,
            time: t,
            source: Box::new(e),
        };
        let attempt = system
            .rhs(&mut u)
            .map_err(in_stage(1))
            .and_then(|(l0, info)| {
                let target = targets[next];
                let (dt, lands) = clip_dt(system.stable_dt(&info, cfg.cfl), t, target, cfg.dt_max);
                let mut dropped = info.dropped;
                let new = ssp_rk3_finish(&u, &l0, dt, |s| {
                    let (l, i) = system.rhs(s)?;
                    dropped += i.dropped;
                    Ok(l)
                })?;
                let bounds = system.check(&new).map_err(in_stage(3))?;
                Ok((new, dt, lands, bounds, info, dropped))
            });
        let (new, dt, lands, bounds, info, dropped) = match attempt {
            Ok(ok) => ok,
            Err(e) => {
                let e = at_step(e);
                return fail(e, u, t, records);
            }
        };
        step += 1;
        t = if lands { targets[next] } else { t + dt };
        u = new;
        records.push(StepRecord {
            step,
            t,
            dt,
            max_speed: info.max_speed_x.max(info.max_speed_y),
            min_rho: bounds.min_rho,
            min_p: bounds.min_p,
            dropped,
        });
        while next < targets.len() && targets[next] <= t {
            if let Err(e) = sink.snapshot(t, &u) {
                return fail(e, u, t, records);
            }
            next += 1;
        }
    }
    Ok(RunOutput {
        field: u,
        t,
        records,
    })
}
