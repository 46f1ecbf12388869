//! Central-upwind numerical fluxes with built-in anti-diffusion.
//!
//! Every flux has the form
//!
//! ```text
//! F = (a⁺ F(U⁻) − a⁻ F(U⁺)) / (a⁺ − a⁻) + a⁺a⁻ / (a⁺ − a⁻) (U⁺ − U⁻) + q
//! ```
//!
//! and the three [`SchemeFlavor`]s differ only in the anti-diffusion `q`:
//!
//! * `New` places the sub-cell discontinuity at `x + u*Δt`, so the minmod
//!   weights use the star-relative speeds `a^{*,±} = a^± − u*` and `q` is
//!   scaled by `α*`.
//! * `Old` keeps the discontinuity at the interface: the same formulas with
//!   `u*` replaced by zero in the weights and `α* = 1`.
//! * `Cu` has `q = 0`.
//!
//! When the anti-diffusion cannot be evaluated safely (star density not
//! positive, `u*` outside the local fan, a corrected density not positive),
//! `q` is dropped for that interface and the plain central-upwind flux is
//! returned; [`FluxBranch`] records why.
//!
//! The y-direction 2-D flux is evaluated as `swap ∘ F_x ∘ swap`, which makes
//! the x/y symmetry of the scheme exact in floating point.

use std::fmt;
use std::str::FromStr;

use crate::error::{SolverError, StateError};
use crate::euler::{ConservedState1D, ConservedState2D, EulerState, GasModel};
use crate::reconstruction::minmod2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SchemeFlavor {
    /// Anti-diffusion with the shifted projection point.
    New,
    /// Anti-diffusion with the projection point at the interface.
    Old,
    /// Plain central-upwind flux, no anti-diffusion.
    Cu,
}

impl SchemeFlavor {
    pub const ALL: [SchemeFlavor; 3] = [SchemeFlavor::New, SchemeFlavor::Old, SchemeFlavor::Cu];

    pub fn name(&self) -> &'static str {
        match self {
            SchemeFlavor::New => "new",
            SchemeFlavor::Old => "old",
            SchemeFlavor::Cu => "cu",
        }
    }
}

impl fmt::Display for SchemeFlavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeFlavor {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "new" => Ok(SchemeFlavor::New),
            "old" => Ok(SchemeFlavor::Old),
            "cu" => Ok(SchemeFlavor::Cu),
            other => Err(SolverError::Config(format!(
                "unknown scheme '{other}' (expected new, old or cu)"
            ))),
        }
    }
}

/// Desingularization threshold on the local speeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Desingularization(f64);

impl Desingularization {
    pub fn new(epsilon: f64) -> Result<Self, SolverError> {
        if epsilon > 0.0 && epsilon.is_finite() {
            Ok(Self(epsilon))
        } else {
            Err(SolverError::Config(format!(
                "desingularization parameter must be positive, got {epsilon}"
            )))
        }
    }

    pub fn epsilon(&self) -> f64 {
        self.0
    }
}

impl Default for Desingularization {
    fn default() -> Self {
        Self(1e-12)
    }
}

/// One-sided local speeds at an interface, `a_minus ≤ 0 ≤ a_plus`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceSpeeds {
    pub a_plus: f64,
    pub a_minus: f64,
}

impl InterfaceSpeeds {
    pub fn max_abs(&self) -> f64 {
        self.a_plus.max(-self.a_minus)
    }

    fn from_sides(ul: f64, cl: f64, ur: f64, cr: f64) -> Self {
        Self {
            a_plus: (ul + cl).max(ur + cr).max(0.0),
            a_minus: (ul - cl).min(ur - cr).min(0.0),
        }
    }

    fn is_degenerate(&self, eps: Desingularization) -> bool {
        self.a_plus < eps.0 && self.a_minus > -eps.0
    }
}

/// Why the anti-diffusion term was dropped at an interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DropReason {
    /// `ρ* ≤ 0`.
    StarDensity,
    /// `u*` too close to (or outside) the fan `(a⁻, a⁺)`, or a zero speed in
    /// a denominator of the transverse energy correction.
    StarVelocity,
    /// `ρ* + q^ρ / a^{*,±} ≤ 0` in the 2-D energy correction.
    CorrectedDensity,
}

/// Which formula produced an interface flux.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FluxBranch {
    /// Central-upwind flux plus the flavor's anti-diffusion.
    Regular,
    /// Both speeds within `ε` of zero: average of the physical fluxes.
    Desingularized,
    /// Central-upwind flux with the anti-diffusion dropped.
    Dropped(DropReason),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceFlux<S> {
    pub flux: S,
    pub speeds: InterfaceSpeeds,
    pub branch: FluxBranch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarState1D {
    pub rho_star: f64,
    pub mom_star: f64,
    pub u_star: f64,
}

/// Star state in the direction normal to an x-interface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarState2D {
    pub state: ConservedState2D,
    pub u_star: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntiDiffusion1D {
    pub q_rho: f64,
    pub alpha_star: f64,
    pub q: ConservedState1D,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntiDiffusion2D {
    pub q_rho: f64,
    /// Anti-diffusion of the transverse momentum.
    pub q_mv: f64,
    pub q_e: f64,
    pub alpha_star: f64,
    pub q: ConservedState2D,
}

/// Velocity, pressure, sound speed and physical flux of one side.
struct Side<S> {
    u: f64,
    c: f64,
    flux: S,
}

fn side_1d(s: &ConservedState1D, gas: &GasModel) -> Result<Side<ConservedState1D>, StateError> {
    let (rho, p) = s.check_admissible(gas)?;
    let u = s.mom / rho;
    Ok(Side {
        u,
        c: gas.sound_speed(rho, p)?,
        flux: s.flux_with(u, p),
    })
}

fn side_2d(s: &ConservedState2D, gas: &GasModel) -> Result<Side<ConservedState2D>, StateError> {
    let (rho, p) = s.check_admissible(gas)?;
    let u = s.momx / rho;
    Ok(Side {
        u,
        c: gas.sound_speed(rho, p)?,
        flux: s.flux_x_with(u, p),
    })
}

/// `a⁺ = max(u⁻ + c⁻, u⁺ + c⁺, 0)`, `a⁻ = min(u⁻ − c⁻, u⁺ − c⁺, 0)`.
pub fn local_speeds_1d(
    minus: &ConservedState1D,
    plus: &ConservedState1D,
    gas: &GasModel,
) -> Result<InterfaceSpeeds, StateError> {
    let (l, r) = (side_1d(minus, gas)?, side_1d(plus, gas)?);
    Ok(InterfaceSpeeds::from_sides(l.u, l.c, r.u, r.c))
}

/// x-direction speeds for 2-D states; y-direction speeds are obtained on
/// swapped states.
pub fn local_speeds_2d_x(
    minus: &ConservedState2D,
    plus: &ConservedState2D,
    gas: &GasModel,
) -> Result<InterfaceSpeeds, StateError> {
    let (l, r) = (side_2d(minus, gas)?, side_2d(plus, gas)?);
    Ok(InterfaceSpeeds::from_sides(l.u, l.c, r.u, r.c))
}

/// `(a⁺U⁺ − a⁻U⁻ − [F(U⁺) − F(U⁻)]) / (a⁺ − a⁻)`, componentwise.
fn hll_average<S: EulerState>(minus: S, plus: S, f_minus: S, f_plus: S, sp: InterfaceSpeeds) -> S {
    let da = sp.a_plus - sp.a_minus;
    S::from_fn(|i| {
        (sp.a_plus * plus.component(i)
            - sp.a_minus * minus.component(i)
            - (f_plus.component(i) - f_minus.component(i)))
            / da
    })
}

fn star_1d_from_fluxes(
    minus: &ConservedState1D,
    plus: &ConservedState1D,
    f_minus: &ConservedState1D,
    f_plus: &ConservedState1D,
    sp: InterfaceSpeeds,
) -> Result<StarState1D, StateError> {
    let star = hll_average(*minus, *plus, *f_minus, *f_plus, sp);
    if !(star.rho > 0.0) {
        return Err(StateError::NonPositiveDensity(star.rho));
    }
    Ok(StarState1D {
        rho_star: star.rho,
        mom_star: star.mom,
        u_star: star.mom / star.rho,
    })
}

/// Star density and momentum at an interface, `u* = (ρu)* / ρ*`.
///
/// The caller must ensure `a⁺ − a⁻ ≥ ε`; below that the desingularized flux
/// applies and no star state is needed.
pub fn star_state_1d(
    minus: &ConservedState1D,
    plus: &ConservedState1D,
    speeds: InterfaceSpeeds,
    gas: &GasModel,
) -> Result<StarState1D, StateError> {
    let (fm, fp) = (minus.flux(gas)?, plus.flux(gas)?);
    star_1d_from_fluxes(minus, plus, &fm, &fp, speeds)
}

fn star_2d_from_fluxes(
    minus: &ConservedState2D,
    plus: &ConservedState2D,
    f_minus: &ConservedState2D,
    f_plus: &ConservedState2D,
    sp: InterfaceSpeeds,
) -> Result<StarState2D, StateError> {
    let state = hll_average(*minus, *plus, *f_minus, *f_plus, sp);
    if !(state.rho > 0.0) {
        return Err(StateError::NonPositiveDensity(state.rho));
    }
    Ok(StarState2D {
        state,
        u_star: state.momx / state.rho,
    })
}

/// Full 4-component star state at an x-interface.
pub fn star_state_2d_x(
    minus: &ConservedState2D,
    plus: &ConservedState2D,
    speeds: InterfaceSpeeds,
    gas: &GasModel,
) -> Result<StarState2D, StateError> {
    let (fm, fp) = (minus.flux_x(gas)?, plus.flux_x(gas)?);
    star_2d_from_fluxes(minus, plus, &fm, &fp, speeds)
}

/// Star-relative speeds `(a^{*,+}, a^{*,−})` and `α*` for the anti-diffusing
/// flavors. `New` requires `a^{*,+} ≥ ε` and `a^{*,−} ≤ −ε`.
fn shifted_speeds(
    flavor: SchemeFlavor,
    u_star: f64,
    sp: InterfaceSpeeds,
    eps: Desingularization,
) -> Result<(f64, f64, f64), DropReason> {
    match flavor {
        SchemeFlavor::New => {
            let a_sp = sp.a_plus - u_star;
            let a_sm = sp.a_minus - u_star;
            if !(a_sp >= eps.0 && a_sm <= -eps.0) {
                return Err(DropReason::StarVelocity);
            }
            let alpha = if u_star < 0.0 {
                sp.a_plus / a_sp
            } else {
                sp.a_minus / a_sm
            };
            Ok((a_sp, a_sm, alpha))
        }
        SchemeFlavor::Old | SchemeFlavor::Cu => Ok((sp.a_plus, sp.a_minus, 1.0)),
    }
}

/// Density anti-diffusion `minmod(−a^{*,−}(ρ* − ρ⁻), a^{*,+}(ρ⁺ − ρ*))`,
/// also used for the transverse momentum.
#[inline]
fn limited_jump(a_sp: f64, a_sm: f64, minus: f64, star: f64, plus: f64) -> f64 {
    minmod2(-a_sm * (star - minus), a_sp * (plus - star))
}

/// Built-in anti-diffusion `q = α* q^ρ (1, u*, ½(u*)²)` of the 1-D flux.
pub fn anti_diffusion_1d(
    minus: &ConservedState1D,
    plus: &ConservedState1D,
    star: &StarState1D,
    speeds: InterfaceSpeeds,
    flavor: SchemeFlavor,
    eps: Desingularization,
) -> Result<AntiDiffusion1D, DropReason> {
    if flavor == SchemeFlavor::Cu {
        return Ok(AntiDiffusion1D {
            q_rho: 0.0,
            alpha_star: 1.0,
            q: ConservedState1D::default(),
        });
    }
    let (a_sp, a_sm, alpha) = shifted_speeds(flavor, star.u_star, speeds, eps)?;
    let u = star.u_star;
    let q_rho = limited_jump(a_sp, a_sm, minus.rho, star.rho_star, plus.rho);
    let kinetic = 0.5 * u * u * q_rho;
    Ok(AntiDiffusion1D {
        q_rho,
        alpha_star: alpha,
        q: ConservedState1D::new(alpha * q_rho, alpha * (u * q_rho), alpha * kinetic),
    })
}

/// Built-in anti-diffusion of the x-direction 2-D flux,
/// `q = α*(q^ρ, u* q^ρ, q^{ρv}, q^E)`.
pub fn anti_diffusion_2d_x(
    minus: &ConservedState2D,
    plus: &ConservedState2D,
    star: &StarState2D,
    speeds: InterfaceSpeeds,
    flavor: SchemeFlavor,
    eps: Desingularization,
) -> Result<AntiDiffusion2D, DropReason> {
    if flavor == SchemeFlavor::Cu {
        return Ok(AntiDiffusion2D {
            q_rho: 0.0,
            q_mv: 0.0,
            q_e: 0.0,
            alpha_star: 1.0,
            q: ConservedState2D::default(),
        });
    }
    let (a_sp, a_sm, alpha) = shifted_speeds(flavor, star.u_star, speeds, eps)?;
    // The energy correction divides by both weights.
    if !(a_sp >= eps.0 && a_sm <= -eps.0) {
        return Err(DropReason::StarVelocity);
    }
    let s = &star.state;
    let u = star.u_star;
    let q_rho = limited_jump(a_sp, a_sm, minus.rho, s.rho, plus.rho);
    let q_mv = limited_jump(a_sp, a_sm, minus.momy, s.momy, plus.momy);

    let rho_right = s.rho + q_rho / a_sp;
    let rho_left = s.rho + q_rho / a_sm;
    if !(rho_right > 0.0 && rho_left > 0.0) {
        return Err(DropReason::CorrectedDensity);
    }
    let mv_right = s.momy + q_mv / a_sp;
    let mv_left = s.momy + q_mv / a_sm;
    // Sign fixed by U_R − U_L = −(a⁺ − a⁻)/(a^{*,+}a^{*,−}) q for every
    // component; with the opposite sign a resting shear layer is smeared
    // twice as fast as by the plain central-upwind flux.
    let transverse = -a_sp * a_sm / (speeds.a_plus - speeds.a_minus)
        * (mv_right * mv_right / (2.0 * rho_right) - mv_left * mv_left / (2.0 * rho_left));
    let kinetic = 0.5 * u * u * q_rho;
    let q_e = transverse + kinetic;
    Ok(AntiDiffusion2D {
        q_rho,
        q_mv,
        q_e,
        alpha_star: alpha,
        q: ConservedState2D::new(alpha * q_rho, alpha * (u * q_rho), alpha * q_mv, alpha * q_e),
    })
}

/// Central-upwind part `(a⁺F⁻ − a⁻F⁺)/(a⁺ − a⁻) + a⁺a⁻/(a⁺ − a⁻)(U⁺ − U⁻)`.
fn central_upwind<S: EulerState>(minus: S, plus: S, f_minus: S, f_plus: S, sp: InterfaceSpeeds) -> S {
    let da = sp.a_plus - sp.a_minus;
    let diffusion = sp.a_plus * sp.a_minus / da;
    S::from_fn(|i| {
        (sp.a_plus * f_minus.component(i) - sp.a_minus * f_plus.component(i)) / da
            + diffusion * (plus.component(i) - minus.component(i))
    })
}

fn average<S: EulerState>(f_minus: S, f_plus: S) -> S {
    (f_minus + f_plus) * 0.5
}

/// Numerical flux at a 1-D interface from its one-sided values.
pub fn numerical_flux_1d(
    minus: &ConservedState1D,
    plus: &ConservedState1D,
    gas: &GasModel,
    flavor: SchemeFlavor,
    eps: Desingularization,
) -> Result<InterfaceFlux<ConservedState1D>, StateError> {
    let (l, r) = (side_1d(minus, gas)?, side_1d(plus, gas)?);
    let speeds = InterfaceSpeeds::from_sides(l.u, l.c, r.u, r.c);
    if speeds.is_degenerate(eps) {
        return Ok(InterfaceFlux {
            flux: average(l.flux, r.flux),
            speeds,
            branch: FluxBranch::Desingularized,
        });
    }
    let base = central_upwind(*minus, *plus, l.flux, r.flux, speeds);
    if flavor == SchemeFlavor::Cu {
        return Ok(InterfaceFlux {
            flux: base,
            speeds,
            branch: FluxBranch::Regular,
        });
    }
    let q = star_1d_from_fluxes(minus, plus, &l.flux, &r.flux, speeds)
        .map_err(|_| DropReason::StarDensity)
        .and_then(|star| anti_diffusion_1d(minus, plus, &star, speeds, flavor, eps));
    Ok(match q {
        Ok(ad) => InterfaceFlux {
            flux: base + ad.q,
            speeds,
            branch: FluxBranch::Regular,
        },
        Err(reason) => InterfaceFlux {
            flux: base,
            speeds,
            branch: FluxBranch::Dropped(reason),
        },
    })
}

/// Numerical flux `F_{j+1/2,k}` at a 2-D x-interface.
pub fn numerical_flux_2d_x(
    minus: &ConservedState2D,
    plus: &ConservedState2D,
    gas: &GasModel,
    flavor: SchemeFlavor,
    eps: Desingularization,
) -> Result<InterfaceFlux<ConservedState2D>, StateError> {
    let (l, r) = (side_2d(minus, gas)?, side_2d(plus, gas)?);
    let speeds = InterfaceSpeeds::from_sides(l.u, l.c, r.u, r.c);
    if speeds.is_degenerate(eps) {
        return Ok(InterfaceFlux {
            flux: average(l.flux, r.flux),
            speeds,
            branch: FluxBranch::Desingularized,
        });
    }
    let base = central_upwind(*minus, *plus, l.flux, r.flux, speeds);
    if flavor == SchemeFlavor::Cu {
        return Ok(InterfaceFlux {
            flux: base,
            speeds,
            branch: FluxBranch::Regular,
        });
    }
    let q = star_2d_from_fluxes(minus, plus, &l.flux, &r.flux, speeds)
        .map_err(|_| DropReason::StarDensity)
        .and_then(|star| anti_diffusion_2d_x(minus, plus, &star, speeds, flavor, eps));
    Ok(match q {
        Ok(ad) => InterfaceFlux {
            flux: base + ad.q,
            speeds,
            branch: FluxBranch::Regular,
        },
        Err(reason) => InterfaceFlux {
            flux: base,
            speeds,
            branch: FluxBranch::Dropped(reason),
        },
    })
}

/// Numerical flux `G_{j,k+1/2}` at a 2-D y-interface; `b^±` are reported in
/// the returned speeds.
pub fn numerical_flux_2d_y(
    minus: &ConservedState2D,
    plus: &ConservedState2D,
    gas: &GasModel,
    flavor: SchemeFlavor,
    eps: Desingularization,
) -> Result<InterfaceFlux<ConservedState2D>, StateError> {
    let swapped = numerical_flux_2d_x(&minus.swap(), &plus.swap(), gas, flavor, eps)?;
    Ok(InterfaceFlux {
        flux: swapped.flux.swap(),
        ..swapped
    })
}
