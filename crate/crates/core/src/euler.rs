//! Ideal-gas Euler state algebra.
//!
//! Conserved states are stored as plain `f64` component vectors. All
//! conversions are exact transcriptions of the textbook formulas; nothing in
//! here applies a tolerance.

use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use crate::error::StateError;

/// Ideal-gas equation of state `p = (γ - 1)(E - ½ρ|u|²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasModel {
    gamma: f64,
}

impl GasModel {
    pub fn new(gamma: f64) -> Result<Self, StateError> {
        if gamma.is_finite() && gamma > 1.0 {
            Ok(Self { gamma })
        } else {
            Err(StateError::InvalidGamma(gamma))
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `c = sqrt(γ p / ρ)`; both `ρ` and `p` must be strictly positive.
    pub fn sound_speed(&self, rho: f64, p: f64) -> Result<f64, StateError> {
        if !(rho > 0.0) {
            return Err(StateError::NonPositiveDensity(rho));
        }
        if !(p > 0.0) {
            return Err(StateError::NonPositivePressure(p));
        }
        Ok((self.gamma * p / rho).sqrt())
    }
}

impl Default for GasModel {
    fn default() -> Self {
        Self { gamma: 1.4 }
    }
}

/// Behaviour shared by the 1-D and 2-D conserved-variable vectors.
///
/// Mesh, reconstruction, integrator and diagnostics code is written once
/// against this trait.
pub trait EulerState:
    Copy
    + Default
    + Debug
    + PartialEq
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<f64, Output = Self>
{
    /// Number of conserved components.
    const NCOMP: usize;
    /// Short component names, in storage order.
    const NAMES: &'static [&'static str];

    fn from_fn(f: impl FnMut(usize) -> f64) -> Self;
    fn component(&self, i: usize) -> f64;

    fn rho(&self) -> f64;

    /// Pressure from the equation of state; fails on non-positive density.
    fn pressure(&self, gas: &GasModel) -> Result<f64, StateError>;

    /// Returns `(ρ, p)` if the state is admissible (`ρ > 0`, `p > 0`).
    fn check_admissible(&self, gas: &GasModel) -> Result<(f64, f64), StateError> {
        let p = self.pressure(gas)?;
        if !(p > 0.0) {
            return Err(StateError::NonPositivePressure(p));
        }
        Ok((self.rho(), p))
    }

    /// Mirror across a wall whose normal is the x axis.
    fn reflect_x(&self) -> Self;

    #[inline]
    fn zip_with(self, other: Self, mut f: impl FnMut(f64, f64) -> f64) -> Self {
        Self::from_fn(|i| f(self.component(i), other.component(i)))
    }

    #[inline]
    fn map(self, mut f: impl FnMut(f64) -> f64) -> Self {
        Self::from_fn(|i| f(self.component(i)))
    }
}

/// Conserved variables `(ρ, ρu, E)` of one 1-D cell.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ConservedState1D {
    pub rho: f64,
    pub mom: f64,
    pub ener: f64,
}

/// Conserved variables `(ρ, ρu, ρv, E)` of one 2-D cell.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ConservedState2D {
    pub rho: f64,
    pub momx: f64,
    pub momy: f64,
    pub ener: f64,
}

/// Primitive variables `(ρ, u, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive1D {
    pub rho: f64,
    pub u: f64,
    pub p: f64,
}

/// Primitive variables `(ρ, u, v, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Primitive2D {
    pub rho: f64,
    pub u: f64,
    pub v: f64,
    pub p: f64,
}

impl ConservedState1D {
    pub const fn new(rho: f64, mom: f64, ener: f64) -> Self {
        Self { rho, mom, ener }
    }

    pub fn from_primitive(w: Primitive1D, gas: &GasModel) -> Self {
        let mom = w.rho * w.u;
        let ener = w.p / (gas.gamma - 1.0) + 0.5 * w.rho * w.u * w.u;
        Self::new(w.rho, mom, ener)
    }

    pub fn to_primitive(&self, gas: &GasModel) -> Result<Primitive1D, StateError> {
        let p = self.pressure(gas)?;
        Ok(Primitive1D {
            rho: self.rho,
            u: self.mom / self.rho,
            p,
        })
    }

    /// Physical flux `F(U) = (ρu, ρu² + p, u(E + p))`.
    pub fn flux(&self, gas: &GasModel) -> Result<Self, StateError> {
        let p = self.pressure(gas)?;
        Ok(self.flux_with(self.mom / self.rho, p))
    }

    /// Flux evaluation when `u` and `p` are already known.
    pub(crate) fn flux_with(&self, u: f64, p: f64) -> Self {
        Self::new(self.mom, self.mom * u + p, u * (self.ener + p))
    }

    /// The same state viewed as a 2-D state with zero transverse momentum.
    pub fn embed(&self) -> ConservedState2D {
        ConservedState2D::new(self.rho, self.mom, 0.0, self.ener)
    }
}

impl ConservedState2D {
    pub const fn new(rho: f64, momx: f64, momy: f64, ener: f64) -> Self {
        Self {
            rho,
            momx,
            momy,
            ener,
        }
    }

    pub fn from_primitive(w: Primitive2D, gas: &GasModel) -> Self {
        let momx = w.rho * w.u;
        let momy = w.rho * w.v;
        let ener = w.p / (gas.gamma - 1.0) + 0.5 * w.rho * (w.u * w.u + w.v * w.v);
        Self::new(w.rho, momx, momy, ener)
    }

    pub fn to_primitive(&self, gas: &GasModel) -> Result<Primitive2D, StateError> {
        let p = self.pressure(gas)?;
        Ok(Primitive2D {
            rho: self.rho,
            u: self.momx / self.rho,
            v: self.momy / self.rho,
            p,
        })
    }

    /// x-directional flux `F(U) = (ρu, ρu² + p, ρuv, u(E + p))`.
    pub fn flux_x(&self, gas: &GasModel) -> Result<Self, StateError> {
        let p = self.pressure(gas)?;
        Ok(self.flux_x_with(self.momx / self.rho, p))
    }

    /// y-directional flux `G(U) = (ρv, ρuv, ρv² + p, v(E + p))`.
    ///
    /// Evaluated as `swap(F(swap(U)))` so the x/y symmetry is exact.
    pub fn flux_y(&self, gas: &GasModel) -> Result<Self, StateError> {
        Ok(self.swap().flux_x(gas)?.swap())
    }

    pub(crate) fn flux_x_with(&self, u: f64, p: f64) -> Self {
        Self::new(self.momx, self.momx * u + p, self.momy * u, u * (self.ener + p))
    }

    /// Exchanges the roles of x and y (swaps the two momentum components).
    pub fn swap(&self) -> Self {
        Self::new(self.rho, self.momy, self.momx, self.ener)
    }

    /// Mirror across a wall whose normal is the y axis.
    pub fn reflect_y(&self) -> Self {
        Self::new(self.rho, self.momx, -self.momy, self.ener)
    }

    /// Drops the y momentum; the inverse of [`ConservedState1D::embed`] on
    /// states with `ρv = 0`.
    pub fn project_x(&self) -> ConservedState1D {
        ConservedState1D::new(self.rho, self.momx, self.ener)
    }
}

impl Primitive2D {
    pub fn swap(&self) -> Self {
        Self {
            rho: self.rho,
            u: self.v,
            v: self.u,
            p: self.p,
        }
    }
}

impl EulerState for ConservedState1D {
    const NCOMP: usize = 3;
    const NAMES: &'static [&'static str] = &["rho", "mom", "E"];

    #[inline(always)]
    fn from_fn(mut f: impl FnMut(usize) -> f64) -> Self {
        Self::new(f(0), f(1), f(2))
    }

    #[inline(always)]
    fn component(&self, i: usize) -> f64 {
        match i {
            0 => self.rho,
            1 => self.mom,
            2 => self.ener,
            _ => panic!("component index {i} out of range for a 1-D state"),
        }
    }

    fn rho(&self) -> f64 {
        self.rho
    }

    fn pressure(&self, gas: &GasModel) -> Result<f64, StateError> {
        if !(self.rho > 0.0) {
            return Err(StateError::NonPositiveDensity(self.rho));
        }
        let kinetic = self.mom * self.mom / (2.0 * self.rho);
        Ok((gas.gamma - 1.0) * (self.ener - kinetic))
    }

    fn reflect_x(&self) -> Self {
        Self::new(self.rho, -self.mom, self.ener)
    }
}

impl EulerState for ConservedState2D {
    const NCOMP: usize = 4;
    const NAMES: &'static [&'static str] = &["rho", "momx", "momy", "E"];

    #[inline(always)]
    fn from_fn(mut f: impl FnMut(usize) -> f64) -> Self {
        Self::new(f(0), f(1), f(2), f(3))
    }

    #[inline(always)]
    fn component(&self, i: usize) -> f64 {
        match i {
            0 => self.rho,
            1 => self.momx,
            2 => self.momy,
            3 => self.ener,
            _ => panic!("component index {i} out of range for a 2-D state"),
        }
    }

    fn rho(&self) -> f64 {
        self.rho
    }

    fn pressure(&self, gas: &GasModel) -> Result<f64, StateError> {
        if !(self.rho > 0.0) {
            return Err(StateError::NonPositiveDensity(self.rho));
        }
        let kinetic = (self.momx * self.momx + self.momy * self.momy) / (2.0 * self.rho);
        Ok((gas.gamma - 1.0) * (self.ener - kinetic))
    }

    fn reflect_x(&self) -> Self {
        Self::new(self.rho, -self.momx, self.momy, self.ener)
    }
}

macro_rules! impl_linear_ops {
    ($ty:ident { $($field:ident),+ }) => {
        impl Add for $ty {
            type Output = Self;
            #[inline]
            fn add(self, o: Self) -> Self {
                Self { $($field: self.$field + o.$field),+ }
            }
        }
        impl Sub for $ty {
            type Output = Self;
            #[inline]
            fn sub(self, o: Self) -> Self {
                Self { $($field: self.$field - o.$field),+ }
            }
        }
        impl Mul<f64> for $ty {
            type Output = Self;
            #[inline]
            fn mul(self, a: f64) -> Self {
                Self { $($field: self.$field * a),+ }
            }
        }
        impl Mul<$ty> for f64 {
            type Output = $ty;
            #[inline]
            fn mul(self, u: $ty) -> $ty {
                u * self
            }
        }
    };
}

impl_linear_ops!(ConservedState1D { rho, mom, ener });
impl_linear_ops!(ConservedState2D { rho, momx, momy, ener });
