//! Piecewise-linear reconstruction of the conserved variables with the
//! generalized minmod limiter.
//!
//! Slopes are limited componentwise on `(ρ, ρu[, ρv], E)`. In 2-D the x- and
//! y-slopes are limited independently, so the 2-D code simply runs the 1-D
//! line kernel along rows and columns.

use crate::error::{Location, SolverError};
use crate::euler::{ConservedState1D, EulerState, GasModel};
use crate::mesh::{Field1D, NGHOST};

/// Generalized minmod parameter `θ ∈ [1, 2]`. Larger values are less
/// dissipative; `θ = 1` is the classical minmod limiter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimiterConfig {
    theta: f64,
}

impl LimiterConfig {
    pub fn new(theta: f64) -> Result<Self, SolverError> {
        if (1.0..=2.0).contains(&theta) {
            Ok(Self { theta })
        } else {
            Err(SolverError::Config(format!(
                "minmod parameter must lie in [1, 2], got {theta}"
            )))
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }
}

impl Default for LimiterConfig {
    fn default() -> Self {
        Self { theta: 1.3 }
    }
}

/// `½(sgn a + sgn b) min(|a|, |b|)`.
#[inline]
pub fn minmod2(a: f64, b: f64) -> f64 {
    if a > 0.0 && b > 0.0 {
        a.min(b)
    } else if a < 0.0 && b < 0.0 {
        a.max(b)
    } else {
        0.0
    }
}

/// Smallest-magnitude argument if all three share a strict sign, else 0.
#[inline]
pub fn minmod3(a: f64, b: f64, c: f64) -> f64 {
    if a > 0.0 && b > 0.0 && c > 0.0 {
        a.min(b).min(c)
    } else if a < 0.0 && b < 0.0 && c < 0.0 {
        a.max(b).max(c)
    } else {
        0.0
    }
}

/// Limited slope of the middle cell of three consecutive cell averages.
#[inline]
pub fn cell_slope<S: EulerState>(left: S, center: S, right: S, theta: f64, dx: f64) -> S {
    S::from_fn(|i| {
        let (l, c, r) = (left.component(i), center.component(i), right.component(i));
        minmod3(
            theta * (c - l) / dx,
            (r - l) / (2.0 * dx),
            theta * (r - c) / dx,
        )
    })
}

/// Limited change across the middle cell, `Δx` times [`cell_slope`]. Working
/// with undivided differences keeps `Δx` out of the reconstruction entirely.
#[inline]
pub fn cell_increment<S: EulerState>(left: S, center: S, right: S, theta: f64) -> S {
    S::from_fn(|i| {
        let (l, c, r) = (left.component(i), center.component(i), right.component(i));
        minmod3(theta * (c - l), 0.5 * (r - l), theta * (r - c))
    })
}

/// One-sided point values `(U⁻, U⁺)` at interfaces of a line of cells.
///
/// `line` holds `n + 2 * NGHOST` cell averages (ghosts filled). On return
/// `out[i]` is the pair at interface `i`, for `i = 0..=n`: `U⁻` is extrapolated
/// from the cell on the left, `U⁺` from the cell on the right.
pub fn reconstruct_line<S: EulerState>(line: &[S], theta: f64, out: &mut Vec<(S, S)>) {
    let len = line.len();
    debug_assert!(len > 2 * NGHOST);
    out.clear();
    let increment_at = |s: usize| cell_increment(line[s - 1], line[s], line[s + 1], theta);
    let mut left = increment_at(NGHOST - 1);
    for s in NGHOST - 1..len - NGHOST {
        let right = increment_at(s + 1);
        out.push(interface_pair(line[s], left, line[s + 1], right));
        left = right;
    }
}

/// `(U⁻, U⁺)` at the interface between cells with averages `left`, `right`
/// and limited increments `d_left`, `d_right`.
#[inline]
pub fn interface_pair<S: EulerState>(left: S, d_left: S, right: S, d_right: S) -> (S, S) {
    (left + d_left * 0.5, right - d_right * 0.5)
}

/// Limited slopes for every cell of a 1-D field that has both neighbours,
/// indexed by storage position. The outermost ghost cells get a zero slope.
pub fn slopes_1d(field: &Field1D, cfg: &LimiterConfig) -> Vec<ConservedState1D> {
    let cells = &field.cells;
    let mut slopes = vec![ConservedState1D::default(); cells.len()];
    for s in 1..cells.len() - 1 {
        slopes[s] = cell_slope(cells[s - 1], cells[s], cells[s + 1], cfg.theta, field.grid.dx);
    }
    slopes
}

/// Interface point values `(U⁻, U⁺)` for interfaces `0..=n` from precomputed
/// slopes; both values are checked for admissibility.
pub fn interface_values_1d(
    field: &Field1D,
    slopes: &[ConservedState1D],
    gas: &GasModel,
) -> Result<Vec<(ConservedState1D, ConservedState1D)>, SolverError> {
    let half = 0.5 * field.grid.dx;
    (0..=field.grid.n)
        .map(|i| {
            let left = NGHOST + i - 1;
            let minus = field.cells[left] + slopes[left] * half;
            let plus = field.cells[left + 1] - slopes[left + 1] * half;
            let at = SolverError::at(Location::Interface1D(i));
            minus.check_admissible(gas).map_err(&at)?;
            plus.check_admissible(gas).map_err(at)?;
            Ok((minus, plus))
        })
        .collect()
}
