//! Solution metrics used to compare schemes: conserved totals, total
//! variation, overshoots, L1 errors, diagonal symmetry and convergence rates.
//!
//! Windows are given in physical coordinates and select every interior cell
//! whose center lies inside, bounds included.

use std::fmt::{self, Write as _};
use std::ops::Range;

use crate::error::StateError;
use crate::euler::{ConservedState1D, ConservedState2D, EulerState, GasModel};
use crate::mesh::{Field1D, Field2D, Grid1D};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DiagnosticsError {
    #[error("window [{lo}, {hi}] contains no cell centers")]
    EmptyWindow { lo: f64, hi: f64 },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("symmetry error needs a square grid, got {nx}x{ny}")]
    NotSquare { nx: usize, ny: usize },
    #[error("{0}")]
    State(#[from] StateError),
    #[error("non-finite report entry {key} = {value}")]
    NonFinite { key: String, value: f64 },
    #[error("malformed report line {0:?}")]
    Parse(String),
}

/// Closed interval in physical coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
}

impl Window {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    /// Interior cells of `grid` whose centers lie in the window.
    pub fn cells(&self, grid: &Grid1D) -> Result<Range<usize>, DiagnosticsError> {
        let first = (0..grid.n).find(|&j| grid.center(j) >= self.lo);
        let last = (0..grid.n).rev().find(|&j| grid.center(j) <= self.hi);
        match (first, last) {
            (Some(a), Some(b)) if a <= b => Ok(a..b + 1),
            _ => Err(DiagnosticsError::EmptyWindow {
                lo: self.lo,
                hi: self.hi,
            }),
        }
    }
}

/// Scalar quantity extracted from a cell average.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Density,
    MomentumX,
    MomentumY,
    Energy,
    VelocityX,
    VelocityY,
    Pressure,
}

impl Quantity {
    pub fn of_1d(self, s: &ConservedState1D, gas: &GasModel) -> Result<f64, StateError> {
        Ok(match self {
            Quantity::Density => s.rho,
            Quantity::MomentumX => s.mom,
            Quantity::MomentumY | Quantity::VelocityY => 0.0,
            Quantity::Energy => s.ener,
            Quantity::VelocityX => s.to_primitive(gas)?.u,
            Quantity::Pressure => s.pressure(gas)?,
        })
    }

    pub fn of_2d(self, s: &ConservedState2D, gas: &GasModel) -> Result<f64, StateError> {
        Ok(match self {
            Quantity::Density => s.rho,
            Quantity::MomentumX => s.momx,
            Quantity::MomentumY => s.momy,
            Quantity::Energy => s.ener,
            Quantity::VelocityX => s.to_primitive(gas)?.u,
            Quantity::VelocityY => s.to_primitive(gas)?.v,
            Quantity::Pressure => s.pressure(gas)?,
        })
    }
}

/// Interior values of `q`, one per cell.
pub fn values_1d(field: &Field1D, q: Quantity, gas: &GasModel) -> Result<Vec<f64>, DiagnosticsError> {
    Ok(field
        .interior()
        .iter()
        .map(|s| q.of_1d(s, gas))
        .collect::<Result<_, _>>()?)
}

/// Interior values of `q` in row-major order (`j` fastest).
pub fn values_2d(field: &Field2D, q: Quantity, gas: &GasModel) -> Result<Vec<f64>, DiagnosticsError> {
    Ok(field
        .interior_iter()
        .map(|s| q.of_2d(&s, gas))
        .collect::<Result<_, _>>()?)
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.compensation += (self.sum - t) + v;
        } else {
            self.compensation += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

pub fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = CompensatedSum::default();
    values.into_iter().for_each(|v| acc.add(v));
    acc.value()
}

fn component_totals<S: EulerState>(cells: impl Iterator<Item = S>, volume: f64) -> Vec<f64> {
    let mut sums = vec![CompensatedSum::default(); S::NCOMP];
    for s in cells {
        for (i, acc) in sums.iter_mut().enumerate() {
            acc.add(s.component(i));
        }
    }
    sums.iter().map(|acc| acc.value() * volume).collect()
}

/// `Δx · Σ_j Ū_j` per component: mass, momentum, energy.
pub fn conserved_totals_1d(field: &Field1D) -> Vec<f64> {
    component_totals(field.interior().iter().copied(), field.grid.dx)
}

/// `Δx Δy · Σ Ū_{j,k}` per component.
pub fn conserved_totals_2d(field: &Field2D) -> Vec<f64> {
    component_totals(field.interior_iter(), field.grid.dx * field.grid.dy)
}

/// Largest relative change between two sets of totals; an absolute change is
/// used for components whose initial total is zero.
pub fn max_relative_drift(before: &[f64], after: &[f64]) -> f64 {
    before
        .iter()
        .zip(after)
        .map(|(&a, &b)| {
            let d = (b - a).abs();
            if a == 0.0 {
                d
            } else {
                d / a.abs()
            }
        })
        .fold(0.0, f64::max)
}

/// `Σ |v_{j+1} − v_j|`.
pub fn total_variation(values: &[f64]) -> f64 {
    values.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Total variation of the cells whose centers lie in `window`.
pub fn total_variation_1d(grid: &Grid1D, values: &[f64], window: Window) -> Result<f64, DiagnosticsError> {
    Ok(total_variation(&values[window.cells(grid)?]))
}

/// Sum of row and column total variations inside the window rectangle;
/// `values` is row-major as returned by [`values_2d`].
pub fn total_variation_2d(
    field: &Field2D,
    values: &[f64],
    wx: Window,
    wy: Window,
) -> Result<f64, DiagnosticsError> {
    let g = field.grid;
    let (xs, ys) = (wx.cells(&g.x_axis())?, wy.cells(&g.y_axis())?);
    let mut tv = 0.0;
    for k in ys.clone() {
        tv += total_variation(&values[k * g.nx + xs.start..k * g.nx + xs.end]);
    }
    let mut column = Vec::with_capacity(ys.len());
    for j in xs {
        column.clear();
        column.extend(ys.clone().map(|k| values[k * g.nx + j]));
        tv += total_variation(&column);
    }
    Ok(tv)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overshoot {
    /// `max(0, max v − hi)`.
    pub excess: f64,
    /// `max(0, lo − min v)`.
    pub deficit: f64,
}

impl Overshoot {
    pub fn worst(&self) -> f64 {
        self.excess.max(self.deficit)
    }
}

pub fn overshoot(values: &[f64], lo: f64, hi: f64) -> Overshoot {
    let (min, max) = min_max(values);
    Overshoot {
        excess: (max - hi).max(0.0),
        deficit: (lo - min).max(0.0),
    }
}

pub fn overshoot_1d(
    grid: &Grid1D,
    values: &[f64],
    window: Window,
    lo: f64,
    hi: f64,
) -> Result<Overshoot, DiagnosticsError> {
    Ok(overshoot(&values[window.cells(grid)?], lo, hi))
}

/// `(min, max)`; `(∞, −∞)` for an empty slice.
pub fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

fn l1<S: EulerState>(a: impl Iterator<Item = S>, b: impl Iterator<Item = S>, volume: f64) -> Vec<f64> {
    let mut sums = vec![CompensatedSum::default(); S::NCOMP];
    for (x, y) in a.zip(b) {
        for (i, acc) in sums.iter_mut().enumerate() {
            acc.add((x.component(i) - y.component(i)).abs());
        }
    }
    sums.iter().map(|acc| acc.value() * volume).collect()
}

/// `Δx · Σ |u_j − r_j|` per component. Restrict a finer reference first.
pub fn l1_error_1d(field: &Field1D, reference: &Field1D) -> Result<Vec<f64>, DiagnosticsError> {
    if field.grid != reference.grid {
        return Err(DiagnosticsError::GridMismatch);
    }
    Ok(l1(
        field.interior().iter().copied(),
        reference.interior().iter().copied(),
        field.grid.dx,
    ))
}

/// Area-weighted L1 difference per component.
pub fn l1_error_2d(field: &Field2D, reference: &Field2D) -> Result<Vec<f64>, DiagnosticsError> {
    if field.grid != reference.grid {
        return Err(DiagnosticsError::GridMismatch);
    }
    Ok(l1(
        field.interior_iter(),
        reference.interior_iter(),
        field.grid.dx * field.grid.dy,
    ))
}

/// `max_{j,k} |ρ(j,k) − ρ(k,j)| + |ρu(j,k) − ρv(k,j)|`: zero for a solution
/// symmetric about the diagonal `x = y`.
pub fn symmetry_error(field: &Field2D) -> Result<f64, DiagnosticsError> {
    let g = field.grid;
    if g.nx != g.ny {
        return Err(DiagnosticsError::NotSquare { nx: g.nx, ny: g.ny });
    }
    let mut worst = 0.0f64;
    for k in 0..g.ny {
        for j in 0..g.nx {
            let (a, b) = (field.get(j, k), field.get(k, j));
            worst = worst.max((a.rho - b.rho).abs() + (a.momx - b.momy).abs());
        }
    }
    Ok(worst)
}

/// `log2(e_i / e_{i+1})` for successive refinements by a factor of two.
pub fn convergence_rates(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

/// Ordered `key = value` metrics.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DiagnosticsReport {
    entries: Vec<(String, f64)>,
}

impl DiagnosticsReport {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends an entry; non-finite values are rejected.
    pub fn push(&mut self, key: impl Into<String>, value: f64) -> Result<(), DiagnosticsError> {
        let key = key.into();
        if !value.is_finite() {
            return Err(DiagnosticsError::NonFinite { key, value });
        }
        self.entries.push((key, value));
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        self.entries.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }

    pub fn entries(&self) -> &[(String, f64)] {
        &self.entries
    }

    /// Copies every entry of `other` with `prefix` prepended to the key.
    pub fn extend_prefixed(&mut self, prefix: &str, other: &DiagnosticsReport) {
        for (k, v) in &other.entries {
            self.entries.push((format!("{prefix}{k}"), *v));
        }
    }

    pub fn parse(text: &str) -> Result<Self, DiagnosticsError> {
        let mut report = Self::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once(" = ")
                .ok_or_else(|| DiagnosticsError::Parse(line.to_string()))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| DiagnosticsError::Parse(line.to_string()))?;
            report.push(k.trim(), v)?;
        }
        Ok(report)
    }
}

impl fmt::Display for DiagnosticsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (k, v) in &self.entries {
            writeln!(out, "{k} = {v:.16e}")?;
        }
        f.write_str(&out)
    }
}
