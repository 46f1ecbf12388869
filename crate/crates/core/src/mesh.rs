//! Uniform cell grids, cell-average storage and ghost-cell boundary conditions.
//!
//! Every field carries [`NGHOST`] ghost layers on each side. Interior cell `j`
//! (zero-based) lives at storage index `j + NGHOST`. 2-D storage is row-major
//! with `y` as the slower index: storage `(sj, sk)` maps to `sk * (nx + 4) + sj`.

use crate::error::SolverError;
use crate::euler::{ConservedState1D, ConservedState2D, EulerState};

/// Ghost layers per side: the boundary interface needs a reconstructed value
/// in the first ghost cell, and that slope needs one more neighbour.
pub const NGHOST: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub n: usize,
    pub x_lo: f64,
    pub x_hi: f64,
    pub dx: f64,
}

impl Grid1D {
    pub fn new(n: usize, x_lo: f64, x_hi: f64) -> Result<Self, SolverError> {
        if n < NGHOST {
            return Err(SolverError::Config(format!(
                "need at least {NGHOST} cells, got {n}"
            )));
        }
        if !(x_hi > x_lo) || !x_lo.is_finite() || !x_hi.is_finite() {
            return Err(SolverError::Config(format!("empty domain [{x_lo}, {x_hi}]")));
        }
        Ok(Self {
            n,
            x_lo,
            x_hi,
            dx: (x_hi - x_lo) / n as f64,
        })
    }

    /// Center of interior cell `j`.
    pub fn center(&self, j: usize) -> f64 {
        self.x_lo + (j as f64 + 0.5) * self.dx
    }

    /// Position of interface `i` (between interior cells `i - 1` and `i`).
    pub fn interface(&self, i: usize) -> f64 {
        self.x_lo + i as f64 * self.dx
    }

    pub fn len_with_ghosts(&self) -> usize {
        self.n + 2 * NGHOST
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub x_lo: f64,
    pub x_hi: f64,
    pub y_lo: f64,
    pub y_hi: f64,
    pub dx: f64,
    pub dy: f64,
}

impl Grid2D {
    pub fn new(
        nx: usize,
        ny: usize,
        (x_lo, x_hi): (f64, f64),
        (y_lo, y_hi): (f64, f64),
    ) -> Result<Self, SolverError> {
        let gx = Grid1D::new(nx, x_lo, x_hi)?;
        let gy = Grid1D::new(ny, y_lo, y_hi)?;
        Ok(Self::from_axes(gx, gy))
    }

    pub fn from_axes(gx: Grid1D, gy: Grid1D) -> Self {
        Self {
            nx: gx.n,
            ny: gy.n,
            x_lo: gx.x_lo,
            x_hi: gx.x_hi,
            y_lo: gy.x_lo,
            y_hi: gy.x_hi,
            dx: gx.dx,
            dy: gy.dx,
        }
    }

    pub fn x_axis(&self) -> Grid1D {
        Grid1D {
            n: self.nx,
            x_lo: self.x_lo,
            x_hi: self.x_hi,
            dx: self.dx,
        }
    }

    pub fn y_axis(&self) -> Grid1D {
        Grid1D {
            n: self.ny,
            x_lo: self.y_lo,
            x_hi: self.y_hi,
            dx: self.dy,
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_axes(self.y_axis(), self.x_axis())
    }

    pub fn stride(&self) -> usize {
        self.nx + 2 * NGHOST
    }

    pub fn len_with_ghosts(&self) -> usize {
        self.stride() * (self.ny + 2 * NGHOST)
    }
}

/// Condition imposed on one side of the domain through its ghost cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryCondition {
    /// Zero-order extrapolation: ghosts copy the nearest interior cell.
    Free,
    /// Mirror image with the wall-normal momentum negated.
    SolidWall,
    /// Ghosts copy the wrap-around interior cells.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundarySpec1D {
    pub left: BoundaryCondition,
    pub right: BoundaryCondition,
}

impl BoundarySpec1D {
    pub fn new(left: BoundaryCondition, right: BoundaryCondition) -> Result<Self, SolverError> {
        check_pair(left, right, "x")?;
        Ok(Self { left, right })
    }

    pub fn uniform(bc: BoundaryCondition) -> Self {
        Self { left: bc, right: bc }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundarySpec2D {
    pub x_lo: BoundaryCondition,
    pub x_hi: BoundaryCondition,
    pub y_lo: BoundaryCondition,
    pub y_hi: BoundaryCondition,
}

impl BoundarySpec2D {
    pub fn new(
        x_lo: BoundaryCondition,
        x_hi: BoundaryCondition,
        y_lo: BoundaryCondition,
        y_hi: BoundaryCondition,
    ) -> Result<Self, SolverError> {
        check_pair(x_lo, x_hi, "x")?;
        check_pair(y_lo, y_hi, "y")?;
        Ok(Self {
            x_lo,
            x_hi,
            y_lo,
            y_hi,
        })
    }

    pub fn uniform(bc: BoundaryCondition) -> Self {
        Self {
            x_lo: bc,
            x_hi: bc,
            y_lo: bc,
            y_hi: bc,
        }
    }

    pub fn transpose(&self) -> Self {
        Self {
            x_lo: self.y_lo,
            x_hi: self.y_hi,
            y_lo: self.x_lo,
            y_hi: self.x_hi,
        }
    }
}

fn check_pair(lo: BoundaryCondition, hi: BoundaryCondition, axis: &str) -> Result<(), SolverError> {
    let lo_periodic = lo == BoundaryCondition::Periodic;
    let hi_periodic = hi == BoundaryCondition::Periodic;
    if lo_periodic != hi_periodic {
        return Err(SolverError::Config(format!(
            "periodic {axis} boundary needs both opposing sides periodic"
        )));
    }
    Ok(())
}

/// Ghost values for the two ends of a line of cells.
///
/// `get` addresses storage positions `0..n + 2 * NGHOST` along the line, and
/// `reflect` negates the momentum normal to this line's boundaries. Returns
/// `(storage position, value)` pairs for all `2 * NGHOST` ghosts.
fn line_ghosts<S: EulerState>(
    n: usize,
    lo: BoundaryCondition,
    hi: BoundaryCondition,
    get: impl Fn(usize) -> S,
    reflect: impl Fn(&S) -> S,
) -> [(usize, S); 2 * NGHOST] {
    let first = NGHOST;
    let last = n + NGHOST - 1;
    let mut out = [(0, S::default()); 2 * NGHOST];
    for g in 0..NGHOST {
        // g = 0 is the ghost adjacent to the boundary.
        let lo_value = match lo {
            BoundaryCondition::Free => get(first),
            BoundaryCondition::SolidWall => reflect(&get(first + g)),
            BoundaryCondition::Periodic => get(last - g),
        };
        let hi_value = match hi {
            BoundaryCondition::Free => get(last),
            BoundaryCondition::SolidWall => reflect(&get(last - g)),
            BoundaryCondition::Periodic => get(first + g),
        };
        out[2 * g] = (first - 1 - g, lo_value);
        out[2 * g + 1] = (last + 1 + g, hi_value);
    }
    out
}

/// Cell averages of a 1-D problem, ghosts included.
#[derive(Debug, Clone, PartialEq)]
pub struct Field1D {
    pub grid: Grid1D,
    pub cells: Vec<ConservedState1D>,
}

impl Field1D {
    pub fn zeros(grid: Grid1D) -> Self {
        Self {
            grid,
            cells: vec![ConservedState1D::default(); grid.len_with_ghosts()],
        }
    }

    /// Samples `f` at every interior cell center.
    pub fn from_fn(grid: Grid1D, mut f: impl FnMut(f64) -> ConservedState1D) -> Self {
        let mut field = Self::zeros(grid);
        for j in 0..grid.n {
            field.cells[j + NGHOST] = f(grid.center(j));
        }
        field
    }

    pub fn interior(&self) -> &[ConservedState1D] {
        &self.cells[NGHOST..NGHOST + self.grid.n]
    }

    pub fn interior_mut(&mut self) -> &mut [ConservedState1D] {
        let n = self.grid.n;
        &mut self.cells[NGHOST..NGHOST + n]
    }

    pub fn get(&self, j: usize) -> ConservedState1D {
        self.cells[j + NGHOST]
    }

    pub fn set(&mut self, j: usize, s: ConservedState1D) {
        self.cells[j + NGHOST] = s;
    }

    pub fn apply_bc(&mut self, bc: &BoundarySpec1D) {
        let ghosts = line_ghosts(
            self.grid.n,
            bc.left,
            bc.right,
            |i| self.cells[i],
            EulerState::reflect_x,
        );
        for (i, s) in ghosts {
            self.cells[i] = s;
        }
    }

    /// Coarsens by averaging each run of `factor` cells.
    pub fn restrict(&self, factor: usize) -> Result<Self, SolverError> {
        if factor == 0 || !self.grid.n.is_multiple_of(factor) {
            return Err(SolverError::Config(format!(
                "{} cells are not divisible by restriction factor {factor}",
                self.grid.n
            )));
        }
        let grid = Grid1D::new(self.grid.n / factor, self.grid.x_lo, self.grid.x_hi)?;
        let mut coarse = Self::zeros(grid);
        let weight = 1.0 / factor as f64;
        for (jc, chunk) in self.interior().chunks(factor).enumerate() {
            let sum = chunk
                .iter()
                .fold(ConservedState1D::default(), |acc, &s| acc + s);
            coarse.set(jc, sum * weight);
        }
        Ok(coarse)
    }
}

/// Cell averages of a 2-D problem, ghosts included.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub grid: Grid2D,
    pub cells: Vec<ConservedState2D>,
}

impl Field2D {
    pub fn zeros(grid: Grid2D) -> Self {
        Self {
            grid,
            cells: vec![ConservedState2D::default(); grid.len_with_ghosts()],
        }
    }

    /// Samples `f(x, y)` at every interior cell center.
    pub fn from_fn(grid: Grid2D, mut f: impl FnMut(f64, f64) -> ConservedState2D) -> Self {
        let mut field = Self::zeros(grid);
        let (gx, gy) = (grid.x_axis(), grid.y_axis());
        for k in 0..grid.ny {
            for j in 0..grid.nx {
                field.set(j, k, f(gx.center(j), gy.center(k)));
            }
        }
        field
    }

    /// Storage index of interior cell `(j, k)`.
    #[inline]
    pub fn index(&self, j: usize, k: usize) -> usize {
        (k + NGHOST) * self.grid.stride() + j + NGHOST
    }

    #[inline]
    pub fn get(&self, j: usize, k: usize) -> ConservedState2D {
        self.cells[self.index(j, k)]
    }

    #[inline]
    pub fn set(&mut self, j: usize, k: usize, s: ConservedState2D) {
        let i = self.index(j, k);
        self.cells[i] = s;
    }

    /// Interior cells of row `k`, ordered by `j`.
    pub fn row(&self, k: usize) -> &[ConservedState2D] {
        let start = self.index(0, k);
        &self.cells[start..start + self.grid.nx]
    }

    pub fn interior_iter(&self) -> impl Iterator<Item = ConservedState2D> + '_ {
        (0..self.grid.ny).flat_map(move |k| self.row(k).iter().copied())
    }

    pub fn apply_bc(&mut self, bc: &BoundarySpec2D) {
        let stride = self.grid.stride();
        let rows = self.grid.ny + 2 * NGHOST;
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        // x ghosts on every storage row, then y ghosts on every storage column,
        // which also fills the (unused) corner blocks deterministically.
        for sk in 0..rows {
            let row = &mut self.cells[sk * stride..(sk + 1) * stride];
            let ghosts = line_ghosts(nx, bc.x_lo, bc.x_hi, |i| row[i], EulerState::reflect_x);
            for (i, s) in ghosts {
                row[i] = s;
            }
        }
        for sj in 0..stride {
            let cells = &mut self.cells;
            let ghosts = line_ghosts(
                ny,
                bc.y_lo,
                bc.y_hi,
                |i| cells[i * stride + sj],
                ConservedState2D::reflect_y,
            );
            for (i, s) in ghosts {
                cells[i * stride + sj] = s;
            }
        }
    }

    /// Coarsens by averaging each `factor × factor` block of cells.
    pub fn restrict(&self, factor: usize) -> Result<Self, SolverError> {
        let g = self.grid;
        if factor == 0 || !g.nx.is_multiple_of(factor) || !g.ny.is_multiple_of(factor) {
            return Err(SolverError::Config(format!(
                "{}x{} cells are not divisible by restriction factor {factor}",
                g.nx, g.ny
            )));
        }
        let grid = Grid2D::new(
            g.nx / factor,
            g.ny / factor,
            (g.x_lo, g.x_hi),
            (g.y_lo, g.y_hi),
        )?;
        let mut coarse = Self::zeros(grid);
        let weight = 1.0 / (factor * factor) as f64;
        for kc in 0..grid.ny {
            for jc in 0..grid.nx {
                let mut sum = ConservedState2D::default();
                for k in kc * factor..(kc + 1) * factor {
                    for j in jc * factor..(jc + 1) * factor {
                        sum = sum + self.get(j, k);
                    }
                }
                coarse.set(jc, kc, sum * weight);
            }
        }
        Ok(coarse)
    }

    /// Reflects the field across the diagonal: cell `(j, k)` of the result is
    /// cell `(k, j)` of `self` with its momentum components exchanged.
    pub fn transpose_swap(&self) -> Self {
        let g = self.grid;
        let mut out = Self::zeros(g.transpose());
        let stride = g.stride();
        let rows = g.ny + 2 * NGHOST;
        let out_stride = out.grid.stride();
        for sk in 0..rows {
            for sj in 0..stride {
                out.cells[sj * out_stride + sk] = self.cells[sk * stride + sj].swap();
            }
        }
        out
    }
}
