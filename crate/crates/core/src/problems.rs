//! Benchmark problem definitions.
//!
//! A problem is plain data: domain, default resolution, initial data, boundary
//! conditions and end time. Initial cell averages are obtained by sampling the
//! initial data at cell centers.

use std::f64::consts::PI;

use crate::error::SolverError;
use crate::euler::{ConservedState1D, ConservedState2D, GasModel, Primitive1D, Primitive2D};
use crate::mesh::{
    BoundaryCondition, BoundarySpec1D, BoundarySpec2D, Field1D, Field2D, Grid1D, Grid2D,
};

/// Names accepted by [`ProblemSpec::by_name`].
pub const PROBLEM_NAMES: [&str; 6] = [
    "shock_entropy",
    "stationary_contact",
    "riemann2d_config3",
    "explosion",
    "implosion",
    "smooth_wave",
];

/// 1-D initial data `x ↦ (ρ, u, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData1D {
    /// Constant post-shock state left of `x0`, sinusoidal density right of it.
    ShockEntropy {
        x0: f64,
        left: Primitive1D,
        amplitude: f64,
        wavenumber: f64,
    },
    /// `ρ = 1 + amplitude · sin(π x)` advected with `u = p = 1`.
    SmoothWave { amplitude: f64 },
    /// Two constant states separated at `x0`; `x = x0` takes the right state.
    Riemann {
        x0: f64,
        left: Primitive1D,
        right: Primitive1D,
    },
}

impl InitialData1D {
    pub fn eval(&self, x: f64) -> Primitive1D {
        match *self {
            InitialData1D::ShockEntropy {
                x0,
                left,
                amplitude,
                wavenumber,
            } => {
                if x < x0 {
                    left
                } else {
                    Primitive1D {
                        rho: 1.0 + amplitude * (wavenumber * x).sin(),
                        u: 0.0,
                        p: 1.0,
                    }
                }
            }
            InitialData1D::SmoothWave { amplitude } => Primitive1D {
                rho: 1.0 + amplitude * (PI * x).sin(),
                u: 1.0,
                p: 1.0,
            },
            InitialData1D::Riemann { x0, left, right } => {
                if x < x0 {
                    left
                } else {
                    right
                }
            }
        }
    }

    /// Exact solution at time `t`, when one is known in closed form.
    pub fn exact(&self, x: f64, t: f64) -> Option<Primitive1D> {
        match *self {
            InitialData1D::SmoothWave { .. } => Some(self.eval(x - t)),
            _ => None,
        }
    }
}

/// 2-D initial data `(x, y) ↦ (ρ, u, v, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialData2D {
    /// Four constant states split at `(x0, y0)`, ordered
    /// `[x > x0 ∧ y > y0, x < x0 ∧ y > y0, x < x0 ∧ y < y0, x > x0 ∧ y < y0]`.
    /// Points on a dividing line belong to the lower-index side (`x ≤ x0` is west,
    /// `y ≤ y0` is south).
    Quadrants {
        x0: f64,
        y0: f64,
        states: [Primitive2D; 4],
    },
    /// `inside` where `(x − cx)² + (y − cy)² < r²`.
    Disk {
        center: (f64, f64),
        radius: f64,
        inside: Primitive2D,
        outside: Primitive2D,
    },
    /// `inside` where `|x − cx| + |y − cy| < half_diagonal`.
    Diamond {
        center: (f64, f64),
        half_diagonal: f64,
        inside: Primitive2D,
        outside: Primitive2D,
    },
}

impl InitialData2D {
    pub fn eval(&self, x: f64, y: f64) -> Primitive2D {
        match *self {
            InitialData2D::Quadrants { x0, y0, states } => {
                let i = match (x > x0, y > y0) {
                    (true, true) => 0,
                    (false, true) => 1,
                    (false, false) => 2,
                    (true, false) => 3,
                };
                states[i]
            }
            InitialData2D::Disk {
                center: (cx, cy),
                radius,
                inside,
                outside,
            } => {
                let (dx, dy) = (x - cx, y - cy);
                if dx * dx + dy * dy < radius * radius {
                    inside
                } else {
                    outside
                }
            }
            InitialData2D::Diamond {
                center: (cx, cy),
                half_diagonal,
                inside,
                outside,
            } => {
                if (x - cx).abs() + (y - cy).abs() < half_diagonal {
                    inside
                } else {
                    outside
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem1D {
    pub name: &'static str,
    pub domain: (f64, f64),
    pub n: usize,
    pub gamma: f64,
    pub initial: InitialData1D,
    pub bc: BoundarySpec1D,
    pub t_final: f64,
}

impl Problem1D {
    pub fn gas(&self) -> Result<GasModel, SolverError> {
        GasModel::new(self.gamma).map_err(|e| SolverError::Config(e.to_string()))
    }

    pub fn grid(&self) -> Result<Grid1D, SolverError> {
        Grid1D::new(self.n, self.domain.0, self.domain.1)
    }

    pub fn dx(&self) -> f64 {
        (self.domain.1 - self.domain.0) / self.n as f64
    }

    /// Cell averages sampled at cell centers.
    pub fn initial_field(&self) -> Result<Field1D, SolverError> {
        let gas = self.gas()?;
        Ok(Field1D::from_fn(self.grid()?, |x| {
            ConservedState1D::from_primitive(self.initial.eval(x), &gas)
        }))
    }

    /// Exact cell-center values at time `t`, if the problem has a closed-form solution.
    pub fn exact_field(&self, t: f64) -> Result<Option<Field1D>, SolverError> {
        let gas = self.gas()?;
        let grid = self.grid()?;
        if self.initial.exact(grid.center(0), t).is_none() {
            return Ok(None);
        }
        Ok(Some(Field1D::from_fn(grid, |x| {
            let w = self.initial.exact(x, t).expect("exact solution exists");
            ConservedState1D::from_primitive(w, &gas)
        })))
    }

    /// Same problem with `n` cells.
    pub fn with_cells(mut self, n: usize) -> Self {
        self.n = n;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Problem2D {
    pub name: &'static str,
    pub x_domain: (f64, f64),
    pub y_domain: (f64, f64),
    pub nx: usize,
    pub ny: usize,
    pub gamma: f64,
    pub initial: InitialData2D,
    pub bc: BoundarySpec2D,
    pub t_final: f64,
}

impl Problem2D {
    pub fn gas(&self) -> Result<GasModel, SolverError> {
        GasModel::new(self.gamma).map_err(|e| SolverError::Config(e.to_string()))
    }

    pub fn grid(&self) -> Result<Grid2D, SolverError> {
        Grid2D::new(self.nx, self.ny, self.x_domain, self.y_domain)
    }

    /// Cell averages sampled at cell centers.
    pub fn initial_field(&self) -> Result<Field2D, SolverError> {
        let gas = self.gas()?;
        Ok(Field2D::from_fn(self.grid()?, |x, y| {
            ConservedState2D::from_primitive(self.initial.eval(x, y), &gas)
        }))
    }

    pub fn with_cells(mut self, nx: usize, ny: usize) -> Self {
        self.nx = nx;
        self.ny = ny;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProblemSpec {
    OneD(Problem1D),
    TwoD(Problem2D),
}

impl ProblemSpec {
    pub fn by_name(name: &str) -> Result<Self, SolverError> {
        Ok(match name {
            "shock_entropy" => ProblemSpec::OneD(shock_entropy()),
            "stationary_contact" => ProblemSpec::OneD(stationary_contact()),
            "smooth_wave" => ProblemSpec::OneD(smooth_wave()),
            "riemann2d_config3" => ProblemSpec::TwoD(riemann2d_config3()),
            "explosion" => ProblemSpec::TwoD(explosion()),
            "implosion" => ProblemSpec::TwoD(implosion()),
            other => {
                return Err(SolverError::Config(format!(
                    "unknown problem {other:?}; expected one of {}",
                    PROBLEM_NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProblemSpec::OneD(p) => p.name,
            ProblemSpec::TwoD(p) => p.name,
        }
    }

    pub fn t_final(&self) -> f64 {
        match self {
            ProblemSpec::OneD(p) => p.t_final,
            ProblemSpec::TwoD(p) => p.t_final,
        }
    }
}

/// Cell count giving spacing `dx` on `[lo, hi]`.
pub fn cells_for_spacing(lo: f64, hi: f64, dx: f64) -> usize {
    ((hi - lo) / dx).round() as usize
}

fn p1(rho: f64, u: f64, p: f64) -> Primitive1D {
    Primitive1D { rho, u, p }
}

fn p2(rho: f64, u: f64, v: f64, p: f64) -> Primitive2D {
    Primitive2D { rho, u, v, p }
}

/// Mach-3 shock running into a sinusoidal entropy wave on `[−5, 5]`.
pub fn shock_entropy() -> Problem1D {
    Problem1D {
        name: "shock_entropy",
        domain: (-5.0, 5.0),
        n: 800,
        gamma: 1.4,
        initial: InitialData1D::ShockEntropy {
            x0: -4.5,
            left: p1(1.51695, 0.523346, 1.805),
            amplitude: 0.1,
            wavenumber: 20.0,
        },
        bc: BoundarySpec1D::uniform(BoundaryCondition::Free),
        t_final: 5.0,
    }
}

/// Spacing of the reference solution for [`shock_entropy`].
pub const SHOCK_ENTROPY_REFERENCE_DX: f64 = 1.0 / 800.0;

/// Strong pressure jump on `[0, 1]` whose contact stays at rest near `x = 0.8`.
pub fn stationary_contact() -> Problem1D {
    Problem1D {
        name: "stationary_contact",
        domain: (0.0, 1.0),
        n: 200,
        gamma: 1.4,
        initial: InitialData1D::Riemann {
            x0: 0.8,
            left: p1(1.0, -19.59745, 1000.0),
            right: p1(1.0, -19.59745, 0.01),
        },
        bc: BoundarySpec1D::uniform(BoundaryCondition::Free),
        t_final: 0.012,
    }
}

/// Fine spacing used for [`stationary_contact`] comparisons.
pub const STATIONARY_CONTACT_FINE_DX: f64 = 1.0 / 8000.0;

/// Density wave advected across a periodic box; exact solution known.
pub fn smooth_wave() -> Problem1D {
    Problem1D {
        name: "smooth_wave",
        domain: (0.0, 2.0),
        n: 100,
        gamma: 1.4,
        initial: InitialData1D::SmoothWave { amplitude: 0.2 },
        bc: BoundarySpec1D::uniform(BoundaryCondition::Periodic),
        t_final: 0.5,
    }
}

/// Sod shock tube on `[0, 1]`.
pub fn sod() -> Problem1D {
    Problem1D {
        name: "sod",
        domain: (0.0, 1.0),
        n: 100,
        gamma: 1.4,
        initial: InitialData1D::Riemann {
            x0: 0.5,
            left: p1(1.0, 0.0, 1.0),
            right: p1(0.125, 0.0, 0.1),
        },
        bc: BoundarySpec1D::uniform(BoundaryCondition::Free),
        t_final: 0.2,
    }
}

/// Four-shock 2-D Riemann problem on `[0, 1.2]²`.
pub fn riemann2d_config3() -> Problem2D {
    Problem2D {
        name: "riemann2d_config3",
        x_domain: (0.0, 1.2),
        y_domain: (0.0, 1.2),
        nx: 1200,
        ny: 1200,
        gamma: 1.4,
        initial: InitialData2D::Quadrants {
            x0: 1.0,
            y0: 1.0,
            states: [
                p2(1.5, 0.0, 0.0, 1.5),
                p2(0.5323, 1.206, 0.0, 0.3),
                p2(0.138, 1.206, 1.206, 0.029),
                p2(0.5323, 0.0, 1.206, 0.3),
            ],
        },
        bc: BoundarySpec2D::uniform(BoundaryCondition::Free),
        t_final: 1.0,
    }
}

/// Circular explosion in the quarter domain `[0, 1.5]²`.
pub fn explosion() -> Problem2D {
    Problem2D {
        name: "explosion",
        x_domain: (0.0, 1.5),
        y_domain: (0.0, 1.5),
        nx: 400,
        ny: 400,
        gamma: 1.4,
        initial: InitialData2D::Disk {
            center: (0.0, 0.0),
            radius: 0.4,
            inside: p2(1.0, 0.0, 0.0, 1.0),
            outside: p2(0.125, 0.0, 0.0, 0.1),
        },
        bc: BoundarySpec2D {
            x_lo: BoundaryCondition::SolidWall,
            x_hi: BoundaryCondition::Free,
            y_lo: BoundaryCondition::SolidWall,
            y_hi: BoundaryCondition::Free,
        },
        t_final: 3.2,
    }
}

/// Diamond-shaped low-pressure region in a closed box `[0, 0.3]²`.
pub fn implosion() -> Problem2D {
    Problem2D {
        name: "implosion",
        x_domain: (0.0, 0.3),
        y_domain: (0.0, 0.3),
        nx: 600,
        ny: 600,
        gamma: 1.4,
        initial: InitialData2D::Diamond {
            center: (0.0, 0.0),
            half_diagonal: 0.15,
            inside: p2(0.125, 0.0, 0.0, 0.14),
            outside: p2(1.0, 0.0, 0.0, 1.0),
        },
        bc: BoundarySpec2D::uniform(BoundaryCondition::SolidWall),
        t_final: 2.5,
    }
}
