//! JSON run configuration.
//!
//! ```json
//! {
//!   "problem": "shock_entropy",
//!   "scheme": "new",
//!   "nx": 800,
//!   "snapshot_times": [1.0, 2.5],
//!   "windows": [{ "x": [-5.0, -4.5] }]
//! }
//! ```
//!
//! `problem` is either a built-in name or an inline Riemann problem
//! (`{"riemann_1d": {...}}` or `{"quadrants": {...}}`). Unset parameters
//! take the problem's defaults and CFL 0.475, θ = 1.3, γ = 1.4, ε = 1e−12.

use ldcu::mesh::{BoundaryCondition, BoundarySpec1D, BoundarySpec2D};
use ldcu::problems::{InitialData1D, InitialData2D, Problem1D, Problem2D, ProblemSpec};
use ldcu::{
    Desingularization, GasModel, IntegratorConfig, LimiterConfig, Primitive1D, Primitive2D,
    SchemeConfig, SchemeFlavor,
};
use serde::Deserialize;
use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    problem: RawProblem,
    #[serde(default)]
    scheme: Option<String>,
    nx: Option<usize>,
    ny: Option<usize>,
    t_final: Option<f64>,
    cfl: Option<f64>,
    theta: Option<f64>,
    gamma: Option<f64>,
    epsilon: Option<f64>,
    max_steps: Option<usize>,
    #[serde(default)]
    snapshot_times: Vec<f64>,
    #[serde(default)]
    windows: Vec<WindowSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RawProblem {
    Named(String),
    Custom(CustomProblem),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum CustomProblem {
    /// Two constant `[ρ, u, p]` states split at `x0`.
    #[serde(rename = "riemann_1d")]
    Riemann1d {
        domain: [f64; 2],
        x0: f64,
        left: [f64; 3],
        right: [f64; 3],
        #[serde(default = "default_bc")]
        bc: [BcName; 2],
        n: usize,
        t_final: f64,
    },
    /// Four constant `[ρ, u, v, p]` states split at `center`, ordered
    /// north-east, north-west, south-west, south-east.
    Quadrants {
        x_domain: [f64; 2],
        y_domain: [f64; 2],
        center: [f64; 2],
        states: [[f64; 4]; 4],
        /// `[x_lo, x_hi, y_lo, y_hi]`.
        #[serde(default = "default_bc4")]
        bc: [BcName; 4],
        n: [usize; 2],
        t_final: f64,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "snake_case")]
enum BcName {
    Free,
    Wall,
    Periodic,
}

impl From<BcName> for BoundaryCondition {
    fn from(b: BcName) -> Self {
        match b {
            BcName::Free => BoundaryCondition::Free,
            BcName::Wall => BoundaryCondition::SolidWall,
            BcName::Periodic => BoundaryCondition::Periodic,
        }
    }
}

fn default_bc() -> [BcName; 2] {
    [BcName::Free; 2]
}

fn default_bc4() -> [BcName; 4] {
    [BcName::Free; 4]
}

/// Diagnostics window. `y` defaults to the whole domain in 2-D; `bounds`
/// enables the overshoot metric against `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindowSpec {
    pub x: [f64; 2],
    #[serde(default)]
    pub y: Option<[f64; 2]>,
    #[serde(default)]
    pub bounds: Option<[f64; 2]>,
}

/// A validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub scheme: SchemeConfig,
    pub integrator: IntegratorConfig,
    pub snapshot_times: Vec<f64>,
    pub windows: Vec<WindowSpec>,
}

impl RunConfig {
    pub fn gas(&self) -> GasModel {
        self.scheme.gas
    }

    /// Same configuration with another flux flavor.
    pub fn with_flavor(&self, flavor: SchemeFlavor) -> Self {
        let mut c = self.clone();
        c.scheme.flavor = flavor;
        c
    }

    /// Same configuration with `n` cells per direction.
    pub fn with_resolution(&self, n: usize) -> Self {
        let mut c = self.clone();
        c.problem = match c.problem {
            ProblemSpec::OneD(p) => ProblemSpec::OneD(p.with_cells(n)),
            ProblemSpec::TwoD(p) => ProblemSpec::TwoD(p.with_cells(n, n)),
        };
        c
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// Parses `text`, applies `overrides` (`key=value`, value as JSON or a bare
/// string) and validates the result.
pub fn parse_config(text: &str, overrides: &[String]) -> Result<RunConfig, CliError> {
    let mut doc: Value =
        serde_json::from_str(text).map_err(|e| config_err(format!("invalid JSON: {e}")))?;
    for o in overrides {
        apply_override(&mut doc, o)?;
    }
    let raw: RawConfig = serde_json::from_value(doc).map_err(|e| config_err(e.to_string()))?;
    resolve(raw)
}

fn apply_override(doc: &mut Value, spec: &str) -> Result<(), CliError> {
    let (path, value) = spec
        .split_once('=')
        .ok_or_else(|| config_err(format!("override {spec:?} is not key=value")))?;
    let value = serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.to_string()));
    let mut target = doc;
    let keys: Vec<&str> = path.trim().split('.').collect();
    for (i, key) in keys.iter().enumerate() {
        let obj = target
            .as_object_mut()
            .ok_or_else(|| config_err(format!("override path {path:?} does not name an object field")))?;
        if i + 1 == keys.len() {
            obj.insert(key.to_string(), value);
            return Ok(());
        }
        target = obj
            .get_mut(*key)
            .ok_or_else(|| config_err(format!("override path {path:?}: no field {key:?}")))?;
    }
    Ok(())
}

fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(config_err(format!("{name} must be positive, got {v}")))
    }
}

fn prim1(w: [f64; 3]) -> Primitive1D {
    Primitive1D { rho: w[0], u: w[1], p: w[2] }
}

fn prim2(w: [f64; 4]) -> Primitive2D {
    Primitive2D { rho: w[0], u: w[1], v: w[2], p: w[3] }
}

fn check_primitive(rho: f64, p: f64) -> Result<(), CliError> {
    if rho > 0.0 && p > 0.0 {
        Ok(())
    } else {
        Err(config_err(format!("inadmissible initial state: rho = {rho}, p = {p}")))
    }
}

fn custom_problem(c: CustomProblem) -> Result<ProblemSpec, CliError> {
    let solver = |e: ldcu::SolverError| config_err(e.to_string());
    Ok(match c {
        CustomProblem::Riemann1d { domain, x0, left, right, bc, n, t_final } => {
            for w in [left, right] {
                check_primitive(w[0], w[2])?;
            }
            ProblemSpec::OneD(Problem1D {
                name: "riemann_1d",
                domain: (domain[0], domain[1]),
                n,
                gamma: 1.4,
                initial: InitialData1D::Riemann { x0, left: prim1(left), right: prim1(right) },
                bc: BoundarySpec1D::new(bc[0].into(), bc[1].into()).map_err(solver)?,
                t_final,
            })
        }
        CustomProblem::Quadrants { x_domain, y_domain, center, states, bc, n, t_final } => {
            for w in states {
                check_primitive(w[0], w[3])?;
            }
            ProblemSpec::TwoD(Problem2D {
                name: "quadrants",
                x_domain: (x_domain[0], x_domain[1]),
                y_domain: (y_domain[0], y_domain[1]),
                nx: n[0],
                ny: n[1],
                gamma: 1.4,
                initial: InitialData2D::Quadrants {
                    x0: center[0],
                    y0: center[1],
                    states: states.map(prim2),
                },
                bc: BoundarySpec2D::new(bc[0].into(), bc[1].into(), bc[2].into(), bc[3].into())
                    .map_err(solver)?,
                t_final,
            })
        }
    })
}

fn resolve(raw: RawConfig) -> Result<RunConfig, CliError> {
    let mut problem = match raw.problem {
        RawProblem::Named(name) => {
            ProblemSpec::by_name(&name).map_err(|e| config_err(e.to_string()))?
        }
        RawProblem::Custom(c) => custom_problem(c)?,
    };

    let flavor: SchemeFlavor = raw
        .scheme
        .as_deref()
        .unwrap_or("new")
        .parse()
        .map_err(|e: ldcu::SolverError| config_err(e.to_string()))?;
    let gamma = positive("gamma", raw.gamma.unwrap_or(1.4))?;
    let gas = GasModel::new(gamma).map_err(|e| config_err(e.to_string()))?;
    let limiter = LimiterConfig::new(positive("theta", raw.theta.unwrap_or(1.3))?)
        .map_err(|e| config_err(e.to_string()))?;
    let eps = Desingularization::new(positive("epsilon", raw.epsilon.unwrap_or(1e-12))?)
        .map_err(|e| config_err(e.to_string()))?;

    for (name, v) in [("nx", raw.nx), ("ny", raw.ny)] {
        if v == Some(0) {
            return Err(config_err(format!("{name} must be positive")));
        }
    }
    if let Some(t) = raw.t_final {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(config_err(format!("t_final must be non-negative, got {t}")));
        }
    }
    match &mut problem {
        ProblemSpec::OneD(p) => {
            if raw.ny.is_some() {
                return Err(config_err("ny given for a 1-D problem"));
            }
            p.n = raw.nx.unwrap_or(p.n);
            p.gamma = gamma;
            p.t_final = raw.t_final.unwrap_or(p.t_final);
            p.grid().map_err(|e| config_err(e.to_string()))?;
        }
        ProblemSpec::TwoD(p) => {
            p.nx = raw.nx.unwrap_or(p.nx);
            p.ny = raw.ny.or(raw.nx).unwrap_or(p.ny);
            p.gamma = gamma;
            p.t_final = raw.t_final.unwrap_or(p.t_final);
            p.grid().map_err(|e| config_err(e.to_string()))?;
        }
    }

    let mut integrator = IntegratorConfig::new(raw.cfl.unwrap_or(0.475), problem.t_final())
        .map_err(|e| config_err(e.to_string()))?;
    if let Some(m) = raw.max_steps {
        integrator.max_steps = m;
    }
    for &t in &raw.snapshot_times {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(config_err(format!("invalid snapshot time {t}")));
        }
    }
    for w in &raw.windows {
        let ok = |r: [f64; 2]| r[0] <= r[1];
        if !ok(w.x) || !w.y.is_none_or(ok) || !w.bounds.is_none_or(ok) {
            return Err(config_err(format!("window bounds out of order: {w:?}")));
        }
    }

    Ok(RunConfig {
        problem,
        scheme: SchemeConfig { flavor, gas, limiter, eps },
        integrator,
        snapshot_times: raw.snapshot_times,
        windows: raw.windows,
    })
}
