use std::fmt;

/// Failure of a single-state computation.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum StateError {
    #[error("non-positive density {0}")]
    NonPositiveDensity(f64),
    #[error("non-positive pressure {0}")]
    NonPositivePressure(f64),
    #[error("adiabatic index must exceed 1, got {0}")]
    InvalidGamma(f64),
}

/// Where on the mesh a state was found to be inadmissible.
///
/// Cell indices are zero-based interior indices. Interface `i` separates
/// interior cells `i - 1` and `i`, so interfaces run from `0` (left boundary)
/// to `n` (right boundary).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Cell1D(usize),
    Interface1D(usize),
    Cell2D(usize, usize),
    InterfaceX(usize, usize),
    InterfaceY(usize, usize),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Cell1D(j) => write!(f, "cell {j}"),
            Location::Interface1D(j) => write!(f, "interface {j}"),
            Location::Cell2D(j, k) => write!(f, "cell ({j}, {k})"),
            Location::InterfaceX(j, k) => write!(f, "x-interface ({j}, {k})"),
            Location::InterfaceY(j, k) => write!(f, "y-interface ({j}, {k})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error("inadmissible state at {location}: {source}")]
    Inadmissible {
        location: Location,
        #[source]
        source: StateError,
    },
    #[error("RK stage {stage} failed: {source}")]
    Stage {
        stage: usize,
        #[source]
        source: Box<SolverError>,
    },
    #[error("step {step} at t = {time}: {source}")]
    Step {
        step: usize,
        time: f64,
        #[source]
        source: Box<SolverError>,
    },
    #[error("exceeded the step limit of {0}")]
    MaxSteps(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("snapshot output failed: {0}")]
    Sink(String),
}

impl SolverError {
    pub(crate) fn at(location: Location) -> impl Fn(StateError) -> SolverError + Copy {
        move |source| SolverError::Inadmissible { location, source }
    }

    /// Innermost admissibility location, if the failure was one.
    pub fn location(&self) -> Option<Location> {
        match self {
            SolverError::Inadmissible { location, .. } => Some(*location),
            SolverError::Stage { source, .. } | SolverError::Step { source, .. } => {
                source.location()
            }
            _ => None,
        }
    }

    pub fn is_admissibility_failure(&self) -> bool {
        self.location().is_some()
    }
}
