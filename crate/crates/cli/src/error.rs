use std::fmt;

use mrps::assignment::AssignError;
use mrps::bench::BenchError;
use mrps::gridworld::MapError;
use mrps::roadnet::RoadError;
use mrps::simulator::SimError;

/// Failure with its exit-code category.
#[derive(Debug)]
pub enum CliError {
    /// Bad input files or flag values.
    Validation(String),
    /// The work itself failed: deadlock, I/O while writing results.
    Runtime(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Runtime(_) => 3,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<MapError> for CliError {
    fn from(e: MapError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<RoadError> for CliError {
    fn from(e: RoadError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<AssignError> for CliError {
    fn from(e: AssignError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidConfig(_) => CliError::Validation(e.to_string()),
            SimError::Plan(mrps::planner::PlanError::BadFocalBound(_)) => CliError::Validation(e.to_string()),
            SimError::Deadlock(_) | SimError::Plan(_) => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<BenchError> for CliError {
    fn from(e: BenchError) -> Self {
        match e {
            BenchError::InvalidSpec(_) | BenchError::Json(_) | BenchError::Map(_) | BenchError::Road(_) | BenchError::Assign(_) => {
                CliError::Validation(e.to_string())
            }
            BenchError::Sim(s) => s.into(),
            BenchError::Io { .. } | BenchError::Csv(_) => CliError::Runtime(e.to_string()),
        }
    }
}
