//! Library side of the `pipenet` command-line tool: scenario files, output
//! bundles, the subcommands and the verification suites.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use pipenet_core::network::SimError;
use pipenet_core::JunctionError;

/// Process exit codes. Stable across versions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Exit {
    Success = 0,
    /// Unreadable or invalid configuration, I/O failure, bad usage.
    Config = 1,
    /// Newton iteration did not converge or hit a singular Jacobian.
    NoConvergence = 2,
    /// Converged star state reverses a pipe's flow direction.
    FlowReversal = 3,
    /// Net inflow into the junction too small for the entropy mix.
    DegenerateInflow = 4,
    /// Pipe classification violates `N > N_o > 0` (or `N_o = 1` for the
    /// pressure couplings).
    Topology = 5,
    /// Supersonic star state, invalid cell, vacuum or another numerical
    /// failure.
    Numerical = 6,
    /// `verify` ran and at least one check failed.
    VerifyFailed = 7,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn class(self) -> &'static str {
        match self {
            Exit::Success => "ok",
            Exit::Config => "config",
            Exit::NoConvergence => "no-convergence",
            Exit::FlowReversal => "flow-reversal",
            Exit::DegenerateInflow => "degenerate-inflow",
            Exit::Topology => "invalid-topology",
            Exit::Numerical => "numerical",
            Exit::VerifyFailed => "verify-failed",
        }
    }

    pub fn from_junction(e: &JunctionError) -> Self {
        match e {
            JunctionError::NoConvergence { .. } | JunctionError::SingularJacobian { .. } => {
                Exit::NoConvergence
            }
            JunctionError::FlowReversal { .. } => Exit::FlowReversal,
            JunctionError::DegenerateInflow { .. } => Exit::DegenerateInflow,
            JunctionError::InvalidTopology { .. } | JunctionError::PressureModeTopology { .. } => {
                Exit::Topology
            }
            _ => Exit::Numerical,
        }
    }

    pub fn from_sim(e: &SimError) -> Self {
        match e {
            SimError::Junction { source, .. } => Self::from_junction(source),
            SimError::Setup(_) => Exit::Config,
            _ => Exit::Numerical,
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    pub fn new(exit: Exit, message: impl Into<String>) -> Self {
        Self {
            exit,
            message: message.into(),
        }
    }
}

impl From<config::ConfigError> for CliError {
    fn from(e: config::ConfigError) -> Self {
        Self::new(Exit::Config, e.to_string())
    }
}

impl From<JunctionError> for CliError {
    fn from(e: JunctionError) -> Self {
        Self::new(Exit::from_junction(&e), e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        Self::new(Exit::from_sim(&e), e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::new(Exit::Config, e.to_string())
    }
}
