//! Solver options and fit reports shared by the two inner solvers.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::affinity::Limit;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Stop once the largest gap between observed and expected degrees
    /// (or margins) is at most this.
    pub tolerance: f64,
    pub max_iter: usize,
    /// A coordinate that drops below this is flagged as diverged to 0.
    pub divergence_floor: f64,
    /// A coordinate that rises above this is flagged as diverged to `+inf`.
    pub divergence_ceiling: f64,
    /// Starting value of every odds parameter.
    pub initial: f64,
    /// Record the log-likelihood of every iterate.
    pub record_trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tolerance: 1e-10,
            max_iter: 5000,
            divergence_floor: 1e-8,
            divergence_ceiling: 1e8,
            initial: 1.0,
            record_trace: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coord {
    Vertex(usize),
    Row(usize),
    Col(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Divergence {
    pub coord: Coord,
    pub limit: Limit,
    /// True when the degree sequence forced the limit before iterating
    /// (zero or saturated degree after removing earlier forced vertices).
    pub forced: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitStatus {
    Converged,
    Diverged,
    NotConverged,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub iterations: usize,
    /// Max-abs residual of the likelihood equations over the coordinates
    /// that were still free at the end.
    pub final_residual: f64,
    pub diverged: Vec<Divergence>,
    pub loglik: f64,
    pub status: FitStatus,
    /// Whether the free coordinates met the tolerance; can be true on a
    /// diverged fit.
    pub free_converged: bool,
    pub loglik_trace: Vec<f64>,
}

impl FitReport {
    pub fn converged(&self) -> bool {
        self.status == FitStatus::Converged
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("{0}")]
    InvalidInput(String),
    #[error("no finite maximum likelihood estimate: {} coordinate(s) diverged", report.diverged.len())]
    Diverged { report: Box<FitReport> },
    #[error("tolerance not met within {} iterations (residual {})", report.iterations, report.final_residual)]
    NotConverged { report: Box<FitReport> },
}

impl FitError {
    pub fn report(&self) -> Option<&FitReport> {
        match self {
            FitError::InvalidInput(_) => None,
            FitError::Diverged { report } | FitError::NotConverged { report } => Some(report),
        }
    }
}

pub(crate) fn status_to_result<T>(value: T, report: &FitReport) -> Result<T, FitError> {
    match report.status {
        FitStatus::Converged => Ok(value),
        FitStatus::Diverged => Err(FitError::Diverged {
            report: Box::new(report.clone()),
        }),
        FitStatus::NotConverged => Err(FitError::NotConverged {
            report: Box::new(report.clone()),
        }),
    }
}
