//! Adaptive coverage control driven by observed events.
//!
//! A single event moves only the agent that serviced it, by one saturated,
//! projected step along `f'(d)·(z − p)/d`. In expectation this is a gradient
//! step on the coverage objective `E[min_i f(‖p_i − Z‖)]`.

mod hetero;
mod oracle;
mod state;
mod tracking;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use hetero::{HeteroOutcome, HeteroState, Team};
pub use oracle::{deterministic_gradient, objective_estimate, Estimate, GradientEstimate};
pub use state::{CoverageState, UpdateRecord};
pub use tracking::{run_tracking, TrackingRow};

/// Diminishing or constant stepsizes indexed by the event counter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StepsizeSchedule {
    /// `c / (1 + d·k)`
    Harmonic { c: f64, d: f64 },
    Constant { gamma: f64 },
}

impl StepsizeSchedule {
    pub fn harmonic(c: f64, d: f64) -> Self {
        StepsizeSchedule::Harmonic { c, d }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            StepsizeSchedule::Harmonic { c, d } => {
                if !(c.is_finite() && c > 0.0) {
                    return Err(Error::param("stepsize.c", "must be positive"));
                }
                if !(d.is_finite() && d >= 0.0) {
                    return Err(Error::param("stepsize.d", "must be nonnegative"));
                }
            }
            StepsizeSchedule::Constant { gamma } => {
                if !(gamma.is_finite() && gamma > 0.0) {
                    return Err(Error::param("stepsize.gamma", "must be positive"));
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn at(&self, k: u64) -> f64 {
        match *self {
            StepsizeSchedule::Harmonic { c, d } => c / (1.0 + d * k as f64),
            StepsizeSchedule::Constant { gamma } => gamma,
        }
    }

    /// Whether the schedule meets the classical conditions
    /// `Σγ = ∞` and `Σγ² < ∞`.
    pub fn is_diminishing(&self) -> bool {
        matches!(*self, StepsizeSchedule::Harmonic { d, .. } if d > 0.0)
    }
}
