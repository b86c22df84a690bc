//! Scenario files, run loops and trace output shared by every algorithm.

mod run;
mod scenario;
pub mod stats;
mod trace;

pub use run::{circular_mean_angle, dtrp_run_from_tables, run, run_with, RunOptions};
pub use scenario::{
    scenario_from_value, Algorithm, ComponentSpec, DistributionSpec, DtrpSpec, GraphSpec, HeteroSpec, HorizonSpec,
    OutputSpec, PartitionSpec, RobotsSpec, Scenario, TrackSpec, TransientSpec, WorkspaceSpec,
};
pub use trace::{fmt_f64, RunOutput, Snapshot, Table};
