//! Adaptive deployment of robotic networks driven by random event streams.
//!
//! The library covers stochastic-gradient coverage control, min-consensus
//! winner selection, dual-ascent partitioning toward prescribed utilization,
//! and a dynamic traveling repairperson policy built on top of both.

pub mod consensus;
pub mod coverage;
pub mod dtrp;
pub mod error;
pub mod events;
pub mod geometry;
pub mod partition;
pub mod sim;

pub use error::{Error, Result};
