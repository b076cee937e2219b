//! Sample-and-hold reconstruction of encoder feedback and its effect on
//! closed-loop tracking of a motor-driven pendulum.

pub mod control;
pub mod error;
pub mod metrics;
pub mod plant;

pub mod sensing;
pub mod signal_recon;
pub mod simloop;

pub use error::{Error, Result};
pub mod cli;
pub mod config;
pub mod report;
