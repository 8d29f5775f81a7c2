//! Prior-sensitivity laboratory for partially observed stochastic control.
//!
//! Mixed atomic/density priors, mixture measurement channels with exact Bayes
//! updates, single-stage optimal costs and mismatch costs, finite belief MDPs,
//! and empirical plug-in experiments.

pub mod belief_mdp;
pub mod channels;
pub mod empirical_lab;
pub mod error;
pub mod families;
pub mod measures;
pub mod single_stage;

pub use error::{Error, Result};
