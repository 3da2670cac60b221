//! Experiment harness for `bergkern`: configuration, kernel-state cache,
//! experiment runners and report emission.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cache;
pub mod config;
pub mod experiments;
pub mod io;
pub mod report;

pub use config::Config;
pub use experiments::{Experiment, Lab};
pub use report::{emit_report, Report};
