//! A desk-scale laboratory for studying how the partial-multiplication
//! formula inside a Montgomery kP accelerator over B-233 shapes its power
//! trace, and how well a single-trace difference-of-means attack recovers
//! the scalar from it.
//!
//! The pipeline: [`ladder::kp`] runs a cycle-scheduled scalar
//! multiplication and records every register, bus, multiplier and ALU event
//! per clock cycle; [`powersim::simulate`] compresses that activity into
//! one power value per cycle under a configurable leakage profile;
//! [`attack::run_attack`] fragments the trace into key-bit slots and scores
//! 54 difference-of-means key candidates against the processed scalar.

pub mod attack;
pub mod error;
pub mod field;
pub mod ladder;
pub mod polymul;
pub mod powersim;

pub use error::{Error, ErrorKind, Result};
