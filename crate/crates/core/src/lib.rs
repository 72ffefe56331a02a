//! Robinson infinite forcing over finite extension systems.
//!
//! The crate computes the forcing relation over explicit classes of finite
//! structures and multiverse graphs, searches for and builds budget-generic
//! nodes, checks transfer and modal principles on them, and simulates the
//! amalgamation of mutually generic Cohen reals at finite depth.

pub mod logic;
pub mod forcing;
pub mod modal;
pub mod cohen;
pub mod structure;
pub mod fixtures;
pub mod suites;
