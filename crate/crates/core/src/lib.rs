//! Sand automata on finitely described infinite configurations.
//!
//! The crate is `no_std` (it needs `alloc`) and covers:
//!
//! * [`config`]: exact configurations (eventually constant or periodic lines,
//!   eventually constant planes), shifts, raising, windows.
//! * [`metric`]: measuring devices, top and ground cylinders, the two
//!   ultrametrics, and the column encoding onto the staircase subshift.
//! * [`rule`] and [`sa`]: local rules over ranges, exact global steps, a
//!   brute-force window oracle, rule iteration and a property harness.
//! * [`ca`]: finite-alphabet cellular automata on windows.
//! * [`bridge`]: the sand-automaton to cellular-automaton construction and
//!   the decision procedure for the converse.
//! * [`nil`]: the collapsing automaton, the marker encoding of a spreading
//!   cellular automaton and the nilpotency experiments built on it.
#![no_std]

extern crate alloc;

pub mod bridge;
pub mod ca;
pub mod config;
mod error;
pub mod height;
pub mod metric;
pub mod nil;
pub mod pattern;
pub mod program;
pub mod rule;
pub mod sa;
pub mod sample;

pub use error::{Error, Result};
pub use height::Height;
pub use pattern::Pattern;

/// Default limit on the number of objects an exhaustive enumeration may visit.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Largest dense cellular-automaton table that will be materialized.
pub const TABLE_BUDGET: u64 = 1 << 26;
