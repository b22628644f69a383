//! Toll allocation on one-way linear highways.
//!
//! A highway is split into `n` consecutive segments and every trip `[h,k]`
//! pays a toll `t_hk`. This crate distributes the collected tolls over the
//! segments with three methods and their weight-scheme family:
//!
//! * **SES** ([`ses`]) splits each trip's toll evenly over its segments.
//! * **SPS** ([`sps`]) keeps single-segment tolls in place and shares the
//!   remainder in proportion to the multi-segment toll each segment carries.
//! * **SCS** ([`scs`]) weights entry and exit segments by their position.
//!
//! Each method coincides with a classical solution of the segments
//! allocation game ([`game`]): SES with the Shapley value, SPS with the
//! tau-value and SCS with the average tree solution. The [`game`] module
//! computes those solutions by brute force so the identities can be checked
//! numerically, and decides core membership. [`axioms`] turns every
//! allocation property into an executable falsification check and
//! [`equity`] compares allocations with Gini indices, Lorenz curves and
//! rank correlations.
//!
//! ```
//! use highway_toll::{fixtures, ses, sps, scs};
//!
//! let t = fixtures::three_segment_example();
//! assert!((ses(&t).share(1) - 5.0 / 6.0).abs() < 1e-12);
//! assert!((sps(&t).share(3) - 0.4).abs() < 1e-12);
//! assert!((scs(&t).share(2) - 1.0).abs() < 1e-12);
//! ```

pub mod axioms;
pub mod counterexamples;
pub mod equity;
pub mod error;
pub mod fixtures;
pub mod game;
pub mod generate;
pub mod io;
pub mod methods;
pub mod scheme;
pub mod toll;

pub use counterexamples::{counterexample_method, Counterexample};
pub use error::{Result, TollError};
pub use game::{
    at_oracle, core_check, core_scheme_check, game_from, shapley_oracle, sps_core_criterion, tau_oracle, Coalition,
    CoreReport, SegmentsGame,
};
pub use generate::{block_structured_matrix, random_matrix};
pub use methods::{scs, ses, sps, AllocationRule, Method, SpsDecomposition};
pub use scheme::{builtin_scheme, family_allocate, BuiltinScheme, WeightScheme};
pub use toll::{Allocation, TollMatrix, Trip, UnitTollMatrix};

/// Absolute tolerance used for equality checks unless a caller overrides it.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// `tol * max(1, |magnitude|)`.
pub fn scaled_tolerance(tol: f64, magnitude: f64) -> f64 {
    tol * magnitude.abs().max(1.0)
}
