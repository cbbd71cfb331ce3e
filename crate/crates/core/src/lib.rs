//! Lattice-based deterministic sample sets for sampling-based motion planning.
//!
//! The crate builds scaled and translated copies of the `Z^d`, `D*_d` and
//! `A*_d` lattices that form `beta*`-covers of `R^d`, which makes the pair
//! (sample set, connection radius `r*`) `(delta, eps)`-complete. On top of
//! that it provides:
//!
//! * exact lattice-point enumeration in balls and boxes ([`lattice`]),
//! * completeness parameters and neighbour templates ([`completeness`]),
//! * sample-complexity and collision-check-complexity analysis ([`complexity`]),
//! * a planar disc-robot world with clearance queries ([`geometry`]),
//! * an implicit A* planner over the resulting roadmap ([`planner`]).
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line and wall-clock timing live in the `latplan` companion crate.

#![no_std]
// `!(x > 0.0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod completeness;
pub mod complexity;
mod error;
pub mod geometry;
pub mod lattice;
pub mod linalg;
mod math;
pub mod planner;

pub use completeness::{CompletenessParams, NeighborTemplate, SampleSet};
pub use complexity::{AnnuliSchedule, ComplexityReport};
pub use error::{Error, Result};
pub use geometry::{Bounds, ClearanceResult, CompositeConfig, Limiting, Obstacle, RobotTeam, Workspace};
pub use lattice::{EnumerationLimits, IntegerVector, LatticeFamily, LatticePoint, LatticeSpec};
pub use linalg::Matrix;
pub use planner::{Mode, PlanOutcome, PlanStatus, PlannerConfig, Scenario, SearchStats};
