//! Toll location and toll level selection under user-equilibrium routing.
//!
//! The crate is `no_std` (it needs `alloc`). It contains everything that is
//! pure computation:
//!
//! * [`network`] and [`cost`]: the road network, BPR link performance, total
//!   travel time, the Beckmann potential and generalized link costs.
//! * [`paths`] and [`assign`]: label-setting shortest paths and a path-based
//!   greedy traffic assignment engine (tolled UE, weighted UE, and SO).
//! * [`value`]: the lower-level value function `V(z)` and the gap function,
//!   backed by a toll-keyed cache of equilibrium solves.
//! * [`cardinality`]: projection onto `{u : |supp(u)| <= kappa}`.
//! * [`pbcd`]: penalized block coordinate descent with a Barzilai-Borwein
//!   projected gradient z-step.
//! * [`baselines`]: ranking heuristics, conjugate-direction toll search on a
//!   fixed link set, brute-force enumeration and the R.E.D. metric.
//!
//! File formats, the CLI and reports live in the `tollforge` crate.
#![no_std]
// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod assign;
pub mod baselines;
pub mod cardinality;
pub mod cost;
mod error;
pub(crate) mod math;
pub mod network;
pub mod paths;
pub mod pbcd;
pub mod value;

pub use assign::{AssignmentConfig, AssignmentState, CostMode, PathSet};
pub use cardinality::{project_topk, supp_count, CardinalityBudget};
pub use error::{Error, Result};
pub use network::{Demand, Link, Network, OdPair, TollBox};
pub use pbcd::{PbcdConfig, PbcdOutcome};
pub use value::ValueOracle;
