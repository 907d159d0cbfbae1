//! Robust network interdiction: nominal, adaptive and path-based models of
//! the max-flow game against an adversary who removes Γ arcs, together with
//! the linear-optimization approximation and its bound checks.

pub mod error;
pub mod game;
pub mod graph;
pub mod instances;
pub mod linopt;
pub mod lomodel;
pub mod solvers;

pub use error::{Error, ParseError, Result};
pub use graph::{ArcFlow, ArcId, Capacity, Instance, PathFlow};
pub use game::{MixedStrategy, Scenario};
pub use solvers::Limits;
