//! Dynamic information-flow control with a floating current label and a
//! clearance.
//!
//! - [`lattice`]: the two shipped label lattices.
//! - [`runtime`]: the monitor (`LioContext`, `Labeled`, `to_labeled`,
//!   labeled exceptions); [`refs`] adds labeled references.
//! - [`lang`]: the `.lio` language that drives the monitor.
//! - [`harness`]: generated-program noninterference and confinement checks.
//! - [`chair`]: a conference-reviewing scenario built on principal labels.

pub mod chair;
pub mod harness;
pub mod lang;
pub mod lattice;
pub mod pos;
pub mod refs;
pub mod runtime;

pub use lattice::{Label, LatticeKind, PrincipalLabel, TwoPoint};
pub use pos::Pos;
pub use runtime::{Abort, Labeled, LioContext, MonitorError, Mutation, StopKind};
