//! Query-competitive algorithms with untrusted predictions for problems under
//! explorable uncertainty: finding minima of intersecting sets, sorting, and
//! minimum spanning trees with uncertain edge weights.

pub mod experiment;
pub mod fixtures;
pub mod gen;
pub mod interval;
pub mod io;
pub mod learn;
pub mod measures;
pub mod minimum;
pub mod model;
pub mod mst;
pub mod run;
pub mod scalar;
pub mod sorting;
pub mod state;
pub mod vc;
pub mod verify;

pub use interval::UncertaintyInterval;
pub use model::{ElementId, ProblemInstance, ProblemKind};
pub use scalar::Scalar;
