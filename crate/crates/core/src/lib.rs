//! Disk embeddings of directed acyclic graphs.
//!
//! Every node of a DAG is mapped to a *formal disk* `(center, radius)` living in a
//! quasi-metric space. Disk `a` contains disk `b` when
//! `d(center_a, center_b) <= radius_a - radius_b`, and that containment order is
//! what training tries to make coincide with reachability in the graph.
//!
//! The crate is organised around that pipeline:
//!
//! - [`geometry`]: distance, distance gradients, exponential maps and projections
//!   for Euclidean, polyhedral, spherical and Lorentz (hyperbolic) spaces.
//! - [`disks`]: formal disks, the protrusion functional and containment.
//! - [`model`]: embedding tables, the margin loss, negative sampling and the
//!   Riemannian SGD trainer, plus the checkpoint format.
//! - [`equivalence`]: Order Embeddings and entailment cones expressed as disk
//!   embeddings, with their energies.
//! - [`dag`]: edge-list parsing, closure, reduction, reversal and dataset splits.
//! - [`eval`]: scoring, threshold tuning and F1 reports.
//! - [`verify`]: a runnable suite of numerical property checks.

pub mod consts;
pub mod dag;
pub mod disks;
pub mod equivalence;
mod error;
pub mod eval;
pub mod fsutil;
pub mod geometry;
pub mod model;
pub mod sample;
mod par;
pub mod verify;

pub use disks::{contains, protrusion, FormalDisk};
pub use error::{Error, Result};
pub use geometry::{GeometryKind, ManifoldPoint, QuasiMetricSpace, TangentVector, Wrt};
