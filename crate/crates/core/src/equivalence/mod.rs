//! Order Embeddings and entailment cones written as disk embeddings.
//!
//! - [`OrderEmbeddingMap`] sends a point of the positive orthant to a disk in a
//!   polyhedral space so that the reversed product order becomes containment.
//! - [`phi_hyp`] sends the apex of a hyperbolic entailment cone to a disk on the
//!   unit sphere; [`energy_hyp_closed_form`] is the cone energy in disk terms.
//! - [`euclidean_cone_angle_diff`] is the analogous angle formula for Euclidean
//!   entailment cones.

mod cones;
mod order;

pub use cones::{
    cone_angles, energy_hyp_arcsin, energy_hyp_closed_form, energy_hyp_from_parts, energy_hyp_linearized,
    euclidean_cone_angle_diff, hyp_cone_q, hyp_cone_sine, phi_hyp, psi, ConeParams,
};
pub use order::{energy_order, order_relation, OrderEmbeddingMap};

/// `max(0, x)`.
pub fn hinge(x: f64) -> f64 {
    x.max(0.0)
}
