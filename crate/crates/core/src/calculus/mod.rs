//! Exterior calculus on the ambient space: vector fields, forms, interior
//! products, Lie derivatives, brackets and divergence.

pub mod field;
pub mod form;
pub mod volume;

pub use field::{lie_bracket, VectorField};
pub use form::{exterior_derivative, interior_product, lie_derivative, DiffForm};
pub use volume::{divergence, field_to_closed_form, is_closed, pair_to_form, standard_divergence, VolumeForm};
