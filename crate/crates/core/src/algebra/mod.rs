//! Exact scalar, polynomial and linear-algebra substrate.

pub mod matrix;
pub mod normal_form;
pub mod parse;
pub mod poly;
pub mod scalar;
pub mod time_poly;

pub use matrix::ExactMatrix;
pub use normal_form::UvReducer;
pub use parse::parse_poly;
pub use poly::{monomials_up_to, var_name, z, Exponent, Poly, U, V};
pub use scalar::GaussianRational;
pub use time_poly::{compose_time, TimePoly};
