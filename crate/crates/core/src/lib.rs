//! Exact and numeric toolkit for suspension hypersurfaces `{uv = f(z)}`:
//! vector-field lifts and flows, divergence for the canonical volume form,
//! semi-compatibility certificates, wedge spanning checks, and a sampled
//! approximation harness for divergence-free fields.

pub mod algebra;
pub mod approx;
pub mod calculus;
pub mod criterion;
pub mod error;
pub mod flow_audit;
pub mod lifting;
pub mod numeric;
pub mod random;
pub mod scenario;
pub mod suspension;
pub mod verify;
