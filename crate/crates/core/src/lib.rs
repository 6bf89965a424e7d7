//! Exact tensor calculus for Lorentzian metrics in Brinkmann form.
//!
//! The crate builds plane-wave, generalized Cahen-Wallach and product metrics
//! with rational-function components, computes curvature and its iterated
//! covariant derivatives exactly, and decides the vanishing conditions that
//! separate flat, locally symmetric, semi-symmetric and k-th symmetric
//! spaces. Numeric geodesic integration provides completeness probes.

pub mod expr;
pub mod tensor;
pub mod spaces;
pub mod checks;
pub mod geodesic;
pub mod dsl;
