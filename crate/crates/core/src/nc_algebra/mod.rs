//! Noncommutative phase-space structure: parameters, Bopp shifts, star
//! products and the commutator audit.

mod audit;
mod bopp;
mod params;
mod star;

pub use audit::{algebra_consistency_report, effective_planck, ConsistencyReport, ConsistencyRow};
pub use bopp::{bopp_image, bopp_shift};
pub use params::{levi_civita, BoppDenominator, ConventionConfig, NCParameters};
pub use star::{moyal_bracket, polynomial_degree, star_order_term, star_product, symbol_derivative, StarSector};
