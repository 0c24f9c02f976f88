//! Heisenberg-picture rates for position and kinetic momentum, and their
//! comparison against printed reference forms.

mod rate;
mod template;

pub use rate::{
    alpha_cross_curl_atoms, commutative_limit, electric_field_atoms, heisenberg_rate, kinetic_momentum,
    kinetic_momentum_rate, kinetic_momentum_symbolic, position_rate, spinor_component_action, theta_cross_gradient,
    GroupTag, RateResult, SpinorAction, TraceEntry,
};
pub use template::{
    apply_overrides, compare_with_template, reference_templates, DiscrepancyReport, DiscrepancyRow, ReferenceTemplate,
    RowStatus, TemplateTerm,
};
