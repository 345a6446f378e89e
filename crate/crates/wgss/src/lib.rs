//! Watt governor with spring.
//!
//! [`model`] holds the vector field, equilibrium and closed-form quantities,
//! [`locus`] traces the degenerate Hopf set on `epsilon = epsilon_c`, and
//! [`orbit`] integrates the flow to census equilibria and cycles, and
//! [`tongue`] looks for a stable equilibrium coexisting with two stable cycles.

pub mod error;
pub mod locus;
pub mod model;
pub mod orbit;
pub mod params;
pub mod stability;
pub mod tongue;

pub use error::{Result, WgssError};
pub use model::{
    analytic_jet, epsilon_critical, g1, l1_closed_form_sign, nonuniformity, omega0, vector_field,
    Equilibrium, Sign,
};
pub use params::{
    params_from_json, params_from_str, LoadedParams, ParamSource, PhysicalParams, WgssParams,
};
pub use stability::routh_hurwitz_stable;
