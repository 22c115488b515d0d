//! Checks of the qualitative results along orbits, and the constants they rely on.

mod alt2;
mod constants;
mod crossings;
mod fractions;
mod mean;
mod nonsym;
mod periodic;
mod price;
mod rho;

pub use alt2::{audit_alt2_mean, search_alt2_upward_crossing, CrossingSearch};
pub use constants::{compute_t_n, contraction_gamma, gamma_n, uniform_rho_bound, RhoBound, T_N_CAP};
pub use crossings::audit_crossings;
pub use fractions::audit_fraction_bounds;
pub use mean::audit_mean_volume;
pub use nonsym::{audit_nonsym_bounds, envelope_defect};
pub use periodic::{find_periodic_orbit, PeriodicMethod, PeriodicOrbit};
pub use price::audit_price_product;
pub use rho::{audit_ratio_contraction, audit_rho_bounds, rho_excursion, tail_max};
