//! Closed-form and quadrature-based performance metrics.

mod crs;
mod laplace;
mod power;
mod rrs;

pub use crs::{b_term, crs_rank_success, CrsModel, CrsReport, GilPelaezTerms};
pub use laplace::{
    chi_constant, crs_exact_exponent, rrs_exact_exponent, upsilon, upsilon_deficit, LaplaceModel,
    LaplaceVariant,
};
pub use power::{avg_power, PowerScheme};
pub use rrs::{
    expected_scheduled_single, rrs_avg_served, rrs_overall_success, rrs_success, served_terms,
    ServedTerms,
};
