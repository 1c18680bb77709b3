//! Analytical performance metrics and Monte Carlo validation for hybrid
//! orthogonal/non-orthogonal uplink access in aggregation networks.
//!
//! Devices form a Matern cluster process around aggregators; each aggregator
//! spreads its devices over N orthogonal channels, allowing up to L per
//! channel with power-domain multiplexing and successive interference
//! cancellation. The crate provides
//!
//! - closed-form per-channel occupancy of the scheduling procedure,
//! - Laplace transforms of the inter-cluster interference (exact nested
//!   quadrature, bounds, weighted approximations),
//! - success probabilities and served-device counts for random and
//!   channel-aware scheduling, including reliability-balancing power
//!   coefficients and the fair-coexistence budget,
//! - average transmit power per channel, and
//! - a full network simulator estimating every metric for cross-validation.

pub mod analytic;
pub mod error;
pub mod montecarlo;
pub mod occupancy;
pub mod params;
pub mod report;
pub mod scheduling;
pub mod specfun;

pub use analytic::{
    avg_power, b_term, chi_constant, crs_rank_success, rrs_avg_served, rrs_overall_success,
    rrs_success, CrsModel, CrsReport, GilPelaezTerms, LaplaceModel, LaplaceVariant, PowerScheme,
};
pub use error::{CoreError, Result};
pub use montecarlo::{estimate_metrics, sample_realization, SimConfig};
pub use occupancy::{conditional_occupancy, kmax_for_tail, occupancy_pmf, OccupancyPmf};
pub use params::NetworkParams;
pub use report::{Estimate, MetricReport, RankStats};
pub use scheduling::{
    crs_assign, delta_star, power_coefficients, rrs_assign, AccessScheme, Assignment, DeltaStar,
    PowerControl, PowerPolicy,
};
pub use specfun::QuadratureSpec;
