//! Special functions and quadrature kernels backing the analytical layer.

pub mod gamma;
pub mod oscillatory;
pub mod quad;

pub use gamma::{digamma, ln_gamma, ln_poisson_pmf, poisson_pmf, regularized_gamma_q};
pub use oscillatory::integrate_gil_pelaez;
pub use quad::{integrate, integrate_2d_polar, integrate_semi_infinite, QuadratureSpec};
