//! Numerical building blocks: truncated power series, Cauchy-circle Taylor
//! coefficients, real-line quadrature and phase-based root finding.

mod cauchy;
pub(crate) mod dd;
pub(crate) mod quadrature;
mod roots;
mod series;

pub use cauchy::{taylor_coeffs_cauchy, taylor_coeffs_cauchy_many, DEFAULT_CAUCHY_TOL};
pub use quadrature::{gauss_legendre, integrate_weighted_line, LineQuadrature, QuadratureResult};
pub use roots::{find_nodes_by_phase, wrap_pi, ClosedFormPhase, PhaseFunction, ScaledPhase, WrappedPhase};
pub use series::{binomial, factorial, invert_power_series, PowerSeries};
