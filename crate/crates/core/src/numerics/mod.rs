//! Numerical building blocks shared by the analytic models and the simulator.

pub mod linalg;
pub mod quadrature;
pub mod rng;
pub mod special;

pub use linalg::{cholesky_psd, symmetric_eigenvalues, PSD_TOLERANCE};
pub use quadrature::{gauss_chebyshev_nodes, gauss_hermite, integrate_adaptive, QuadratureRule};
pub use rng::{sample_standard_normal, stream_rng, StreamRng};
pub use special::{
    bessel_i0_scaled, bessel_j0, gamma_ln_pdf, gamma_pdf, ln_gamma, normal_cdf, reg_lower_gamma,
    reg_upper_gamma,
};
