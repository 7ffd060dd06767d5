//! Outage analysis for a fluid-antenna receiver served through a
//! reconfigurable intelligent surface with a finite number of elements.
//!
//! The crate provides:
//!
//! - [`channel`]: scenario parameters, Jakes port correlation, gain moments
//!   and the Pearson correlation matrix of the port gains;
//! - [`blocks`]: a block-correlation approximation of that matrix fitted by
//!   eigenvalue matching;
//! - [`gamma_outage`]: the Gamma moment-matched outage approximation
//!   evaluated with nested Gauss–Chebyshev quadrature;
//! - [`gaussian`]: CLT (Gaussian) comparators with fixed or fitted block
//!   coefficients;
//! - [`monte_carlo`]: the exact correlated-channel simulator and a sampler
//!   of the Gamma decomposition;
//! - [`experiment`]: single points, parameter sweeps, CSV output and
//!   plot scripts, shared by the `fasris` binary and the examples.

pub mod blocks;
pub mod channel;
pub mod error;
pub mod experiment;
pub mod gamma_outage;
pub mod gaussian;
pub mod monte_carlo;
pub mod numerics;
pub mod outage;

pub use blocks::{
    assemble_block_matrix, block_eigenvalues, fit_blocks, fit_blocks_jakes, fit_port_blocks,
    BlockStructure, FitDomain,
};
pub use channel::{
    build_port_correlation, channel_moments, outage_threshold, pearson_eta, ChannelMoments,
    PortCorrelation, SystemParams,
};
pub use error::{Error, Result};
pub use gamma_outage::{gamma_params, outage_gamma, GammaParams};
pub use gaussian::{fbc_structure, outage_gaussian, GaussianBlockModel};
pub use monte_carlo::{simulate_decomposition, simulate_exact};
pub use outage::{Method, OutageEstimate};
