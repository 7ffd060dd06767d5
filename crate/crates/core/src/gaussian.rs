//! CLT comparators: port gains modelled as jointly Gaussian with the exact
//! mean and variance and the same block-correlation structure as the Gamma
//! model,
//!
//! ```text
//! X_{l,d} = E + sqrt(V) (sqrt(1 - rho_d) Z_{l,d} + sqrt(rho_d - rho0) W_d + sqrt(rho0) T)
//! ```
//!
//! `P(max <= y)` is computed with nested Gauss–Hermite rules over `T`
//! (outer) and each `W_d` (inner). The fixed-coefficient variant sets every
//! `rho_d` to [`FBC_RHO`]; the variable variant reuses the fitted structure.

use crate::blocks::{fit_port_blocks, BlockStructure, FitDomain};
use crate::channel::SystemParams;
use crate::error::{Error, Result};
use crate::gamma_outage::{DEGENERATE_W_GAP, UNIT_RHO_GAP};
use crate::numerics::{gauss_hermite, integrate_adaptive, normal_cdf};
use crate::outage::{Method, OutageEstimate};
use std::f64::consts::PI;

/// Intra-block coefficient of the fixed-block-correlation baseline.
pub const FBC_RHO: f64 = 0.97;
pub const DEFAULT_HERMITE_ORDER: usize = 64;
pub const MIN_HERMITE_ORDER: usize = 16;
/// Smallest step width (in standard deviations of `W_d`) handled by the
/// Hermite rule; sharper inner integrands go to the adaptive rule.
const STEP_RESOLVED: f64 = 1.0;
const INNER_SPAN: f64 = 9.0;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianBlockModel {
    pub mean: f64,
    pub variance: f64,
    pub structure: BlockStructure,
}

/// `P(max_{l,d} X_{l,d} <= lambda_th)`. `method` only tags the estimate.
pub fn outage_gaussian(
    model: &GaussianBlockModel,
    lambda_th: f64,
    order: usize,
    method: Method,
) -> Result<OutageEstimate> {
    model.structure.validate()?;
    if !(model.variance > 0.0) {
        return Err(Error::Contract(format!(
            "variance must be > 0, got {}",
            model.variance
        )));
    }
    if order < MIN_HERMITE_ORDER {
        return Err(Error::Usage(format!(
            "Gauss-Hermite order must be >= {MIN_HERMITE_ORDER}, got {order}"
        )));
    }
    let rule = gauss_hermite(order)?;
    let sd = model.variance.sqrt();
    let rho0 = model.structure.rho0;
    let shared = rho0.max(0.0).sqrt();

    let raw = rule.expect_standard_normal(|t| {
        // standardized distance of the threshold after removing the common term
        let c = (lambda_th - model.mean) / sd - shared * t;
        let mut prod = 1.0;
        for (&size, &rho) in model.structure.sizes.iter().zip(&model.structure.rho) {
            let factor = if 1.0 - rho < UNIT_RHO_GAP || size == 1 {
                normal_cdf(c / (1.0 - rho0).sqrt())
            } else if rho - rho0 < DEGENERATE_W_GAP {
                normal_cdf(c / (1.0 - rho).sqrt()).powi(size as i32)
            } else {
                let block_load = (rho - rho0).sqrt();
                let private = (1.0 - rho).sqrt();
                let integrand =
                    |w: f64| normal_cdf((c - block_load * w) / private).powi(size as i32);
                if private / block_load >= STEP_RESOLVED {
                    rule.expect_standard_normal(integrand)
                } else {
                    // the integrand is a step of width private/block_load at
                    // w = c/block_load, too narrow for the Hermite nodes
                    let edge = (c / block_load).clamp(-INNER_SPAN, INNER_SPAN);
                    integrate_adaptive(
                        |w| integrand(w) * (-0.5 * w * w).exp() / (2.0 * PI).sqrt(),
                        &[-INNER_SPAN, edge, INNER_SPAN],
                        1e-14,
                        1e-12,
                        200,
                    )
                }
            };
            prod *= factor;
            if prod == 0.0 {
                break;
            }
        }
        prod
    });
    let diagnostics = vec![
        ("hermite_order".to_string(), order.to_string()),
        (
            "blocks".to_string(),
            model.structure.num_blocks().to_string(),
        ),
    ];
    Ok(OutageEstimate::analytic(method, raw, diagnostics))
}

/// Fitted block layout with every intra coefficient replaced by [`FBC_RHO`].
pub fn fbc_from_fitted(fitted: &BlockStructure) -> BlockStructure {
    BlockStructure {
        rho: vec![FBC_RHO; fitted.sizes.len()],
        ..fitted.clone()
    }
}

/// Fixed-block-correlation structure for a scenario.
pub fn fbc_structure(params: &SystemParams, domain: FitDomain) -> Result<BlockStructure> {
    Ok(fbc_from_fitted(&fit_port_blocks(params, domain)?))
}
