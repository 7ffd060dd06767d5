//! Gamma moment-matched outage approximation.
//!
//! Each port gain is modelled as `Gamma(a, b)` with the exact first two
//! moments. Under the block-correlation structure the port gains are built
//! as `r_{l,d} + w_d + t` from independent Gamma components sharing the
//! scale `b`:
//!
//! ```text
//! r_{l,d} ~ Gamma((1 - rho_d) a, b)   private to port l of block d
//! w_d     ~ Gamma((rho_d - rho0) a, b) shared inside block d
//! t       ~ Gamma(rho0 a, b)           shared by all ports
//! ```
//!
//! Conditioning on `t` makes blocks independent and conditioning on `w_d`
//! makes block members independent, so
//! `P(max <= y) = E_t[ prod_d E_w[ P(r <= y - t - w)^{L_d} ] ]`.
//! Both expectations are evaluated with Gauss–Chebyshev rules on
//! `[0, y]` and `[0, y - t]`.

use crate::blocks::BlockStructure;
use crate::channel::SystemParams;
use crate::error::{Error, Result};
use crate::numerics::{
    gamma_pdf, gauss_chebyshev_nodes, ln_gamma, reg_lower_gamma, QuadratureRule,
};
use crate::outage::{Method, OutageEstimate};
use std::f64::consts::PI;

/// Default `U` for both the outer (over `t`) and inner (over `w_d`) rules.
pub const DEFAULT_ORDER: usize = 64;
/// Smallest accepted quadrature parameter `U`.
pub const MIN_ORDER: usize = 4;
/// Below this gap `w_d` is treated as a point mass at zero.
pub const DEGENERATE_W_GAP: f64 = 1e-6;
/// Below this gap a block is treated as perfectly correlated.
pub const UNIT_RHO_GAP: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaParams {
    pub shape: f64,
    pub scale: f64,
}

/// Moment-matched shape `E^2 / V` and scale `V / E`.
pub fn gamma_params(params: &SystemParams) -> GammaParams {
    let m = params.m as f64;
    let c = 1.0 - PI * PI / 16.0;
    GammaParams {
        shape: m * PI * PI / (16.0 * c),
        scale: 4.0 * c * (params.eps1 * params.eps2).sqrt() / PI,
    }
}

/// Approximate CDF of one port gain, `P(a, x / b)`.
pub fn marginal_cdf(gp: &GammaParams, x: f64) -> Result<f64> {
    reg_lower_gamma(gp.shape, x.max(0.0) / gp.scale)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockShapes {
    pub size: usize,
    pub rho: f64,
    /// Shape of the private components `r_{l,d}`.
    pub alpha_r: f64,
    /// Shape of the block-shared component `w_d`.
    pub alpha_w: f64,
}

/// Shapes of the `r + w + t` decomposition for one structure.
#[derive(Debug, Clone, PartialEq)]
pub struct DecompositionShapes {
    pub blocks: Vec<BlockShapes>,
    /// Shape of the globally shared component `t`.
    pub alpha_t: f64,
    pub scale: f64,
    pub shape: f64,
    pub rho0: f64,
}

impl DecompositionShapes {
    pub fn new(gp: &GammaParams, structure: &BlockStructure) -> Self {
        let a = gp.shape;
        let blocks = structure
            .sizes
            .iter()
            .zip(&structure.rho)
            .map(|(&size, &rho)| BlockShapes {
                size,
                rho,
                alpha_r: ((1.0 - rho) * a).max(0.0),
                alpha_w: ((rho - structure.rho0) * a).max(0.0),
            })
            .collect();
        DecompositionShapes {
            blocks,
            alpha_t: structure.rho0 * a,
            scale: gp.scale,
            shape: a,
            rho0: structure.rho0,
        }
    }
}

fn lower_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    reg_lower_gamma(a, x).unwrap_or(f64::NAN)
}

/// `int_0^upper f(x) g(x) dx` for the `Gamma(shape, scale)` density `f`.
///
/// For `shape < 1` the density is singular at zero; the substitution
/// `x = upper * u^(1/shape)` absorbs `x^(shape-1) dx` and leaves a bounded
/// integrand on `u in [0, 1]`.
fn integrate_against_gamma<G: FnMut(f64) -> f64>(
    shape: f64,
    scale: f64,
    upper: f64,
    rule: &QuadratureRule,
    mut g: G,
) -> f64 {
    if upper <= 0.0 {
        return 0.0;
    }
    if shape >= 1.0 {
        rule.integrate_chebyshev(0.0, upper, |x| gamma_pdf(shape, scale, x) * g(x))
    } else {
        let log_prefactor = shape * (upper / scale).ln() - ln_gamma(shape + 1.0);
        let inv = 1.0 / shape;
        log_prefactor.exp()
            * rule.integrate_chebyshev(0.0, 1.0, |u| {
                let x = upper * u.powf(inv);
                (-x / scale).exp() * g(x)
            })
    }
}

/// `P(max_l (r_{l,d} + w_d) <= y - t)` for block `block`.
pub fn conditional_block_cdf(
    shapes: &DecompositionShapes,
    block: usize,
    y: f64,
    t: f64,
    inner_rule: &QuadratureRule,
) -> f64 {
    let c = y - t;
    if c <= 0.0 {
        return 0.0;
    }
    let b = shapes.scale;
    let blk = shapes.blocks[block];
    let power = blk.size as i32;
    if 1.0 - blk.rho < UNIT_RHO_GAP {
        return lower_gamma((1.0 - shapes.rho0) * shapes.shape, c / b);
    }
    if blk.rho - shapes.rho0 < DEGENERATE_W_GAP {
        return lower_gamma(blk.alpha_r, c / b).powi(power);
    }
    integrate_against_gamma(blk.alpha_w, b, c, inner_rule, |x| {
        lower_gamma(blk.alpha_r, (c - x) / b).powi(power)
    })
}

/// Gamma/block-correlation outage probability at threshold `lambda_th`,
/// with `outer_order` and `inner_order` the quadrature parameters `U`
/// (`U + 1` nodes each).
pub fn outage_gamma(
    params: &SystemParams,
    structure: &BlockStructure,
    lambda_th: f64,
    outer_order: usize,
    inner_order: usize,
) -> Result<OutageEstimate> {
    structure.validate()?;
    if structure.num_ports() != params.k {
        return Err(Error::Contract(format!(
            "structure covers {} ports but K = {}",
            structure.num_ports(),
            params.k
        )));
    }
    if outer_order < MIN_ORDER || inner_order < MIN_ORDER {
        return Err(Error::Usage(format!(
            "quadrature orders must be >= {MIN_ORDER} (got {outer_order}, {inner_order})"
        )));
    }
    if !(lambda_th >= 0.0) {
        return Err(Error::domain(
            "outage_gamma",
            format!("threshold must be >= 0, got {lambda_th}"),
        ));
    }
    let gp = gamma_params(params);
    let shapes = DecompositionShapes::new(&gp, structure);
    let outer = gauss_chebyshev_nodes(outer_order + 1)?;
    let inner = gauss_chebyshev_nodes(inner_order + 1)?;
    let joint_given_t = |t: f64| -> f64 {
        let mut prod = 1.0;
        for d in 0..shapes.blocks.len() {
            prod *= conditional_block_cdf(&shapes, d, lambda_th, t, &inner);
            if prod == 0.0 {
                break;
            }
        }
        prod
    };
    let raw = if shapes.alpha_t <= 0.0 {
        joint_given_t(0.0)
    } else {
        integrate_against_gamma(shapes.alpha_t, gp.scale, lambda_th, &outer, joint_given_t)
    };
    if raw.is_nan() {
        return Err(Error::domain("outage_gamma", "quadrature produced NaN"));
    }
    let diagnostics = vec![
        ("outer_order".to_string(), outer_order.to_string()),
        ("inner_order".to_string(), inner_order.to_string()),
        ("blocks".to_string(), structure.num_blocks().to_string()),
        (
            "fit_error".to_string(),
            format!("{:e}", structure.fit_error),
        ),
    ];
    Ok(OutageEstimate::analytic(Method::Gamma, raw, diagnostics))
}
