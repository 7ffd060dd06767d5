//! Scenario parameters and second-order statistics of the cascaded
//! BS → RIS → fluid-antenna channel.
//!
//! Port `k` sees the co-phased gain `psi_k = sum_m |h_m| |v_{m,k}|`, where
//! `h_m ~ CN(0, eps1)` and the RIS-to-port vectors `v_m` are complex Gaussian
//! with a Jakes (Bessel `J0`) spatial correlation across the `K` ports.

use crate::error::{Error, Result};
use crate::numerics::{bessel_i0_scaled, bessel_j0, integrate_adaptive};
use nalgebra::DMatrix;
use std::f64::consts::PI;

/// Physical scenario.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Number of RIS elements.
    pub m: usize,
    /// Number of fluid-antenna ports.
    pub k: usize,
    /// Aperture length in wavelengths.
    pub w: f64,
    /// Variance of the BS–RIS coefficients.
    pub eps1: f64,
    /// Variance of the RIS–vehicle coefficients.
    pub eps2: f64,
    /// Transmit power (W).
    pub tx_power: f64,
    /// Receiver noise power (W).
    pub noise_power: f64,
    /// Target rate (bit/s/Hz).
    pub rate: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            m: 5,
            k: 5,
            w: 1.0,
            eps1: 1.0,
            eps2: 1.0,
            tx_power: 1.0,
            noise_power: 1.0,
            rate: 1.0,
        }
    }
}

impl SystemParams {
    /// Unit-variance links and unit powers.
    pub fn new(m: usize, k: usize, w: f64) -> Self {
        SystemParams {
            m,
            k,
            w,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("W", self.w),
            ("eps1", self.eps1),
            ("eps2", self.eps2),
            ("tx_power", self.tx_power),
            ("noise_power", self.noise_power),
            ("rate", self.rate),
        ];
        if self.m == 0 || self.k == 0 {
            return Err(Error::Usage(format!(
                "M and K must be >= 1 (got M = {}, K = {})",
                self.m, self.k
            )));
        }
        for (name, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::Usage(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        Ok(())
    }
}

/// Mean and variance of a single port gain `psi_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelMoments {
    pub mean: f64,
    pub variance: f64,
}

pub fn channel_moments(params: &SystemParams) -> ChannelMoments {
    let m = params.m as f64;
    let e = params.eps1 * params.eps2;
    ChannelMoments {
        mean: m * PI * e.sqrt() / 4.0,
        variance: m * e * (1.0 - PI * PI / 16.0),
    }
}

/// Jakes correlation between ports `k` and `l` (zero-based), `J0(2 pi |k-l| W / (K-1))`.
pub fn jakes_coefficient(params: &SystemParams, k: usize, l: usize) -> Result<f64> {
    if params.k < 2 {
        return Err(Error::SinglePort);
    }
    if k >= params.k || l >= params.k {
        return Err(Error::Contract(format!(
            "port index out of range: ({k}, {l}) with K = {}",
            params.k
        )));
    }
    jakes_at_distance(params, k.abs_diff(l))
}

fn jakes_at_distance(params: &SystemParams, distance: usize) -> Result<f64> {
    let arg = 2.0 * PI * distance as f64 * params.w / (params.k - 1) as f64;
    bessel_j0(arg)
}

/// `E[|X||Y|]` for two `CN(0, eps2)` variables whose complex correlation has
/// magnitude `g`, by 2-D adaptive integration of the bivariate Rayleigh
/// density over `[0, 6 sqrt(eps2)]^2`.
pub fn rayleigh_product_moment(g: f64, eps2: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::domain(
            "rayleigh_product_moment",
            format!("correlation magnitude must lie in [0, 1], got {g}"),
        ));
    }
    if !(eps2 > 0.0) {
        return Err(Error::domain(
            "rayleigh_product_moment",
            format!("eps2 must be > 0, got {eps2}"),
        ));
    }
    if g == 1.0 {
        return Ok(eps2);
    }
    let s = eps2 * (1.0 - g * g);
    let norm = 4.0 / (eps2 * eps2 * (1.0 - g * g));
    let upper = 6.0 * eps2.sqrt();
    let sd = eps2.sqrt();

    // The scaled Bessel form keeps the exponent at -((x - g y)^2 + (1 - g^2) y^2) / s.
    let kernel = |x: f64, y: f64| -> f64 {
        let z = 2.0 * g * x * y / s;
        let exponent = -(x * x + y * y) / s + z;
        // z >= 0 here, so the scaled Bessel cannot fail
        let i0s = bessel_i0_scaled(z).unwrap_or(0.0);
        norm * x * x * y * y * exponent.exp() * i0s
    };
    let outer_points = [0.0, 0.5 * sd, sd, 2.0 * sd, upper];
    let value = integrate_adaptive(
        |x| {
            let peak = (g * x).clamp(0.0, upper);
            integrate_adaptive(|y| kernel(x, y), &[0.0, peak, upper], 1e-15, 1e-12, 400)
        },
        &outer_points,
        1e-14,
        1e-11,
        400,
    );
    Ok(value)
}

/// Pearson correlation between two port gains whose RIS-side channels have
/// Jakes coefficient of magnitude `g`.
pub fn pearson_eta(g: f64, params: &SystemParams) -> Result<f64> {
    // (M eps1 E[|v||v'|] - E_psi^2 / M) / V_psi, with M and eps1 cancelled
    let product = rayleigh_product_moment(g, params.eps2)?;
    let q = PI * PI / 16.0;
    Ok((product / params.eps2 - q) / (1.0 - q))
}

/// Correlation floor `(pi/4 - pi^2/16) / (1 - pi^2/16)` between any two
/// ports, caused by the shared BS–RIS channel.
pub fn eta_floor_closed_form() -> f64 {
    (PI / 4.0 - PI * PI / 16.0) / (1.0 - PI * PI / 16.0)
}

/// Jakes matrix `g` and Pearson matrix `omega` across the `K` ports.
#[derive(Debug, Clone, PartialEq)]
pub struct PortCorrelation {
    pub g: DMatrix<f64>,
    pub omega: DMatrix<f64>,
    /// `eta(|g|)` indexed by port distance `0..K`.
    pub eta_by_distance: Vec<f64>,
}

fn toeplitz(row: &[f64]) -> DMatrix<f64> {
    let n = row.len();
    DMatrix::from_fn(n, n, |i, j| row[i.abs_diff(j)])
}

/// Toeplitz `g` and `omega`. `eta` is evaluated at `|g|` once per distance.
pub fn build_port_correlation(params: &SystemParams) -> Result<PortCorrelation> {
    params.validate()?;
    if params.k < 2 {
        return Err(Error::SinglePort);
    }
    let g_row = (0..params.k)
        .map(|d| {
            if d == 0 {
                Ok(1.0)
            } else {
                jakes_at_distance(params, d)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    let eta_row = g_row
        .iter()
        .enumerate()
        .map(|(d, g)| {
            if d == 0 {
                Ok(1.0)
            } else {
                pearson_eta(g.abs(), params)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(PortCorrelation {
        g: toeplitz(&g_row),
        omega: toeplitz(&eta_row),
        eta_by_distance: eta_row,
    })
}

/// Gain threshold `sqrt((2^R - 1) sigma^2 / P_S)` below which the link is in outage.
pub fn outage_threshold(params: &SystemParams) -> f64 {
    ((2f64.powf(params.rate) - 1.0) * params.noise_power / params.tx_power).sqrt()
}
