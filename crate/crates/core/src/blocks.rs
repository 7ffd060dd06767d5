//! Block-correlation approximation of the port correlation matrix.
//!
//! Ports are split into `D` contiguous groups. Inside group `d` every pair
//! has correlation `rho_d`; across groups every pair has the floor
//! correlation `rho0`. The group coefficients are chosen so that the sorted
//! spectrum of the block matrix is as close as possible (Euclidean distance)
//! to the spectrum of the true matrix.
//!
//! The match can be done on the Pearson matrix of the gains directly, or on
//! the Jakes matrix of the underlying channels, with each fitted `mu_d` then
//! mapped through `eta`.

use crate::channel::{build_port_correlation, pearson_eta, PortCorrelation, SystemParams};
use crate::error::{Error, Result};
use crate::numerics::symmetric_eigenvalues;
use nalgebra::DMatrix;

/// Largest number of blocks tried by [`fit_blocks`].
pub const MAX_BLOCKS: usize = 8;
const MAX_SWEEPS: usize = 50;
const SWEEP_IMPROVEMENT: f64 = 1e-8;
const TIE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockStructure {
    /// Block sizes `L_1..L_D`, summing to `K`.
    pub sizes: Vec<usize>,
    /// Intra-block coefficients, each in `[rho0, 1]`.
    pub rho: Vec<f64>,
    /// Inter-block coefficient.
    pub rho0: f64,
    /// Spectral distance to the matrix the structure was fitted to.
    pub fit_error: f64,
}

impl BlockStructure {
    pub fn num_blocks(&self) -> usize {
        self.sizes.len()
    }

    pub fn num_ports(&self) -> usize {
        self.sizes.iter().sum()
    }

    /// The one-port structure: a single block of size one.
    pub fn single_port(rho0: f64) -> Self {
        BlockStructure {
            sizes: vec![1],
            rho: vec![rho0],
            rho0,
            fit_error: 0.0,
        }
    }

    /// Port-weighted mean of the intra-block coefficients.
    pub fn mean_intra_rho(&self) -> f64 {
        let k = self.num_ports() as f64;
        self.sizes
            .iter()
            .zip(&self.rho)
            .map(|(&l, r)| l as f64 * r)
            .sum::<f64>()
            / k
    }

    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.sizes.len() != self.rho.len() {
            return Err(Error::Contract(format!(
                "block structure has {} sizes and {} coefficients",
                self.sizes.len(),
                self.rho.len()
            )));
        }
        if self.sizes.contains(&0) {
            return Err(Error::Contract("empty block in structure".into()));
        }
        for &r in &self.rho {
            if !(r >= self.rho0 - 1e-12 && r <= 1.0 + 1e-12) {
                return Err(Error::Contract(format!(
                    "intra-block coefficient {r} outside [{}, 1]",
                    self.rho0
                )));
            }
        }
        Ok(())
    }
}

/// Sizes of `d` contiguous blocks covering `k` ports, differing by at most
/// one; the leading blocks take the remainder.
pub fn equal_partition(k: usize, d: usize) -> Vec<usize> {
    let base = k / d;
    let extra = k % d;
    (0..d).map(|i| base + usize::from(i < extra)).collect()
}

/// Dense block-correlation matrix of a structure.
pub fn assemble_block_matrix(structure: &BlockStructure) -> DMatrix<f64> {
    let k = structure.num_ports();
    let mut owner = Vec::with_capacity(k);
    for (d, &l) in structure.sizes.iter().enumerate() {
        owner.extend(std::iter::repeat_n(d, l));
    }
    DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            1.0
        } else if owner[i] == owner[j] {
            structure.rho[owner[i]]
        } else {
            structure.rho0
        }
    })
}

/// Ascending spectrum of the block matrix without forming it: `1 - rho_d`
/// with multiplicity `L_d - 1`, plus the spectrum of the `D x D` matrix
/// acting on block-constant vectors.
pub fn block_eigenvalues(structure: &BlockStructure) -> Vec<f64> {
    let d = structure.num_blocks();
    let mut values = Vec::with_capacity(structure.num_ports());
    for (&l, &r) in structure.sizes.iter().zip(&structure.rho) {
        values.extend(std::iter::repeat_n(1.0 - r, l - 1));
    }
    let reduced = DMatrix::from_fn(d, d, |i, j| {
        let (li, lj) = (structure.sizes[i] as f64, structure.sizes[j] as f64);
        if i == j {
            1.0 + (li - 1.0) * structure.rho[i]
        } else {
            structure.rho0 * (li * lj).sqrt()
        }
    });
    values.extend(symmetric_eigenvalues(&reduced));
    values.sort_by(f64::total_cmp);
    values
}

fn spectral_distance(target: &[f64], structure: &BlockStructure) -> f64 {
    block_eigenvalues(structure)
        .iter()
        .zip(target)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

fn golden_section<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > 1e-11 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    // endpoints matter: the clamp bounds are legitimate optima
    [(a, f(a)), (b, f(b)), (c, fc), (d, fd)]
        .into_iter()
        .min_by(|x, y| x.1.total_cmp(&y.1))
        .unwrap_or((lo, f64::INFINITY))
}

/// Best structure with exactly `d` contiguous equal-as-possible blocks.
pub fn fit_blocks_with_count(omega: &DMatrix<f64>, rho0: f64, d: usize) -> Result<BlockStructure> {
    let k = omega.nrows();
    if k == 0 || omega.ncols() != k {
        return Err(Error::Contract(
            "correlation matrix must be square and non-empty".into(),
        ));
    }
    if d == 0 || d > k {
        return Err(Error::Contract(format!(
            "cannot split {k} ports into {d} blocks"
        )));
    }
    let target = symmetric_eigenvalues(omega);
    let sizes = equal_partition(k, d);
    let mut start = 0;
    let mut rho = Vec::with_capacity(d);
    for &l in &sizes {
        let mut sum = 0.0;
        let mut pairs = 0usize;
        for i in start..start + l {
            for j in i + 1..start + l {
                sum += omega[(i, j)];
                pairs += 1;
            }
        }
        let init = if pairs == 0 { rho0 } else { sum / pairs as f64 };
        rho.push(init.clamp(rho0, 1.0));
        start += l;
    }
    let mut structure = BlockStructure {
        sizes,
        rho,
        rho0,
        fit_error: 0.0,
    };
    let mut best = spectral_distance(&target, &structure);
    for _ in 0..MAX_SWEEPS {
        let before = best;
        for block in 0..d {
            if structure.sizes[block] < 2 {
                continue;
            }
            let mut trial = structure.clone();
            let (x, fx) = golden_section(
                |x| {
                    trial.rho[block] = x;
                    spectral_distance(&target, &trial)
                },
                rho0,
                1.0,
            );
            if fx < best {
                structure.rho[block] = x;
                best = fx;
            }
        }
        if before - best < SWEEP_IMPROVEMENT {
            break;
        }
    }
    structure.fit_error = best;
    Ok(structure)
}

/// Fit with a given inter-block floor, trying `D = 1..=min(K, 8)`; the
/// smallest `D` wins ties.
pub fn fit_blocks_with_floor(omega: &DMatrix<f64>, rho0: f64) -> Result<BlockStructure> {
    let k = omega.nrows();
    let mut best: Option<BlockStructure> = None;
    for d in 1..=k.min(MAX_BLOCKS) {
        let candidate = fit_blocks_with_count(omega, rho0, d)?;
        let better = match &best {
            None => true,
            Some(b) => candidate.fit_error < b.fit_error - TIE_TOLERANCE,
        };
        if better {
            best = Some(candidate);
        }
    }
    best.ok_or_else(|| Error::Contract("empty correlation matrix".into()))
}

/// Fit the block model to the Pearson matrix of a scenario; the floor is
/// `eta(0)` of the same scenario.
pub fn fit_blocks(omega: &DMatrix<f64>, params: &SystemParams) -> Result<BlockStructure> {
    let rho0 = pearson_eta(0.0, params)?;
    fit_blocks_with_floor(omega, rho0)
}

/// Matrix the block spectrum is matched against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitDomain {
    /// Fit `mu_d` on the Jakes matrix with zero inter-block correlation,
    /// then set `rho_d = eta(mu_d)`.
    #[default]
    Jakes,
    /// Fit `rho_d` on the Pearson matrix with floor `eta(0)`.
    Pearson,
}

impl FitDomain {
    pub fn tag(self) -> &'static str {
        match self {
            FitDomain::Jakes => "jakes",
            FitDomain::Pearson => "pearson",
        }
    }
}

impl std::fmt::Display for FitDomain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for FitDomain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "jakes" | "g" => Ok(FitDomain::Jakes),
            "pearson" | "omega" => Ok(FitDomain::Pearson),
            other => Err(Error::Usage(format!(
                "unknown fit domain `{other}` (expected jakes or pearson)"
            ))),
        }
    }
}

/// Spectral distance between `omega` and the block matrix of `structure`.
pub fn structure_distance(omega: &DMatrix<f64>, structure: &BlockStructure) -> f64 {
    spectral_distance(&symmetric_eigenvalues(omega), structure)
}

/// Fit on the Jakes matrix and map each block through `eta`. The returned
/// `fit_error` is measured against the Pearson matrix, like [`fit_blocks`].
pub fn fit_blocks_jakes(corr: &PortCorrelation, params: &SystemParams) -> Result<BlockStructure> {
    let rho0 = pearson_eta(0.0, params)?;
    let g_fit = fit_blocks_with_floor(&corr.g, 0.0)?;
    let rho = g_fit
        .rho
        .iter()
        .map(|&mu| Ok(pearson_eta(mu, params)?.clamp(rho0, 1.0)))
        .collect::<Result<Vec<f64>>>()?;
    let mut structure = BlockStructure {
        sizes: g_fit.sizes,
        rho,
        rho0,
        fit_error: 0.0,
    };
    structure.fit_error = structure_distance(&corr.omega, &structure);
    Ok(structure)
}

/// Fitted structure for a scenario; one port gives the trivial structure.
pub fn fit_port_blocks(params: &SystemParams, domain: FitDomain) -> Result<BlockStructure> {
    params.validate()?;
    if params.k == 1 {
        return Ok(BlockStructure::single_port(pearson_eta(0.0, params)?));
    }
    let corr = build_port_correlation(params)?;
    match domain {
        FitDomain::Jakes => fit_blocks_jakes(&corr, params),
        FitDomain::Pearson => fit_blocks(&corr.omega, params),
    }
}
