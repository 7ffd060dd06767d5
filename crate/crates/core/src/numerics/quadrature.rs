//! Quadrature rules: Gauss–Chebyshev (first kind) mapped onto finite
//! intervals, Gauss–Hermite for Gaussian expectations, and an adaptive
//! Gauss–Kronrod integrator for the smooth-but-peaked kernels.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use std::f64::consts::PI;

/// Nodes and weights of a fixed-order rule on its canonical interval.
///
/// For Gauss–Chebyshev the weights are the companion factors `sqrt(1 - x^2)`
/// that turn the Chebyshev-weighted rule into a plain integral; for
/// Gauss–Hermite they are the usual weights for `exp(-x^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub order: usize,
}

/// Gauss–Chebyshev nodes `cos((2j + 1) pi / (2n))`, `j = 0..n`, with the
/// factor `sqrt(1 - x_j^2)` as weight. With `n = U + 1` this is the rule
/// indexed by `j = 0..=U`.
pub fn gauss_chebyshev_nodes(order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::domain("gauss_chebyshev_nodes", "order must be >= 1"));
    }
    let n = order as f64;
    let nodes: Vec<f64> = (0..order)
        .map(|j| ((2 * j + 1) as f64 * PI / (2.0 * n)).cos())
        .collect();
    let weights = (0..order)
        .map(|j| ((2 * j + 1) as f64 * PI / (2.0 * n)).sin())
        .collect();
    Ok(QuadratureRule {
        nodes,
        weights,
        order,
    })
}

impl QuadratureRule {
    /// `int_a^b f(x) dx` with a Gauss–Chebyshev rule mapped linearly onto
    /// `[a, b]`. Summation runs in ascending node index.
    pub fn integrate_chebyshev<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        half * PI / self.order as f64 * acc
    }

    /// `E[f(Z)]` for a standard normal `Z` using a Gauss–Hermite rule.
    pub fn expect_standard_normal<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(std::f64::consts::SQRT_2 * x);
        }
        acc / PI.sqrt()
    }
}

/// Gauss–Hermite rule for weight `exp(-x^2)`.
///
/// Nodes start from the eigenvalues of the Jacobi matrix (Golub–Welsch) and
/// are polished by Newton steps on the orthonormal Hermite recurrence, which
/// also yields the weights `2 / H'_n(x)^2`. Nodes come out in descending order.
pub fn gauss_hermite(order: usize) -> Result<QuadratureRule> {
    if order == 0 {
        return Err(Error::domain("gauss_hermite", "order must be >= 1"));
    }
    let n = order;
    let jacobi = DMatrix::from_fn(n, n, |i, j| {
        if i.abs_diff(j) == 1 {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let mut roots: Vec<f64> = SymmetricEigen::new(jacobi)
        .eigenvalues
        .iter()
        .copied()
        .collect();
    roots.sort_by(|a, b| b.total_cmp(a));
    let pim4 = PI.powf(-0.25);
    let nf = n as f64;
    // orthonormal recurrence: returns (p_n(z), sqrt(2n) p_{n-1}(z))
    let evaluate = |z: f64| {
        let mut p1 = pim4;
        let mut p2 = 0.0;
        for j in 0..n {
            let p3 = p2;
            p2 = p1;
            let jf = j as f64;
            p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
        }
        (p1, (2.0 * nf).sqrt() * p2)
    };
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &root in &roots {
        let mut z = root;
        for _ in 0..3 {
            let (p, dp) = evaluate(z);
            if dp == 0.0 || !dp.is_finite() {
                break;
            }
            let step = p / dp;
            z -= step;
            if step.abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        let (_, dp) = evaluate(z);
        nodes.push(z);
        weights.push(2.0 / (dp * dp));
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        order,
    })
}

const KRONROD_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const KRONROD_WEIGHTS: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for KRONROD_NODES[1], [3], [5], [7].
const GAUSS7_WEIGHTS: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn kronrod15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let center = f(mid);
    let mut kronrod = KRONROD_WEIGHTS[7] * center;
    let mut gauss = GAUSS7_WEIGHTS[3] * center;
    for i in 0..7 {
        let dx = half * KRONROD_NODES[i];
        let pair = f(mid - dx) + f(mid + dx);
        kronrod += KRONROD_WEIGHTS[i] * pair;
        if i % 2 == 1 {
            gauss += GAUSS7_WEIGHTS[i / 2] * pair;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

/// Globally adaptive G7–K15 integration of `f` over the breakpoint-separated
/// pieces of `[points[0], points[last]]`.
///
/// Stops when the summed error estimate is below `max(abs_tol, rel_tol * |I|)`
/// or after `max_intervals` subdivisions, whichever comes first.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    points: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> f64 {
    struct Piece {
        a: f64,
        b: f64,
        value: f64,
        error: f64,
    }
    let mut pieces: Vec<Piece> = points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| {
            let (value, error) = kronrod15(&mut f, w[0], w[1]);
            Piece {
                a: w[0],
                b: w[1],
                value,
                error,
            }
        })
        .collect();
    while pieces.len() < max_intervals {
        let total: f64 = pieces.iter().map(|p| p.value).sum();
        let error: f64 = pieces.iter().map(|p| p.error).sum();
        if error <= abs_tol.max(rel_tol * total.abs()) {
            break;
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i);
        let Some(worst) = worst else { break };
        let piece = pieces.swap_remove(worst);
        let mid = 0.5 * (piece.a + piece.b);
        for (a, b) in [(piece.a, mid), (mid, piece.b)] {
            let (value, error) = kronrod15(&mut f, a, b);
            pieces.push(Piece { a, b, value, error });
        }
    }
    pieces.sort_by(|x, y| x.a.total_cmp(&y.a));
    pieces.iter().map(|p| p.value).sum()
}
