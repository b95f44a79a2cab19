//! Gauss-Chebyshev quadrature on `[-1, 1]` with the first-kind weight.
//!
//! Every integral in this crate is written as `∫ f(x) (1-x²)^{-1/2} dx`
//! where `f` absorbs the rest of the integrand. The N-node rule
//!
//! ```text
//! ∫ f(x) (1-x²)^{-1/2} dx  ≈  (π/N) Σ f(x_k),   x_k = cos((2k-1)π/2N)
//! ```
//!
//! is exact for polynomial `f` of degree `2N - 1`, which handles the
//! endpoint singularity of the Grace function analytically.

use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Hard cap on the adaptive node count.
const MAX_NODES: usize = 1 << 20;

/// First-kind Gauss-Chebyshev nodes for an N-point rule.
pub(crate) fn nodes(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|k| ((2 * k - 1) as f64 * PI / (2 * n) as f64).cos())
        .collect()
}

/// Integrate `f(x) (1-x²)^{-1/2}` exactly, given that `f` is a polynomial
/// of degree at most `poly_degree`.
pub(crate) fn integrate_exact(poly_degree: usize, f: impl Fn(f64) -> f64) -> f64 {
    let n = poly_degree / 2 + 1;
    let sum: f64 = nodes(n).iter().map(|&x| f(x)).sum();
    PI / n as f64 * sum
}

/// Integrate `f(x) (1-x²)^{-1/2}` by doubling the node count until two
/// successive results agree within `tol * max(1, |value|)`.
pub(crate) fn integrate_adaptive(
    start_nodes: usize,
    tol: f64,
    f: impl Fn(f64) -> f64,
) -> Result<f64> {
    let mut n = start_nodes.max(16);
    let mut prev = None;
    let mut last_delta = f64::INFINITY;
    while n <= MAX_NODES {
        let sum: f64 = nodes(n).iter().map(|&x| f(x)).sum();
        let val = PI / n as f64 * sum;
        if let Some(p) = prev {
            last_delta = (val - p as f64).abs();
            if last_delta <= tol * f64::max(1.0, val.abs()) {
                return Ok(val);
            }
        }
        prev = Some(val);
        n *= 2;
    }
    Err(Error::QuadratureNoConvergence {
        nodes: n / 2,
        last_delta,
    })
}
