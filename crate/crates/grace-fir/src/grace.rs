//! The Grace function `G(x, n, p)`, its Fourier transform and the
//! continuous-domain (m → ∞) frequency-response metrics.
//!
//! `G(x, n, p) = Gp(x, n) (1-x²)^{p-1/2}` for integer `p` in `[0, n-1]`.
//! The exponent `p` acts as an integrated window: larger `p` trades
//! transition-band steepness for stop-band attenuation, and the first
//! `z = n - p - 1` even derivatives of the transform vanish at zero
//! frequency, which is what keeps the pass band free of ripple.

use crate::chebyshev::grace_poly_reduced;
use crate::error::{Error, Result};
use crate::quad;
use std::cell::RefCell;
use std::f64::consts::PI;

/// dB per octave of a unit slope of `ln` magnitude per `ln` frequency:
/// `20 log10(2)`.
const DB_PER_OCTAVE_UNIT: f64 = 6.020599913279624;

/// The pair `(n, p)` defining a Grace function: polynomial order `n >= 1`
/// and window exponent `p` in `[0, n-1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GraceParams {
    n: u32,
    p: u32,
}

impl GraceParams {
    pub fn new(n: u32, p: u32) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidParams("n must be >= 1".into()));
        }
        if p > n - 1 {
            return Err(Error::InvalidParams(format!(
                "p = {p} outside [0, n-1] for n = {n}"
            )));
        }
        Ok(GraceParams { n, p })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    /// Number of zero-valued even transform derivatives at zero frequency,
    /// `z = n - p - 1`.
    pub fn zero_derivative_count(&self) -> u32 {
        self.n - self.p - 1
    }
}

impl std::fmt::Display for GraceParams {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(n = {}, p = {})", self.n, self.p)
    }
}

/// The Grace function `G(x, n, p)`.
///
/// Evaluated as `(1-x²)^{p+1/2} · [Gp(x,n)/(1-x²)]`, which is exactly zero
/// at `x = ±1` for every `p >= 0` (the factor `1-x²` inside the Grace
/// polynomial cancels the `-1/2` in the window exponent).
pub fn grace_fn(x: f64, params: GraceParams) -> f64 {
    assert!(
        x.abs() <= 1.0 + 1e-15,
        "abscissa {x} outside [-1, 1] beyond roundoff"
    );
    let x = x.clamp(-1.0, 1.0);
    let w = 1.0 - x * x;
    window_half_power(w, params.p) * grace_poly_reduced(w, params.n)
}

/// `w^{p + 1/2}` computed as `w^p sqrt(w)`.
fn window_half_power(w: f64, p: u32) -> f64 {
    w.powi(p as i32) * w.sqrt()
}

/// Normalization `a(n, p) = ∫ G dx = π/(2n)`, independent of `p`.
pub fn norm_a(params: GraceParams) -> f64 {
    PI / (2.0 * params.n as f64)
}

/// Normalization `b(n, p) = a⁻² ∫ G² dx`.
///
/// The integrand is written as `[w^{2p+3/2} v²] (1-x²)^{-1/2}` and the
/// node count doubled until two rules agree; the bracket vanishes to high
/// order at the endpoints so the rule converges quickly.
pub fn norm_b(params: GraceParams) -> f64 {
    let (n, p) = (params.n, params.p);
    let a = norm_a(params);
    let integral = quad::integrate_adaptive(n as usize + p as usize + 2, tolerance(n), |x| {
        let w = 1.0 - x * x;
        let v = grace_poly_reduced(w, n);
        w.powi(2 * p as i32 + 1) * w.sqrt() * v * v
    })
    .expect("norm_b quadrature converges for valid params");
    integral / (a * a)
}

/// Doubling tolerance, widened with `n` to sit above the O(n²ε) noise of
/// the polynomial recurrence.
fn tolerance(n: u32) -> f64 {
    f64::max(1e-13, n as f64 * 5e-16)
}

/// Raw moment `∫ G(x, n, p) x^{2k} dx`.
///
/// Zero (to quadrature accuracy) for `k <= z = n - p - 1`; the bracket
/// `Gp w^p x^{2k}` is a polynomial of degree `2(n+p+k)` so the fixed-size
/// rule is exact.
pub fn transform_moment(k: u32, params: GraceParams) -> f64 {
    assert!(k >= 1, "moment order k must be >= 1");
    let (n, p) = (params.n, params.p);
    let degree = 2 * (n + p + k) as usize;
    quad::integrate_exact(degree, |x| {
        let w = 1.0 - x * x;
        w.powi(p as i32 + 1) * grace_poly_reduced(w, n) * x.powi(2 * k as i32)
    })
}

struct Level {
    nodes: Vec<f64>,
    poly: Vec<f64>, // w^{p+1} v at each node
}

/// Cached transform evaluator used by `transform`, `transform_metrics` and
/// the table generators. The polynomial part of the integrand does not
/// depend on φ, so one table per node level serves every evaluation.
/// The transform normalizes by the raw quadrature of ∫ G dx so that
/// g(0) = 1 holds exactly.
pub(crate) struct TransformEval {
    n: u32,
    p: u32,
    b: f64,
    tol: f64,
    start_nodes: usize,
    a_raw: f64,
    levels: RefCell<Vec<Level>>,
}

impl TransformEval {
    pub(crate) fn new(params: GraceParams) -> Self {
        let mut eval = TransformEval {
            n: params.n,
            p: params.p,
            b: norm_b(params),
            tol: tolerance(params.n),
            start_nodes: ((params.n + params.p + 2) as usize).max(16),
            a_raw: 1.0,
            levels: RefCell::new(Vec::new()),
        };
        eval.a_raw = eval
            .quadrature(|_| 1.0)
            .expect("normalization quadrature converges");
        eval
    }

    /// Adaptive quadrature of `poly(x) * factor(x) * (1-x²)^{-1/2}`.
    fn quadrature(&self, factor: impl Fn(f64) -> f64) -> Result<f64> {
        let mut prev: Option<f64> = None;
        let mut last_delta = f64::INFINITY;
        for idx in 0..16 {
            self.grow_to(idx);
            let levels = self.levels.borrow();
            let level = &levels[idx];
            let count = level.nodes.len();
            let sum: f64 = level
                .nodes
                .iter()
                .zip(&level.poly)
                .map(|(&x, &p)| p * factor(x))
                .sum();
            let val = PI / count as f64 * sum;
            if let Some(p) = prev {
                last_delta = (val - p).abs();
                if last_delta <= self.tol * f64::max(1.0, val.abs()) {
                    return Ok(val);
                }
            }
            prev = Some(val);
        }
        Err(Error::QuadratureNoConvergence {
            nodes: self.start_nodes << 15,
            last_delta,
        })
    }

    fn grow_to(&self, idx: usize) {
        let mut levels = self.levels.borrow_mut();
        while levels.len() <= idx {
            let count = self.start_nodes << levels.len();
            let nodes = quad::nodes(count);
            let poly = nodes
                .iter()
                .map(|&x| {
                    let w = 1.0 - x * x;
                    w.powi(self.p as i32 + 1) * grace_poly_reduced(w, self.n)
                })
                .collect();
            levels.push(Level { nodes, poly });
        }
    }

    /// Normalized transform `g(φ)`.
    pub(crate) fn g(&self, phi: f64) -> f64 {
        let arg = PI * self.b * phi;
        self.quadrature(|x| (arg * x).cos())
            .expect("transform quadrature converges")
            / self.a_raw
    }

    /// Analytic derivative `dg/dφ`.
    pub(crate) fn g_prime(&self, phi: f64) -> f64 {
        let arg = PI * self.b * phi;
        let scale = PI * self.b;
        self.quadrature(|x| -scale * x * (arg * x).sin())
            .expect("transform quadrature converges")
            / self.a_raw
    }
}

/// Normalized Fourier transform `g(φ, n, p)` of the Grace function,
/// `g(φ) = a⁻¹ ∫ G(x) cos(π b φ x) dx` with `g(0) = 1` exactly.
pub fn transform(phi: f64, params: GraceParams) -> f64 {
    assert!(phi >= 0.0, "only φ >= 0 is exposed; g is even in φ");
    TransformEval::new(params).g(phi)
}

/// Frequency-response metrics of the continuous transform (the m → ∞
/// limit of the discrete filter).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransformMetrics {
    /// Transition-band rolloff in dB/octave, positive convention: the
    /// magnitude of d(20 log₁₀ g)/d(log₂ φ) at the reference frequency
    /// φ = 1 (where `lim m f_r = b` places `f_r`).
    pub rolloff_db_per_octave: f64,
    /// First stop-band sidelobe level in dB (negative).
    pub first_sidelobe_db: f64,
    /// Location of the first stop-band zero of `g`.
    pub first_stopband_zero_phi: f64,
}

pub fn transform_metrics(params: GraceParams) -> TransformMetrics {
    let eval = TransformEval::new(params);
    metrics_from_eval(&eval)
}

pub(crate) fn metrics_from_eval(eval: &TransformEval) -> TransformMetrics {
    // Rolloff: local log-log slope at the reference frequency φ = 1.
    let g1 = eval.g(1.0);
    debug_assert!(g1 > 0.0, "first zero of g before the reference frequency");
    let rolloff = -DB_PER_OCTAVE_UNIT * eval.g_prime(1.0) / g1;

    // First zero: march in steps of 0.01 and bisect the sign change.
    let step = 0.01;
    let mut prev = eval.g(0.0);
    let mut phi = step;
    let mut first_zero = None;
    while phi <= 64.0 {
        let cur = eval.g(phi);
        if (cur < 0.0) != (prev < 0.0) {
            first_zero = Some(bisect_zero(|t| eval.g(t), phi - step, phi));
            break;
        }
        prev = cur;
        phi += step;
    }
    let first_zero = first_zero.expect("transform of a valid Grace function has a zero");

    // Next zero bounds the first sidelobe interval.
    let mut phi = first_zero + step;
    let mut prev = eval.g(phi);
    let mut second_zero = None;
    while phi <= 128.0 {
        let cur = eval.g(phi + step);
        if (cur < 0.0) != (prev < 0.0) {
            second_zero = Some(bisect_zero(|t| eval.g(t), phi, phi + step));
            break;
        }
        prev = cur;
        phi += step;
    }
    let second_zero = second_zero.expect("transform has a second zero");

    let (_, peak) = golden_max(|t| eval.g(t).abs(), first_zero, second_zero);
    TransformMetrics {
        rolloff_db_per_octave: rolloff,
        first_sidelobe_db: 20.0 * peak.log10(),
        first_stopband_zero_phi: first_zero,
    }
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub(crate) fn bisect_zero(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo < 1e-13 * f64::max(1.0, mid.abs()) {
            return mid;
        }
        let fm = f(mid);
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Golden-section maximization of `f` on `[lo, hi]`.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    const R: f64 = 0.6180339887498949;
    let mut c = hi - R * (hi - lo);
    let mut d = lo + R * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..120 {
        if fc > fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - R * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + R * (hi - lo);
            fd = f(d);
        }
    }
    let mid = 0.5 * (lo + hi);
    (mid, f(mid))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u32, p: u32) -> GraceParams {
        GraceParams::new(n, p).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(GraceParams::new(0, 0).is_err());
        assert!(GraceParams::new(3, 3).is_err());
        assert!(GraceParams::new(3, 2).is_ok());
        assert_eq!(params(10, 3).zero_derivative_count(), 6);
    }

    #[test]
    fn grace_fn_special_points() {
        for (n, p) in [(1, 0), (5, 2), (12, 11)] {
            let pr = params(n, p);
            assert_eq!(grace_fn(1.0, pr), 0.0);
            assert_eq!(grace_fn(-1.0, pr), 0.0);
            assert_eq!(grace_fn(0.0, pr), 1.0);
        }
        // Gp(x,2) = (1-x²)(1-2x²): G(0.6,2,1) = 0.64·0.28·sqrt(0.64)
        assert!((grace_fn(0.6, params(2, 1)) - 0.64 * 0.28 * 0.8).abs() < 1e-15);
    }

    #[test]
    fn norm_a_closed_form_matches_quadrature() {
        for n in [1u32, 2, 7, 25, 100] {
            for p in [0, 1, n / 2, n - 1] {
                if p > n - 1 {
                    continue;
                }
                let pr = params(n, p);
                let quadrature = quad::integrate_exact(2 * (n + p) as usize, |x| {
                    let w = 1.0 - x * x;
                    w.powi(p as i32 + 1) * grace_poly_reduced(w, n)
                });
                assert!(
                    (quadrature - norm_a(pr)).abs() < 1e-12,
                    "n={n} p={p}: {quadrature} vs {}",
                    norm_a(pr)
                );
            }
        }
        assert!((norm_a(params(1, 0)) - PI / 2.0).abs() < 1e-16);
        assert!((norm_a(params(10, 3)) - PI / 20.0).abs() < 1e-16);
    }

    #[test]
    fn norm_b_against_limit_formula() {
        // b(n,p) ≈ (1/π)(2n - d(p)/π); d(0) = 1
        let b = norm_b(params(10, 0));
        let approx = (20.0 - 1.0 / PI) / PI;
        assert!((b - approx).abs() / b < 0.005, "b={b} approx={approx}");
        // positivity for the smallest case
        assert!(norm_b(params(1, 0)) > 0.0);
        // the approximation tightens from (10,0) to (100,10)
        let d10 = {
            let d: f64 = (1..=20).map(|j| (2 * j) as f64 / (2 * j - 1) as f64).product();
            d
        };
        let b2 = norm_b(params(100, 10));
        let approx2 = (200.0 - d10 / PI) / PI;
        assert!((b2 - approx2).abs() / b2 < (b - approx).abs() / b);
    }

    #[test]
    fn transform_normalization_and_monotonicity() {
        let pr = params(12, 0);
        assert_eq!(transform(0.0, pr), 1.0);
        let eval = TransformEval::new(pr);
        // monotone decreasing before the first zero; near φ = 0 the pass
        // band is flat to machine precision (the first z = 11 even
        // derivatives vanish), so allow quadrature-level jitter
        let mut prev = 1.0;
        let mut phi = 0.02;
        while phi < 1.0 {
            let cur = eval.g(phi);
            assert!(cur < prev + 1e-13, "phi={phi}");
            prev = cur;
            phi += 0.02;
        }
    }

    #[test]
    fn transform_energy_is_normalized() {
        // ∫_0^∞ g² dφ = 1; integrate to φ = 8 by composite Simpson
        let eval = TransformEval::new(params(6, 1));
        let n = 800;
        let h = 8.0 / n as f64;
        let mut sum = 0.0;
        for k in 0..=n {
            let w = if k == 0 || k == n {
                1.0
            } else if k % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let g = eval.g(k as f64 * h);
            sum += w * g * g;
        }
        let energy = sum * h / 3.0;
        assert!((energy - 1.0).abs() < 1e-3, "energy={energy}");
    }

    #[test]
    fn moment_structure() {
        // zero for k <= z, nonzero at k = z+1
        let pr = params(10, 0);
        assert!(transform_moment(1, pr).abs() < 1e-12);
        for k in 1..=pr.zero_derivative_count() {
            assert!(transform_moment(k, pr).abs() < 1e-11, "k={k}");
        }
        assert!(transform_moment(pr.zero_derivative_count() + 1, pr).abs() > 1e-8);
        // z = 0 case: first moment already nonzero
        let pr = params(2, 1);
        assert!(transform_moment(1, pr).abs() > 1e-8);
    }

    #[test]
    fn transform_derivative_matches_finite_difference() {
        let eval = TransformEval::new(params(8, 2));
        for phi in [0.3, 0.9, 1.1] {
            let h = 1e-6;
            let fd = (eval.g(phi + h) - eval.g(phi - h)) / (2.0 * h);
            assert!(
                (eval.g_prime(phi) - fd).abs() < 1e-7,
                "phi={phi}: {} vs {}",
                eval.g_prime(phi),
                fd
            );
        }
    }

    #[test]
    fn sidelobe_depth_grows_with_n_at_fixed_ratio() {
        // Along a fixed p/n = 0.5 column the first sidelobe deepens with n.
        let s10 = transform_metrics(params(10, 5)).first_sidelobe_db;
        let s20 = transform_metrics(params(20, 10)).first_sidelobe_db;
        let s30 = transform_metrics(params(30, 15)).first_sidelobe_db;
        assert!(s20 < s10 && s30 < s20, "{s10} {s20} {s30}");
    }
}
