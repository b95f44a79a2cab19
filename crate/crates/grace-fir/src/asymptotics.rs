//! Closed-form design predictions: the limiting `m·f_r` and `m·f_c`
//! products, the even-derivative magnitude series with its Dirichlet
//! sums, and the direct design search mapping target metrics to `(m, n, p)`.

use crate::error::{Error, Result};
use crate::filter::FilterSpec;
use crate::grace::{metrics_from_eval, GraceParams, TransformEval, TransformMetrics};
use std::f64::consts::PI;

/// `d(p) = 1` for `p = 0`, else `∏_{j=1}^{2p} 2j/(2j-1)`.
pub fn d_of_p(p: u32) -> f64 {
    let mut product = 1.0;
    for j in 1..=2 * p as u64 {
        product *= 2.0 * j as f64 / (2.0 * j as f64 - 1.0);
    }
    product
}

/// Limiting reference-frequency product `lim m·f_r = b(n,p) ≈ (1/π)[2n - d(p)/π]`.
pub fn limiting_mfr(params: GraceParams) -> f64 {
    (2.0 * params.n() as f64 - d_of_p(params.p()) / PI) / PI
}

/// Cutoff product `m·f_c ≈ (1/π)[2n - √((8p+1)/(4π))]`.
pub fn cutoff_product(params: GraceParams) -> f64 {
    let p = params.p() as f64;
    (2.0 * params.n() as f64 - ((8.0 * p + 1.0) / (4.0 * PI)).sqrt()) / PI
}

/// The Dirichlet series appearing in the derivative-magnitude formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// Riemann zeta: all coefficients 1.
    Zeta,
    /// Dirichlet inverse of the Jordan totient J₁ (OEIS A023900):
    /// multiplicative with value `1 - p` at every prime power `p^e`.
    J1Inverse,
    /// Dirichlet inverse of J₂ (OEIS A046970): `1 - p²` at `p^e`.
    J2Inverse,
}

/// Coefficient `i` of the chosen series, by multiplicativity over the
/// prime factorization.
pub fn dirichlet_coefficient(kind: SeriesKind, i: u64) -> f64 {
    assert!(i >= 1, "index must be >= 1");
    match kind {
        SeriesKind::Zeta => 1.0,
        SeriesKind::J1Inverse => factor_product(i, |p| 1.0 - p as f64),
        SeriesKind::J2Inverse => factor_product(i, |p| 1.0 - (p as f64) * (p as f64)),
    }
}

fn factor_product(mut i: u64, prime_value: impl Fn(u64) -> f64) -> f64 {
    let mut product = 1.0;
    let mut p = 2;
    while p * p <= i {
        if i % p == 0 {
            product *= prime_value(p);
            while i % p == 0 {
                i /= p;
            }
        }
        p += 1;
    }
    if i > 1 {
        product *= prime_value(i);
    }
    product
}

/// Riemann zeta by Euler-Maclaurin with an integral tail; absolute error
/// well below 1e-12 for `s > 1`.
fn zeta(s: f64) -> f64 {
    debug_assert!(s > 1.0);
    let n = 128u32;
    let nf = n as f64;
    let direct: f64 = (1..=n).map(|k| (k as f64).powf(-s)).sum();
    direct + nf.powf(1.0 - s) / (s - 1.0) - 0.5 * nf.powf(-s) + s * nf.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * nf.powf(-s - 3.0) / 720.0
}

/// `Σ coef(kind, i) / i^s` for `s > 1`.
///
/// The zeta kind is summed directly with an Euler-Maclaurin tail. The
/// totient-inverse kinds use their generating identities
/// `Σ J₁⁻¹(i)/i^s = ζ(s)/ζ(s-1)` (s > 2) and `Σ J₂⁻¹(i)/i^s = ζ(s)/ζ(s-2)`
/// (s > 3): the raw series converge too slowly for a tail bound of 1e-12
/// at the arguments used here, while the identities are exact. Tests
/// validate them against brute-force partial sums and the convolution
/// identity.
pub fn dirichlet_sum(kind: SeriesKind, s: f64) -> f64 {
    assert!(s > 1.0, "series requires s > 1");
    match kind {
        SeriesKind::Zeta => zeta(s),
        SeriesKind::J1Inverse => {
            assert!(s > 2.0, "J1 inverse series requires s > 2");
            zeta(s) / zeta(s - 1.0)
        }
        SeriesKind::J2Inverse => {
            assert!(s > 3.0, "J2 inverse series requires s > 3");
            zeta(s) / zeta(s - 2.0)
        }
    }
}

/// Predicted value of the `k`-th scaled even derivative of the discrete
/// response at `f = 0` for half-length `m`:
///
/// ```text
/// (-1)^k α(n,p) / m^{p+3/2} · [1 - β(n,p,k)/m - γ(n,p,k)/m²]
/// ```
///
/// an asymptotic series in `1/m` (accurate once `m` dominates the `β`, `γ`
/// corrections, which grow like `n²`). The `(-1)^k` factor aligns the
/// series with the sign convention of [`crate::filter::even_derivatives`].
pub fn derivative_prediction(m: usize, params: GraceParams, k: u32) -> f64 {
    assert!(m >= 2, "m must be >= 2");
    assert!(
        k >= 1 && k <= params.zero_derivative_count(),
        "k must be in [1, z]"
    );
    let n = params.n() as f64;
    let p = params.p();
    let pf = p as f64;
    let kf = k as f64;
    let mf = m as f64;

    let sign = if (params.n() + (p - p % 2) / 2) % 2 == 0 {
        1.0
    } else {
        -1.0
    };
    let half_product: f64 = (0..=p).map(|j| (j as f64 + 0.5) / PI).product();
    let alpha = sign * 8f64.sqrt() / PI * n * dirichlet_sum(SeriesKind::Zeta, pf + 1.5)
        * half_product;

    let beta_sign = if p % 2 == 0 { 1.0 } else { -1.0 };
    let beta = beta_sign * (pf + 1.5) / (12.0 * PI)
        * dirichlet_sum(SeriesKind::J1Inverse, pf + 2.5)
        * (8.0 * n * n + 3.0 * pf + 12.0 * (kf - 1.0) + 6.0 - 0.5);

    let gamma = (pf + 1.5) * (pf + 2.5) / (480.0 * PI * PI)
        * dirichlet_sum(SeriesKind::J2Inverse, pf + 3.5)
        * (8.0 * n * n * (8.0 * n * n + 10.0 * pf + 40.0 * kf - 25.0)
            + 5.0 * pf * (3.0 * pf + 24.0 * kf - 16.0)
            + 20.0 * (kf - 1.0) * (12.0 * kf - 7.0)
            - 8.0
            + 0.25);

    let k_sign = if k % 2 == 0 { 1.0 } else { -1.0 };
    k_sign * alpha / mf.powf(pf + 1.5) * (1.0 - beta / mf - gamma / (mf * mf))
}

/// Design targets: cutoff on the Nyquist-1 scale, rolloff in dB/octave
/// (positive) and first-sidelobe level in dB (negative).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesignTargets {
    pub f_c: f64,
    pub rolloff: f64,
    pub sidelobe: f64,
}

impl DesignTargets {
    pub fn new(f_c: f64, rolloff: f64, sidelobe: f64) -> Result<Self> {
        if !(f_c > 0.0 && f_c < 1.0) {
            return Err(Error::InvalidParams(format!(
                "cutoff {f_c} outside (0, 1)"
            )));
        }
        if !(rolloff > 0.0) {
            return Err(Error::InvalidParams(format!(
                "rolloff {rolloff} must be positive (dB/octave)"
            )));
        }
        if !(sidelobe < 0.0) {
            return Err(Error::InvalidParams(format!(
                "sidelobe {sidelobe} must be negative (dB)"
            )));
        }
        Ok(DesignTargets {
            f_c,
            rolloff,
            sidelobe,
        })
    }

    /// Soft warnings for targets outside the envelope the search is
    /// intended for (rolloff 40..120 dB/octave, sidelobe -200..-40 dB).
    pub fn envelope_warnings(&self) -> Vec<String> {
        let mut warnings = Vec::new();
        if !(40.0..=120.0).contains(&self.rolloff) {
            warnings.push(format!(
                "rolloff {} dB/octave outside the intended range [40, 120]",
                self.rolloff
            ));
        }
        if !(-200.0..=-40.0).contains(&self.sidelobe) {
            warnings.push(format!(
                "sidelobe {} dB outside the intended range [-200, -40]",
                self.sidelobe
            ));
        }
        warnings
    }
}

/// Result of a design search.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignResult {
    pub spec: FilterSpec,
    pub predicted: TransformMetrics,
    /// `m · f_c` implied by the rounded half-length.
    pub achieved_mfc: f64,
}

const SEARCH_N_MAX: u32 = 1000;

/// Find the smallest `(n, p)` whose limiting metrics meet the targets,
/// then size `m` from the cutoff product.
///
/// For fixed `n` the sidelobe deepens and the rolloff flattens as `p`
/// grows, so the best candidate is the smallest `p` meeting the sidelobe
/// target, feasible iff its rolloff still meets the rolloff target; both
/// searches exploit that monotonicity. `n` is scanned geometrically and
/// refined by bisection on feasibility.
pub fn design_search(targets: DesignTargets) -> Result<DesignResult> {
    let feasible = |n: u32| -> Option<(u32, TransformMetrics)> {
        // smallest p with sidelobe <= target, by binary search
        let sidelobe_at = |p: u32| {
            let eval = TransformEval::new(GraceParams::new(n, p).unwrap());
            metrics_from_eval(&eval)
        };
        let top = sidelobe_at(n - 1);
        if top.first_sidelobe_db > targets.sidelobe {
            return None; // even the deepest window misses the sidelobe target
        }
        let (mut lo, mut hi) = (0u32, n - 1); // hi always feasible for sidelobe
        let mut hi_metrics = top;
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            let metrics = sidelobe_at(mid);
            if metrics.first_sidelobe_db <= targets.sidelobe {
                hi = mid;
                hi_metrics = metrics;
            } else {
                lo = mid + 1;
            }
        }
        (hi_metrics.rolloff_db_per_octave >= targets.rolloff).then_some((hi, hi_metrics))
    };

    // geometric scan for the first feasible n
    let mut n_lo = 1u32; // largest known-infeasible
    let mut found: Option<(u32, u32, TransformMetrics)> = None;
    let mut n = 2u32;
    while n <= SEARCH_N_MAX {
        if let Some((p, metrics)) = feasible(n) {
            found = Some((n, p, metrics));
            break;
        }
        n_lo = n;
        n = ((n as f64 * std::f64::consts::SQRT_2).ceil() as u32)
            .max(n + 1)
            .min(SEARCH_N_MAX);
        if n == n_lo {
            break;
        }
    }
    let (mut n_hi, mut best_p, mut best_metrics) = found.ok_or_else(|| {
        let edge = feasible_report(SEARCH_N_MAX, targets);
        Error::Infeasible(format!(
            "no (n, p) with n <= {SEARCH_N_MAX} meets rolloff >= {} dB/octave and \
             sidelobe <= {} dB; {edge}",
            targets.rolloff, targets.sidelobe
        ))
    })?;

    // bisect down to the smallest feasible n
    while n_hi - n_lo > 1 {
        let mid = n_lo + (n_hi - n_lo) / 2;
        match feasible(mid) {
            Some((p, metrics)) => {
                n_hi = mid;
                best_p = p;
                best_metrics = metrics;
            }
            None => n_lo = mid,
        }
    }

    let params = GraceParams::new(n_hi, best_p).unwrap();
    let mfc = cutoff_product(params);
    // round half up, and keep m large enough to resolve the design
    let m = ((mfc / targets.f_c + 0.5).floor() as usize).max(2 * n_hi as usize).max(2);
    let spec = FilterSpec::new(m, params)?;
    Ok(DesignResult {
        spec,
        predicted: best_metrics,
        achieved_mfc: m as f64 * targets.f_c,
    })
}

fn feasible_report(n: u32, targets: DesignTargets) -> String {
    let steep = metrics_from_eval(&TransformEval::new(GraceParams::new(n, 0).unwrap()));
    let deep = metrics_from_eval(&TransformEval::new(GraceParams::new(n, n - 1).unwrap()));
    format!(
        "at n = {n} the achievable envelope is rolloff up to {:.1} dB/octave (p = 0, \
         sidelobe {:.1} dB) and sidelobe down to {:.1} dB (p = n-1, rolloff {:.1} dB/octave); \
         requested ({}, {})",
        steep.rolloff_db_per_octave,
        steep.first_sidelobe_db,
        deep.first_sidelobe_db,
        deep.rolloff_db_per_octave,
        targets.rolloff,
        targets.sidelobe
    )
}
