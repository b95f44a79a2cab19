//! Discretization compensation: the minimum-norm tap adjustment that
//! zeroes the first `z` even response derivatives at zero frequency.
//!
//! Sampling the Grace function introduces pass-band ripple that the
//! continuous transform does not have. The adjustment solves the
//! under-determined system `A Δc = B c` (derivative constraints plus
//! `Σ Δc = 0`) in the weighted minimum-norm sense
//! `Δc = W Aᵀ (A W Aᵀ)⁻¹ B c`. The Gram matrix is preconditioned with
//! even-order Chebyshev U coefficients — never materialized; the
//! preconditioned design matrix is simply `U_{2(j-1)}(x_i) √W_ii` — and
//! factored by SVD so that the largest singular-value inverses can be
//! zeroed (`q`) when the solve runs out of double-precision rank.

use crate::chebyshev::cheb_u_even;
use crate::error::{Error, Result};
use crate::filter::{
    coefficients, even_derivatives, ripple_scan, CoefficientVector, FilterSpec, RippleReport,
    STOPBAND_SLACK,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::f64::consts::PI;

/// Diagonal weight `W_ii = (2/mπ) √(1 - x_i²)`, zero at the endpoints so
/// the endpoint taps are never adjusted.
pub fn weight(i: isize, m: usize) -> f64 {
    assert!(i.unsigned_abs() <= m, "index {i} outside [-m, m]");
    let x = i as f64 / m as f64;
    2.0 / (m as f64 * PI) * (1.0 - x * x).max(0.0).sqrt()
}

/// The transposed, preconditioned, weighted design matrix
/// `M[i][j] = U_{2(j-1)}(x_i) √W_ii`, with `2m+1` rows and `z+1` columns.
#[derive(Debug, Clone)]
pub struct DesignMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>, // row-major
}

impl DesignMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }
}

/// Build the design matrix for half-length `m` and `z` derivative
/// constraints. Chebyshev values are evaluated once per `|i|` and
/// mirrored, so paired rows are bit-identical.
pub fn build_design_matrix(m: usize, z: usize) -> DesignMatrix {
    assert!(z + 1 <= 2 * m + 1, "more constraints than taps");
    let rows = 2 * m + 1;
    let cols = z + 1;
    let mut data = vec![0.0; rows * cols];
    for i in 0..=m {
        let u = cheb_u_even(i as f64 / m as f64, z);
        let rw = weight(i as isize, m).sqrt();
        for (j, &uj) in u.iter().enumerate() {
            data[(m + i) * cols + j] = uj * rw;
            data[(m - i) * cols + j] = uj * rw;
        }
    }
    DesignMatrix { rows, cols, data }
}

/// Preconditioned right-hand side `(PBc)_j = -Σ_i [U_{2(j-1)}(x_i) + (-1)^j] c_i`
/// for `j = 1..z+1`; the first entry is identically zero.
pub fn build_rhs(c: &CoefficientVector, z: usize) -> Vec<f64> {
    let m = c.half_len();
    let mut rhs = vec![0.0; z + 1];
    for i in 0..=m {
        let u = cheb_u_even(i as f64 / m as f64, z);
        let pair = if i == 0 {
            c.tap(0)
        } else {
            c.tap(i as isize) + c.tap(-(i as isize))
        };
        for (j0, &uj) in u.iter().enumerate() {
            let sign = if (j0 + 1) % 2 == 0 { 1.0 } else { -1.0 }; // (-1)^j, j = j0+1
            rhs[j0] -= (uj + sign) * pair;
        }
    }
    rhs
}

/// Thin SVD `M = U diag(S) Vᵀ` of a tall matrix. Singular values are not
/// sorted; callers must not assume an order.
#[derive(Debug, Clone)]
pub struct SvdFactorization {
    /// Column-orthonormal, `rows × cols`.
    pub u: Vec<f64>,
    /// Singular values, length `cols`, unordered.
    pub s: Vec<f64>,
    /// Orthogonal `cols × cols`.
    pub v: Vec<f64>,
    pub rows: usize,
    pub cols: usize,
}

const SVD_MAX_SWEEPS: usize = 64;

/// One-sided Jacobi SVD of a tall matrix (`rows >= cols`), chosen for its
/// high relative accuracy on small singular values — the truncation
/// decision downstream depends on exactly those.
pub fn svd_tall(matrix: &DesignMatrix) -> Result<SvdFactorization> {
    svd_tall_raw(&matrix.data, matrix.rows, matrix.cols)
}

pub(crate) fn svd_tall_raw(data: &[f64], rows: usize, cols: usize) -> Result<SvdFactorization> {
    assert!(rows >= cols, "svd_tall requires rows >= cols");
    let mut a = data.to_vec(); // working copy, becomes U * diag(S)
    let mut v = vec![0.0; cols * cols];
    for j in 0..cols {
        v[j * cols + j] = 1.0;
    }

    let col = |a: &[f64], j: usize, i: usize| a[i * cols + j];
    let mut converged = false;
    let mut off = 0.0;
    for _sweep in 0..SVD_MAX_SWEEPS {
        off = 0.0f64;
        for p in 0..cols {
            for q in (p + 1)..cols {
                // 2x2 Gram block of columns p, q
                let mut app = 0.0;
                let mut aqq = 0.0;
                let mut apq = 0.0;
                for i in 0..rows {
                    let ap = col(&a, p, i);
                    let aq = col(&a, q, i);
                    app += ap * ap;
                    aqq += aq * aq;
                    apq += ap * aq;
                }
                if app == 0.0 || aqq == 0.0 {
                    continue;
                }
                let rel = apq.abs() / (app * aqq).sqrt();
                off = off.max(rel);
                if rel <= 1e-15 {
                    continue;
                }
                // Jacobi rotation orthogonalizing the pair
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = cs * t;
                for i in 0..rows {
                    let ap = a[i * cols + p];
                    let aq = a[i * cols + q];
                    a[i * cols + p] = cs * ap - sn * aq;
                    a[i * cols + q] = sn * ap + cs * aq;
                }
                for i in 0..cols {
                    let vp = v[i * cols + p];
                    let vq = v[i * cols + q];
                    v[i * cols + p] = cs * vp - sn * vq;
                    v[i * cols + q] = sn * vp + cs * vq;
                }
            }
        }
        if off <= 1e-15 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::SvdNoConvergence {
            sweeps: SVD_MAX_SWEEPS,
            off_diagonal: off,
        });
    }

    let mut s = vec![0.0; cols];
    let mut u = a;
    for j in 0..cols {
        let norm = (0..rows)
            .map(|i| u[i * cols + j] * u[i * cols + j])
            .sum::<f64>()
            .sqrt();
        s[j] = norm;
        if norm > 0.0 {
            for i in 0..rows {
                u[i * cols + j] /= norm;
            }
        }
    }
    Ok(SvdFactorization {
        u,
        s,
        v,
        rows,
        cols,
    })
}

/// Inverse singular values below this are never formed, independent of `q`.
const SINGULAR_FLOOR: f64 = 1e-290;

/// Outcome of one compensation solve, plus the heuristic bookkeeping
/// filled in by [`auto_compensate`].
#[derive(Debug, Clone, PartialEq)]
pub struct CompensationReport {
    /// Singular values of the preconditioned design matrix (unordered).
    pub singular_values: Vec<f64>,
    /// How many of the largest singular-value inverses were zeroed.
    pub zeroed_count: usize,
    /// Euclidean norm of the applied adjustment `Δc`.
    pub delta_norm: f64,
    /// Scaled even derivatives of the adjusted response at `f = 0`.
    pub residual_derivatives: Vec<f64>,
    /// Heuristic step this result corresponds to (1 = raw taps,
    /// 2 = q-0 solve, 3..5 = increasing truncation).
    pub step_reached: u32,
    /// Whether the stopping criteria were met; always `false` for a bare
    /// [`compensate`] call, which checks nothing.
    pub accepted: bool,
    /// Ripple scan of the returned taps, when one was run.
    pub ripple: Option<RippleReport>,
}

fn step_for_q(q: usize) -> u32 {
    match q {
        0 => 2,
        1 => 3,
        2 => 4,
        _ => 5,
    }
}

/// Apply the compensation with the `q` largest singular-value inverses
/// zeroed. Returns the adjusted taps (re-symmetrized bit-exactly, not
/// renormalized: `Σ Δc = 0` holds by construction) and the report.
pub fn compensate(
    c: &CoefficientVector,
    z: usize,
    q: usize,
) -> Result<(CoefficientVector, CompensationReport)> {
    assert!(z >= 1, "z must be >= 1");
    let m = c.half_len();
    if q > z {
        return Err(Error::AllDirectionsRemoved { q, rank: z + 1 });
    }

    let matrix = build_design_matrix(m, z);
    let svd = svd_tall(&matrix)?;
    let rhs = build_rhs(c, z);

    // Work with the inverses; the paper's programs search for the largest
    // inverses rather than the smallest singular values since SVD output
    // order is unspecified.
    let mut inverses: Vec<f64> = svd
        .s
        .iter()
        .map(|&s| if s < SINGULAR_FLOOR { 0.0 } else { 1.0 / s })
        .collect();
    let mut order: Vec<usize> = (0..inverses.len()).collect();
    // largest inverse first; exact ties break toward the larger column
    // index so the truncation is deterministic
    order.sort_by(|&a, &b| {
        inverses[b]
            .partial_cmp(&inverses[a])
            .unwrap()
            .then(b.cmp(&a))
    });
    for &idx in order.iter().take(q) {
        inverses[idx] = 0.0;
    }

    // Δc = √W U S⁻¹ Vᵀ rhs, evaluated right to left.
    let cols = svd.cols;
    let mut t = vec![0.0; cols];
    for j in 0..cols {
        let mut acc = 0.0;
        for i in 0..cols {
            acc += svd.v[i * cols + j] * rhs[i];
        }
        t[j] = acc * inverses[j];
    }
    let mut delta = vec![0.0; 2 * m + 1];
    for (i, d) in delta.iter_mut().enumerate() {
        let mut acc = 0.0;
        for j in 0..cols {
            acc += svd.u[i * cols + j] * t[j];
        }
        *d = acc * weight(i as isize - m as isize, m).sqrt();
    }

    let mut adjusted = c.clone();
    {
        let taps = adjusted.taps_mut();
        for (t, d) in taps.iter_mut().zip(&delta) {
            *t += d;
        }
        // mirror the i >= 0 half so symmetry is exact at the bit level
        for i in 1..=m {
            taps[m - i] = taps[m + i];
        }
    }

    let delta_norm = delta.iter().map(|d| d * d).sum::<f64>().sqrt();
    let report = CompensationReport {
        singular_values: svd.s,
        zeroed_count: q,
        delta_norm,
        residual_derivatives: even_derivatives(&adjusted, z),
        step_reached: step_for_q(q),
        accepted: false,
        ripple: None,
    };
    Ok((adjusted, report))
}

/// Singular values of the preconditioned design matrix for `(m, z)`,
/// the diagnostic the paper's program returns for negative `q`.
pub fn singular_values(m: usize, z: usize) -> Result<Vec<f64>> {
    assert!(z >= 1, "z must be >= 1");
    Ok(svd_tall(&build_design_matrix(m, z))?.s)
}

/// Stopping criteria of the five-step heuristic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StoppingCriteria {
    /// Pass-band ripple threshold (default 1e-14).
    pub passband_ripple: f64,
    /// Stop-band regularity slack factor (default 1.05).
    pub stopband_slack: f64,
    /// Grid points for the ripple scan (default 2000).
    pub scan_points: usize,
}

impl Default for StoppingCriteria {
    fn default() -> Self {
        StoppingCriteria {
            passband_ripple: 1e-14,
            stopband_slack: STOPBAND_SLACK,
            scan_points: 2000,
        }
    }
}

impl StoppingCriteria {
    fn met(&self, report: &RippleReport) -> bool {
        report.passband_ripple < self.passband_ripple && report.stopband_regular
    }
}

/// The five-step heuristic with default stopping criteria.
///
/// Step 1 checks the raw Grace taps; step 2 applies the full-rank solve
/// (`q = 0`); steps 3..5 retry with `q = 1, 2, ...` up to `z`. The first
/// step meeting both criteria wins. If none does, the candidate with the
/// smallest pass-band ripple is returned with `accepted = false`.
pub fn auto_compensate(spec: FilterSpec) -> Result<(CoefficientVector, CompensationReport)> {
    auto_compensate_with(spec, &StoppingCriteria::default())
}

pub fn auto_compensate_with(
    spec: FilterSpec,
    criteria: &StoppingCriteria,
) -> Result<(CoefficientVector, CompensationReport)> {
    let z = spec.params().zero_derivative_count() as usize;
    let raw = coefficients(spec)?;
    let scan = ripple_scan(&raw, criteria.scan_points);
    let raw_report = CompensationReport {
        singular_values: Vec::new(),
        zeroed_count: 0,
        delta_norm: 0.0,
        residual_derivatives: if z >= 1 {
            even_derivatives(&raw, z)
        } else {
            Vec::new()
        },
        step_reached: 1,
        accepted: criteria.met(&scan),
        ripple: Some(scan),
    };
    if z == 0 || raw_report.accepted {
        return Ok((raw, raw_report));
    }

    let raw_ripple = raw_report
        .ripple
        .as_ref()
        .map(|r| r.passband_ripple)
        .unwrap_or(f64::INFINITY);
    let mut best: (f64, CoefficientVector, CompensationReport) =
        (raw_ripple, raw.clone(), raw_report);
    for q in 0..=z {
        let (candidate, mut report) = compensate(&raw, z, q)?;
        let scan = ripple_scan(&candidate, criteria.scan_points);
        report.accepted = criteria.met(&scan);
        let ripple = scan.passband_ripple;
        report.ripple = Some(scan);
        if report.accepted {
            return Ok((candidate, report));
        }
        if ripple < best.0 {
            best = (ripple, candidate, report);
        }
    }
    Ok((best.1, best.2))
}

/// First `count` rows of the integer preconditioning matrix `P`, computed
/// two independent ways that must agree: exact rational Cholesky of the
/// inverse moment matrix, and the coefficients of even-order Chebyshev U
/// polynomials. Used only for verification — the solve path never builds
/// `P`.
pub fn preconditioner_rows(count: usize) -> Result<Vec<Vec<i64>>> {
    assert!(count >= 1 && count <= 12, "count must be in [1, 12]");
    let cholesky = cholesky_rows(count)?;
    let chebyshev = chebyshev_rows(count);
    if cholesky != chebyshev {
        return Err(Error::ExactArithmetic(
            "rational Cholesky and Chebyshev-coefficient rows disagree".into(),
        ));
    }
    Ok(cholesky)
}

/// Route (a): exact moment matrix `C_{u,v} = (2/π)∫ x^{2(u+v-2)} √(1-x²) dx
/// = ∏_{k=1}^{u+v-2} (2k-1)/(2k+2)`, inverted rationally; `P` is the lower
/// triangular factor with `P C Pᵀ = I`, i.e. `Pᵀ P = C⁻¹`.
fn cholesky_rows(count: usize) -> Result<Vec<Vec<i64>>> {
    let moment = |j: usize| -> BigRational {
        let mut r = BigRational::one();
        for k in 1..=j {
            r *= BigRational::new(BigInt::from(2 * k as i64 - 1), BigInt::from(2 * k as i64 + 2));
        }
        r
    };
    let n = count;
    let mut c = vec![vec![BigRational::zero(); n]; n];
    for u in 0..n {
        for v in 0..n {
            c[u][v] = moment(u + v);
        }
    }
    let cinv = invert_rational(c)?;

    // Reverse-order Cholesky: with J the index flip, J C⁻¹ J = L Lᵀ gives
    // P = J Lᵀ J lower triangular with positive diagonal.
    let flip = |i: usize| n - 1 - i;
    let mut g = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            g[i][j] = cinv[flip(i)][flip(j)].clone();
        }
    }
    let mut l = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = g[i][j].clone();
            for k in 0..j {
                sum -= l[i][k].clone() * l[j][k].clone();
            }
            if i == j {
                l[i][j] = rational_sqrt(&sum)?;
            } else {
                l[i][j] = sum / l[j][j].clone();
            }
        }
    }
    let mut rows = vec![vec![0i64; 0]; n];
    for i in 0..n {
        let mut row = Vec::with_capacity(i + 1);
        for j in 0..=i {
            // P = J Lᵀ J
            let value = l[flip(j)][flip(i)].clone();
            if !value.is_integer() {
                return Err(Error::ExactArithmetic(format!(
                    "P[{}][{}] = {} is not an integer",
                    i + 1,
                    j + 1,
                    value
                )));
            }
            let int = value.to_integer();
            row.push(i64::try_from(&int).map_err(|_| {
                Error::ExactArithmetic(format!("P[{}][{}] overflows i64", i + 1, j + 1))
            })?);
        }
        rows[i] = row;
    }
    Ok(rows)
}

fn invert_rational(mut a: Vec<Vec<BigRational>>) -> Result<Vec<Vec<BigRational>>> {
    let n = a.len();
    let mut inv = vec![vec![BigRational::zero(); n]; n];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = BigRational::one();
    }
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !a[r][col].is_zero())
            .ok_or_else(|| Error::ExactArithmetic("singular moment matrix".into()))?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= p.clone();
            inv[col][j] /= p.clone();
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in 0..n {
                let tmp = a[col][j].clone() * factor.clone();
                a[r][j] -= tmp;
                let tmp = inv[col][j].clone() * factor.clone();
                inv[r][j] -= tmp;
            }
        }
    }
    Ok(inv)
}

fn rational_sqrt(r: &BigRational) -> Result<BigRational> {
    if r.is_negative() {
        return Err(Error::ExactArithmetic("sqrt of negative rational".into()));
    }
    let num = r.numer().sqrt();
    let den = r.denom().sqrt();
    if &(&num * &num) != r.numer() || &(&den * &den) != r.denom() {
        return Err(Error::ExactArithmetic(format!(
            "{r} is not a perfect rational square"
        )));
    }
    Ok(BigRational::new(num, den))
}

/// Route (b): rows of `P` as the even-power coefficients of `U_{2(j-1)}`,
/// from the integer coefficient recurrence `U_j = 2x U_{j-1} - U_{j-2}`.
fn chebyshev_rows(count: usize) -> Vec<Vec<i64>> {
    // coefficient vectors in powers of x, index = power
    let mut prev: Vec<i64> = vec![1]; // U_0
    let mut cur: Vec<i64> = vec![0, 2]; // U_1
    let mut rows = Vec::with_capacity(count);
    rows.push(vec![1]);
    for j in 2..=2 * (count - 1) {
        let mut next = vec![0i64; j + 1];
        for (k, &c) in cur.iter().enumerate() {
            next[k + 1] += 2 * c;
        }
        for (k, &c) in prev.iter().enumerate() {
            next[k] -= c;
        }
        prev = cur;
        cur = next;
        if j % 2 == 0 {
            rows.push(cur.iter().step_by(2).copied().collect());
        }
    }
    rows
}
