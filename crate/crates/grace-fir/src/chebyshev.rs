//! Chebyshev polynomials of both kinds and the Grace polynomial.
//!
//! The Grace polynomial `Gp(x, n)` is the even polynomial of degree `2n`
//!
//! ```text
//! Gp(x, n) = (-1)^n [T_{2n+1}(x) - T_{2n-1}(x)] / (4 n x)
//! ```
//!
//! with `Gp(0, n) = 1` and roots at `±sin(πj/2n)`, `j = 1..n`. It behaves
//! like a sinc main lobe on `[-1, 1]` but reaches zero smoothly at the
//! interval ends, which is what makes it a useful replacement for the
//! truncated sinc in low-pass FIR design.

use std::f64::consts::PI;

/// Roundoff slack accepted on the `|x| <= 1` domain before rejecting.
const DOMAIN_SLACK: f64 = 1e-15;

/// Clamp an abscissa that is within roundoff of the `[-1, 1]` endpoints.
///
/// Panics when `|x|` exceeds 1 by more than the slack; the callers'
/// contracts all require `|x| <= 1` in exact arithmetic.
fn clamp_domain(x: f64) -> f64 {
    let a = x.abs();
    assert!(
        a <= 1.0 + DOMAIN_SLACK,
        "abscissa {x} outside [-1, 1] beyond roundoff"
    );
    x.clamp(-1.0, 1.0)
}

/// Chebyshev polynomial of the first kind, `T_j(x)`, by the three-term
/// recurrence `T_{j+1} = 2x T_j - T_{j-1}`.
pub fn cheb_t(j: u32, x: f64) -> f64 {
    let x = clamp_domain(x);
    match j {
        0 => 1.0,
        1 => x,
        _ => {
            let mut prev = 1.0;
            let mut cur = x;
            for _ in 2..=j {
                let next = 2.0 * x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// Even-order Chebyshev polynomials of the second kind:
/// `[U_0(x), U_2(x), ..., U_{2K}(x)]`.
///
/// The odd orders are produced internally by the full recurrence
/// `U_j = 2x U_{j-1} - U_{j-2}` and dropped; the first entry is always 1.
pub fn cheb_u_even(x: f64, max_half_order: usize) -> Vec<f64> {
    let x = clamp_domain(x);
    let mut out = Vec::with_capacity(max_half_order + 1);
    out.push(1.0);
    let mut prev = 1.0; // U_0
    let mut cur = 2.0 * x; // U_1
    for j in 2..=2 * max_half_order {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
        if j % 2 == 0 {
            out.push(cur);
        }
    }
    out
}

/// `v_n(w)` with `w = 1 - x^2`, defined by `Gp(x, n) = w v_n(w) / (2n)`.
///
/// Writing `x = sin ψ` gives `Gp = cos ψ · sin(2nψ) / (2n sin ψ)`, so
/// `w v_n(w) = cos ψ · U_{2n-1}(cos ψ)` and `v_n` satisfies
///
/// ```text
/// u_0 = 1, v_0 = 0,    v_{j+1} = 2 u_j - v_j,   u_{j+1} = 2 w v_{j+1} - u_j
/// ```
///
/// (the even/odd split of the `U` recurrence in the variable `cos ψ`).
/// Everything downstream evaluates through this function because it depends
/// on `x` only through `w`, which keeps mirrored abscissas bit-identical and
/// never divides by `x`.
pub(crate) fn grace_poly_reduced(w: f64, n: u32) -> f64 {
    let mut u = 1.0;
    let mut v = 0.0;
    for _ in 0..n {
        v = 2.0 * u - v;
        u = 2.0 * w * v - u;
    }
    v / (2.0 * n as f64)
}

/// The Grace polynomial `Gp(x, n)`.
pub fn grace_poly(x: f64, n: u32) -> f64 {
    assert!(n >= 1, "polynomial order n must be >= 1");
    let x = clamp_domain(x);
    let w = 1.0 - x * x;
    w * grace_poly_reduced(w, n)
}

/// All `2n` roots of `Gp(x, n)`: `±sin(πj/2n)` for `j = 1..n`, ascending.
pub fn grace_poly_roots(n: u32) -> Vec<f64> {
    assert!(n >= 1, "polynomial order n must be >= 1");
    let mut roots = Vec::with_capacity(2 * n as usize);
    for j in (1..=n).rev() {
        roots.push(-(PI * j as f64 / (2.0 * n as f64)).sin());
    }
    for j in 1..=n {
        roots.push((PI * j as f64 / (2.0 * n as f64)).sin());
    }
    roots
}

/// The sinc matched to `Gp(x, n)`: `S(x, n) = sin(u)/u` with
/// `u = sqrt(4n^2 + 2) x`, so that both share the second derivative
/// `-(4n^2 + 2)/3` at `x = 0` and `S` has roots at `±πj/sqrt(4n^2 + 2)`.
pub fn scaled_sinc(x: f64, n: u32) -> f64 {
    assert!(n >= 1, "polynomial order n must be >= 1");
    let u = ((4 * n as u64 * n as u64 + 2) as f64).sqrt() * x;
    if u.abs() < 1e-8 {
        // series: 1 - u^2/6, accurate to ~1e-17 here
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cheb_t_low_orders() {
        assert_eq!(cheb_t(0, 0.37), 1.0);
        assert_eq!(cheb_t(1, 0.37), 0.37);
        // T_3(0.5) = 4(0.5)^3 - 3(0.5) = -1
        assert!((cheb_t(3, 0.5) - (-1.0)).abs() < 1e-15);
    }

    #[test]
    fn cheb_u_even_values() {
        // U_2(x) = 4x^2 - 1 at x = 0
        assert_eq!(cheb_u_even(0.0, 1), vec![1.0, -1.0]);
        // U_j(1) = j + 1
        assert_eq!(cheb_u_even(1.0, 2), vec![1.0, 3.0, 5.0]);
        // U_2(0.5) = 0
        let seq = cheb_u_even(0.5, 1);
        assert_eq!(seq[0], 1.0);
        assert!(seq[1].abs() < 1e-15);
    }

    #[test]
    fn grace_poly_matches_closed_form() {
        // Eq-1-style closed form (-1)^n [T_{2n+1} - T_{2n-1}]/(4nx), x != 0
        for n in [1u32, 2, 3, 7, 25, 100] {
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            for k in 1..500 {
                let x = -0.9995 + 1.999 * k as f64 / 500.0;
                if x.abs() < 1e-3 {
                    continue;
                }
                let closed =
                    sign * (cheb_t(2 * n + 1, x) - cheb_t(2 * n - 1, x)) / (4.0 * n as f64 * x);
                assert!(
                    (grace_poly(x, n) - closed).abs() < 1e-12,
                    "n={n} x={x}"
                );
            }
        }
    }

    #[test]
    fn grace_poly_matches_trig_form() {
        // Gp = cos(psi) sin(2n psi) / (2n sin(psi)) with x = sin(psi)
        for n in [1u32, 4, 10, 100] {
            for k in 1..1000 {
                let psi = PI / 2.0 * k as f64 / 1000.0;
                let x = psi.sin();
                let trig = psi.cos() * (2.0 * n as f64 * psi).sin()
                    / (2.0 * n as f64 * psi.sin());
                assert!(
                    (grace_poly(x, n) - trig).abs() < 1e-12,
                    "n={n} psi={psi}"
                );
            }
        }
    }

    #[test]
    fn grace_poly_special_points() {
        for n in [1u32, 3, 12, 50] {
            assert_eq!(grace_poly(0.0, n), 1.0);
            assert!(grace_poly(1.0, n).abs() < 1e-14);
            assert!(grace_poly(-1.0, n).abs() < 1e-14);
        }
        assert!((grace_poly(0.6, 1) - 0.64).abs() < 1e-15);
    }

    #[test]
    fn grace_poly_is_even() {
        for n in [2u32, 9, 33] {
            for k in 0..=100 {
                let x = k as f64 / 100.0;
                assert_eq!(grace_poly(x, n), grace_poly(-x, n));
            }
        }
    }

    #[test]
    fn roots_are_roots() {
        for n in [1u32, 2, 5, 20] {
            let roots = grace_poly_roots(n);
            assert_eq!(roots.len(), 2 * n as usize);
            assert!(roots.windows(2).all(|w| w[0] < w[1]));
            for &r in &roots {
                assert!(grace_poly(r, n).abs() <= 1e-12, "n={n} r={r}");
            }
        }
        let r1 = grace_poly_roots(1);
        assert_eq!(r1, vec![-1.0, 1.0]);
        let r2 = grace_poly_roots(2);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r2[1] + s).abs() < 1e-15 && (r2[2] - s).abs() < 1e-15);
    }

    #[test]
    fn scaled_sinc_matches_roots_and_curvature() {
        let n = 12u32;
        assert_eq!(scaled_sinc(0.0, n), 1.0);
        let scale = ((4 * n * n + 2) as f64).sqrt();
        assert!(scaled_sinc(PI / scale, n).abs() < 1e-15);
        // second difference at 0 approximates -(4n^2+2)/3
        let h = 1e-4;
        let second =
            (scaled_sinc(h, n) - 2.0 * scaled_sinc(0.0, n) + scaled_sinc(-h, n)) / (h * h);
        let expect = -((4 * n * n + 2) as f64) / 3.0;
        assert!((second / expect - 1.0).abs() < 1e-5);
    }

    #[test]
    fn grace_poly_curvature_at_zero() {
        // Richardson-extrapolated central second difference equals
        // -(4n^2+2)/3 within relative 1e-6 (plain h=1e-4 differences hit
        // their h² truncation floor near n = 50)
        for n in [1u32, 5, 17, 50] {
            let h = 1e-4;
            let second = |h: f64| (grace_poly(h, n) - 2.0 + grace_poly(-h, n)) / (h * h);
            let extrapolated = (4.0 * second(h) - second(2.0 * h)) / 3.0;
            let expect = -(4.0 * n as f64 * n as f64 + 2.0) / 3.0;
            assert!(
                (extrapolated / expect - 1.0).abs() < 1e-6,
                "n={n} second={extrapolated} expect={expect}"
            );
        }
    }

    #[test]
    fn root_and_function_convergence_to_sinc() {
        // roots: n sin(pi j / 2n) approaches n pi j / sqrt(4n^2+2) monotonically
        for j in 1..=5u32 {
            let mut prev = f64::INFINITY;
            for n in [10u32, 20, 40, 80] {
                let nf = n as f64;
                let gap = (nf * (PI * j as f64 / (2.0 * nf)).sin()
                    - nf * PI * j as f64 / ((4.0 * nf * nf + 2.0).sqrt()))
                .abs();
                assert!(gap < prev, "j={j} n={n}");
                prev = gap;
            }
        }
        // functions: sup norm over |x| <= 0.5. The two oscillations drift
        // in phase, so the gap plateaus near x²/6 through n ≈ 10..40 and
        // only then decays; check the 10 → 80 endpoints and strict decay
        // from 80 onward.
        let sup = |n: u32| {
            (0..=1000)
                .map(|k| {
                    let x = -0.5 + k as f64 / 1000.0;
                    (grace_poly(x, n) - scaled_sinc(x, n)).abs()
                })
                .fold(0.0, f64::max)
        };
        assert!(sup(80) < sup(10));
        let mut prev = sup(80);
        for n in [160u32, 320, 640] {
            let s = sup(n);
            assert!(s < prev, "n={n}");
            prev = s;
        }
    }

    #[test]
    fn domain_clamp_accepts_roundoff() {
        let _ = grace_poly(1.0 + 5e-16, 3);
    }

    #[test]
    #[should_panic]
    fn domain_clamp_rejects_far_out() {
        let _ = grace_poly(1.0 + 1e-9, 3);
    }
}
