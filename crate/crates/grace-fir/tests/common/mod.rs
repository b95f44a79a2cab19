//! Shared oracles for the integration suites, independent of the library's
//! solve paths.

use grace_fir::{weight, CoefficientVector};
use std::f64::consts::PI;

/// Rectangular-window truncated-sinc low-pass taps (the classic design the
/// Grace filter replaces), normalized to sum one.
pub fn truncated_sinc(m: usize, cutoff: f64) -> CoefficientVector {
    let mut taps = vec![0.0; 2 * m + 1];
    for i in 0..=m {
        let v = if i == 0 {
            cutoff
        } else {
            (i as f64 * PI * cutoff).sin() / (i as f64 * PI)
        };
        taps[m + i] = v;
        taps[m - i] = v;
    }
    let sum: f64 = taps.iter().sum();
    for t in taps.iter_mut() {
        *t /= sum;
    }
    CoefficientVector::from_taps(taps).unwrap()
}

/// Dense brute-force minimum-norm adjustment `Δc = W Aᵀ (A W Aᵀ)⁻¹ B c`
/// built from the raw constraint matrices, with no preconditioning and no
/// SVD. Solves the small Gram system by Gaussian elimination.
pub fn dense_delta_c(c: &CoefficientVector, z: usize) -> Vec<f64> {
    let m = c.half_len();
    let rows = z + 1;
    let cols = 2 * m + 1;
    // A[j][i] = (-1)^j x_i^{2j} (0-based j), B = -A except first row 0
    let mut a = vec![vec![0.0; cols]; rows];
    for j in 0..rows {
        for i in 0..cols {
            let x = (i as f64 - m as f64) / m as f64;
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            a[j][i] = sign * x.powi(2 * j as i32);
        }
    }
    let w: Vec<f64> = (0..cols)
        .map(|i| weight(i as isize - m as isize, m))
        .collect();

    // b = B c
    let mut b = vec![0.0; rows];
    for j in 1..rows {
        for i in 0..cols {
            b[j] -= a[j][i] * c.taps()[i];
        }
    }

    // gram = A W Aᵀ
    let mut gram = vec![vec![0.0; rows]; rows];
    for u in 0..rows {
        for v in 0..rows {
            gram[u][v] = (0..cols).map(|i| a[u][i] * w[i] * a[v][i]).sum();
        }
    }

    // solve gram x = b by Gaussian elimination with partial pivoting
    let mut x = b;
    for col in 0..rows {
        let pivot = (col..rows)
            .max_by(|&r1, &r2| {
                gram[r1][col]
                    .abs()
                    .partial_cmp(&gram[r2][col].abs())
                    .unwrap()
            })
            .unwrap();
        gram.swap(col, pivot);
        x.swap(col, pivot);
        let d = gram[col][col];
        for r in 0..rows {
            if r == col {
                continue;
            }
            let f = gram[r][col] / d;
            for k in col..rows {
                gram[r][k] -= f * gram[col][k];
            }
            x[r] -= f * x[col];
        }
    }
    for (r, v) in x.iter_mut().enumerate() {
        *v /= gram[r][r];
    }

    // Δc = W Aᵀ x
    (0..cols)
        .map(|i| w[i] * (0..rows).map(|j| a[j][i] * x[j]).sum::<f64>())
        .collect()
}
