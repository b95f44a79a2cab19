//! The discrete Grace filter: coefficients, frequency response, ripple
//! scanning and response metrics.
//!
//! Frequency convention: `f` runs over `[0, 1]` with 1 at the Nyquist
//! frequency. A filter of half-length `m` has `2m + 1` taps indexed
//! `i = -m..m`; the response of the type I linear-phase filter is the
//! cosine sum `h(f) = Σ c_i cos(iπf)`.

use crate::chebyshev::grace_poly_reduced;
use crate::error::{Error, Result};
use crate::grace::GraceParams;
use std::f64::consts::PI;

/// dB per octave of unit log-log slope: `20 log10(2)`.
const DB_PER_OCTAVE_UNIT: f64 = 6.020599913279624;

/// A discrete design: half-length `m` (so `2m + 1` taps) plus the Grace
/// function parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FilterSpec {
    m: usize,
    params: GraceParams,
}

impl FilterSpec {
    pub fn new(m: usize, params: GraceParams) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParams(format!("half-length m = {m} < 2")));
        }
        Ok(FilterSpec { m, params })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn params(&self) -> GraceParams {
        self.params
    }
}

/// Symmetric tap vector `c_{-m} .. c_m`, stored densely with the center at
/// index `m`. Grace-generated vectors sum to one, are bit-exactly
/// symmetric and carry exact zeros at `c_{±m}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientVector {
    taps: Vec<f64>,
}

impl CoefficientVector {
    /// Wrap raw taps; the length must be odd.
    pub fn from_taps(taps: Vec<f64>) -> Result<Self> {
        if taps.len() % 2 == 0 || taps.is_empty() {
            return Err(Error::InvalidParams(format!(
                "tap count {} is not odd",
                taps.len()
            )));
        }
        Ok(CoefficientVector { taps })
    }

    /// The identity filter `[0, ..., 1, ..., 0]` of half-length `m`.
    pub fn identity(m: usize) -> Self {
        let mut taps = vec![0.0; 2 * m + 1];
        taps[m] = 1.0;
        CoefficientVector { taps }
    }

    /// Half-length `m`.
    pub fn half_len(&self) -> usize {
        (self.taps.len() - 1) / 2
    }

    /// Tap `c_i` for `-m <= i <= m`.
    pub fn tap(&self, i: isize) -> f64 {
        self.taps[(i + self.half_len() as isize) as usize]
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn sum(&self) -> f64 {
        let m = self.half_len();
        let mut s = self.taps[m];
        for i in 1..=m {
            s += self.taps[m + i] + self.taps[m - i];
        }
        s
    }

    /// True when `c_i` and `c_{-i}` are identical at the bit level.
    pub fn is_bit_symmetric(&self) -> bool {
        let m = self.half_len();
        (1..=m).all(|i| self.taps[m + i].to_bits() == self.taps[m - i].to_bits())
    }

    pub(crate) fn taps_mut(&mut self) -> &mut [f64] {
        &mut self.taps
    }
}

/// Grace filter taps `c_i = G(x_i, n, p) / Σ G(x_i, n, p)`, `x_i = i/m`.
///
/// Each magnitude is computed once per `|i|` from `x_i²` and mirrored, so
/// the taps are symmetric at the bit level; the endpoint taps are exact
/// zeros (the analytic limit of `G` at `x = ±1`).
pub fn coefficients(spec: FilterSpec) -> Result<CoefficientVector> {
    let m = spec.m();
    let (n, p) = (spec.params().n(), spec.params().p());
    let mut taps = vec![0.0; 2 * m + 1];
    for i in 0..m {
        let x = i as f64 / m as f64;
        let w = 1.0 - x * x;
        let value = w.powi(p as i32) * w.sqrt() * grace_poly_reduced(w, n);
        taps[m + i] = value;
        taps[m - i] = value;
    }
    let sum = taps[m] + 2.0 * taps[m + 1..].iter().sum::<f64>();
    if !(sum > 0.0) {
        return Err(Error::DegenerateNormalization(sum));
    }
    for i in 0..m {
        let c = taps[m + i] / sum;
        taps[m + i] = c;
        taps[m - i] = c;
    }
    Ok(CoefficientVector { taps })
}

/// Frequency response `h(f) = Σ c_i cos(iπf)` by direct summation.
pub fn response(c: &CoefficientVector, f: f64) -> f64 {
    let m = c.half_len();
    let taps = c.taps();
    let mut h = taps[m];
    for i in 1..=m {
        let cos = (i as f64 * PI * f).cos();
        h += (taps[m + i] + taps[m - i]) * cos;
    }
    h
}

/// Derivative of the response, `h'(f) = -Σ c_i iπ sin(iπf)`, analytically
/// exact (zero at `f = 0` and `f = 1` for symmetric taps).
pub fn response_derivative(c: &CoefficientVector, f: f64) -> f64 {
    let m = c.half_len();
    let taps = c.taps();
    let mut d = 0.0;
    for i in 1..=m {
        let s = (i as f64 * PI * f).sin();
        d -= (taps[m + i] + taps[m - i]) * i as f64 * PI * s;
    }
    d
}

/// Reference frequency `f_r = ∫₀¹ h² df = Σ c_i²`.
pub fn reference_frequency(c: &CoefficientVector) -> f64 {
    c.taps().iter().map(|&t| t * t).sum()
}

/// First `z` scaled even response derivatives at `f = 0`:
/// entry `k` is `(-1)^k Σ c_i x_i^{2k}` with `x_i = i/m`.
pub fn even_derivatives(c: &CoefficientVector, z: usize) -> Vec<f64> {
    assert!(z >= 1, "z must be >= 1");
    let m = c.half_len();
    let taps = c.taps();
    let mut sums = vec![0.0; z];
    for i in 1..=m {
        let x2 = (i as f64 / m as f64).powi(2);
        let pair = taps[m + i] + taps[m - i];
        let mut power = 1.0;
        for s in sums.iter_mut() {
            power *= x2;
            *s += pair * power;
        }
    }
    for (k, s) in sums.iter_mut().enumerate() {
        if k % 2 == 0 {
            *s = -*s; // (-1)^k for k = 1, 3, 5, ...
        }
    }
    sums
}

/// Result of scanning the response for extrema.
#[derive(Debug, Clone, PartialEq)]
pub struct RippleReport {
    /// Highest maximum minus lowest minimum among pass-band extrema
    /// (zero when the pass band is monotone).
    pub passband_ripple: f64,
    /// Whether the stop-band extremum magnitudes decay regularly.
    pub stopband_regular: bool,
    /// All interior extrema as `(f, h(f))`, ascending in `f`.
    pub extrema: Vec<(f64, f64)>,
    /// Pass-band edge used for classification: the first `h = 1/2`
    /// crossing (1.0 when the response never reaches that level).
    pub passband_edge: f64,
}

/// Slack factor for the stop-band regularity check: each extremum
/// magnitude may exceed its predecessor by at most this factor.
pub const STOPBAND_SLACK: f64 = 1.05;

/// Comparison floor for the stop-band regularity check: extremum
/// magnitudes this small sit at the roundoff level of the cosine-sum
/// evaluation, where the computed lobe heights no longer track the true
/// decay.
const REGULARITY_FLOOR: f64 = 1e-13;

/// Scan the response on a uniform grid, refine every derivative sign
/// change by bisection, and classify the extrema.
///
/// Following the standard protocol the derivative is evaluated at
/// `points` equally spaced frequencies (2000 by default); each sign
/// change brackets an extremum which is then refined to ~1e-12 in `f` so
/// the reported amplitudes are grid-independent.
pub fn ripple_scan(c: &CoefficientVector, points: usize) -> RippleReport {
    assert!(points >= 100, "scan needs at least 100 grid points");
    let m = c.half_len();
    let taps = c.taps();

    // Grid pass: evaluate h and h' with a rotation recurrence per point
    // (the refinement below re-evaluates extrema with direct summation).
    let mut h_grid = vec![0.0; points + 1];
    let mut dh_grid = vec![0.0; points + 1];
    for k in 0..=points {
        let f = k as f64 / points as f64;
        let (sin_step, cos_step) = (PI * f).sin_cos();
        let mut cos_i = 1.0;
        let mut sin_i = 0.0;
        let mut h = taps[m];
        let mut dh = 0.0;
        for i in 1..=m {
            let c_next = cos_i * cos_step - sin_i * sin_step;
            let s_next = sin_i * cos_step + cos_i * sin_step;
            cos_i = c_next;
            sin_i = s_next;
            let pair = taps[m + i] + taps[m - i];
            h += pair * cos_i;
            dh -= pair * i as f64 * PI * sin_i;
        }
        h_grid[k] = h;
        dh_grid[k] = dh;
    }

    // Pass-band edge: first h = 1/2 crossing, refined on the exact response.
    let mut passband_edge = 1.0;
    for k in 0..points {
        if h_grid[k] > 0.5 && h_grid[k + 1] <= 0.5 {
            passband_edge = crate::grace::bisect_zero(
                |f| response(c, f) - 0.5,
                k as f64 / points as f64,
                (k + 1) as f64 / points as f64,
            );
            break;
        }
    }

    // Extrema: refine each derivative sign change with the exact derivative.
    let mut extrema = Vec::new();
    for k in 1..points {
        let (a, b) = (dh_grid[k], dh_grid[k + 1]);
        if a == 0.0 || b == 0.0 {
            continue;
        }
        if (a < 0.0) != (b < 0.0) {
            let f = crate::grace::bisect_zero(
                |f| response_derivative(c, f),
                k as f64 / points as f64,
                (k + 1) as f64 / points as f64,
            );
            extrema.push((f, response(c, f)));
        }
    }

    // Pass-band ripple: highest maximum minus lowest minimum.
    let passband: Vec<f64> = extrema
        .iter()
        .filter(|(f, _)| *f < passband_edge)
        .map(|&(_, h)| h)
        .collect();
    let passband_ripple = if passband.len() >= 2 {
        passband.iter().cloned().fold(f64::MIN, f64::max)
            - passband.iter().cloned().fold(f64::MAX, f64::min)
    } else {
        0.0
    };

    // Stop-band regularity: extremum magnitudes beyond the first response
    // zero must not grow by more than the slack factor.
    let mut first_zero = None;
    for k in 0..points {
        let f = k as f64 / points as f64;
        if f >= passband_edge && (h_grid[k] < 0.0) != (h_grid[k + 1] < 0.0) {
            first_zero = Some(f);
            break;
        }
    }
    let mut stopband_regular = true;
    if let Some(zero) = first_zero {
        let mags: Vec<f64> = extrema
            .iter()
            .filter(|(f, _)| *f > zero)
            .map(|&(_, h)| h.abs())
            .collect();
        for pair in mags.windows(2) {
            if pair[1] > STOPBAND_SLACK * pair[0] + REGULARITY_FLOOR {
                stopband_regular = false;
                break;
            }
        }
    }

    RippleReport {
        passband_ripple,
        stopband_regular,
        extrema,
        passband_edge,
    }
}

/// Aggregated response metrics of a tap vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterMetrics {
    /// Reference frequency `Σ c_i²`.
    pub f_r: f64,
    /// Cutoff: the half-power crossing `h(f_c) = 1/√2`, which is the point
    /// the squared response is anti-symmetric about (and therefore the
    /// point `f_r` approximates).
    pub f_c: f64,
    /// Transition-band rolloff in dB/octave (positive), measured as the
    /// log-log response slope at the reference frequency.
    pub rolloff_db_per_octave: f64,
    /// First stop-band sidelobe level in dB.
    pub first_sidelobe_db: f64,
    /// Magnitudes of the first `z` scaled even derivatives at `f = 0`.
    pub derivative_magnitudes: Vec<f64>,
}

/// Measure the discrete-response metrics with the same definitions as the
/// continuous `transform_metrics`. `z` selects how many even-derivative
/// magnitudes to report (0 for none).
pub fn measure_metrics(c: &CoefficientVector, z: usize) -> Result<FilterMetrics> {
    let f_r = reference_frequency(c);
    let half_power = std::f64::consts::FRAC_1_SQRT_2;

    // Locate the half-power crossing on a coarse grid, then bisect.
    let grid = 4096;
    let mut f_c = None;
    for k in 0..grid {
        let (f0, f1) = (k as f64 / grid as f64, (k + 1) as f64 / grid as f64);
        if response(c, f0) > half_power && response(c, f1) <= half_power {
            f_c = Some(crate::grace::bisect_zero(
                |f| response(c, f) - half_power,
                f0,
                f1,
            ));
            break;
        }
    }
    let f_c = f_c.ok_or(Error::DegenerateResponse)?;

    // Rolloff at the reference frequency.
    let h_r = response(c, f_r);
    let rolloff = -DB_PER_OCTAVE_UNIT * f_r * response_derivative(c, f_r) / h_r;

    // First zero of h beyond the cutoff, then the peak of the next lobe.
    let mut first_zero = None;
    for k in 0..grid {
        let (f0, f1) = (k as f64 / grid as f64, (k + 1) as f64 / grid as f64);
        if f0 >= f_c && (response(c, f0) < 0.0) != (response(c, f1) < 0.0) {
            first_zero = Some(crate::grace::bisect_zero(|f| response(c, f), f0, f1));
            break;
        }
    }
    let first_zero = first_zero.ok_or(Error::DegenerateResponse)?;
    let mut second_zero = 1.0;
    for k in 0..grid {
        let (f0, f1) = (k as f64 / grid as f64, (k + 1) as f64 / grid as f64);
        if f0 > first_zero && (response(c, f0) < 0.0) != (response(c, f1) < 0.0) {
            second_zero = crate::grace::bisect_zero(|f| response(c, f), f0, f1);
            break;
        }
    }
    let (_, peak) = crate::grace::golden_max(
        |f| response(c, f).abs(),
        first_zero,
        second_zero,
    );

    let derivative_magnitudes = if z >= 1 {
        even_derivatives(c, z).iter().map(|d| d.abs()).collect()
    } else {
        Vec::new()
    };

    Ok(FilterMetrics {
        f_r,
        f_c,
        rolloff_db_per_octave: rolloff,
        first_sidelobe_db: 20.0 * peak.log10(),
        derivative_magnitudes,
    })
}
