//! Linear-phase FIR low-pass design built on the Grace function instead of
//! the windowed sinc.
//!
//! The truncated sinc produces Gibbs ripple in the pass band. The Grace
//! polynomial — a Chebyshev-based main lobe that reaches zero smoothly at
//! the ends of `[-1, 1]` — has a Fourier transform that decreases
//! monotonically through the pass band, and its window exponent `p` trades
//! transition steepness against stop-band depth. Sampling the function to
//! get taps reintroduces a small, purely discretization-born ripple; the
//! [`deripple`] module removes it exactly with a preconditioned
//! minimum-norm least-squares adjustment.
//!
//! Quick start:
//!
//! ```
//! use grace_fir::{FilterSpec, GraceParams};
//!
//! let params = GraceParams::new(10, 4)?;
//! let spec = FilterSpec::new(50, params)?;
//! let (taps, report) = grace_fir::auto_compensate(spec)?;
//!
//! assert!(report.accepted);
//! assert!(grace_fir::ripple_scan(&taps, 2000).passband_ripple <= 1e-14);
//! # Ok::<(), grace_fir::Error>(())
//! ```
//!
//! Frequency convention: 1 is the Nyquist frequency throughout.
//!
//! The `book/` directory of the repository is an mdBook walking through
//! the mathematics; its code listings compile and run as doc-tests of
//! this crate.

pub mod asymptotics;
pub mod chebyshev;
pub mod deripple;
mod error;
pub mod filter;
pub mod grace;
mod quad;

pub use asymptotics::{
    cutoff_product, d_of_p, derivative_prediction, design_search, dirichlet_coefficient,
    dirichlet_sum, limiting_mfr, DesignResult, DesignTargets, SeriesKind,
};
pub use chebyshev::{cheb_t, cheb_u_even, grace_poly, grace_poly_roots, scaled_sinc};
pub use deripple::{
    auto_compensate, auto_compensate_with, build_design_matrix, build_rhs, compensate,
    preconditioner_rows, singular_values, svd_tall, weight, CompensationReport, DesignMatrix,
    StoppingCriteria, SvdFactorization,
};
pub use error::{Error, Result};
pub use filter::{
    coefficients, even_derivatives, measure_metrics, reference_frequency, response,
    response_derivative, ripple_scan, CoefficientVector, FilterMetrics, FilterSpec, RippleReport,
};
pub use grace::{
    grace_fn, norm_a, norm_b, transform, transform_metrics, transform_moment, GraceParams,
    TransformMetrics,
};

// Run the book's code listings as doc-tests so the guide cannot drift from
// the library.
#[cfg(doctest)]
mod book {
    macro_rules! chapter {
        ($name:ident, $path:literal) => {
            #[doc = include_str!($path)]
            mod $name {}
        };
    }

    chapter!(intro, "../../../book/src/intro.md");
    chapter!(grace_function, "../../../book/src/grace-function.md");
    chapter!(filter_design, "../../../book/src/filter-design.md");
    chapter!(deripple, "../../../book/src/deripple.md");
    chapter!(asymptotics, "../../../book/src/asymptotics.md");
    chapter!(cli, "../../../book/src/cli.md");
}
