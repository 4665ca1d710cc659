//! Standard normal helpers shared by the statistics, bounds, and allocation code.

use statrs::distribution::{Continuous, ContinuousCDF, Normal};
use std::sync::OnceLock;

fn std_normal() -> &'static Normal {
    static N: OnceLock<Normal> = OnceLock::new();
    N.get_or_init(|| Normal::new(0.0, 1.0).unwrap())
}

/// Standard normal density h(x).
pub fn std_normal_pdf(x: f64) -> f64 {
    std_normal().pdf(x)
}

/// Standard normal CDF H(x).
pub fn std_normal_cdf(x: f64) -> f64 {
    std_normal().cdf(x)
}

/// Standard normal quantile H^{-1}(p), p in (0, 1).
pub fn std_normal_quantile(p: f64) -> f64 {
    std_normal().inverse_cdf(p)
}

/// The ratio h(z)/H(z), strictly decreasing from +inf (z -> -inf) to 0.
///
/// For deep negative z the direct ratio loses all precision because H(z)
/// underflows, so we switch to the continued fraction for the Mills ratio.
pub fn pdf_over_cdf(z: f64) -> f64 {
    if z > -6.0 {
        std_normal_pdf(z) / std_normal_cdf(z)
    } else {
        // H(z) = h(z) * mills(-z) for the lower tail; g = 1 / mills(-z).
        1.0 / mills_upper(-z)
    }
}

/// Mills ratio Q(a)/h(a) of the upper tail, a > 0, via continued fraction:
/// m(a) = 1/(a + 1/(a + 2/(a + 3/(a + ...)))).
fn mills_upper(a: f64) -> f64 {
    let mut f = 0.0;
    for k in (1..=64).rev() {
        f = k as f64 / (a + f);
    }
    1.0 / (a + f)
}
