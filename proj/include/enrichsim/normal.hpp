#pragma once

namespace enrichsim {

/// Standard normal CDF. Implemented through the complementary error
/// function so both tails keep full relative accuracy; arguments beyond
/// +-8 arise routinely during event-size bisection.
double norm_cdf(double x);

/// Upper-tail probability 1 - Phi(x) without cancellation; this is what
/// conditional-power formulas should call so tiny powers stay nonzero.
double norm_sf(double x);

/// Standard normal density.
double norm_pdf(double x);

/// Inverse standard normal CDF for p in (0,1). Rational initial
/// approximation refined by one Halley step; round-trips with norm_cdf
/// to ~1e-14 over p in [1e-16, 1-1e-16].
double norm_quantile(double p);

}  // namespace enrichsim
