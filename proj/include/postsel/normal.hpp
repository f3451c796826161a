#pragma once

namespace postsel {

/// Standard normal cdf, accurate to a few ulps over the whole real line.
double normal_cdf(double x);

/// Upper tail 1 - Phi(x) without cancellation.
double normal_sf(double x);

double normal_pdf(double x);

/// Inverse of `normal_cdf` on (0, 1); returns -inf / +inf at 0 / 1.
double normal_quantile(double u);

}  // namespace postsel
