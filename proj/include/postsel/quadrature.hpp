#pragma once

#include <functional>
#include <span>

namespace postsel {

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  /// Budget of integrand evaluations.
  int max_nodes = 200000;

  /// Throws std::invalid_argument unless tolerances lie in (0, 1) and max_nodes >= 15.
  void validate() const;
};

struct QuadResult {
  double value = 0.0;
  double err_est = 0.0;
  int nodes = 0;
  bool converged = true;
};

/// Globally adaptive 7/15-point Gauss-Kronrod quadrature on [a, b].
///
/// The interval with the largest error estimate is bisected until the
/// summed estimate drops below max(abs_tol, rel_tol * |value|) or the node
/// budget runs out (then `converged` is false and the partial value is
/// returned). `breakpoints` inside (a, b) seed the initial partition.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadratureSpec& spec, std::span<const double> breakpoints = {});

}  // namespace postsel
