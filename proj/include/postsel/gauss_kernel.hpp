#pragma once

// Probability kernels shared by the finite-sample and limit formulas:
// the two-sided Gaussian window probability, the law of sigma_hat/sigma,
// integration against that law, and Gaussian region integrals.

#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "postsel/model_core.hpp"
#include "postsel/quadrature.hpp"
#include "postsel/random_stream.hpp"

namespace postsel {

/// A real number or one of +-infinity; never NaN.
class ExtendedReal {
 public:
  ExtendedReal(double value = 0.0);  // NOLINT: implicit from double is intended

  static ExtendedReal pos_inf() { return {std::numeric_limits<double>::infinity()}; }
  static ExtendedReal neg_inf() { return {-std::numeric_limits<double>::infinity()}; }

  [[nodiscard]] bool is_finite() const;
  [[nodiscard]] double value() const { return value_; }
  operator double() const { return value_; }  // NOLINT

 private:
  double value_;
};

/// P(|M - a| < b) for M ~ N(0, s^2). Zero when a is infinite or b <= 0;
/// an indicator of |a| < b when s = 0.
double delta(double s, ExtendedReal a, double b);

/// 1 - delta(s, a, b), evaluated from the two tails.
double delta_complement(double s, ExtendedReal a, double b);

/// Density of sqrt(chi^2_m / m) at s.
double chi_scaled_density(int m, double s);

/// Quantile of sqrt(chi^2_m / m).
double chi_scaled_quantile(int m, double u);

/// Cdf of sqrt(chi^2_m / m).
double chi_scaled_cdf(int m, double s);

/// Mass of the chi law dropped on each side when integrating against it.
inline constexpr double kChiTailMass = 1e-14;

/// Integral of f(s) h_m(s) over (0, inf), truncated to the central
/// 1 - 2e-14 of the law; the truncation bound is added to `err_est`.
/// `breakpoints` mark jumps or kinks of f.
QuadResult integrate_against_h(const std::function<double(double)>& f, int m,
                               const QuadratureSpec& spec,
                               std::span<const double> breakpoints = {});

/// Settings for randomized quasi-Monte Carlo region integrals.
struct QmcSpec {
  double abs_tol = 1e-4;
  long initial_points = 1L << 16;
  long max_points = 1L << 20;
  /// Independent random shifts; the error estimate is 3 standard errors across them.
  int replicates = 16;
  std::uint64_t seed = 0x5EEDu;
};

struct IntegrationSpec {
  QuadratureSpec outer{};
  /// Integrals nested inside another quadrature run 10x tighter.
  QuadratureSpec inner{1e-11, 1e-11, 200000};
  QmcSpec qmc{};
};

/// A region integrand depending on z only through the projection u = slope . z.
struct ProjectedIntegrand {
  RowVector slope;
  std::function<double(double)> of_projection;
  /// Values of u where the integrand changes abruptly.
  std::vector<double> breakpoints;
};

/// E[g(Z) 1{Z + mean_shift <= t}] for Z from the centered component.
///
/// Rank 0: point evaluation. Rank 1 (any k): the region is an interval
/// along the factor direction and the integral is 1-D adaptive quadrature
/// (closed form when g is absent). Rank >= 2: randomized Halton QMC with
/// err_est = 3 standard errors. An absent integrand means g = 1.
QuadResult gaussian_region_prob(const GaussianComponent& comp, const Vector& t,
                                const std::function<double(const Vector&)>& integrand,
                                const IntegrationSpec& spec);
QuadResult gaussian_region_prob(const GaussianComponent& comp, const Vector& t,
                                const IntegrationSpec& spec);
QuadResult gaussian_region_prob(const GaussianComponent& comp, const Vector& t,
                                const ProjectedIntegrand& integrand,
                                const IntegrationSpec& spec);

/// count x k matrix of independent draws mean_shift + L w.
Matrix sample_gaussian(const GaussianComponent& comp, int count, RandomStream& stream);

}  // namespace postsel
