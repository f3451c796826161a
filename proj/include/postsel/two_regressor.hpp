#pragma once

// Closed forms for two regressors, O = 1, target theta_1: sigma^2 (X'X/n)^{-1}
// = [[s1^2, rho s1 s2], [rho s1 s2, s2^2]], so only theta_2 enters.

#include <cstdint>

#include "postsel/distribution.hpp"

namespace postsel {

struct TwoRegressorSetting {
  double rho = 0.0;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double theta2 = 0.0;
  int n = 7;
  double c2 = 2.015;

  /// Throws ModelError unless |rho| < 1, sigmas and c2 positive, n > 2.
  void validate() const;
};

enum class TwoRegressorVariant { unknown, known, cond_m1, cond_m2 };

/// Density of sqrt(n)(theta_tilde_1 - theta_1): unconditional (estimated or
/// known variance) or, for the known-variance selector, conditional on
/// selecting M1 or M2.
double two_regressor_density(const TwoRegressorSetting& setting, TwoRegressorVariant variant,
                             double t, const QuadratureSpec& spec = {});

/// Density of the restricted estimator of order 1 (variance s1^2 (1 - rho^2)).
double restricted_reference_density(const TwoRegressorSetting& setting, double t);
/// Density of the unrestricted estimator (variance s1^2).
double full_reference_density(const TwoRegressorSetting& setting, double t);

/// pi*(1) = Delta_1(sqrt(n) theta_2 / s2, c2).
double two_regressor_prob_m1_known(const TwoRegressorSetting& setting);
/// pi(1): the same window integrated against h with n - 2 degrees of freedom.
QuadResult two_regressor_prob_m1_unknown(const TwoRegressorSetting& setting,
                                         const QuadratureSpec& spec = {});

/// A concrete model realizing the setting (sigma = 1, theta = (theta1, theta2)).
struct TwoRegressorModel {
  RegressionDesign design;
  SelectionFamily family;
  TargetFunctional target;
  ParameterPoint params;
};

TwoRegressorModel two_regressor_model(const TwoRegressorSetting& setting, double theta1 = 0.0,
                                      std::uint64_t seed = 1);

}  // namespace postsel
