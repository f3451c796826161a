#pragma once

// Large-sample limits along sequences with sqrt(n) theta -> psi (entries may
// be infinite) and X'X/n -> Q: the limit cdf, the limit bias of each
// restricted fit, the limit selection probabilities, and the fixed-parameter
// and local-alternative special cases.

#include <vector>

#include "postsel/distribution.hpp"
#include "postsel/gauss_kernel.hpp"
#include "postsel/model_core.hpp"

namespace postsel {

struct LimitParameter {
  LimitParameter(std::vector<ExtendedReal> psi, double sigma, Matrix q);

  std::vector<ExtendedReal> psi;
  double sigma;
  Gram q;
};

/// Largest p with O < p <= P and |psi_p| infinite; O if there is none.
int p_star(const std::vector<ExtendedReal>& psi, const SelectionFamily& family);

/// delta^(p): limit of sqrt(n)(eta_n(p) - theta). Needs psi_{p+1..P} finite.
Vector limit_bias(const LimitParameter& limit, int p);

/// The limit law as a known-variance mixture starting at order p*.
MixtureLaw limit_law(const LimitParameter& limit, const SelectionFamily& family,
                     const TargetFunctional& target);

DistributionResult limit_cdf(const LimitParameter& limit, const SelectionFamily& family,
                             const TargetFunctional& target, const Vector& t,
                             const IntegrationSpec& spec = {});
/// Exists iff p* > 0 and A[p*] has rank k (else DensityUnavailable).
DistributionResult limit_density(const LimitParameter& limit, const SelectionFamily& family,
                                 const TargetFunctional& target, const Vector& t,
                                 const IntegrationSpec& spec = {});

/// Limit of pi(p) and pi*(p); zero below p*.
double limit_selection_prob(const LimitParameter& limit, const SelectionFamily& family, int p);

/// psi for theta + gamma / sqrt(n): p* = max(p_0(theta), O), gamma beyond p*,
/// +-infinity where theta is nonzero.
LimitParameter local_alternative_parameter(const Vector& theta, const Vector& gamma, double sigma,
                                           const Matrix& q, const SelectionFamily& family);

DistributionResult local_alternative_limit(const Vector& theta, const Vector& gamma, double sigma,
                                           const Matrix& q, const SelectionFamily& family,
                                           const TargetFunctional& target, const Vector& t,
                                           const IntegrationSpec& spec = {});

/// Limit at a fixed theta (local alternative with gamma = 0).
DistributionResult fixed_parameter_limit_cdf(const Vector& theta, double sigma, const Matrix& q,
                                             const SelectionFamily& family,
                                             const TargetFunctional& target, const Vector& t,
                                             const IntegrationSpec& spec = {});

/// Cdf of sqrt(n) A (theta_tilde - d): the centered cdf at t + sqrt(n) A (d - theta).
DistributionResult recentered_cdf(const RegressionDesign& design, const SelectionFamily& family,
                                  const TargetFunctional& target, const ParameterPoint& params,
                                  const Vector& d, const Vector& t,
                                  Variance variance = Variance::unknown,
                                  const IntegrationSpec& spec = {});

}  // namespace postsel
