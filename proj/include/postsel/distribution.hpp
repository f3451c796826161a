#pragma once

// Finite-sample distribution of sqrt(n) A (theta_tilde - theta) for the
// general-to-specific estimator: cdfs, densities and the per-order terms.
//
// Both the finite-sample laws and their large-sample limits are mixtures of
// one shape. Order p contributes the Gaussian component of the order-p
// restricted fit, reweighted by the probability that the test of order p
// rejects given the component draw z (for p above the first order) and by
// the probability that every later test accepts. `MixtureLaw` stores that
// shape; `finite_sample_law` fills it from a design, the asymptotic module
// fills it from limit quantities.

#include <stdexcept>
#include <vector>

#include "postsel/gauss_kernel.hpp"
#include "postsel/model_core.hpp"
#include "postsel/selection.hpp"

namespace postsel {

enum class Variance { known, unknown };

/// Thrown by density evaluators when the law has no Lebesgue density.
class DensityUnavailable : public ModelError {
 public:
  using ModelError::ModelError;
};

struct DistributionResult {
  double value = 0.0;
  /// Contributions of orders O..P (zero below the first order of the law).
  std::vector<double> per_model_terms;
  double err_est = 0.0;
  bool converged = true;
};

struct MixtureTerm {
  GaussianComponent component;
  /// Regression of the order-p test numerator on z.
  RowVector slope;
  /// Residual scale of that numerator given z: sigma zeta_p.
  double conditional_scale = 0.0;
};

class MixtureLaw {
 public:
  /// `terms` covers orders first..max of `tests`. `df` is the degrees of
  /// freedom of sigma_hat; 0 means only the known-variance form exists.
  MixtureLaw(TestSequence tests, std::vector<MixtureTerm> terms, int df);

  [[nodiscard]] const TestSequence& tests() const { return tests_; }
  [[nodiscard]] int df() const { return df_; }
  [[nodiscard]] int min_order() const { return tests_.min_order; }
  [[nodiscard]] int first_order() const { return tests_.first_order; }
  [[nodiscard]] int max_order() const { return tests_.max_order; }
  [[nodiscard]] int dimension() const { return dimension_; }
  [[nodiscard]] const MixtureTerm& term(int p) const;

  /// 1 - gamma*: the order-p test rejects, given slope . z = u, at variance ratio s.
  [[nodiscard]] double rejection(int p, double u, double s) const;
  /// Values of u at which rejection(p, ., 1) has its window edges.
  [[nodiscard]] std::vector<double> projection_breakpoints(int p) const;
  /// Values of s where rejection(p, u, .) jumps (only for a degenerate conditional law).
  [[nodiscard]] std::vector<double> ratio_breakpoints(int p, double u) const;

  /// Whether a Lebesgue density exists: first order > 0 and a full-rank first component.
  [[nodiscard]] bool has_density() const;

 private:
  TestSequence tests_;
  std::vector<MixtureTerm> terms_;
  int df_ = 0;
  int dimension_ = 0;
};

MixtureLaw finite_sample_law(const RegressionDesign& design, const SelectionFamily& family,
                             const TargetFunctional& target, const ParameterPoint& params);

/// Term p of the cdf at t; p below the first order gives zero.
QuadResult mixture_term_cdf(const MixtureLaw& law, int p, const Vector& t, Variance variance,
                            const IntegrationSpec& spec = {});
/// Term p of the density at t; throws DensityUnavailable unless law.has_density().
QuadResult mixture_term_density(const MixtureLaw& law, int p, const Vector& t, Variance variance,
                                const IntegrationSpec& spec = {});

DistributionResult mixture_cdf(const MixtureLaw& law, const Vector& t, Variance variance,
                               const IntegrationSpec& spec = {});
DistributionResult mixture_density(const MixtureLaw& law, const Vector& t, Variance variance,
                                   const IntegrationSpec& spec = {});

/// Evaluations at many points, spread over default_thread_count() workers.
std::vector<DistributionResult> mixture_cdf_grid(const MixtureLaw& law,
                                                 const std::vector<Vector>& points,
                                                 Variance variance,
                                                 const IntegrationSpec& spec = {});
std::vector<DistributionResult> mixture_density_grid(const MixtureLaw& law,
                                                     const std::vector<Vector>& points,
                                                     Variance variance,
                                                     const IntegrationSpec& spec = {});

/// G*_{n,theta,sigma}(t).
DistributionResult cdf_known_variance(const RegressionDesign& design, const SelectionFamily& family,
                                      const TargetFunctional& target, const ParameterPoint& params,
                                      const Vector& t, const IntegrationSpec& spec = {});
/// G_{n,theta,sigma}(t).
DistributionResult cdf_unknown_variance(const RegressionDesign& design,
                                        const SelectionFamily& family,
                                        const TargetFunctional& target,
                                        const ParameterPoint& params, const Vector& t,
                                        const IntegrationSpec& spec = {});
DistributionResult density_known_variance(const RegressionDesign& design,
                                          const SelectionFamily& family,
                                          const TargetFunctional& target,
                                          const ParameterPoint& params, const Vector& t,
                                          const IntegrationSpec& spec = {});
DistributionResult density_unknown_variance(const RegressionDesign& design,
                                            const SelectionFamily& family,
                                            const TargetFunctional& target,
                                            const ParameterPoint& params, const Vector& t,
                                            const IntegrationSpec& spec = {});

/// G(t|p) pi(p) (or its known-variance analogue) as a one-term result.
DistributionResult weighted_conditional_cdf(const RegressionDesign& design,
                                            const SelectionFamily& family,
                                            const TargetFunctional& target,
                                            const ParameterPoint& params, int p, const Vector& t,
                                            Variance variance, const IntegrationSpec& spec = {});

}  // namespace postsel
