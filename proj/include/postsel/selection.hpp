#pragma once

// General-to-specific model selection: the data-driven selector (variance
// estimated from the full model), the known-variance selector, and the exact
// probabilities with which each selects every candidate order.

#include <vector>

#include "postsel/gauss_kernel.hpp"
#include "postsel/model_core.hpp"

namespace postsel {

struct SelectionOutcome {
  int p_hat = 0;
  /// T_O, ..., T_P (T_O = 0).
  Vector t_stats;
  /// Estimated (or, for the known-variance selector, the true) error scale.
  double sigma_hat = 0.0;
};

/// Restricted least-squares fits of every order, factored once per design.
class ModelSelector {
 public:
  ModelSelector(const RegressionDesign& design, const SelectionFamily& family);

  /// Uses sigma_hat from the full-model residuals.
  [[nodiscard]] SelectionOutcome select(const Vector& y) const;
  [[nodiscard]] SelectionOutcome select_known_sigma(const Vector& y, double sigma) const;

  /// theta_tilde(p): length-P vector, zero beyond index p.
  [[nodiscard]] Vector restricted_fit(const Vector& y, int p) const;
  /// Residual-based variance estimate from the order-P fit.
  [[nodiscard]] double sigma_hat(const Vector& y) const;

  [[nodiscard]] const RegressionDesign& design() const { return design_; }
  [[nodiscard]] const SelectionFamily& family() const { return family_; }

 private:
  [[nodiscard]] SelectionOutcome select_with_scale(const Vector& y, double scale) const;

  RegressionDesign design_;
  SelectionFamily family_;
  /// hat_[p-1]: p x n matrix (X[p]'X[p])^{-1} X[p]'.
  std::vector<Matrix> hat_;
  std::vector<double> xi_;
};

SelectionOutcome select_model(const Vector& y, const RegressionDesign& design,
                              const SelectionFamily& family);
SelectionOutcome select_model_known_sigma(const Vector& y, const RegressionDesign& design,
                                          const SelectionFamily& family, double sigma);

/// The chain of t-tests behind either selector, reduced to one Gaussian
/// window per order q > first:
///   acceptance(q, s) = Delta_{test_scale_q}(location_q, s * half_width_q).
/// Finite samples use first = O, location_q = sqrt(n) eta_{n,q}(q),
/// test_scale_q = sigma xi_{n,q}, half_width_q = c_q sigma xi_{n,q}.
struct TestSequence {
  int min_order = 0;
  int first_order = 0;
  int max_order = 0;
  /// Indexed by q - first_order; entry 0 unused.
  std::vector<double> location;
  std::vector<double> test_scale;
  std::vector<double> half_width;

  [[nodiscard]] double acceptance(int q, double s) const;
  /// prod_{q > p} acceptance(q, s).
  [[nodiscard]] double trailing_acceptance(int p, double s) const;
  /// Probability mass of order p at variance ratio s: the s-integrand of the selection law.
  [[nodiscard]] double selection_kernel(int p, double s) const;
};

TestSequence test_sequence(const RegressionDesign& design, const SelectionFamily& family,
                           const ParameterPoint& params);

/// pi*(p): known-variance selection probability.
double selection_prob_known(const TestSequence& tests, int p);
double selection_prob_known(const RegressionDesign& design, const SelectionFamily& family,
                            const ParameterPoint& params, int p);

/// pi(p): the kernel integrated against the law of sigma_hat / sigma with `df` degrees of freedom.
QuadResult selection_prob_unknown(const TestSequence& tests, int df, int p,
                                  const QuadratureSpec& spec = {});
QuadResult selection_prob_unknown(const RegressionDesign& design, const SelectionFamily& family,
                                  const ParameterPoint& params, int p,
                                  const QuadratureSpec& spec = {});

}  // namespace postsel
