#include "postsel/asymptotic.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace postsel {

LimitParameter::LimitParameter(std::vector<ExtendedReal> psi_in, double sigma_in, Matrix q_in)
    : psi(std::move(psi_in)), sigma(sigma_in), q(std::move(q_in)) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ModelError("sigma must be positive and finite");
  if (static_cast<int>(psi.size()) != q.size()) throw ModelError("psi length does not match Q");
}

int p_star(const std::vector<ExtendedReal>& psi, const SelectionFamily& family) {
  if (static_cast<int>(psi.size()) != family.max_order()) {
    throw ModelError("psi length does not match P");
  }
  for (int p = family.max_order(); p > family.min_order(); --p) {
    if (!psi[static_cast<std::size_t>(p - 1)].is_finite()) return p;
  }
  return family.min_order();
}

Vector limit_bias(const LimitParameter& limit, int p) {
  const int big_p = limit.q.size();
  if (p < 0 || p > big_p) throw ModelError("bias order out of range");
  Vector tail(big_p - p);
  for (int j = p; j < big_p; ++j) {
    const ExtendedReal& v = limit.psi[static_cast<std::size_t>(j)];
    if (!v.is_finite()) {
      throw ModelError("limit bias of order " + std::to_string(p) +
                       " needs finite psi beyond p, entry " + std::to_string(j + 1) + " is infinite");
    }
    tail(j - p) = v.value();
  }
  Vector out = Vector::Zero(big_p);
  if (p > 0 && p < big_p) {
    out.head(p) = limit.q.leading_inverse(p) * (limit.q.matrix().block(0, p, p, big_p - p) * tail);
  }
  out.tail(big_p - p) = -tail;
  return out;
}

namespace {

void check_shapes(const LimitParameter& limit, const SelectionFamily& family,
                  const TargetFunctional& target) {
  if (family.max_order() != limit.q.size()) throw ModelError("selection family does not match Q");
  if (target.regressors() != limit.q.size()) throw ModelError("target width does not match Q");
}

TestSequence limit_tests(const LimitParameter& limit, const SelectionFamily& family) {
  TestSequence tests;
  tests.min_order = family.min_order();
  tests.first_order = p_star(limit.psi, family);
  tests.max_order = family.max_order();
  const auto count = static_cast<std::size_t>(tests.max_order - tests.first_order + 1);
  tests.location.assign(count, 0.0);
  tests.test_scale.assign(count, 0.0);
  tests.half_width.assign(count, 0.0);
  for (int q = tests.first_order + 1; q <= tests.max_order; ++q) {
    const auto i = static_cast<std::size_t>(q - tests.first_order);
    const double scale = limit.sigma * xi(limit.q, q);
    tests.location[i] = limit_bias(limit, q)(q - 1) + limit.psi[static_cast<std::size_t>(q - 1)].value();
    tests.test_scale[i] = scale;
    tests.half_width[i] = family.critical(q) * scale;
  }
  return tests;
}

}  // namespace

MixtureLaw limit_law(const LimitParameter& limit, const SelectionFamily& family,
                     const TargetFunctional& target) {
  check_shapes(limit, family, target);
  TestSequence tests = limit_tests(limit, family);
  std::vector<MixtureTerm> terms;
  const double var = limit.sigma * limit.sigma;
  for (int p = tests.first_order; p <= tests.max_order; ++p) {
    Vector shift = target.a() * limit_bias(limit, p);
    Matrix cov = var * projected_covariance(limit.q, target, p);
    MixtureTerm term{GaussianComponent(std::move(shift), std::move(cov)),
                     RowVector::Zero(target.k()), 0.0};
    if (p > tests.first_order) {
      const ConditionalQuantities cq = conditional_quantities(limit.q, target, p);
      term.slope = cq.b;
      term.conditional_scale = limit.sigma * std::sqrt(cq.zeta_sq);
    }
    terms.push_back(std::move(term));
  }
  return MixtureLaw(std::move(tests), std::move(terms), 0);
}

DistributionResult limit_cdf(const LimitParameter& limit, const SelectionFamily& family,
                             const TargetFunctional& target, const Vector& t,
                             const IntegrationSpec& spec) {
  return mixture_cdf(limit_law(limit, family, target), t, Variance::known, spec);
}

DistributionResult limit_density(const LimitParameter& limit, const SelectionFamily& family,
                                 const TargetFunctional& target, const Vector& t,
                                 const IntegrationSpec& spec) {
  return mixture_density(limit_law(limit, family, target), t, Variance::known, spec);
}

double limit_selection_prob(const LimitParameter& limit, const SelectionFamily& family, int p) {
  if (family.max_order() != limit.q.size()) throw ModelError("selection family does not match Q");
  if (p < family.min_order() || p > family.max_order()) throw ModelError("order outside [O, P]");
  return limit_tests(limit, family).selection_kernel(p, 1.0);
}

LimitParameter local_alternative_parameter(const Vector& theta, const Vector& gamma, double sigma,
                                           const Matrix& q, const SelectionFamily& family) {
  const auto big_p = static_cast<Eigen::Index>(family.max_order());
  if (theta.size() != big_p || gamma.size() != big_p) {
    throw ModelError("theta and gamma must have length P");
  }
  const int star = std::max(order_of(theta), family.min_order());
  std::vector<ExtendedReal> psi;
  constexpr double inf = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < big_p; ++j) {
    if (!std::isfinite(gamma(j)) || !std::isfinite(theta(j))) throw ModelError("theta and gamma must be finite");
    if (j < star && theta(j) != 0.0) {
      psi.emplace_back(theta(j) > 0.0 ? inf : -inf);
    } else {
      psi.emplace_back(gamma(j));
    }
  }
  return LimitParameter(std::move(psi), sigma, q);
}

DistributionResult local_alternative_limit(const Vector& theta, const Vector& gamma, double sigma,
                                           const Matrix& q, const SelectionFamily& family,
                                           const TargetFunctional& target, const Vector& t,
                                           const IntegrationSpec& spec) {
  return limit_cdf(local_alternative_parameter(theta, gamma, sigma, q, family), family, target, t,
                   spec);
}

DistributionResult fixed_parameter_limit_cdf(const Vector& theta, double sigma, const Matrix& q,
                                             const SelectionFamily& family,
                                             const TargetFunctional& target, const Vector& t,
                                             const IntegrationSpec& spec) {
  return local_alternative_limit(theta, Vector::Zero(theta.size()), sigma, q, family, target, t,
                                 spec);
}

DistributionResult recentered_cdf(const RegressionDesign& design, const SelectionFamily& family,
                                  const TargetFunctional& target, const ParameterPoint& params,
                                  const Vector& d, const Vector& t, Variance variance,
                                  const IntegrationSpec& spec) {
  if (d.size() != design.regressors()) throw ModelError("centering vector must have length P");
  const Vector shift =
      std::sqrt(static_cast<double>(design.n())) * (target.a() * (d - params.theta));
  return mixture_cdf(finite_sample_law(design, family, target, params), t + shift, variance, spec);
}

}  // namespace postsel
