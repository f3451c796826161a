#include "postsel/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_map>

#include <boost/math/quadrature/gauss.hpp>

#include "postsel/parallel.hpp"

namespace postsel {

MixtureLaw::MixtureLaw(TestSequence tests, std::vector<MixtureTerm> terms, int df)
    : tests_(std::move(tests)), terms_(std::move(terms)), df_(df) {
  if (tests_.first_order < tests_.min_order || tests_.first_order > tests_.max_order) {
    throw ModelError("mixture first order outside [O, P]");
  }
  const auto count = static_cast<std::size_t>(tests_.max_order - tests_.first_order + 1);
  if (terms_.size() != count || tests_.location.size() != count ||
      tests_.test_scale.size() != count || tests_.half_width.size() != count) {
    throw ModelError("mixture needs one term and one test per order from first to P");
  }
  if (df_ < 0) throw ModelError("degrees of freedom must be nonnegative");
  dimension_ = terms_.front().component.dimension();
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    const MixtureTerm& term = terms_[i];
    if (term.component.dimension() != dimension_) throw ModelError("mixture terms differ in dimension");
    if (i > 0 && term.slope.size() != dimension_) throw ModelError("mixture slope has wrong dimension");
    if (!(term.conditional_scale >= 0.0)) throw ModelError("conditional scale must be nonnegative");
  }
}

const MixtureTerm& MixtureLaw::term(int p) const {
  if (p < first_order() || p > max_order()) {
    throw ModelError("order " + std::to_string(p) + " has no mixture term");
  }
  return terms_[static_cast<std::size_t>(p - first_order())];
}

double MixtureLaw::rejection(int p, double u, double s) const {
  const auto i = static_cast<std::size_t>(p - first_order());
  return delta_complement(terms_[i].conditional_scale, tests_.location[i] + u,
                          s * tests_.half_width[i]);
}

std::vector<double> MixtureLaw::projection_breakpoints(int p) const {
  const auto i = static_cast<std::size_t>(p - first_order());
  const double loc = tests_.location[i];
  const double w = tests_.half_width[i];
  return {-w - loc, -loc, w - loc};
}

std::vector<double> MixtureLaw::ratio_breakpoints(int p, double u) const {
  const auto i = static_cast<std::size_t>(p - first_order());
  if (terms_[i].conditional_scale > 0.0 || !(tests_.half_width[i] > 0.0)) return {};
  return {std::abs(tests_.location[i] + u) / tests_.half_width[i]};
}

bool MixtureLaw::has_density() const {
  return first_order() > 0 && terms_.front().component.has_density();
}

MixtureLaw finite_sample_law(const RegressionDesign& design, const SelectionFamily& family,
                             const TargetFunctional& target, const ParameterPoint& params) {
  if (target.regressors() != design.regressors()) throw ModelError("target width does not match P");
  TestSequence tests = test_sequence(design, family, params);
  std::vector<MixtureTerm> terms;
  for (int p = tests.first_order; p <= tests.max_order; ++p) {
    MixtureTerm term{gaussian_component(design, target, params, p), RowVector::Zero(target.k()), 0.0};
    if (p > tests.first_order) {
      const ConditionalQuantities cq = conditional_quantities(design, target, p);
      term.slope = cq.b;
      term.conditional_scale = params.sigma * std::sqrt(cq.zeta_sq);
    }
    terms.push_back(std::move(term));
  }
  return MixtureLaw(std::move(tests), std::move(terms), design.n() - design.regressors());
}

// ---------------------------------------------------------------------------

namespace {

void check_variance(const MixtureLaw& law, Variance variance) {
  if (variance == Variance::unknown && law.df() < 1) {
    throw ModelError("this law has no estimated-variance form");
  }
}

void check_point(const MixtureLaw& law, const Vector& t, bool finite) {
  if (t.size() != law.dimension()) throw ModelError("argument length does not match k");
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (std::isnan(t(i)) || (finite && !std::isfinite(t(i)))) {
      throw ModelError("argument must be finite");
    }
  }
}

// Weight of the first order: the chance every later test accepts.
QuadResult first_weight(const MixtureLaw& law, Variance variance, const QuadratureSpec& spec) {
  const TestSequence& tests = law.tests();
  const int first = law.first_order();
  if (variance == Variance::known) return {tests.trailing_acceptance(first, 1.0), 0.0, 1, true};
  return integrate_against_h([&](double s) { return tests.trailing_acceptance(first, s); },
                             law.df(), spec);
}

// Estimated-variance rejection weight of order p as a function of the
// projection u, memoized on u; tracks the worst inner error.
class RatioIntegral {
 public:
  RatioIntegral(const MixtureLaw& law, int p, const QuadratureSpec& spec)
      : law_(law), p_(p), spec_(spec) {}

  double operator()(double u) {
    auto it = cache_.find(u);
    if (it != cache_.end()) return it->second;
    const std::vector<double> breaks = law_.ratio_breakpoints(p_, u);
    const QuadResult r = integrate_against_h(
        [&](double s) {
          const double reject = law_.rejection(p_, u, s);
          return reject == 0.0 ? 0.0 : reject * law_.tests().trailing_acceptance(p_, s);
        },
        law_.df(), spec_, breaks);
    max_err_ = std::max(max_err_, r.err_est);
    converged_ = converged_ && r.converged;
    cache_.emplace(u, r.value);
    return r.value;
  }

  [[nodiscard]] double max_err() const { return max_err_; }
  [[nodiscard]] bool converged() const { return converged_; }

 private:
  const MixtureLaw& law_;
  int p_;
  QuadratureSpec spec_;
  std::unordered_map<double, double> cache_;
  double max_err_ = 0.0;
  bool converged_ = true;
};

// Fixed composite Gauss-Legendre rule in s for the QMC path, with the
// u-independent factor h(s) * trailing(s) folded into the weights.
class RatioGrid {
 public:
  RatioGrid(const MixtureLaw& law, int p) : law_(law), p_(p) {
    using Rule = boost::math::quadrature::gauss<double, 20>;
    const double lo = chi_scaled_quantile(law.df(), kChiTailMass);
    const double hi = chi_scaled_quantile(law.df(), 1.0 - kChiTailMass);
    constexpr int kPanels = 16;
    const double width = (hi - lo) / kPanels;
    for (int j = 0; j < kPanels; ++j) {
      const double mid = lo + (j + 0.5) * width;
      for (std::size_t i = 0; i < Rule::abscissa().size(); ++i) {
        for (const double sign : {-1.0, 1.0}) {
          const double s = mid + sign * 0.5 * width * Rule::abscissa()[i];
          const double w = 0.5 * width * Rule::weights()[i];
          nodes_.push_back(s);
          weights_.push_back(w * chi_scaled_density(law.df(), s) *
                             law.tests().trailing_acceptance(p, s));
        }
      }
    }
  }

  double operator()(double u) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (weights_[i] != 0.0) acc += weights_[i] * law_.rejection(p_, u, nodes_[i]);
    }
    return acc;
  }

 private:
  const MixtureLaw& law_;
  int p_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

std::vector<double> unknown_breakpoints(const MixtureLaw& law, int p) {
  // The estimated-variance weight is smooth except where the window centre crosses zero.
  const auto i = static_cast<std::size_t>(p - law.first_order());
  return {-law.tests().location[i]};
}

}  // namespace

QuadResult mixture_term_cdf(const MixtureLaw& law, int p, const Vector& t, Variance variance,
                            const IntegrationSpec& spec) {
  check_variance(law, variance);
  check_point(law, t, false);
  if (p < law.min_order() || p > law.max_order()) throw ModelError("order outside [O, P]");
  if (p < law.first_order()) return {};
  const MixtureTerm& term = law.term(p);
  if (p == law.first_order()) {
    const QuadResult weight = first_weight(law, variance, spec.outer);
    const QuadResult mass = gaussian_region_prob(term.component, t, spec);
    return {mass.value * weight.value, mass.err_est * weight.value + weight.err_est,
            mass.nodes + weight.nodes, mass.converged && weight.converged};
  }
  if (variance == Variance::known) {
    const double trailing = law.tests().trailing_acceptance(p, 1.0);
    if (trailing == 0.0) return {};
    ProjectedIntegrand g{term.slope, [&](double u) { return law.rejection(p, u, 1.0); },
                         law.projection_breakpoints(p)};
    QuadResult r = gaussian_region_prob(term.component, t, g, spec);
    r.value *= trailing;
    r.err_est *= trailing;
    return r;
  }
  if (term.component.rank() >= 2) {
    const RatioGrid grid(law, p);
    ProjectedIntegrand g{term.slope, [&](double u) { return grid(u); }, {}};
    return gaussian_region_prob(term.component, t, g, spec);
  }
  RatioIntegral inner(law, p, spec.inner);
  ProjectedIntegrand g{term.slope, [&](double u) { return inner(u); }, unknown_breakpoints(law, p)};
  QuadResult r = gaussian_region_prob(term.component, t, g, spec);
  r.err_est += inner.max_err();
  r.converged = r.converged && inner.converged();
  return r;
}

QuadResult mixture_term_density(const MixtureLaw& law, int p, const Vector& t, Variance variance,
                                const IntegrationSpec& spec) {
  check_variance(law, variance);
  check_point(law, t, true);
  if (!law.has_density()) {
    throw DensityUnavailable(
        "no Lebesgue density: needs a first order > 0 with a full-rank target block");
  }
  if (p < law.min_order() || p > law.max_order()) throw ModelError("order outside [O, P]");
  if (p < law.first_order()) return {};
  const MixtureTerm& term = law.term(p);
  const Vector z = t - term.component.mean_shift();
  const double phi = term.component.density(z);
  if (p == law.first_order()) {
    const QuadResult weight = first_weight(law, variance, spec.outer);
    return {phi * weight.value, phi * weight.err_est, weight.nodes, weight.converged};
  }
  const double u = term.slope.dot(z);
  if (variance == Variance::known) {
    return {phi * law.rejection(p, u, 1.0) * law.tests().trailing_acceptance(p, 1.0), 0.0, 1, true};
  }
  RatioIntegral inner(law, p, spec.outer);
  const double w = inner(u);
  return {phi * w, phi * inner.max_err(), 0, inner.converged()};
}

namespace {

template <typename TermFn>
DistributionResult sum_terms(const MixtureLaw& law, TermFn&& term_fn) {
  DistributionResult out;
  out.per_model_terms.assign(static_cast<std::size_t>(law.max_order() - law.min_order() + 1), 0.0);
  for (int p = law.first_order(); p <= law.max_order(); ++p) {
    const QuadResult r = term_fn(p);
    out.per_model_terms[static_cast<std::size_t>(p - law.min_order())] = r.value;
    out.value += r.value;
    out.err_est += r.err_est;
    out.converged = out.converged && r.converged;
  }
  return out;
}

}  // namespace

DistributionResult mixture_cdf(const MixtureLaw& law, const Vector& t, Variance variance,
                               const IntegrationSpec& spec) {
  DistributionResult out =
      sum_terms(law, [&](int p) { return mixture_term_cdf(law, p, t, variance, spec); });
  out.value = std::clamp(out.value, 0.0, 1.0);
  return out;
}

DistributionResult mixture_density(const MixtureLaw& law, const Vector& t, Variance variance,
                                   const IntegrationSpec& spec) {
  return sum_terms(law, [&](int p) { return mixture_term_density(law, p, t, variance, spec); });
}

namespace {

template <typename Eval>
std::vector<DistributionResult> over_grid(const std::vector<Vector>& points, Eval&& eval) {
  std::vector<DistributionResult> out(points.size());
  parallel_for(points.size(), default_thread_count(), [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = eval(points[i]);
  });
  return out;
}

}  // namespace

std::vector<DistributionResult> mixture_cdf_grid(const MixtureLaw& law,
                                                 const std::vector<Vector>& points,
                                                 Variance variance, const IntegrationSpec& spec) {
  return over_grid(points, [&](const Vector& t) { return mixture_cdf(law, t, variance, spec); });
}

std::vector<DistributionResult> mixture_density_grid(const MixtureLaw& law,
                                                     const std::vector<Vector>& points,
                                                     Variance variance,
                                                     const IntegrationSpec& spec) {
  return over_grid(points,
                   [&](const Vector& t) { return mixture_density(law, t, variance, spec); });
}

// ---------------------------------------------------------------------------

DistributionResult cdf_known_variance(const RegressionDesign& design, const SelectionFamily& family,
                                      const TargetFunctional& target, const ParameterPoint& params,
                                      const Vector& t, const IntegrationSpec& spec) {
  return mixture_cdf(finite_sample_law(design, family, target, params), t, Variance::known, spec);
}

DistributionResult cdf_unknown_variance(const RegressionDesign& design,
                                        const SelectionFamily& family,
                                        const TargetFunctional& target,
                                        const ParameterPoint& params, const Vector& t,
                                        const IntegrationSpec& spec) {
  return mixture_cdf(finite_sample_law(design, family, target, params), t, Variance::unknown,
                     spec);
}

DistributionResult density_known_variance(const RegressionDesign& design,
                                          const SelectionFamily& family,
                                          const TargetFunctional& target,
                                          const ParameterPoint& params, const Vector& t,
                                          const IntegrationSpec& spec) {
  return mixture_density(finite_sample_law(design, family, target, params), t, Variance::known,
                         spec);
}

DistributionResult density_unknown_variance(const RegressionDesign& design,
                                            const SelectionFamily& family,
                                            const TargetFunctional& target,
                                            const ParameterPoint& params, const Vector& t,
                                            const IntegrationSpec& spec) {
  return mixture_density(finite_sample_law(design, family, target, params), t, Variance::unknown,
                         spec);
}

DistributionResult weighted_conditional_cdf(const RegressionDesign& design,
                                            const SelectionFamily& family,
                                            const TargetFunctional& target,
                                            const ParameterPoint& params, int p, const Vector& t,
                                            Variance variance, const IntegrationSpec& spec) {
  const MixtureLaw law = finite_sample_law(design, family, target, params);
  const QuadResult r = mixture_term_cdf(law, p, t, variance, spec);
  DistributionResult out;
  out.per_model_terms.assign(static_cast<std::size_t>(law.max_order() - law.min_order() + 1), 0.0);
  out.per_model_terms[static_cast<std::size_t>(p - law.min_order())] = r.value;
  out.value = r.value;
  out.err_est = r.err_est;
  out.converged = r.converged;
  return out;
}

}  // namespace postsel
