#include "postsel/selection.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace postsel {

namespace {

void check_order(const TestSequence& tests, int p) {
  if (p < tests.min_order || p > tests.max_order) {
    throw ModelError("selection order " + std::to_string(p) + " outside [" +
                     std::to_string(tests.min_order) + ", " + std::to_string(tests.max_order) +
                     "]");
  }
}

void check_family(const RegressionDesign& design, const SelectionFamily& family) {
  if (family.max_order() != design.regressors()) {
    throw ModelError("selection family has P = " + std::to_string(family.max_order()) +
                     " but the design has " + std::to_string(design.regressors()) +
                     " regressors");
  }
}

}  // namespace

ModelSelector::ModelSelector(const RegressionDesign& design, const SelectionFamily& family)
    : design_(design), family_(family) {
  check_family(design_, family_);
  const Matrix& x = design_.x();
  const int n = design_.n();
  for (int p = 1; p <= design_.regressors(); ++p) {
    Eigen::HouseholderQR<Matrix> qr(x.leftCols(p));
    const Matrix q_thin = qr.householderQ() * Matrix::Identity(n, p);
    const Matrix r = qr.matrixQR().topLeftCorner(p, p).triangularView<Eigen::Upper>();
    hat_.push_back(r.triangularView<Eigen::Upper>().solve(q_thin.transpose()));
    xi_.push_back(xi(design_, p));
  }
}

Vector ModelSelector::restricted_fit(const Vector& y, int p) const {
  if (y.size() != design_.n()) throw ModelError("response length does not match n");
  if (p < 0 || p > design_.regressors()) throw ModelError("fit order out of range");
  Vector fit = Vector::Zero(design_.regressors());
  if (p > 0) fit.head(p) = hat_[static_cast<std::size_t>(p - 1)] * y;
  return fit;
}

double ModelSelector::sigma_hat(const Vector& y) const {
  const Vector residual = y - design_.x() * restricted_fit(y, design_.regressors());
  return std::sqrt(residual.squaredNorm() / (design_.n() - design_.regressors()));
}

SelectionOutcome ModelSelector::select_with_scale(const Vector& y, double scale) const {
  if (y.size() != design_.n()) throw ModelError("response length does not match n");
  const int lo = family_.min_order();
  const int hi = family_.max_order();
  const double root_n = std::sqrt(static_cast<double>(design_.n()));
  SelectionOutcome out;
  out.sigma_hat = scale;
  out.t_stats = Vector::Zero(hi - lo + 1);
  out.p_hat = lo;
  for (int p = lo + 1; p <= hi; ++p) {
    const double last = hat_[static_cast<std::size_t>(p - 1)].row(p - 1).dot(y);
    double t = 0.0;
    if (last != 0.0) {
      if (scale == 0.0) {
        throw std::domain_error("error scale estimate is zero: response lies in the column space");
      }
      t = root_n * last / (scale * xi_[static_cast<std::size_t>(p - 1)]);
    }
    out.t_stats(p - lo) = t;
  }
  for (int p = hi; p > lo; --p) {
    if (std::abs(out.t_stats(p - lo)) >= family_.critical(p)) {
      out.p_hat = p;
      break;
    }
  }
  return out;
}

SelectionOutcome ModelSelector::select(const Vector& y) const {
  return select_with_scale(y, sigma_hat(y));
}

SelectionOutcome ModelSelector::select_known_sigma(const Vector& y, double sigma) const {
  if (!(sigma > 0.0)) throw ModelError("sigma must be positive");
  return select_with_scale(y, sigma);
}

SelectionOutcome select_model(const Vector& y, const RegressionDesign& design,
                              const SelectionFamily& family) {
  return ModelSelector(design, family).select(y);
}

SelectionOutcome select_model_known_sigma(const Vector& y, const RegressionDesign& design,
                                          const SelectionFamily& family, double sigma) {
  return ModelSelector(design, family).select_known_sigma(y, sigma);
}

// ---------------------------------------------------------------------------

double TestSequence::acceptance(int q, double s) const {
  const auto i = static_cast<std::size_t>(q - first_order);
  return delta(test_scale[i], location[i], s * half_width[i]);
}

double TestSequence::trailing_acceptance(int p, double s) const {
  double product = 1.0;
  for (int q = std::max(p, first_order) + 1; q <= max_order; ++q) product *= acceptance(q, s);
  return product;
}

double TestSequence::selection_kernel(int p, double s) const {
  if (p < first_order) return 0.0;
  if (p == first_order) return trailing_acceptance(p, s);
  const auto i = static_cast<std::size_t>(p - first_order);
  return delta_complement(test_scale[i], location[i], s * half_width[i]) *
         trailing_acceptance(p, s);
}

TestSequence test_sequence(const RegressionDesign& design, const SelectionFamily& family,
                           const ParameterPoint& params) {
  check_family(design, family);
  if (params.theta.size() != design.regressors()) throw ModelError("theta length does not match P");
  TestSequence tests;
  tests.min_order = family.min_order();
  tests.first_order = family.min_order();
  tests.max_order = family.max_order();
  const auto count = static_cast<std::size_t>(tests.max_order - tests.first_order + 1);
  tests.location.assign(count, 0.0);
  tests.test_scale.assign(count, 0.0);
  tests.half_width.assign(count, 0.0);
  const double root_n = std::sqrt(static_cast<double>(design.n()));
  for (int q = tests.first_order + 1; q <= tests.max_order; ++q) {
    const auto i = static_cast<std::size_t>(q - tests.first_order);
    const Vector eta = restricted_ls_mean(design, params.theta, q);
    const double scale = params.sigma * xi(design, q);
    tests.location[i] = root_n * eta(q - 1);
    tests.test_scale[i] = scale;
    tests.half_width[i] = family.critical(q) * scale;
  }
  return tests;
}

double selection_prob_known(const TestSequence& tests, int p) {
  check_order(tests, p);
  return tests.selection_kernel(p, 1.0);
}

double selection_prob_known(const RegressionDesign& design, const SelectionFamily& family,
                            const ParameterPoint& params, int p) {
  return selection_prob_known(test_sequence(design, family, params), p);
}

QuadResult selection_prob_unknown(const TestSequence& tests, int df, int p,
                                  const QuadratureSpec& spec) {
  check_order(tests, p);
  if (p < tests.first_order) return {};
  return integrate_against_h([&](double s) { return tests.selection_kernel(p, s); }, df, spec);
}

QuadResult selection_prob_unknown(const RegressionDesign& design, const SelectionFamily& family,
                                  const ParameterPoint& params, int p,
                                  const QuadratureSpec& spec) {
  return selection_prob_unknown(test_sequence(design, family, params),
                                design.n() - design.regressors(), p, spec);
}

}  // namespace postsel
