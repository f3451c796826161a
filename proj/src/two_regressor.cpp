#include "postsel/two_regressor.hpp"

#include <cmath>

#include "postsel/normal.hpp"

namespace postsel {

void TwoRegressorSetting::validate() const {
  if (!(std::abs(rho) < 1.0)) throw ModelError("rho must lie in (-1, 1)");
  if (!(sigma1 > 0.0) || !std::isfinite(sigma1)) throw ModelError("sigma1 must be positive");
  if (!(sigma2 > 0.0) || !std::isfinite(sigma2)) throw ModelError("sigma2 must be positive");
  if (!std::isfinite(theta2)) throw ModelError("theta2 must be finite");
  if (n <= 2) throw ModelError("n must exceed 2");
  if (!(c2 > 0.0) || !std::isfinite(c2)) throw ModelError("c2 must be positive");
}

double restricted_reference_density(const TwoRegressorSetting& setting, double t) {
  const double scale = setting.sigma1 * std::sqrt(1.0 - setting.rho * setting.rho);
  return normal_pdf(t / scale) / scale;
}

double full_reference_density(const TwoRegressorSetting& setting, double t) {
  return normal_pdf(t / setting.sigma1) / setting.sigma1;
}

namespace {

double scaled_theta2(const TwoRegressorSetting& s) {
  return std::sqrt(static_cast<double>(s.n)) * s.theta2 / s.sigma2;
}

// 1 - Delta_1(((sqrt(n) theta2 / s2) + rho t / s1) / r, ratio c2 / r), r = sqrt(1 - rho^2).
double m2_window(const TwoRegressorSetting& s, double t, double ratio) {
  const double r = std::sqrt(1.0 - s.rho * s.rho);
  return delta_complement(1.0, (scaled_theta2(s) + s.rho * t / s.sigma1) / r, ratio * s.c2 / r);
}

double m1_shifted(const TwoRegressorSetting& s, double t) {
  return restricted_reference_density(s, t + scaled_theta2(s) * s.rho * s.sigma1);
}

}  // namespace

double two_regressor_prob_m1_known(const TwoRegressorSetting& setting) {
  setting.validate();
  return delta(1.0, scaled_theta2(setting), setting.c2);
}

QuadResult two_regressor_prob_m1_unknown(const TwoRegressorSetting& setting,
                                         const QuadratureSpec& spec) {
  setting.validate();
  const double a = scaled_theta2(setting);
  return integrate_against_h([&](double s) { return delta(1.0, a, s * setting.c2); },
                             setting.n - 2, spec);
}

double two_regressor_density(const TwoRegressorSetting& setting, TwoRegressorVariant variant,
                             double t, const QuadratureSpec& spec) {
  setting.validate();
  if (!std::isfinite(t)) return 0.0;
  switch (variant) {
    case TwoRegressorVariant::known:
      return m1_shifted(setting, t) * two_regressor_prob_m1_known(setting) +
             full_reference_density(setting, t) * m2_window(setting, t, 1.0);
    case TwoRegressorVariant::unknown: {
      const double first = m1_shifted(setting, t) * two_regressor_prob_m1_unknown(setting, spec).value;
      const double second =
          integrate_against_h([&](double s) { return m2_window(setting, t, s); }, setting.n - 2,
                              spec)
              .value;
      return first + full_reference_density(setting, t) * second;
    }
    case TwoRegressorVariant::cond_m1:
      return m1_shifted(setting, t);
    case TwoRegressorVariant::cond_m2:
      return full_reference_density(setting, t) * m2_window(setting, t, 1.0) /
             delta_complement(1.0, scaled_theta2(setting), setting.c2);
  }
  return 0.0;
}

TwoRegressorModel two_regressor_model(const TwoRegressorSetting& setting, double theta1,
                                      std::uint64_t seed) {
  setting.validate();
  const double s12 = setting.rho * setting.sigma1 * setting.sigma2;
  Matrix cov(2, 2);
  cov << setting.sigma1 * setting.sigma1, s12, s12, setting.sigma2 * setting.sigma2;
  const Matrix gram = cov.inverse();
  Vector theta(2);
  theta << theta1, setting.theta2;
  Matrix a(1, 2);
  a << 1.0, 0.0;
  return {synthetic_design(setting.n, gram, seed), SelectionFamily(1, {setting.c2}),
          TargetFunctional(a), ParameterPoint(theta, 1.0)};
}

}  // namespace postsel
