#pragma once

#include <cmath>
#include <vector>

#include "postsel/two_regressor.hpp"

namespace fixture {

// Two regressors, n = 7, rho = 0.75, unit scales, 10% two-sided t_5 critical value.
inline postsel::TwoRegressorSetting reference(double theta2, int n = 7, double rho = 0.75) {
  return {rho, 1.0, 1.0, theta2, n, 2.015};
}

inline postsel::Vector scalar(double t) { return postsel::Vector::Constant(1, t); }

inline std::vector<double> grid(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * i / (count - 1));
  return out;
}

}  // namespace fixture
