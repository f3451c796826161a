#include "postsel/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

namespace postsel {

namespace {

// Kronrod abscissae on [0, 1]; odd entries (1, 3, 5) and the centre are the Gauss nodes.
constexpr double kNodes[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr double kKronrod[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kGauss[4] = {0.129484966168869693270611432679082,
                              0.279705391489276667901467771423780,
                              0.381830050505118944950369775488975,
                              0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel gauss_kronrod_15(const std::function<double(double)>& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod = fc * kKronrod[7];
  double gauss = fc * kGauss[3];
  double abs_sum = std::abs(kronrod);
  double fv1[7];
  double fv2[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kNodes[j];
    fv1[j] = f(centre - dx);
    fv2[j] = f(centre + dx);
    const double pair = fv1[j] + fv2[j];
    kronrod += kKronrod[j] * pair;
    abs_sum += kKronrod[j] * (std::abs(fv1[j]) + std::abs(fv2[j]));
    if (j % 2 == 1) gauss += kGauss[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = kKronrod[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    asc += kKronrod[j] * (std::abs(fv1[j] - mean) + std::abs(fv2[j] - mean));
  }
  const double result = kronrod * half;
  abs_sum *= std::abs(half);
  asc *= std::abs(half);
  // QUADPACK's scaling of the raw Kronrod-Gauss difference.
  double error = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && error != 0.0) {
    error = asc * std::min(1.0, std::pow(200.0 * error / asc, 1.5));
  }
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  if (abs_sum > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    error = std::max(50.0 * kEps * abs_sum, error);
  }
  return {a, b, result, error};
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(abs_tol > 0.0 && abs_tol < 1.0)) throw std::invalid_argument("abs_tol must lie in (0, 1)");
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::invalid_argument("rel_tol must lie in (0, 1)");
  if (max_nodes < 15) throw std::invalid_argument("max_nodes must be at least 15");
}

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     const QuadratureSpec& spec, std::span<const double> breakpoints) {
  spec.validate();
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("integrate: bounds must be finite");
  }
  double sign = 1.0;
  if (b < a) {
    std::swap(a, b);
    sign = -1.0;
  }
  QuadResult out;
  if (a == b) return out;

  std::vector<double> cuts{a};
  for (double x : breakpoints) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Panel> panels;
  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = gauss_kronrod_15(f, cuts[i], cuts[i + 1]);
    out.nodes += 15;
    total += p.value;
    error += p.error;
    panels.push(p);
  }

  auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
  while (error > tolerance()) {
    if (out.nodes + 30 > spec.max_nodes) {
      out.converged = false;
      break;
    }
    const Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval no longer divisible in floating point.
      out.converged = false;
      break;
    }
    panels.pop();
    const Panel left = gauss_kronrod_15(f, worst.a, mid);
    const Panel right = gauss_kronrod_15(f, mid, worst.b);
    out.nodes += 30;
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }

  // Re-sum to shed the drift of the running updates.
  total = 0.0;
  error = 0.0;
  while (!panels.empty()) {
    total += panels.top().value;
    error += panels.top().error;
    panels.pop();
  }
  out.value = sign * total;
  out.err_est = error;
  return out;
}

}  // namespace postsel
