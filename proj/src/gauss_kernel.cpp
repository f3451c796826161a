#include "postsel/gauss_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_map>

#include <boost/math/special_functions/gamma.hpp>

#include "postsel/normal.hpp"

namespace postsel {

ExtendedReal::ExtendedReal(double value) : value_(value) {
  if (std::isnan(value)) throw std::invalid_argument("ExtendedReal cannot hold NaN");
}

bool ExtendedReal::is_finite() const { return std::isfinite(value_); }

double delta_complement(double s, ExtendedReal a, double b) {
  if (!(s >= 0.0)) throw std::invalid_argument("delta: scale must be nonnegative");
  if (!a.is_finite() || !(b > 0.0)) return 1.0;
  const double x = std::abs(a.value());
  if (s == 0.0) return x < b ? 0.0 : 1.0;
  const double upper = (b - x) / s;
  const double lower = (-b - x) / s;
  return normal_cdf(-upper) + normal_cdf(lower);
}

double delta(double s, ExtendedReal a, double b) {
  if (!(s >= 0.0)) throw std::invalid_argument("delta: scale must be nonnegative");
  if (!a.is_finite() || !(b > 0.0)) return 0.0;
  const double x = std::abs(a.value());
  if (s == 0.0) return x < b ? 1.0 : 0.0;
  const double upper = (b - x) / s;
  const double lower = (-b - x) / s;
  if (upper > 0.0) return 1.0 - (normal_cdf(-upper) + normal_cdf(lower));
  return normal_cdf(upper) - normal_cdf(lower);
}

// ---------------------------------------------------------------------------

namespace {

struct ChiLaw {
  double log_const;  // log of 2 (m/2)^{m/2} / Gamma(m/2)
  double lo;
  double hi;
};

const ChiLaw& chi_law(int m) {
  thread_local std::unordered_map<int, ChiLaw> cache;
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  const double a = 0.5 * m;
  ChiLaw law{};
  law.log_const = std::log(2.0) + a * std::log(a) - std::lgamma(a);
  law.lo = std::sqrt(boost::math::gamma_p_inv(a, kChiTailMass) / a);
  law.hi = std::sqrt(boost::math::gamma_q_inv(a, kChiTailMass) / a);
  return cache.emplace(m, law).first->second;
}

void check_df(int m) {
  if (m < 1) throw std::invalid_argument("chi law needs m >= 1 degrees of freedom");
}

}  // namespace

double chi_scaled_density(int m, double s) {
  check_df(m);
  if (!(s > 0.0)) return 0.0;
  const double log_h = chi_law(m).log_const + (m - 1) * std::log(s) - 0.5 * m * s * s;
  return std::exp(log_h);
}

double chi_scaled_quantile(int m, double u) {
  check_df(m);
  if (!(u >= 0.0 && u <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
  if (u == 0.0) return 0.0;
  if (u == 1.0) return std::numeric_limits<double>::infinity();
  const double a = 0.5 * m;
  const double x = u <= 0.5 ? boost::math::gamma_p_inv(a, u) : boost::math::gamma_q_inv(a, 1.0 - u);
  return std::sqrt(x / a);
}

double chi_scaled_cdf(int m, double s) {
  check_df(m);
  if (!(s > 0.0)) return 0.0;
  if (std::isinf(s)) return 1.0;
  return boost::math::gamma_p(0.5 * m, 0.5 * m * s * s);
}

QuadResult integrate_against_h(const std::function<double(double)>& f, int m,
                               const QuadratureSpec& spec, std::span<const double> breakpoints) {
  check_df(m);
  const ChiLaw& law = chi_law(m);
  const double log_const = law.log_const;
  const double half_m = 0.5 * m;
  auto weighted = [&](double s) {
    const double h = std::exp(log_const + (m - 1) * std::log(s) - half_m * s * s);
    return h == 0.0 ? 0.0 : f(s) * h;
  };
  QuadResult out = integrate(weighted, law.lo, law.hi, spec, breakpoints);
  out.err_est += 2.0 * kChiTailMass;
  return out;
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kTruncation = 10.0;  // |w| beyond this carries mass < 1e-23

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                           43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

double radical_inverse(long index, int base) {
  double result = 0.0;
  double scale = 1.0 / base;
  while (index > 0) {
    result += static_cast<double>(index % base) * scale;
    index /= base;
    scale /= base;
  }
  return result;
}

// Interval of w with l w <= d componentwise; empty when lo > hi.
std::pair<double, double> feasible_interval(const Vector& l, const Vector& d) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < l.size(); ++i) {
    if (l(i) > 0.0) {
      hi = std::min(hi, d(i) / l(i));
    } else if (l(i) < 0.0) {
      lo = std::max(lo, d(i) / l(i));
    } else if (d(i) < 0.0) {
      return {1.0, 0.0};
    }
  }
  return {lo, hi};
}

double normal_mass(double lo, double hi) {
  if (!(lo < hi)) return 0.0;
  if (lo > 0.0) return normal_sf(lo) - normal_sf(hi);
  return normal_cdf(hi) - normal_cdf(lo);
}

template <typename G>
QuadResult rank_one_integral(const GaussianComponent& comp, const Vector& d, const G& g_of_w,
                             std::span<const double> w_breaks, const QuadratureSpec& spec) {
  const Vector l = comp.factor().col(0);
  const auto [lo, hi] = feasible_interval(l, d);
  QuadResult out;
  const double a = std::max(lo, -kTruncation);
  const double b = std::min(hi, kTruncation);
  if (!(a < b)) return out;
  out = integrate([&](double w) { return g_of_w(w) * normal_pdf(w); }, a, b, spec, w_breaks);
  out.err_est += 2.0 * normal_cdf(-kTruncation);
  return out;
}

template <typename G>
QuadResult qmc_integral(const GaussianComponent& comp, const Vector& d, const G& g_of_z,
                        const QmcSpec& qmc) {
  const int rank = comp.rank();
  if (rank > static_cast<int>(std::size(kPrimes))) {
    throw std::invalid_argument("QMC region integral supports rank <= 25");
  }
  const int replicates = std::max(2, qmc.replicates);
  RandomStream stream(qmc.seed);
  std::vector<double> shifts(static_cast<std::size_t>(replicates * rank));
  for (double& s : shifts) s = stream.uniform();

  const Matrix& factor = comp.factor();
  std::vector<double> sums(static_cast<std::size_t>(replicates), 0.0);
  Vector w(rank);
  Vector z(comp.dimension());
  long per_replicate = std::max(1L, qmc.initial_points / replicates);
  long done = 0;
  QuadResult out;
  out.converged = false;
  while (true) {
    for (int r = 0; r < replicates; ++r) {
      double acc = 0.0;
      for (long i = done + 1; i <= per_replicate; ++i) {
        for (int j = 0; j < rank; ++j) {
          double u = radical_inverse(i, kPrimes[j]) + shifts[static_cast<std::size_t>(r * rank + j)];
          u -= std::floor(u);
          u = std::clamp(u, 1e-16, 1.0 - 1e-16);
          w(j) = normal_quantile(u);
        }
        z.noalias() = factor * w;
        if ((z.array() <= d.array()).all()) acc += g_of_z(z);
      }
      sums[static_cast<std::size_t>(r)] += acc;
    }
    done = per_replicate;
    double mean = 0.0;
    for (double s : sums) mean += s / static_cast<double>(done);
    mean /= replicates;
    double var = 0.0;
    for (double s : sums) {
      const double e = s / static_cast<double>(done) - mean;
      var += e * e;
    }
    var /= static_cast<double>(replicates - 1);
    out.value = mean;
    out.err_est = 3.0 * std::sqrt(var / replicates);
    out.nodes = static_cast<int>(std::min<long>(done * replicates, std::numeric_limits<int>::max()));
    if (out.err_est < qmc.abs_tol) {
      out.converged = true;
      break;
    }
    if (2 * done * replicates > qmc.max_points) break;
    per_replicate = 2 * done;
  }
  return out;
}

void check_point(const GaussianComponent& comp, const Vector& t) {
  if (t.size() != comp.dimension()) {
    throw std::invalid_argument("region bound has wrong dimension");
  }
  for (Eigen::Index i = 0; i < t.size(); ++i) {
    if (std::isnan(t(i))) throw std::invalid_argument("region bound is NaN");
  }
}

}  // namespace

QuadResult gaussian_region_prob(const GaussianComponent& comp, const Vector& t,
                                const IntegrationSpec& spec) {
  check_point(comp, t);
  const Vector d = t - comp.mean_shift();
  QuadResult out;
  if (comp.rank() == 0) {
    out.value = (d.array() >= 0.0).all() ? 1.0 : 0.0;
    return out;
  }
  if (comp.rank() == 1) {
    const auto [lo, hi] = feasible_interval(comp.factor().col(0), d);
    out.value = normal_mass(lo, hi);
    return out;
  }
  return qmc_integral(comp, d, [](const Vector&) { return 1.0; }, spec.qmc);
}

QuadResult gaussian_region_prob(const GaussianComponent& comp, const Vector& t,
                                const std::function<double(const Vector&)>& integrand,
                                const IntegrationSpec& spec) {
  if (!integrand) return gaussian_region_prob(comp, t, spec);
  check_point(comp, t);
  const Vector d = t - comp.mean_shift();
  QuadResult out;
  if (comp.rank() == 0) {
    if ((d.array() >= 0.0).all()) out.value = integrand(Vector::Zero(comp.dimension()));
    return out;
  }
  if (comp.rank() == 1) {
    const Vector l = comp.factor().col(0);
    Vector z(comp.dimension());
    return rank_one_integral(
        comp, d,
        [&](double w) {
          z.noalias() = l * w;
          return integrand(z);
        },
        {}, spec.outer);
  }
  return qmc_integral(comp, d, integrand, spec.qmc);
}

QuadResult gaussian_region_prob(const GaussianComponent& comp, const Vector& t,
                                const ProjectedIntegrand& integrand, const IntegrationSpec& spec) {
  check_point(comp, t);
  if (integrand.slope.size() != comp.dimension()) {
    throw std::invalid_argument("projected integrand slope has wrong dimension");
  }
  const Vector d = t - comp.mean_shift();
  QuadResult out;
  if (comp.rank() == 0) {
    if ((d.array() >= 0.0).all()) out.value = integrand.of_projection(0.0);
    return out;
  }
  if (comp.rank() == 1) {
    const double gain = integrand.slope.dot(comp.factor().col(0));
    std::vector<double> w_breaks;
    if (gain != 0.0) {
      for (double u : integrand.breakpoints) w_breaks.push_back(u / gain);
    }
    return rank_one_integral(
        comp, d, [&](double w) { return integrand.of_projection(gain * w); }, w_breaks,
        spec.outer);
  }
  const RowVector& slope = integrand.slope;
  return qmc_integral(
      comp, d, [&](const Vector& z) { return integrand.of_projection(slope.dot(z)); }, spec.qmc);
}

Matrix sample_gaussian(const GaussianComponent& comp, int count, RandomStream& stream) {
  if (count < 1) throw std::invalid_argument("sample_gaussian: count must be positive");
  const int k = comp.dimension();
  const int rank = comp.rank();
  Matrix out(count, k);
  Vector w(rank);
  for (int i = 0; i < count; ++i) {
    for (int j = 0; j < rank; ++j) w(j) = stream.normal();
    out.row(i) = (comp.mean_shift() + comp.factor() * w).transpose();
  }
  return out;
}

}  // namespace postsel
