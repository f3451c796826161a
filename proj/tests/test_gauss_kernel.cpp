#include "doctest.h"

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "postsel/gauss_kernel.hpp"

using namespace postsel;

TEST_CASE("extended reals") {
  CHECK(ExtendedReal(1.5).is_finite());
  CHECK_FALSE(ExtendedReal::pos_inf().is_finite());
  CHECK(ExtendedReal::neg_inf().value() < 0);
  CHECK_THROWS(ExtendedReal(std::nan("")));
}

TEST_CASE("window probability") {
  CHECK(delta(1.0, 0.0, 2.015) == doctest::Approx(2 * oracle::cdf(2.015) - 1).epsilon(1e-14));
  CHECK(delta(1.0, 0.0, 2.015) == doctest::Approx(0.9561).epsilon(1e-4));
  CHECK(delta(0.0, 0.5, 1.0) == 1.0);
  CHECK(delta(0.0, 1.5, 1.0) == 0.0);
  CHECK(delta(2.0, ExtendedReal::pos_inf(), 7.0) == 0.0);
  CHECK(delta(2.0, ExtendedReal::neg_inf(), 7.0) == 0.0);
  CHECK(delta(1.0, 0.3, 0.0) == 0.0);
  CHECK_THROWS(delta(-1.0, 0.0, 1.0));
  for (double s : {0.3, 1.0, 2.5}) {
    for (double a = -6.0; a <= 6.0; a += 0.5) {
      for (double b : {0.1, 1.0, 3.0}) {
        const double d = delta(s, a, b);
        CHECK(d == doctest::Approx(oracle::window(s, a, b)).epsilon(1e-12));
        CHECK(d == delta(s, -a, b));
        CHECK(d + delta_complement(s, a, b) == doctest::Approx(1.0).epsilon(1e-15));
      }
    }
  }
  CHECK(delta_complement(1.0, 40.0, 1.0) == 1.0);
  CHECK(delta_complement(1.0, 0.0, 12.0) == doctest::Approx(2 * oracle::cdf(-12.0)).epsilon(1e-10));
}

TEST_CASE("scaled chi law") {
  CHECK(chi_scaled_density(2, 1.0) == doctest::Approx(2 * std::exp(-1.0)).epsilon(1e-14));
  for (int m : {1, 5, 50}) {
    const QuadResult mass = integrate_against_h([](double) { return 1.0; }, m, {});
    CHECK(std::abs(mass.value - 1.0) < 1e-12);
    const QuadResult second = integrate_against_h([](double s) { return s * s; }, m, {});
    CHECK(std::abs(second.value - 1.0) < 1e-10);
  }
  for (int m : {3, 5, 20}) {
    for (double u : {0.01, 0.5, 0.9}) {
      CHECK(chi_scaled_quantile(m, u) == doctest::Approx(oracle::chi_quantile(m, u)).epsilon(1e-10));
      CHECK(chi_scaled_cdf(m, chi_scaled_quantile(m, u)) == doctest::Approx(u).epsilon(1e-12));
    }
  }
}

TEST_CASE("integration against the chi law") {
  const int m = 5;
  const double median = oracle::chi_quantile(m, 0.5);
  const double breaks[] = {median};
  const QuadResult half = integrate_against_h([&](double s) { return s > median ? 1.0 : 0.0; }, m, {}, breaks);
  CHECK(std::abs(half.value - 0.5) < 1e-10);
  // Weight of the smallest model at the null in the reference two-regressor setting.
  const QuadResult w = integrate_against_h([](double s) { return delta(1.0, 0.0, 2.015 * s); }, m, {});
  const double ref = oracle::against_chi([](double s) { return oracle::window(1.0, 0.0, 2.015 * s); }, m);
  CHECK(std::abs(w.value - ref) < 1e-10);
  CHECK(w.value == doctest::Approx(0.899993827673).epsilon(1e-10));
  // Monte Carlo cross-check with 10^6 chi draws.
  RandomStream stream(99);
  const int draws = 1000000;
  double acc = 0.0;
  for (int i = 0; i < draws; ++i) {
    double chi2 = 0.0;
    for (int j = 0; j < m; ++j) {
      const double e = stream.normal();
      chi2 += e * e;
    }
    acc += delta(1.0, 0.0, 2.015 * std::sqrt(chi2 / m));
  }
  acc /= draws;
  CHECK(std::abs(acc - w.value) < 3 * 0.3 / std::sqrt(draws));
}

TEST_CASE("region probabilities") {
  IntegrationSpec spec;
  const GaussianComponent standard(Vector::Zero(1), Matrix::Identity(1, 1));
  const Vector inf = Vector::Constant(1, std::numeric_limits<double>::infinity());
  CHECK(gaussian_region_prob(standard, inf, spec).value == 1.0);
  CHECK(gaussian_region_prob(standard, Vector::Constant(1, 0.7), spec).value ==
        doctest::Approx(oracle::cdf(0.7)).epsilon(1e-14));

  SUBCASE("point mass") {
    const GaussianComponent point(Vector::Constant(2, 0.5), Matrix::Zero(2, 2));
    Vector t(2);
    t << 0.5, 1.0;
    CHECK(gaussian_region_prob(point, t, spec).value == 1.0);
    t << 0.4, 1.0;
    CHECK(gaussian_region_prob(point, t, spec).value == 0.0);
  }

  SUBCASE("weighted integral against an independent 2-D grid") {
    // E[1 - Delta_1(Z, 2.015)] = P(|M + Z| >= 2.015) with M, Z independent standard normals.
    ProjectedIntegrand g{RowVector::Ones(1), [](double z) { return delta_complement(1.0, z, 2.015); }, {}};
    const QuadResult r = gaussian_region_prob(standard, inf, g, spec);
    const double exact = 2.0 * oracle::cdf(-2.015 / std::sqrt(2.0));
    double grid = 0.0;
    const double h = 0.005;
    for (double z = -9; z <= 9; z += h) {
      for (double m = -9; m <= 9; m += h) {
        if (std::abs(m + z) >= 2.015) grid += oracle::pdf(z) * oracle::pdf(m) * h * h;
      }
    }
    CHECK(std::abs(r.value - exact) < 1e-10);
    CHECK(std::abs(grid - exact) < 2e-3);
    CHECK(r.value == doctest::Approx(0.15424).epsilon(1e-4));
  }

  SUBCASE("correlated bivariate orthant by QMC") {
    Matrix cov(2, 2);
    cov << 1.0, 0.5, 0.5, 1.0;
    const GaussianComponent c(Vector::Zero(2), cov);
    const QuadResult r = gaussian_region_prob(c, Vector::Zero(2), spec);
    // P(X <= 0, Y <= 0) = 1/4 + asin(rho) / (2 pi).
    CHECK(std::abs(r.value - (0.25 + std::asin(0.5) / (2 * M_PI))) < std::max(r.err_est, 1e-4));
    CHECK(r.err_est < 1e-4);
  }

  SUBCASE("singular bivariate component along a line") {
    Matrix cov(2, 2);
    cov << 1.0, 1.0, 1.0, 1.0;
    const GaussianComponent c(Vector::Zero(2), cov);
    Vector t(2);
    t << 0.3, -0.2;
    CHECK(gaussian_region_prob(c, t, spec).value == doctest::Approx(oracle::cdf(-0.2)).epsilon(1e-14));
  }
}

TEST_CASE("gaussian sampling") {
  RandomStream stream(5);
  const GaussianComponent point(Vector::Constant(2, 1.5), Matrix::Zero(2, 2));
  const Matrix p = sample_gaussian(point, 10, stream);
  CHECK((p.array() == 1.5).all());
  Matrix cov(2, 2);
  cov << 2.0, 0.6, 0.6, 1.0;
  Vector mean(2);
  mean << 1.0, -1.0;
  const GaussianComponent c(mean, cov);
  const int n = 1000000;
  const Matrix draws = sample_gaussian(c, n, stream);
  const Vector m = draws.colwise().mean().transpose();
  CHECK(std::abs(m(0) - 1.0) < 4 * std::sqrt(2.0 / n));
  CHECK(std::abs(m(1) + 1.0) < 4 * std::sqrt(1.0 / n));
  const Matrix centered = draws.rowwise() - m.transpose();
  const Matrix sample_cov = centered.transpose() * centered / (n - 1);
  CHECK((sample_cov - cov).norm() / cov.norm() < 0.01);
}
