// Acceptance checks, one per criterion: `acceptance N [--cli PATH]`.
// Prints a single PASS/FAIL line and exits 0 on PASS, 1 on FAIL.

#include <CLI11.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "postsel/asymptotic.hpp"
#include "postsel/mc_oracle.hpp"
#include "postsel/two_regressor.hpp"

using namespace postsel;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

TwoRegressorSetting reference(double theta2, int n = 7, double rho = 0.75) {
  return {rho, 1.0, 1.0, theta2, n, 2.015};
}

std::vector<double> grid(double lo, double hi, int count) {
  std::vector<double> out;
  for (int i = 0; i < count; ++i) out.push_back(lo + (hi - lo) * i / (count - 1));
  return out;
}

std::vector<Vector> points(const std::vector<double>& ts) {
  std::vector<Vector> out;
  for (double t : ts) out.emplace_back(Vector::Constant(1, t));
  return out;
}

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double Phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

const std::vector<double> kTheta2{0.0, 0.1, 0.75, 1.2};

// Three regressors, last two tested, first one targeted.
struct GeneralCase {
  Matrix q;
  SelectionFamily family{1, {1.96, 1.96}};
  TargetFunctional target{Matrix::Identity(1, 3)};
  GeneralCase() : q(3, 3) { q << 1.0, 0.5, 0.2, 0.5, 1.0, 0.3, 0.2, 0.3, 1.0; }
};

Outcome selection_weights() {
  const auto start = std::chrono::steady_clock::now();
  const double w075 = two_regressor_prob_m1_known(reference(0.75));
  const double w120 = two_regressor_prob_m1_known(reference(1.2));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool ok = std::abs(w075 - 0.51) <= 0.005 && std::abs(w120 - 0.12) <= 0.005 && secs < 1.0;
  return {ok, "pi*(1) = " + fmt(w075) + " at theta2 = 0.75, " + fmt(w120) + " at theta2 = 1.2, " + fmt(secs) +
                  " s"};
}

Outcome power_claim() {
  const double ncp = std::sqrt(7.0) * 1.2;
  const double power = power_check_noncentral_t(5, ncp, 2.015, 1000000, 2718);
  return {power >= 0.26 && power <= 0.28,
          "MC power " + fmt(power) + " at ncp = sqrt(7) 1.2, df = 5, crit = 2.015 (target [0.26, 0.28])"};
}

Outcome oracle_equivalence() {
  double worst = 0.0;
  std::string where;
  for (double theta2 : kTheta2) {
    const TwoRegressorModel m = two_regressor_model(reference(theta2));
    const MixtureLaw law = finite_sample_law(m.design, m.family, m.target, m.params);
    for (Variance v : {Variance::unknown, Variance::known}) {
      const SimulationReport rep = simulate(m.design, m.family, m.target, m.params, 1000000, v, 31337);
      const std::vector<Vector> g = default_ks_grid(rep, 101);
      const auto analytic = mixture_cdf_grid(law, g, v);
      std::vector<double> ts, values;
      for (std::size_t i = 0; i < g.size(); ++i) {
        ts.push_back(g[i](0));
        values.push_back(analytic[i].value);
      }
      const double ks = ks_distance(rep, ts, values);
      if (ks >= worst) {
        worst = ks;
        where = "theta2 = " + fmt(theta2) + (v == Variance::known ? ", known" : ", unknown");
      }
    }
  }
  return {worst <= 0.005, "max KS " + fmt(worst) + " (" + where + ") over 4 settings x 2 variants, R = 1e6"};
}

Outcome mixture_identities() {
  double prob_gap = 0.0, mass_gap = 0.0, term_gap = 0.0, split_gap = 0.0;
  const std::vector<double> ts = grid(-4.0, 4.0, 41);

  auto check_model = [&](const RegressionDesign& design, const SelectionFamily& family,
                         const TargetFunctional& target, const ParameterPoint& params) {
    const TestSequence tests = test_sequence(design, family, params);
    const int df = design.n() - design.regressors();
    double known = 0.0, unknown = 0.0;
    for (int p = family.min_order(); p <= family.max_order(); ++p) {
      known += selection_prob_known(tests, p);
      unknown += selection_prob_unknown(tests, df, p).value;
    }
    prob_gap = std::max({prob_gap, std::abs(known - 1.0), std::abs(unknown - 1.0)});

    // density integrates to one, by an unrelated adaptive rule
    auto density = [&](double t) { return density_unknown_variance(design, family, target, params, Vector::Constant(1, t)).value; };
    const double mass = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        density, -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 20, 1e-12);
    mass_gap = std::max(mass_gap, std::abs(mass - 1.0));

    for (double t : ts) {
      const Vector tv = Vector::Constant(1, t);
      for (Variance v : {Variance::known, Variance::unknown}) {
        const double whole = v == Variance::known ? cdf_known_variance(design, family, target, params, tv).value
                                                  : cdf_unknown_variance(design, family, target, params, tv).value;
        double parts = 0.0;
        for (int p = family.min_order(); p <= family.max_order(); ++p) {
          parts += weighted_conditional_cdf(design, family, target, params, p, tv, v).value;
        }
        term_gap = std::max(term_gap, std::abs(parts - whole));
      }
    }
  };

  for (double theta2 : kTheta2) {
    const TwoRegressorSetting s = reference(theta2);
    const TwoRegressorModel m = two_regressor_model(s);
    check_model(m.design, m.family, m.target, m.params);

    // the engine's cdf against the integrated closed-form density
    for (double t : {-2.0, 0.0, 1.5}) {
      const double integrated = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          [&](double x) { return two_regressor_density(s, TwoRegressorVariant::unknown, x); },
          -std::numeric_limits<double>::infinity(), t, 20, 1e-12);
      term_gap = std::max(term_gap, std::abs(integrated - cdf_unknown_variance(m.design, m.family, m.target,
                                                                               m.params, Vector::Constant(1, t)).value));
    }

    const double w1 = two_regressor_prob_m1_known(s);
    for (double t : ts) {
      const double lhs = two_regressor_density(s, TwoRegressorVariant::known, t);
      const double rhs = w1 * two_regressor_density(s, TwoRegressorVariant::cond_m1, t) +
                         (1.0 - w1) * two_regressor_density(s, TwoRegressorVariant::cond_m2, t);
      split_gap = std::max(split_gap, std::abs(lhs - rhs));
    }
  }
  const GeneralCase g;
  Vector theta(3);
  theta << 0.3, 0.2, 0.1;
  check_model(synthetic_design(30, g.q, 5), g.family, g.target, ParameterPoint(theta, 1.0));

  const bool ok = prob_gap <= 1e-9 && mass_gap <= 1e-6 && term_gap <= 1e-9 && split_gap <= 1e-12;
  return {ok, "|sum pi - 1| " + fmt(prob_gap) + ", |mass - 1| " + fmt(mass_gap) + ", |sum terms - cdf| " +
                  fmt(term_gap) + ", known-variance split " + fmt(split_gap)};
}

Outcome gaussian_collapse() {
  double worst = 0.0;
  const std::vector<double> ts = grid(-5.0, 5.0, 201);
  for (double theta2 : {0.0, 0.1, 0.75, 1.2, 3.0}) {
    const TwoRegressorModel m = two_regressor_model(reference(theta2, 7, 0.0));
    const MixtureLaw law = finite_sample_law(m.design, m.family, m.target, m.params);
    const std::vector<Vector> pts = points(ts);
    for (Variance v : {Variance::known, Variance::unknown}) {
      const auto cdf = mixture_cdf_grid(law, pts, v);
      const auto dens = mixture_density_grid(law, pts, v);
      for (std::size_t i = 0; i < ts.size(); ++i) {
        worst = std::max({worst, std::abs(cdf[i].value - Phi(ts[i])), std::abs(dens[i].value - phi(ts[i]))});
      }
    }
  }
  return {worst <= 1e-8, "max deviation from the full-model Gaussian " + fmt(worst) + " (201 points, 5 theta2, both variants)"};
}

Outcome finite_sample_trend() {
  const std::vector<int> ns{7, 20, 100, 1000};
  const std::vector<Vector> pts = points(grid(-5.0, 5.0, 201));
  std::vector<double> cdf_gap, prob_gap;
  for (int n : ns) {
    // sqrt(n) theta2 held at its n = 7 value
    const TwoRegressorModel m = two_regressor_model(reference(0.75 * std::sqrt(7.0 / n), n));
    const MixtureLaw law = finite_sample_law(m.design, m.family, m.target, m.params);
    const auto g = mixture_cdf_grid(law, pts, Variance::unknown);
    const auto gs = mixture_cdf_grid(law, pts, Variance::known);
    double c = 0.0, p = 0.0;
    for (std::size_t i = 0; i < pts.size(); ++i) c = std::max(c, std::abs(g[i].value - gs[i].value));
    for (int q = 1; q <= 2; ++q) {
      p = std::max(p, std::abs(selection_prob_unknown(law.tests(), law.df(), q).value -
                               selection_prob_known(law.tests(), q)));
    }
    cdf_gap.push_back(c);
    prob_gap.push_back(p);
  }
  bool ok = cdf_gap.back() < 0.01 && prob_gap.back() < 0.01;
  std::string detail = "n, sup|G - G*|, sup|pi - pi*|:";
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (i > 0) ok = ok && cdf_gap[i] < cdf_gap[i - 1] && prob_gap[i] < prob_gap[i - 1];
    detail += " " + std::to_string(ns[i]) + " " + fmt(cdf_gap[i]) + " " + fmt(prob_gap[i]) + ";";
  }
  return {ok, detail};
}

Outcome limit_convergence() {
  const int n = 10000;
  const std::vector<Vector> pts = points(grid(-5.0, 5.0, 101));
  double cdf_gap = 0.0, prob_gap = 0.0, sum_gap = 0.0;

  auto compare = [&](const Matrix& q, const SelectionFamily& family, const TargetFunctional& target,
                     const Vector& theta, const Vector& gamma) {
    const LimitParameter lp = local_alternative_parameter(theta, gamma, 1.0, q, family);
    const MixtureLaw lim = limit_law(lp, family, target);
    const RegressionDesign design = synthetic_design(n, q, 17);
    const ParameterPoint params(theta + gamma / std::sqrt(static_cast<double>(n)), 1.0);
    const MixtureLaw fin = finite_sample_law(design, family, target, params);
    const auto a = mixture_cdf_grid(fin, pts, Variance::unknown);
    const auto b = mixture_cdf_grid(lim, pts, Variance::known);
    for (std::size_t i = 0; i < pts.size(); ++i) cdf_gap = std::max(cdf_gap, std::abs(a[i].value - b[i].value));
    double total = 0.0;
    for (int p = family.min_order(); p <= family.max_order(); ++p) {
      const double lp_p = limit_selection_prob(lp, family, p);
      total += lp_p;
      prob_gap = std::max(prob_gap, std::abs(lp_p - selection_prob_unknown(fin.tests(), fin.df(), p).value));
    }
    sum_gap = std::max(sum_gap, std::abs(total - 1.0));
  };

  // reference two-regressor setting: fixed theta in M1, then local alternatives
  const TwoRegressorModel ref = two_regressor_model(reference(0.0));
  const Matrix q2 = ref.design.gram().matrix();
  Vector theta2(2), zero2 = Vector::Zero(2);
  theta2 << 0.4, 0.0;
  compare(q2, ref.family, ref.target, theta2, zero2);
  for (double g : {0.5, 1.5, 3.0}) {
    Vector gamma(2);
    gamma << 0.0, g;
    compare(q2, ref.family, ref.target, theta2, gamma);
  }

  const GeneralCase gc;
  Vector theta3(3);
  theta3 << 0.3, 0.0, 0.0;
  compare(gc.q, gc.family, gc.target, theta3, Vector::Zero(3));
  Vector gamma3(3);
  gamma3 << 0.0, 1.0, -2.0;
  compare(gc.q, gc.family, gc.target, theta3, gamma3);
  theta3 << 0.3, 0.2, 0.0;  // fixed theta of order 2: p* = 2
  compare(gc.q, gc.family, gc.target, theta3, gamma3);

  const bool ok = cdf_gap <= 0.01 && prob_gap <= 0.01 && sum_gap <= 1e-12;
  return {ok, "n = 1e4: sup|G - limit| " + fmt(cdf_gap) + ", max |pi - limit pi| " + fmt(prob_gap) +
                  ", |sum limit pi - 1| " + fmt(sum_gap)};
}

Outcome symmetries() {
  double worst = 0.0;
  const std::vector<double> ts = grid(-4.0, 4.0, 81);
  for (double theta2 : {0.1, 0.75, 1.2}) {
    for (double rho : {0.3, 0.75}) {
      const TwoRegressorSetting s = reference(theta2, 7, rho);
      const TwoRegressorSetting flip_rho = reference(theta2, 7, -rho);
      const TwoRegressorSetting flip_theta = reference(-theta2, 7, rho);
      for (TwoRegressorVariant v : {TwoRegressorVariant::unknown, TwoRegressorVariant::known}) {
        for (double t : ts) {
          const double base = two_regressor_density(s, v, t);
          worst = std::max({worst, std::abs(base - two_regressor_density(flip_rho, v, -t)),
                            std::abs(base - two_regressor_density(flip_theta, v, -t))});
        }
      }
    }
  }
  return {worst <= 1e-12, "max |f(rho, theta2, t) - f(-rho, theta2, -t)|, |f - f(rho, -theta2, -t)| = " + fmt(worst)};
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism(const std::string& cli) {
  if (cli.empty()) return {false, "needs --cli PATH"};
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "postsel_acceptance_c9";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "reference.ini") << "[model]\nn = 7\nrho = 0.75\nsigma1 = 1\nsigma2 = 1\nc2 = 2.015\n"
                                          "theta2 = 0, 0.75\n[run]\nreplications = 200000\nseed = 99\n";
  auto run = [&](const std::string& threads, const std::string& name) {
    const std::string cmd = "POSTSEL_THREADS=" + threads + " \"" + cli + "\" simulate --config \"" +
                            (dir / "reference.ini").string() + "\" --out \"" + (dir / name).string() + "\" > /dev/null";
    return std::system(cmd.c_str()) == 0;
  };
  bool ran = run("4", "a") && run("4", "b") && run("1", "one") && run("8", "eight");
  bool same = ran;
  for (const char* f : {"simulation_1.csv", "simulation_2.csv", "simulation_summary.csv"}) {
    const std::string ref = slurp(dir / "a" / f);
    same = same && !ref.empty() && ref == slurp(dir / "b" / f) && slurp(dir / "one" / f) == slurp(dir / "eight" / f) &&
           ref == slurp(dir / "one" / f);
  }
  fs::remove_all(dir);
  if (!ran) return {false, "simulate did not exit cleanly"};
  return {same, same ? "byte-identical output across repeat runs and 1 vs 8 threads"
                     : "outputs differ between runs or thread counts"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int criterion = 0;
  std::string cli;
  app.add_option("criterion", criterion, "criterion number 1-9")->required()->check(CLI::Range(1, 9));
  app.add_option("--cli", cli, "path to postsel_cli (criterion 9)");
  CLI11_PARSE(app, argc, argv);

  static const char* names[] = {"",
                                "selection-weight reproduction",
                                "power claim",
                                "oracle equivalence",
                                "mixture and normalization identities",
                                "special-case collapse",
                                "finite-sample closeness trend",
                                "limit-law convergence",
                                "symmetry properties",
                                "determinism"};
  const std::function<Outcome()> checks[] = {nullptr,
                                             selection_weights,
                                             power_claim,
                                             oracle_equivalence,
                                             mixture_identities,
                                             gaussian_collapse,
                                             finite_sample_trend,
                                             limit_convergence,
                                             symmetries,
                                             [&] { return determinism(cli); }};
  Outcome out;
  try {
    out = checks[criterion]();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  std::cout << "criterion " << criterion << " (" << names[criterion] << "): " << (out.pass ? "PASS" : "FAIL") << ": "
            << out.detail << std::endl;
  return out.pass ? 0 : 1;
}
