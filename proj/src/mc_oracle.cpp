#include "postsel/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "postsel/csv.hpp"
#include "postsel/parallel.hpp"
#include "postsel/random_stream.hpp"
#include "postsel/selection.hpp"

namespace postsel {

namespace {

int resolve_threads(int threads) { return threads > 0 ? threads : default_thread_count(); }

}  // namespace

SimulationReport simulate(const RegressionDesign& design, const SelectionFamily& family,
                          const TargetFunctional& target, const ParameterPoint& params,
                          int replications, Variance variant, std::uint64_t seed, int threads) {
  if (replications < 1) throw ModelError("replications must be at least 1");
  if (target.regressors() != design.regressors()) throw ModelError("target width does not match P");
  if (params.theta.size() != design.regressors()) throw ModelError("theta length does not match P");
  const ModelSelector selector(design, family);
  const int n = design.n();
  const int k = target.k();
  const double root_n = std::sqrt(static_cast<double>(n));
  const Vector mean = design.x() * params.theta;

  SimulationReport report;
  report.draws.resize(replications, k);
  report.selected.assign(static_cast<std::size_t>(replications), 0);
  report.seed = seed;
  report.replications = replications;
  report.variant = variant;
  report.min_order = family.min_order();
  report.max_order = family.max_order();

  const RandomStream root(seed);
  parallel_for(static_cast<std::size_t>(replications), resolve_threads(threads),
               [&](std::size_t begin, std::size_t end) {
                 Vector y(n);
                 for (std::size_t r = begin; r < end; ++r) {
                   RandomStream stream = root.split(r);
                   for (int i = 0; i < n; ++i) y(i) = mean(i) + params.sigma * stream.normal();
                   const SelectionOutcome pick = variant == Variance::known
                                                     ? selector.select_known_sigma(y, params.sigma)
                                                     : selector.select(y);
                   const Vector fit = selector.restricted_fit(y, pick.p_hat);
                   const auto row = static_cast<Eigen::Index>(r);
                   report.draws.row(row) = (root_n * (target.a() * (fit - params.theta))).transpose();
                   report.selected[r] = pick.p_hat;
                 }
               });
  return report;
}

double empirical_cdf(const SimulationReport& report, const Vector& t) {
  if (t.size() != report.draws.cols()) throw ModelError("argument length does not match k");
  if (report.draws.rows() == 0) return 0.0;
  long count = 0;
  for (Eigen::Index r = 0; r < report.draws.rows(); ++r) {
    if ((report.draws.row(r).transpose().array() <= t.array()).all()) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(report.draws.rows());
}

std::vector<double> selection_frequencies(const SimulationReport& report) {
  std::vector<double> out(static_cast<std::size_t>(report.max_order - report.min_order + 1), 0.0);
  for (int p : report.selected) out[static_cast<std::size_t>(p - report.min_order)] += 1.0;
  for (double& f : out) f /= static_cast<double>(std::max<std::size_t>(1, report.selected.size()));
  return out;
}

double ks_distance(const SimulationReport& report,
                   const std::function<double(const Vector&)>& analytic_cdf,
                   const std::vector<Vector>& grid) {
  double worst = 0.0;
  for (const Vector& t : grid) {
    worst = std::max(worst, std::abs(empirical_cdf(report, t) - analytic_cdf(t)));
  }
  return worst;
}

double ks_distance(const SimulationReport& report, const std::vector<double>& grid,
                   const std::vector<double>& analytic_values) {
  if (report.draws.cols() != 1) throw ModelError("scalar KS distance needs k = 1");
  if (grid.size() != analytic_values.size()) throw ModelError("grid and values differ in length");
  if (!std::is_sorted(grid.begin(), grid.end())) throw ModelError("KS grid must be sorted");
  std::vector<double> sorted(report.draws.col(0).begin(), report.draws.col(0).end());
  std::sort(sorted.begin(), sorted.end());
  const auto total = static_cast<double>(sorted.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto below = std::upper_bound(sorted.begin(), sorted.end(), grid[i]) - sorted.begin();
    worst = std::max(worst, std::abs(static_cast<double>(below) / total - analytic_values[i]));
  }
  return worst;
}

std::vector<Vector> default_ks_grid(const SimulationReport& report, int points) {
  if (points < 2) throw ModelError("KS grid needs at least 2 points");
  const Matrix& d = report.draws;
  const Vector mean = d.colwise().mean().transpose();
  double max_sd = 0.0;
  for (Eigen::Index j = 0; j < d.cols(); ++j) {
    const double var = (d.col(j).array() - mean(j)).square().sum() / std::max<Eigen::Index>(1, d.rows() - 1);
    max_sd = std::max(max_sd, std::sqrt(var));
  }
  if (max_sd == 0.0) max_sd = 1.0;
  std::vector<Vector> grid;
  for (int i = 0; i < points; ++i) {
    const double offset = -5.0 * max_sd + 10.0 * max_sd * i / (points - 1);
    grid.emplace_back(mean.array() + offset);
  }
  return grid;
}

double power_check_noncentral_t(int df, double ncp, double crit, int replications,
                                std::uint64_t seed, int threads) {
  if (df < 1) throw ModelError("df must be at least 1");
  if (replications < 1) throw ModelError("replications must be at least 1");
  const RandomStream root(seed);
  std::vector<char> hit(static_cast<std::size_t>(replications), 0);
  parallel_for(hit.size(), resolve_threads(threads), [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      RandomStream stream = root.split(r);
      const double z = stream.normal();
      double chi2 = 0.0;
      for (int i = 0; i < df; ++i) {
        const double e = stream.normal();
        chi2 += e * e;
      }
      hit[r] = (z + ncp) / std::sqrt(chi2 / df) > crit ? 1 : 0;
    }
  });
  const auto count = std::count(hit.begin(), hit.end(), 1);
  return static_cast<double>(count) / replications;
}

void write_report_csv(const SimulationReport& report, std::ostream& out) {
  const Eigen::Index k = report.draws.cols();
  for (Eigen::Index j = 0; j < k; ++j) out << "draw" << j + 1 << ',';
  out << "selected\n";
  for (Eigen::Index r = 0; r < report.draws.rows(); ++r) {
    for (Eigen::Index j = 0; j < k; ++j) out << format_number(report.draws(r, j)) << ',';
    out << report.selected[static_cast<std::size_t>(r)] << '\n';
  }
}

}  // namespace postsel
