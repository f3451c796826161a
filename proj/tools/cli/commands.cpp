#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <vector>

#include "postsel/asymptotic.hpp"
#include "postsel/csv.hpp"
#include "postsel/mc_oracle.hpp"

#ifndef POSTSEL_VERSION
#define POSTSEL_VERSION "0.0.0"
#endif

namespace postsel::cli {

namespace {

namespace fs = std::filesystem;

class CsvFile {
 public:
  CsvFile(const fs::path& path, const RunConfig& config, const std::vector<std::string>& columns)
      : path_(path) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_) throw IoError("cannot write " + path.string());
    out_ << header_line(config) << '\n';
    if (columns.empty()) return;
    for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
    out_ << '\n';
  }

  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << fields[i];
    out_ << '\n';
  }

  std::ostream& stream() { return out_; }

  void close() {
    out_.close();
    if (!out_) throw IoError("failed writing " + path_.string());
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

std::string num(double v) { return format_number(v); }

std::vector<double> grid_values(const RunConfig& c) {
  std::vector<double> g;
  for (int i = 0; i < c.grid_points; ++i) {
    g.push_back(c.grid_lo + (c.grid_hi - c.grid_lo) * i / (c.grid_points - 1));
  }
  return g;
}

std::vector<Vector> grid_points(const RunConfig& c, int k) {
  std::vector<Vector> pts;
  for (double t : grid_values(c)) pts.emplace_back(Vector::Constant(k, t));
  return pts;
}

bool all_converged(const std::vector<DistributionResult>& rs) {
  return std::all_of(rs.begin(), rs.end(), [](const DistributionResult& r) { return r.converged; });
}

int finish(bool ok, std::ostream& log) {
  if (!ok) {
    log << "warning: at least one integral did not reach its tolerance\n";
    return kNumericalError;
  }
  return kSuccess;
}

// Limit of the panel's sequence: local alternative when rescaled, fixed parameter otherwise.
LimitParameter panel_limit(const RunConfig& c, const PanelModel& m) {
  const int lo = m.family.min_order();
  Vector base = m.params.theta;
  Vector gamma = Vector::Zero(base.size());
  if (c.rescale) {
    const double root_n = std::sqrt(static_cast<double>(m.design.n()));
    for (Eigen::Index j = lo; j < base.size(); ++j) {
      gamma(j) = root_n * base(j);
      base(j) = 0.0;
    }
  }
  return local_alternative_parameter(base, gamma, m.params.sigma, m.design.gram().matrix(), m.family);
}

}  // namespace

std::string header_line(const RunConfig& config) {
  return std::string("# postsel ") + POSTSEL_VERSION + " config_hash=" + hex64(config.hash) +
         " seed=" + std::to_string(config.seed);
}

int cmd_curves(const RunConfig& c, const fs::path& out, std::ostream& log) {
  const IntegrationSpec spec = integration_spec(c);
  const std::vector<double> ts = grid_values(c);
  bool ok = true;
  if (c.scenario == Scenario::two_regressor) {
    CsvFile weights(out / "weights.csv", c, {"panel", "theta2", "pi_star_1", "pi_1"});
    for (int i = 0; i < panel_count(c); ++i) {
      const TwoRegressorSetting s = *build_panel(c, i).setting;
      const QuadResult pi = two_regressor_prob_m1_unknown(s, spec.outer);
      ok = ok && pi.converged;
      weights.row({std::to_string(i + 1), num(s.theta2), num(two_regressor_prob_m1_known(s)), num(pi.value)});
      CsvFile f(out / ("curves_" + std::to_string(i + 1) + ".csv"), c,
                {"t", "density_unknown", "density_known", "cond_m1", "cond_m2", "phi_n1", "phi_n2"});
      for (double t : ts) {
        f.row({num(t), num(two_regressor_density(s, TwoRegressorVariant::unknown, t, spec.outer)),
               num(two_regressor_density(s, TwoRegressorVariant::known, t)),
               num(two_regressor_density(s, TwoRegressorVariant::cond_m1, t)),
               num(two_regressor_density(s, TwoRegressorVariant::cond_m2, t)),
               num(restricted_reference_density(s, t)), num(full_reference_density(s, t))});
      }
      f.close();
      log << "panel " << i + 1 << ": theta2 = " << num(s.theta2) << ", pi*(1) = " << num(two_regressor_prob_m1_known(s))
          << ", pi(1) = " << num(pi.value) << '\n';
    }
    weights.close();
    return finish(ok, log);
  }

  const PanelModel m = build_panel(c, 0);
  const MixtureLaw law = finite_sample_law(m.design, m.family, m.target, m.params);
  const std::vector<Vector> pts = grid_points(c, law.dimension());
  const auto cu = mixture_cdf_grid(law, pts, Variance::unknown, spec);
  const auto ck = mixture_cdf_grid(law, pts, Variance::known, spec);
  ok = all_converged(cu) && all_converged(ck);
  std::vector<std::string> cols{"t", "cdf_unknown", "cdf_known"};
  std::vector<DistributionResult> du, dk;
  if (law.has_density()) {
    cols.insert(cols.end(), {"density_unknown", "density_known"});
    du = mixture_density_grid(law, pts, Variance::unknown, spec);
    dk = mixture_density_grid(law, pts, Variance::known, spec);
    ok = ok && all_converged(du) && all_converged(dk);
  } else {
    log << "note: no Lebesgue density for this configuration; cdf columns only\n";
  }
  CsvFile f(out / "curves_1.csv", c, cols);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    std::vector<std::string> row{num(ts[i]), num(cu[i].value), num(ck[i].value)};
    if (law.has_density()) {
      row.push_back(num(du[i].value));
      row.push_back(num(dk[i].value));
    }
    f.row(row);
  }
  f.close();
  return finish(ok, log);
}

int cmd_selection_probs(const RunConfig& c, const fs::path& out, std::ostream& log) {
  const IntegrationSpec spec = integration_spec(c);
  bool ok = true;
  std::vector<std::string> cols{"panel", "p", "known", "unknown"};
  if (c.mc) cols.emplace_back("mc");
  CsvFile f(out / "selection_probs.csv", c, cols);
  for (int i = 0; i < panel_count(c); ++i) {
    const PanelModel m = build_panel(c, i);
    const TestSequence tests = test_sequence(m.design, m.family, m.params);
    const int df = m.design.n() - m.design.regressors();
    std::vector<double> freq;
    if (c.mc) {
      const SimulationReport rep =
          simulate(m.design, m.family, m.target, m.params, c.replications, c.variant, c.seed);
      freq = selection_frequencies(rep);
    }
    for (int p = m.family.min_order(); p <= m.family.max_order(); ++p) {
      const QuadResult u = selection_prob_unknown(tests, df, p, spec.outer);
      ok = ok && u.converged;
      std::vector<std::string> row{std::to_string(i + 1), std::to_string(p), num(selection_prob_known(tests, p)),
                                   num(u.value)};
      if (c.mc) row.push_back(num(freq[static_cast<std::size_t>(p - m.family.min_order())]));
      f.row(row);
    }
  }
  f.close();
  if (c.mc) {
    log << "mc column: " << c.replications << " replications, "
        << (c.variant == Variance::known ? "known" : "unknown") << "-variance selector\n";
  }
  return finish(ok, log);
}

int cmd_convergence(const RunConfig& c, const fs::path& out, std::ostream& log) {
  const IntegrationSpec spec = integration_spec(c);
  bool ok = true;
  CsvFile f(out / "convergence.csv", c, {"panel", "n", "sup_cdf_gap", "sup_prob_gap", "sup_limit_gap"});
  CsvFile summary(out / "convergence_summary.csv", c,
                  {"panel", "cdf_gap_decreasing", "prob_gap_decreasing", "limit_gap_decreasing", "last_cdf_gap",
                   "last_limit_gap"});
  for (int i = 0; i < panel_count(c); ++i) {
    std::vector<double> cdf_gaps, prob_gaps, limit_gaps;
    for (int n : c.n_list) {
      const PanelModel m = build_panel(c, i, n, c.rescale);
      const MixtureLaw law = finite_sample_law(m.design, m.family, m.target, m.params);
      const std::vector<Vector> pts = grid_points(c, law.dimension());
      const auto gu = mixture_cdf_grid(law, pts, Variance::unknown, spec);
      const auto gk = mixture_cdf_grid(law, pts, Variance::known, spec);
      const LimitParameter lp = panel_limit(c, m);
      const MixtureLaw lim = limit_law(lp, m.family, m.target);
      const auto gl = mixture_cdf_grid(lim, pts, Variance::known, spec);
      ok = ok && all_converged(gu) && all_converged(gk) && all_converged(gl);
      double cdf_gap = 0.0, limit_gap = 0.0, prob_gap = 0.0;
      for (std::size_t j = 0; j < pts.size(); ++j) {
        cdf_gap = std::max(cdf_gap, std::abs(gu[j].value - gk[j].value));
        limit_gap = std::max(limit_gap, std::abs(gu[j].value - gl[j].value));
      }
      for (int p = m.family.min_order(); p <= m.family.max_order(); ++p) {
        const QuadResult u = selection_prob_unknown(law.tests(), law.df(), p, spec.outer);
        ok = ok && u.converged;
        prob_gap = std::max(prob_gap, std::abs(u.value - selection_prob_known(law.tests(), p)));
      }
      cdf_gaps.push_back(cdf_gap);
      prob_gaps.push_back(prob_gap);
      limit_gaps.push_back(limit_gap);
      f.row({std::to_string(i + 1), std::to_string(n), num(cdf_gap), num(prob_gap), num(limit_gap)});
    }
    auto decreasing = [](const std::vector<double>& v) {
      for (std::size_t j = 1; j < v.size(); ++j) {
        if (!(v[j] < v[j - 1])) return false;
      }
      return true;
    };
    summary.row({std::to_string(i + 1), decreasing(cdf_gaps) ? "true" : "false",
                 decreasing(prob_gaps) ? "true" : "false", decreasing(limit_gaps) ? "true" : "false",
                 num(cdf_gaps.back()), num(limit_gaps.back())});
    log << "panel " << i + 1 << ": last sup|G - G*| = " << num(cdf_gaps.back())
        << ", last sup|G - limit| = " << num(limit_gaps.back()) << '\n';
  }
  f.close();
  summary.close();
  return finish(ok, log);
}

int cmd_simulate(const RunConfig& c, const fs::path& out, std::ostream& log) {
  const IntegrationSpec spec = integration_spec(c);
  bool ok = true;
  const PanelModel first = build_panel(c, 0);
  std::vector<std::string> cols{"panel", "variant", "replications", "ks_distance"};
  for (int p = first.family.min_order(); p <= first.family.max_order(); ++p) {
    cols.push_back("freq_" + std::to_string(p));
  }
  CsvFile summary(out / "simulation_summary.csv", c, cols);
  for (int i = 0; i < panel_count(c); ++i) {
    const PanelModel m = build_panel(c, i);
    const SimulationReport rep = simulate(m.design, m.family, m.target, m.params, c.replications, c.variant, c.seed);
    CsvFile draws(out / ("simulation_" + std::to_string(i + 1) + ".csv"), c, {});
    write_report_csv(rep, draws.stream());
    draws.close();

    const MixtureLaw law = finite_sample_law(m.design, m.family, m.target, m.params);
    const std::vector<Vector> grid = default_ks_grid(rep);
    const auto analytic = mixture_cdf_grid(law, grid, c.variant, spec);
    ok = ok && all_converged(analytic);
    double ks = 0.0;
    if (law.dimension() == 1) {
      std::vector<double> g1, values;
      for (std::size_t j = 0; j < grid.size(); ++j) {
        g1.push_back(grid[j](0));
        values.push_back(analytic[j].value);
      }
      ks = ks_distance(rep, g1, values);
    } else {
      // the grid is passed by reference, so each point's index is its offset
      ks = ks_distance(rep, [&](const Vector& t) { return analytic[static_cast<std::size_t>(&t - grid.data())].value; },
                       grid);
    }
    std::vector<std::string> row{std::to_string(i + 1), c.variant == Variance::known ? "known" : "unknown",
                                 std::to_string(c.replications), num(ks)};
    for (double fr : selection_frequencies(rep)) row.push_back(num(fr));
    summary.row(row);
    log << "panel " << i + 1 << ": KS distance " << num(ks) << " over " << grid.size() << " grid points\n";
  }
  summary.close();
  return finish(ok, log);
}

}  // namespace postsel::cli
