#pragma once

// Brute-force simulation of the select-then-fit procedure, used as an
// independent check on the analytic distributions.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "postsel/distribution.hpp"
#include "postsel/model_core.hpp"

namespace postsel {

struct SimulationReport {
  /// R x k realizations of sqrt(n) A (theta_tilde - theta).
  Matrix draws;
  /// Selected order per replication.
  std::vector<int> selected;
  std::uint64_t seed = 0;
  int replications = 0;
  Variance variant = Variance::unknown;
  int min_order = 0;
  int max_order = 0;
};

/// Replication r draws its noise from RandomStream(seed).split(r), so the
/// report does not depend on how replications are spread over threads.
/// `threads` <= 0 means default_thread_count().
SimulationReport simulate(const RegressionDesign& design, const SelectionFamily& family,
                          const TargetFunctional& target, const ParameterPoint& params,
                          int replications, Variance variant, std::uint64_t seed,
                          int threads = 0);

/// Fraction of draws <= t in every coordinate.
double empirical_cdf(const SimulationReport& report, const Vector& t);

/// Relative frequency of each order O..P.
std::vector<double> selection_frequencies(const SimulationReport& report);

/// max over the grid of |empirical - analytic|.
double ks_distance(const SimulationReport& report,
                   const std::function<double(const Vector&)>& analytic_cdf,
                   const std::vector<Vector>& grid);
/// k = 1 form with precomputed analytic values on a sorted grid.
double ks_distance(const SimulationReport& report, const std::vector<double>& grid,
                   const std::vector<double>& analytic_values);

/// `points` equally spaced points on mean +- 5 max-component-sd, along the
/// diagonal direction when k > 1.
std::vector<Vector> default_ks_grid(const SimulationReport& report, int points = 101);

/// Monte Carlo estimate of P(T > crit) for T = (Z + ncp) / sqrt(chi^2_df / df).
double power_check_noncentral_t(int df, double ncp, double crit, int replications,
                                std::uint64_t seed, int threads = 0);

/// One row per replication: draw components then the selected order.
void write_report_csv(const SimulationReport& report, std::ostream& out);

}  // namespace postsel
