#include "cli/app.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <functional>
#include <ostream>
#include <sstream>

#include "cli/commands.hpp"

#ifndef POSTSEL_VERSION
#define POSTSEL_VERSION "0.0.0"
#endif

namespace postsel::cli {

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  std::string grid;
  std::string variant;
  bool mc = false;
};

using Command = int (*)(const RunConfig&, const std::filesystem::path&, std::ostream&);

int dispatch(Command command, const Options& o, std::ostream& out) {
  RunConfig config = load_config(o.config);
  // overrides enter the hash so that two outputs with equal headers came from equal inputs
  std::string overrides;
  if (o.seed) {
    config.seed = *o.seed;
    overrides += "|seed=" + std::to_string(*o.seed);
  }
  if (o.replications) {
    if (*o.replications < 1) throw ConfigError("--replications: must be at least 1");
    config.replications = *o.replications;
    overrides += "|replications=" + std::to_string(*o.replications);
  }
  if (!o.variant.empty()) {
    config.variant = parse_variant(o.variant);
    overrides += "|variant=" + o.variant;
  }
  if (o.mc && !config.mc) {
    config.mc = true;
    overrides += "|mc";
  }
  if (!overrides.empty()) config.hash = fnv1a(overrides, config.hash);
  if (!o.grid.empty()) apply_grid_override(config, o.grid);
  return command(config, o.out, out);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-sample and limit laws of post-model-selection estimators"};
  app.set_version_flag("--version", std::string("postsel ") + POSTSEL_VERSION);
  app.require_subcommand(1);

  Options o;
  Command chosen = nullptr;
  auto add = [&](const char* name, const char* help, Command command) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", o.config, "configuration file")->required();
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--seed", o.seed, "random seed");
    sub->add_option("--replications", o.replications, "Monte Carlo replications");
    sub->add_option("--grid", o.grid, "evaluation grid LO:HI:COUNT");
    sub->add_option("--variant", o.variant, "selector variance: known or unknown");
    sub->add_flag("--mc", o.mc, "add a Monte Carlo column");
    sub->callback([&chosen, command] { chosen = command; });
    return sub;
  };
  add("curves", "densities (two-regressor) or cdf/density curves (general design)", &cmd_curves);
  add("selection-probs", "model selection probabilities", &cmd_selection_probs);
  add("convergence", "finite-sample vs limit distances over a list of sample sizes", &cmd_convergence);
  add("simulate", "Monte Carlo draws and KS distance to the analytic cdf", &cmd_simulate);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    std::ostringstream sink_err;
    const int code = app.exit(e, out, sink_err);
    return code;
  } catch (const CLI::ParseError& e) {
    std::ostringstream sink_out;
    app.exit(e, sink_out, err);
    return kConfigError;
  }

  try {
    return dispatch(chosen, o, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const SingularMatrixError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const ModelError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::domain_error& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  }
}

}  // namespace postsel::cli
