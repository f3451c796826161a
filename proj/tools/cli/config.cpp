#include "cli/config.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace postsel::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

struct Entry {
  std::string value;
  int line = 0;
};

class Reader {
 public:
  Reader(std::string source, std::map<std::string, Entry> entries)
      : source_(std::move(source)), entries_(std::move(entries)) {}

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    auto it = entries_.find(key);
    const std::string where = it == entries_.end() ? source_ : source_ + ":" + std::to_string(it->second.line);
    throw ConfigError(where + ": " + key + ": " + what);
  }

  bool has(const std::string& key) const { return entries_.count(key) > 0; }

  std::string text(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) fail(key, "missing");
    used_.insert(key);
    return it->second.value;
  }

  double number(const std::string& key, const std::string& raw) const {
    double v = 0.0;
    const char* first = raw.data();
    const char* last = raw.data() + raw.size();
    if (!raw.empty() && *first == '+') ++first;
    const auto res = std::from_chars(first, last, v);
    if (raw.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
      fail(key, "'" + raw + "' is not a finite number");
    }
    return v;
  }

  double real(const std::string& key, double fallback) const {
    return has(key) ? number(key, text(key)) : fallback;
  }

  long long integer(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    const std::string raw = text(key);
    long long v = 0;
    const auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (raw.empty() || res.ec != std::errc() || res.ptr != raw.data() + raw.size()) {
      fail(key, "'" + raw + "' is not an integer");
    }
    return v;
  }

  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    for (const std::string& item : split(text(key), ',')) out.push_back(number(key, item));
    return out;
  }

  Matrix matrix(const std::string& key) const {
    const std::vector<std::string> rows = split(text(key), ';');
    std::vector<std::vector<double>> values;
    for (const std::string& row : rows) {
      std::vector<double> r;
      for (const std::string& item : split(row, ',')) r.push_back(number(key, item));
      if (!values.empty() && r.size() != values.front().size()) fail(key, "rows differ in length");
      values.push_back(std::move(r));
    }
    Matrix m(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.front().size()));
    for (std::size_t i = 0; i < values.size(); ++i) {
      for (std::size_t j = 0; j < values[i].size(); ++j) {
        m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i][j];
      }
    }
    return m;
  }

  bool flag(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const std::string v = text(key);
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    fail(key, "expected true or false, got '" + v + "'");
  }

  void reject_unused() const {
    for (const auto& [key, entry] : entries_) {
      if (!used_.count(key)) fail(key, "unknown setting");
    }
  }

 private:
  std::string source_;
  std::map<std::string, Entry> entries_;
  mutable std::set<std::string> used_;
};

void validate_two_regressor(const Reader& r, const RunConfig& c) {
  if (!(std::abs(c.rho) < 1.0)) r.fail("model.rho", "must lie in (-1, 1)");
  if (!(c.sigma1 > 0.0)) r.fail("model.sigma1", "must be positive");
  if (!(c.sigma2 > 0.0)) r.fail("model.sigma2", "must be positive");
  if (!(c.c2 > 0.0)) r.fail("model.c2", "must be positive");
  if (c.n <= 2) r.fail("model.n", "must exceed 2");
  if (c.theta2.empty()) r.fail("model.theta2", "needs at least one value");
}

void validate_general(const Reader& r, RunConfig& c) {
  const int big_p = static_cast<int>(c.gram.rows());
  if (!(c.sigma > 0.0)) r.fail("model.sigma", "must be positive");
  if (c.theta.size() != big_p) r.fail("model.theta", "needs one entry per regressor (" + std::to_string(big_p) + ")");
  if (c.min_order < 0 || c.min_order >= big_p) r.fail("model.min_order", "must lie in [0, P)");
  if (static_cast<int>(c.criticals.size()) != big_p - c.min_order) {
    r.fail("model.criticals", "needs P - min_order = " + std::to_string(big_p - c.min_order) + " values");
  }
  for (double v : c.criticals) {
    if (!(v > 0.0)) r.fail("model.criticals", "values must be positive");
  }
  if (c.target.cols() != big_p) r.fail("model.target", "needs P columns");
  try {
    (void)Gram(c.gram);
  } catch (const std::exception& e) {
    r.fail(c.design_path.empty() ? "model.gram" : "model.design", e.what());
  }
  try {
    (void)TargetFunctional(c.target);
  } catch (const std::exception& e) {
    r.fail("model.target", e.what());
  }
  if (c.n <= big_p) r.fail("model.n", "must exceed the number of regressors");
}

}  // namespace

std::uint64_t fnv1a(const std::string& text, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[value & 0xF];
    value >>= 4;
  }
  return out;
}

Variance parse_variant(const std::string& text) {
  if (text == "known") return Variance::known;
  if (text == "unknown") return Variance::unknown;
  throw ConfigError("variant must be 'known' or 'unknown', got '" + text + "'");
}

RunConfig parse_config(const std::string& text, const std::string& source, const std::string& base_dir) {
  static const std::set<std::string> sections{"model", "grid", "run", "convergence"};
  std::map<std::string, Entry> entries;
  std::string section;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!sections.count(section)) throw ConfigError(where + "unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "setting outside a section");
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ConfigError(where + key + ": empty value");
    if (entries.count(key)) throw ConfigError(where + key + ": duplicate setting");
    entries[key] = {value, line_no};
  }

  const Reader r(source, std::move(entries));
  RunConfig c;
  c.source = source;
  c.hash = fnv1a(text);

  const std::string scenario = r.has("model.scenario") ? r.text("model.scenario") : "two_regressor";
  if (scenario == "two_regressor") {
    c.scenario = Scenario::two_regressor;
    c.n = static_cast<int>(r.integer("model.n", 7));
    c.rho = r.number("model.rho", r.text("model.rho"));
    c.sigma1 = r.real("model.sigma1", 1.0);
    c.sigma2 = r.real("model.sigma2", 1.0);
    c.theta1 = r.real("model.theta1", 0.0);
    c.c2 = r.real("model.c2", 2.015);
    c.theta2 = r.list("model.theta2");
    validate_two_regressor(r, c);
  } else if (scenario == "general_design") {
    c.scenario = Scenario::general_design;
    if (r.has("model.design") == r.has("model.gram")) {
      r.fail("model.design", "give exactly one of 'design' (csv path) or 'gram' (with n)");
    }
    if (r.has("model.design")) {
      namespace fs = std::filesystem;
      fs::path p = r.text("model.design");
      if (p.is_relative()) p = fs::path(base_dir) / p;
      c.design_path = p.string();
      try {
        const RegressionDesign d = RegressionDesign::from_csv(c.design_path);
        c.gram = d.gram().matrix();
        c.n = d.n();
      } catch (const ModelError& e) {
        r.fail("model.design", e.what());
      }
      if (r.has("model.n")) r.fail("model.n", "is taken from the design file");
    } else {
      c.gram = r.matrix("model.gram");
      c.n = static_cast<int>(r.integer("model.n", 0));
    }
    const std::vector<double> th = r.list("model.theta");
    c.theta = Vector::Map(th.data(), static_cast<Eigen::Index>(th.size()));
    c.sigma = r.real("model.sigma", 1.0);
    c.min_order = static_cast<int>(r.integer("model.min_order", 0));
    c.criticals = r.list("model.criticals");
    if (r.has("model.target")) {
      c.target = r.matrix("model.target");
    } else {
      c.target = Matrix::Zero(1, c.gram.cols());
      c.target(0, 0) = 1.0;
    }
    validate_general(r, c);
  } else {
    r.fail("model.scenario", "must be two_regressor or general_design");
  }

  c.grid_lo = r.real("grid.lo", -5.0);
  c.grid_hi = r.real("grid.hi", 5.0);
  c.grid_points = static_cast<int>(r.integer("grid.points", 101));
  if (!(c.grid_lo < c.grid_hi)) r.fail("grid.hi", "must exceed grid.lo");
  if (c.grid_points < 2) r.fail("grid.points", "must be at least 2");

  const long long reps = r.integer("run.replications", 100000);
  if (reps < 1 || reps > 100000000) r.fail("run.replications", "must lie in [1, 1e8]");
  c.replications = static_cast<int>(reps);
  const long long seed = r.integer("run.seed", 1);
  if (seed < 0) r.fail("run.seed", "must be nonnegative");
  c.seed = static_cast<std::uint64_t>(seed);
  if (r.has("run.variant")) {
    try {
      c.variant = parse_variant(r.text("run.variant"));
    } catch (const ConfigError& e) {
      r.fail("run.variant", e.what());
    }
  }
  c.abs_tol = r.real("run.abs_tol", 1e-10);
  c.rel_tol = r.real("run.rel_tol", 1e-10);
  if (!(c.abs_tol > 0.0 && c.abs_tol < 1.0)) r.fail("run.abs_tol", "must lie in (0, 1)");
  if (!(c.rel_tol > 0.0 && c.rel_tol < 1.0)) r.fail("run.rel_tol", "must lie in (0, 1)");
  c.mc = r.flag("run.mc", false);

  if (r.has("convergence.n_list")) {
    for (double v : r.list("convergence.n_list")) {
      const int big_p = c.scenario == Scenario::two_regressor ? 2 : static_cast<int>(c.gram.rows());
      if (v != std::floor(v) || v <= big_p) r.fail("convergence.n_list", "entries must be integers above P");
      c.n_list.push_back(static_cast<int>(v));
    }
  } else {
    c.n_list = {c.n};
  }
  c.rescale = r.flag("convergence.rescale", true);

  r.reject_unused();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string dir = std::filesystem::path(path).parent_path().string();
  return parse_config(buf.str(), path, dir.empty() ? "." : dir);
}

void apply_grid_override(RunConfig& config, const std::string& spec) {
  const std::vector<std::string> parts = split(spec, ':');
  if (parts.size() != 3) throw ConfigError("--grid: expected LO:HI:COUNT, got '" + spec + "'");
  try {
    std::size_t pos = 0;
    const double lo = std::stod(parts[0], &pos);
    if (pos != parts[0].size()) throw std::invalid_argument("lo");
    const double hi = std::stod(parts[1], &pos);
    if (pos != parts[1].size()) throw std::invalid_argument("hi");
    const int count = std::stoi(parts[2], &pos);
    if (pos != parts[2].size()) throw std::invalid_argument("count");
    if (!(lo < hi) || count < 2) throw std::invalid_argument("range");
    config.grid_lo = lo;
    config.grid_hi = hi;
    config.grid_points = count;
  } catch (const std::exception&) {
    throw ConfigError("--grid: expected LO:HI:COUNT with LO < HI and COUNT >= 2, got '" + spec + "'");
  }
  config.hash = fnv1a("--grid=" + spec + "\n", config.hash);
}

int panel_count(const RunConfig& config) {
  return config.scenario == Scenario::two_regressor ? static_cast<int>(config.theta2.size()) : 1;
}

PanelModel build_panel(const RunConfig& config, int index, int n, bool rescaled) {
  const int size = n > 0 ? n : config.n;
  const double factor = rescaled ? std::sqrt(static_cast<double>(config.n) / size) : 1.0;
  if (config.scenario == Scenario::two_regressor) {
    TwoRegressorSetting s{config.rho, config.sigma1, config.sigma2,
                          config.theta2.at(static_cast<std::size_t>(index)) * factor, size, config.c2};
    TwoRegressorModel m = two_regressor_model(s, config.theta1);
    return {std::move(m.design), std::move(m.family), std::move(m.target), std::move(m.params), s};
  }
  Vector theta = config.theta;
  for (Eigen::Index j = config.min_order; j < theta.size(); ++j) theta(j) *= factor;
  RegressionDesign design = (!config.design_path.empty() && size == config.n)
                                ? RegressionDesign::from_csv(config.design_path)
                                : synthetic_design(size, config.gram, config.seed);
  return {std::move(design), SelectionFamily(config.min_order, config.criticals),
          TargetFunctional(config.target), ParameterPoint(theta, config.sigma), std::nullopt};
}

IntegrationSpec integration_spec(const RunConfig& config) {
  IntegrationSpec spec;
  spec.outer.abs_tol = config.abs_tol;
  spec.outer.rel_tol = config.rel_tol;
  spec.inner.abs_tol = config.abs_tol / 10.0;
  spec.inner.rel_tol = config.rel_tol / 10.0;
  return spec;
}

}  // namespace postsel::cli
