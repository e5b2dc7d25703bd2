#include "qdyn/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "qdyn/error.hpp"

namespace qdyn::config {

namespace {

namespace pt = boost::property_tree;

[[noreturn]] void fail(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

const std::map<std::string, std::set<std::string>> kKeys = {
    {"potential", {"model", "coefficients", "mass", "omega"}},
    {"system", {"beta"}},
    {"oracle", {"q_min", "q_max", "n_points"}},
    {"pimd", {"scale", "P", "window", "grid_points", "samples", "equilibration", "step_fraction", "seed", "threads"}},
    {"effpot", {"degree", "bootstrap", "Q_half_width", "Q_points"}},
    {"cmd", {"members", "t_max", "dt"}},
    {"epac", {"Z"}},
    {"spectra", {"window", "padding"}},
    {"compare", {"threshold", "window"}},
    {"output", {"dir"}},
};

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {
    for (const auto& [section, body] : tree_) {
      const auto known = kKeys.find(section);
      if (known == kKeys.end()) fail("unknown section [" + section + "]");
      if (!body.data().empty() && body.empty()) fail("key '" + section + "' must belong to a section");
      for (const auto& [key, value] : body)
        if (!known->second.count(key)) fail("unknown key '" + section + "." + key + "'");
    }
  }

  std::optional<std::string> text(const std::string& section, const std::string& key) const {
    const auto s = tree_.get_child_optional(pt::ptree::path_type(section, '\0'));
    if (!s) return std::nullopt;
    const auto v = s->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
    if (!v) return std::nullopt;
    return *v;
  }

  std::string required(const std::string& section, const std::string& key) const {
    auto v = text(section, key);
    if (!v) fail("missing key '" + section + "." + key + "'");
    return *v;
  }

  template <class T>
  void get(const std::string& section, const std::string& key, T& out) const {
    if (auto v = text(section, key)) out = number<T>(section + "." + key, *v);
  }

  template <class T>
  static T number(const std::string& name, const std::string& s) {
    T v{};
    const auto* end = s.data() + s.size();
    const auto r = std::from_chars(s.data(), end, v);
    if (r.ec != std::errc() || r.ptr != end) fail("key '" + name + "': cannot read '" + s + "' as a number");
    return v;
  }

  template <class T>
  static std::vector<T> list(const std::string& name, const std::string& s) {
    std::vector<T> out;
    std::string spaced = s;
    std::replace(spaced.begin(), spaced.end(), ',', ' ');
    std::istringstream in(spaced);
    std::string tok;
    while (in >> tok) out.push_back(number<T>(name, tok));
    if (out.empty()) fail("key '" + name + "' is empty");
    return out;
  }

 private:
  const pt::ptree& tree_;
};

void check(bool ok, const std::string& what) {
  if (!ok) fail(what);
}

}  // namespace

RunConfig parse(const std::string& text, const Overrides& overrides) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    fail(fmt::format("line {}: {}", e.line(), e.message()));
  }
  const Reader r(tree);
  RunConfig c;

  c.potential_name = r.required("potential", "model");
  double mass = 1.0, omega = 1.0;
  r.get("potential", "mass", mass);
  r.get("potential", "omega", omega);
  check(mass > 0.0, "key 'potential.mass' must be positive");
  if (c.potential_name == "double_well") {
    c.potential = model::double_well();
    c.potential.mass = mass;
  } else if (c.potential_name == "harmonic") {
    check(omega > 0.0, "key 'potential.omega' must be positive");
    c.potential = model::harmonic(mass, omega);
  } else if (c.potential_name == "custom") {
    c.potential.coefficients = Reader::list<double>("potential.coefficients", r.required("potential", "coefficients"));
    c.potential.mass = mass;
    bool even = true;
    for (std::size_t k = 1; k < c.potential.coefficients.size(); k += 2) even = even && c.potential.coefficients[k] == 0.0;
    c.potential.symmetric = even;
  } else {
    fail("key 'potential.model' must be double_well, harmonic or custom, got '" + c.potential_name + "'");
  }
  if (c.potential_name != "custom" && r.text("potential", "coefficients"))
    fail("key 'potential.coefficients' is only used with model = custom");
  try {
    c.potential.validate();
  } catch (const Error& e) {
    fail("potential: " + e.message());
  }

  c.betas = Reader::list<double>("system.beta", r.required("system", "beta"));
  for (double b : c.betas) check(b > 0.0 && std::isfinite(b), "key 'system.beta' must list positive finite values");

  if (r.text("oracle", "q_min") || r.text("oracle", "q_max") || r.text("oracle", "n_points")) {
    oracle::GridSpec g;
    r.get("oracle", "q_min", g.q_min);
    r.get("oracle", "q_max", g.q_max);
    r.get("oracle", "n_points", g.n_points);
    try {
      g.validate();
    } catch (const Error& e) {
      fail("oracle grid: " + e.message());
    }
    c.oracle_grid = g;
  }

  if (auto s = r.text("pimd", "scale")) c.scale_name = *s;
  if (overrides.scale) c.scale_name = *overrides.scale;
  c.scale = presets::scale_from_string(c.scale_name);
  r.get("pimd", "grid_points", c.scale.grid_points);
  r.get("pimd", "samples", c.scale.samples);
  r.get("effpot", "degree", c.scale.degree);
  r.get("pimd", "P", c.P);
  r.get("pimd", "window", c.window);
  r.get("pimd", "equilibration", c.equilibration);
  r.get("pimd", "step_fraction", c.step_fraction);
  r.get("pimd", "seed", c.seed);
  r.get("pimd", "threads", c.threads);
  if (overrides.seed) c.seed = *overrides.seed;
  check(c.scale.grid_points >= 3, "key 'pimd.grid_points' must be at least 3");
  check(c.scale.samples >= 1000, "key 'pimd.samples' must be at least 1000");
  check(c.scale.degree >= 1, "key 'effpot.degree' must be positive");
  check(c.P == 0 || c.P >= 2, "key 'pimd.P' must be 0 (preset) or at least 2");
  check(c.window >= 0.0, "key 'pimd.window' must be non-negative");
  check(c.equilibration >= 0, "key 'pimd.equilibration' must be non-negative");
  check(c.step_fraction > 0.0 && c.step_fraction <= 0.1, "key 'pimd.step_fraction' must lie in (0, 0.1]");

  r.get("effpot", "bootstrap", c.bootstrap);
  r.get("effpot", "Q_half_width", c.Q_half_width);
  r.get("effpot", "Q_points", c.Q_points);
  check(c.bootstrap >= 0, "key 'effpot.bootstrap' must be non-negative");
  check(c.Q_half_width > 0.0, "key 'effpot.Q_half_width' must be positive");
  check(c.Q_points >= 11 && c.Q_points % 2 == 1, "key 'effpot.Q_points' must be odd and at least 11");

  r.get("cmd", "members", c.cmd_members);
  r.get("cmd", "t_max", c.t_max);
  r.get("cmd", "dt", c.dt);
  check(c.cmd_members >= 64, "key 'cmd.members' must be at least 64");
  check(c.t_max > 0.0 && c.dt > 0.0 && c.dt < c.t_max, "keys 'cmd.t_max' and 'cmd.dt' need 0 < dt < t_max");
  const double steps = c.t_max / c.dt;
  check(std::abs(steps - std::round(steps)) < 1e-9 * steps, "key 'cmd.t_max' must be a multiple of 'cmd.dt'");

  if (auto z = r.text("epac", "Z")) {
    c.Z_beta = Reader::number<double>("epac.Z", *z);
    check(*c.Z_beta > 0.0, "key 'epac.Z' must be positive");
  }

  if (auto w = r.text("spectra", "window")) c.window_name = *w;
  check(c.window_name == "hann" || c.window_name == "rectangular", "key 'spectra.window' must be hann or rectangular");
  r.get("spectra", "padding", c.padding);
  check(c.padding >= 1, "key 'spectra.padding' must be at least 1");

  r.get("compare", "threshold", c.compare_threshold);
  r.get("compare", "window", c.compare_window);
  check(c.compare_threshold > 0.0, "key 'compare.threshold' must be positive");
  check(c.compare_window > 0.0, "key 'compare.window' must be positive");

  if (auto d = r.text("output", "dir")) c.output_dir = *d;
  if (overrides.output_dir) c.output_dir = *overrides.output_dir;
  return c;
}

RunConfig load(const std::filesystem::path& path, const Overrides& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str(), overrides);
  } catch (const Error& e) {
    fail(path.string() + ": " + e.message());
  }
}

oracle::GridSpec RunConfig::grid_for(double beta) const {
  return oracle_grid ? *oracle_grid : presets::oracle_grid(beta);
}

std::vector<double> RunConfig::times() const {
  return linspace(0.0, t_max, static_cast<std::size_t>(std::lround(t_max / dt)) + 1);
}

std::string RunConfig::canonical_text() const {
  std::map<std::string, std::string> kv;
  auto num = [](double x) { return fmt::format("{}", x); };
  auto join = [&](const std::vector<double>& v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : " ") + num(x);
    return s;
  };
  kv["potential.model"] = potential_name;
  kv["potential.coefficients"] = join(potential.coefficients);
  kv["potential.mass"] = num(potential.mass);
  kv["system.beta"] = join(betas);
  kv["oracle.grid"] = oracle_grid ? fmt::format("{} {} {}", num(oracle_grid->q_min), num(oracle_grid->q_max),
                                                oracle_grid->n_points)
                                  : "preset";
  kv["pimd.scale"] = scale_name;
  kv["pimd.grid_points"] = std::to_string(scale.grid_points);
  kv["pimd.samples"] = std::to_string(scale.samples);
  kv["pimd.P"] = std::to_string(P);
  kv["pimd.window"] = num(window);
  kv["pimd.equilibration"] = std::to_string(equilibration);
  kv["pimd.step_fraction"] = num(step_fraction);
  kv["pimd.seed"] = std::to_string(seed);
  kv["effpot.degree"] = std::to_string(scale.degree);
  kv["effpot.bootstrap"] = std::to_string(bootstrap);
  kv["effpot.Q"] = fmt::format("{} {}", num(Q_half_width), Q_points);
  kv["cmd.members"] = std::to_string(cmd_members);
  kv["cmd.t_max"] = num(t_max);
  kv["cmd.dt"] = num(dt);
  kv["epac.Z"] = Z_beta ? num(*Z_beta) : "none";
  kv["spectra"] = fmt::format("{} {}", window_name, padding);
  kv["compare"] = fmt::format("{} {}", num(compare_threshold), num(compare_window));
  // threads and the output directory do not change results
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

}  // namespace qdyn::config
