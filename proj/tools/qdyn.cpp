// Command-line driver: one subcommand per pipeline stage. Stages exchange
// data only through the CSV/JSON files in the output directory.

#include <fmt/format.h>

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "qdyn/acceptance.hpp"
#include "qdyn/cmd.hpp"
#include "qdyn/config.hpp"
#include "qdyn/effpot.hpp"
#include "qdyn/epac.hpp"
#include "qdyn/error.hpp"
#include "qdyn/io.hpp"
#include "qdyn/oracle.hpp"
#include "qdyn/pimd.hpp"
#include "qdyn/presets.hpp"
#include "qdyn/spectra.hpp"
#include "qdyn/stats.hpp"

#ifndef QDYN_VERSION
#define QDYN_VERSION "unknown"
#endif

namespace {

using namespace qdyn;
namespace fs = std::filesystem;
using io::json;

enum Exit { kOk = 0, kConfig = 2, kNumerical = 3, kAcceptance = 4 };

// Failed built-in checks: solve-exact --check (acceptance) and the legendre
// convexity test (numerical).
struct CheckFailed : std::runtime_error {
  CheckFailed(const std::string& what, int code) : std::runtime_error(what), exit_code(code) {}
  int exit_code;
};

class Run {
 public:
  Run(config::RunConfig cfg, std::string command) : cfg_(std::move(cfg)), command_(std::move(command)) {}

  const config::RunConfig& cfg() const { return cfg_; }

  fs::path path(const std::string& name) const { return cfg_.output_dir / name; }

  static std::string tag(double beta) { return fmt::format("beta{}", beta); }

  fs::path input(const std::string& name, const std::string& producer) {
    const auto p = path(name);
    if (!fs::exists(p)) throw Error(ErrorCode::ConfigError, "missing input " + p.string() + " (run " + producer + " first)");
    inputs_.push_back(p);
    return p;
  }

  void output(const fs::path& p) { outputs_.push_back(p); }

  void note(const std::string& msg) const { std::cerr << msg << '\n'; }

  std::size_t beta_index(double beta) const {
    for (std::size_t k = 0; k < cfg_.betas.size(); ++k)
      if (cfg_.betas[k] == beta) return k;
    return 0;
  }

  // Manifest without timestamps, so identical runs give identical manifests.
  void write_manifest() const {
    json m;
    m["command"] = command_;
    m["code_version"] = QDYN_VERSION;
    m["config_sha256"] = io::sha256_hex(cfg_.canonical_text());
    m["seed"] = cfg_.seed;
    m["config"] = cfg_.canonical_text();
    auto files = [&](const std::vector<fs::path>& list) {
      json arr = json::array();
      for (const auto& p : list) {
        for (const auto& f : {p, io::sidecar_path(p)}) {
          if (!fs::exists(f)) continue;
          arr.push_back({{"file", fs::relative(f, cfg_.output_dir).string()}, {"sha256", io::sha256_file(f)}});
        }
      }
      return arr;
    };
    m["inputs"] = files(inputs_);
    m["outputs"] = files(outputs_);
    io::write_json(path("manifest_" + command_ + ".json"), m);
  }

  json provenance() const {
    return {{"command", command_}, {"code_version", QDYN_VERSION}, {"config_sha256", io::sha256_hex(cfg_.canonical_text())}};
  }

 private:
  config::RunConfig cfg_;
  std::string command_;
  std::vector<fs::path> inputs_, outputs_;
};

presets::BetaPreset preset(const config::RunConfig& c, double beta) {
  auto p = presets::for_beta(beta);
  if (c.P > 0) p.P = c.P;
  if (c.window > 0.0) p.window = c.window;
  return p;
}

effpot::PipelineOptions pipeline_options(const Run& run, double beta) {
  const auto& c = run.cfg();
  effpot::PipelineOptions o;
  o.degree = c.scale.degree;
  o.symmetric = c.potential.symmetric;
  o.mass = c.potential.mass;
  o.Q_grid = linspace(-c.Q_half_width, c.Q_half_width, static_cast<std::size_t>(c.Q_points));
  o.q_grid = o.Q_grid;
  o.quadrature.extension = preset(c, beta).extension;
  o.bootstrap = c.bootstrap;
  o.seed = stats::derive_seed(c.seed, 500 + run.beta_index(beta));
  return o;
}

// ---------------------------------------------------------------- solve-exact

void solve_exact(Run& run, bool check) {
  const auto& c = run.cfg();
  const auto times = c.times();
  try {
    for (double beta : c.betas) {
      const auto sys = model::natural_units(beta);
      const auto grid = c.grid_for(beta);
      const auto eig = oracle::solve_thermal_eigensystem(c.potential, sys, grid);
      const auto t = Run::tag(beta);
      {
        const auto p = run.path("eigensystem_" + t + ".csv");
        std::ostringstream csv;
        csv << "n,energy\n";
        for (int k = 0; k < eig.n_states(); ++k) csv << k << ',' << io::format_double(eig.energies[k]) << '\n';
        fs::create_directories(c.output_dir);
        std::ofstream(p, std::ios::binary) << csv.str();
        json meta = run.provenance();
        meta["kind"] = "eigensystem";
        meta["beta"] = beta;
        meta["grid"] = {grid.q_min, grid.q_max, grid.n_points};
        io::write_json(io::sidecar_path(p), meta);
        run.output(p);
      }
      const std::pair<std::string, CorrelationSeries> series[] = {
          {"exact_", oracle::exact_correlation(eig, beta, times)},
          {"canonical_", oracle::exact_canonical_correlation(eig, beta, times)}};
      for (const auto& [name, s] : series) {
        const auto p = run.path(name + t + ".csv");
        io::write_correlation(p, s, run.provenance());
        run.output(p);
      }
      const std::pair<std::string, SpectralLines> lines[] = {{"lines_standard_", oracle::exact_spectrum(eig, beta)},
                                                             {"lines_canonical_", oracle::exact_canonical_spectrum(eig, beta)}};
      for (const auto& [name, l] : lines) {
        const auto p = run.path(name + t + ".csv");
        io::write_lines(p, l, run.provenance());
        run.output(p);
      }
      if (check) {
        if (c.potential_name != "harmonic")
          throw Error(ErrorCode::ConfigError, "--check needs potential.model = harmonic");
        const double m = c.potential.mass, w = std::sqrt(2.0 * c.potential.coefficients[2] / m);
        double e_err = 0.0, c_err = 0.0;
        for (int k = 0; k < std::min(10, eig.n_states()); ++k) e_err = std::max(e_err, std::abs(eig.energies[k] - w * (k + 0.5)));
        const auto& exact = series[0].second;
        const double a = 1.0 / (2.0 * m * w);
        for (std::size_t i = 0; i < times.size(); ++i) {
          const cplx closed(a / std::tanh(beta * w / 2.0) * std::cos(w * times[i]), -a * std::sin(w * times[i]));
          c_err = std::max(c_err, std::abs(exact.values[i] - closed));
        }
        run.note(fmt::format("beta={}: closed-form check |dE| = {:.1e}, |dC| = {:.1e}", beta, e_err, c_err));
        if (e_err > 1e-6 || c_err > 1e-6) throw CheckFailed("harmonic closed-form check failed", kAcceptance);
      }
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BoundaryLeak)
      throw Error(e.code(), e.message() + " (hint: widen [oracle] q_min/q_max)");
    if (e.code() == ErrorCode::NotConverged)
      throw Error(e.code(), e.message() + " (hint: raise [oracle] n_points)");
    throw;
  }
}

// ------------------------------------------------------------------- pimd-ecp

void pimd_ecp(Run& run, bool resample) {
  const auto& c = run.cfg();
  for (double beta : c.betas) {
    const auto pre = preset(c, beta);
    const auto grid = linspace(-pre.window, pre.window, static_cast<std::size_t>(c.scale.grid_points));
    pimd::SamplerConfig sc;
    sc.production_steps = c.scale.samples;
    sc.equilibration_steps = c.equilibration > 0 ? c.equilibration : std::max(5000L, c.scale.samples / 5);
    sc.step_fraction = c.step_fraction;
    sc.seed = stats::derive_seed(c.seed, run.beta_index(beta));
    json meta = run.provenance();
    meta["potential"] = c.potential.coefficients;
    meta["mass"] = c.potential.mass;
    meta["samples"] = sc.production_steps;
    meta["equilibration"] = sc.equilibration_steps;
    meta["step_fraction"] = sc.step_fraction;

    const auto p = run.path("force_table_" + Run::tag(beta) + ".csv");
    pimd::ForceTable table;
    bool reuse = false;
    if (!resample && fs::exists(p) && fs::exists(io::sidecar_path(p))) {
      const auto old = io::read_json(io::sidecar_path(p));
      const auto prior = io::read_force_table(p);
      reuse = prior.P == pre.P && prior.seed == sc.seed && prior.q_c == grid && old.value("samples", json()) == meta["samples"] &&
              old.value("equilibration", json()) == meta["equilibration"] &&
              old.value("step_fraction", json()) == meta["step_fraction"] && old.value("potential", json()) == meta["potential"] &&
              old.value("mass", json()) == meta["mass"];
      if (reuse) table = prior;
    }
    if (reuse) {
      run.note(fmt::format("beta={}: reusing {}", beta, p.string()));
      run.output(p);
    } else {
      run.note(fmt::format("beta={}: sampling {} points x {} steps at P={}", beta, grid.size(), sc.production_steps, pre.P));
      table = pimd::centroid_force_grid(c.potential, model::natural_units(beta), pre.P, grid, sc, c.threads);
      io::write_force_table(p, table, meta);
      run.output(p);
    }
    const auto fit = effpot::fit_force_polynomial(table, c.scale.degree, c.potential.symmetric);
    const auto ecp = effpot::integrate_to_ecp(fit.force, 0.0, beta, linspace(-pre.window, pre.window, 201));
    json extra = run.provenance();
    extra["degree"] = c.scale.degree;
    extra["chi2_per_dof"] = fit.chi2_per_dof();
    const auto cp = run.path("classical_" + Run::tag(beta) + ".csv");
    io::write_curve(cp, ecp, extra);
    run.output(cp);
  }
}

effpot::PipelineResult pipeline_from_table(Run& run, double beta) {
  const auto table = io::read_force_table(run.input("force_table_" + Run::tag(beta) + ".csv", "pimd-ecp"));
  return effpot::run_pipeline(table, pipeline_options(run, beta));
}

// ------------------------------------------------------------------- legendre

void legendre(Run& run) {
  const auto& c = run.cfg();
  for (double beta : c.betas) {
    const auto r = pipeline_from_table(run, beta);
    // convexity of the tabulated curve within the bootstrap spread
    const auto& v = r.standard.values;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
      const double d2 = v[i - 1] - 2.0 * v[i] + v[i + 1];
      std::vector<double> reps;
      for (const auto& rep : r.standard_replicates) reps.push_back(rep[i - 1] - 2.0 * rep[i] + rep[i + 1]);
      double sigma = 0.0;
      if (reps.size() > 1) sigma = stats::independent_estimate(reps).stderr_ * std::sqrt(static_cast<double>(reps.size()));
      if (d2 < -3.0 * sigma - 1e-12)
        throw CheckFailed(fmt::format("beta={}: V_beta is not convex at Q = {} (second difference {:.3e}, sigma {:.1e})", beta,
                                      r.standard.grid[i], d2, sigma),
                        kNumerical);
    }
    const auto t = Run::tag(beta);
    const auto sp = run.path("standard_" + t + ".csv");
    io::write_curve(sp, r.standard, run.provenance());
    run.output(sp);
    json rec = run.provenance();
    rec["kind"] = "effective_frequency";
    rec["beta"] = beta;
    rec["mass"] = c.potential.mass;
    rec["omega_beta"] = r.frequency.omega;
    rec["omega_stderr"] = r.omega_stderr;
    rec["Q_min"] = r.frequency.Q_min;
    rec["curvature"] = r.frequency.curvature;
    rec["chi2_per_dof"] = r.fit.chi2_per_dof();
    const auto rp = run.path("effective_frequency_" + t + ".json");
    io::write_json(rp, rec);
    run.output(rp);
    run.note(fmt::format("beta={}: omega_beta = {:.5f} +- {:.5f}", beta, r.frequency.omega, r.omega_stderr));
  }
}

// ------------------------------------------------------------------------ cmd

void cmd_run(Run& run) {
  const auto& c = run.cfg();
  for (double beta : c.betas) {
    const auto r = pipeline_from_table(run, beta);
    const double m = c.potential.mass;
    const auto ens = cmd::sample_initial_centroids(r.classical, m, c.cmd_members,
                                                   stats::derive_seed(c.seed, 400 + run.beta_index(beta)));
    cmd::CorrelationOptions co;
    const double limit = 0.05 / cmd::max_frequency(r.classical, m);
    co.sample_every = static_cast<int>(std::ceil(c.dt / limit * (1.0 - 1e-12)));
    co.dt = c.dt / co.sample_every;
    co.t_max = c.t_max;
    co.threads = c.threads;
    auto s = cmd::centroid_correlation(ens, r.classical, co);
    s.times = c.times();  // same instants, without accumulated rounding
    const auto p = run.path("cmd_" + Run::tag(beta) + ".csv");
    json extra = run.provenance();
    extra["members"] = c.cmd_members;
    extra["integration_dt"] = co.dt;
    io::write_correlation(p, s, extra);
    run.output(p);
  }
}

// ----------------------------------------------------------------------- epac

epac::EpacParameters read_frequency(Run& run, double beta) {
  const auto rec = io::read_json(run.input("effective_frequency_" + Run::tag(beta) + ".json", "legendre"));
  epac::EpacParameters p;
  try {
    p.omega_beta = rec.at("omega_beta").get<double>();
    p.Q_min = rec.at("Q_min").get<double>();
    p.mass = rec.at("mass").get<double>();
    p.beta = rec.at("beta").get<double>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ConfigError, std::string("effective frequency record: ") + e.what());
  }
  p.Z_beta = run.cfg().Z_beta;
  return p;
}

void epac_run(Run& run) {
  const auto& c = run.cfg();
  for (double beta : c.betas) {
    auto p = read_frequency(run, beta);
    const auto t = Run::tag(beta);
    const auto Z = p.Z_beta;
    p.Z_beta.reset();
    const auto series = epac::epac_correlation(p, c.times());
    const auto sp = run.path("epac_" + t + ".csv");
    io::write_correlation(sp, series, run.provenance());
    run.output(sp);
    const auto lp = run.path("epac_lines_" + t + ".csv");
    io::write_lines(lp, epac::epac_spectrum(p), run.provenance());
    run.output(lp);
    if (Z) {
      p.Z_beta = Z;
      json extra = run.provenance();
      extra["Z_beta"] = *Z;
      extra["omega_S"] = epac::second_order_frequency(p);
      const auto p2 = run.path("epac2_" + t + ".csv");
      io::write_correlation(p2, epac::epac2_correlation(p, c.times()), extra);
      run.output(p2);
    }
    // zero-temperature limit from the same effective frequency
    auto zt = p;
    zt.zero_temperature = true;
    const auto zp = run.path("epac_zero_temperature_" + t + ".csv");
    io::write_correlation(zp, epac::epac_zero_temperature(zt, c.times()), run.provenance());
    run.output(zp);
  }
}

// -------------------------------------------------------------------- spectra

void spectra_run(Run& run) {
  const auto& c = run.cfg();
  const auto window = spectra::window_from_string(c.window_name);
  int found = 0;
  for (double beta : c.betas) {
    const auto t = Run::tag(beta);
    for (const std::string name : {"exact", "canonical", "cmd", "epac", "epac2"}) {
      const auto src = run.path(name + "_" + t + ".csv");
      if (!fs::exists(src)) continue;
      ++found;
      run.input(name + "_" + t + ".csv", "");
      const auto series = io::read_correlation(src);
      const auto spec = spectra::fourier_transform_series(series, window, c.padding);
      const auto p = run.path("spectrum_" + name + "_" + t + ".csv");
      io::write_spectrum(p, spec, run.provenance());
      run.output(p);
      double top = 0.0;
      for (const auto& v : spec.values) top = std::max(top, v.real());
      json peaks = json::array();
      if (top > 0.0)
        for (const auto& pk : spectra::extract_peaks(spec, 0.05 * top))
          peaks.push_back({{"omega", pk.omega}, {"height", pk.height}, {"width", pk.width}});
      json rec = run.provenance();
      rec["kind"] = "peaks";
      rec["threshold"] = 0.05 * top;
      rec["peaks"] = peaks;
      const auto pp = run.path("peaks_" + name + "_" + t + ".json");
      io::write_json(pp, rec);
      run.output(pp);
    }
  }
  if (found == 0) throw Error(ErrorCode::ConfigError, "no correlation series found (run solve-exact, cmd or epac first)");
}

// -------------------------------------------------------------------- compare

void compare(Run& run) {
  const auto& c = run.cfg();
  for (double beta : c.betas) {
    const auto t = Run::tag(beta);
    const auto exact = io::read_correlation(run.input("exact_" + t + ".csv", "solve-exact"));
    const auto can = io::read_correlation(run.input("canonical_" + t + ".csv", "solve-exact"));
    std::optional<CorrelationSeries> cc, ac;
    if (fs::exists(run.path("cmd_" + t + ".csv"))) cc = io::read_correlation(run.input("cmd_" + t + ".csv", "cmd"));
    if (fs::exists(run.path("epac_" + t + ".csv"))) ac = io::read_correlation(run.input("epac_" + t + ".csv", "epac"));
    std::vector<const CorrelationSeries*> others = {&can};
    if (cc) others.push_back(&*cc);
    if (ac) others.push_back(&*ac);
    for (const auto* s : others) {
      bool same = s->size() == exact.size();
      for (std::size_t i = 0; same && i < s->size(); ++i) same = std::abs(s->times[i] - exact.times[i]) <= 1e-9 * c.t_max;
      if (!same) throw Error(ErrorCode::ConfigError, "series for " + t + " are on different time grids; rerun the stages");
    }
    // max deviation over t <= window and the first time it exceeds threshold * reference(0)
    auto metrics = [&](const CorrelationSeries& a, const CorrelationSeries& ref) {
      double dmax = 0.0;
      json first = nullptr;
      const double level = c.compare_threshold * ref.values[0].real();
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::abs(a.values[i].real() - ref.values[i].real());
        if (a.times[i] <= c.compare_window * (1.0 + 1e-12)) dmax = std::max(dmax, d);
        if (first.is_null() && d > level) first = a.times[i];
      }
      return json{{"max_deviation", dmax}, {"first_crossing", first}, {"threshold", level}};
    };
    json rec = run.provenance();
    rec["kind"] = "comparison";
    rec["beta"] = beta;
    rec["window"] = c.compare_window;
    if (cc) {
      rec["cmd_vs_canonical"] = metrics(*cc, can);
      rec["cmd_vs_canonical"]["initial_deviation"] = std::abs(cc->values[0].real() - can.values[0].real());
    }
    if (ac) {
      rec["epac_vs_exact"] = metrics(*ac, exact);
      rec["epac_vs_exact"]["initial_deviation"] = std::abs(ac->values[0] - exact.values[0]);
    }
    const auto mp = run.path("compare_" + t + ".json");
    io::write_json(mp, rec);
    run.output(mp);

    const auto p = run.path("compare_" + t + ".csv");
    std::ostringstream csv;
    csv << "t,exact_re,exact_im,canonical_re" << (cc ? ",cmd_re,cmd_stderr" : "") << (ac ? ",epac_re,epac_im" : "") << '\n';
    auto f = io::format_double;
    for (std::size_t i = 0; i < exact.size(); ++i) {
      csv << f(exact.times[i]) << ',' << f(exact.values[i].real()) << ',' << f(exact.values[i].imag()) << ','
          << f(can.values[i].real());
      if (cc) csv << ',' << f(cc->values[i].real()) << ',' << f(cc->stderr_.empty() ? 0.0 : cc->stderr_[i]);
      if (ac) csv << ',' << f(ac->values[i].real()) << ',' << f(ac->values[i].imag());
      csv << '\n';
    }
    std::ofstream(p, std::ios::binary) << csv.str();
    json side = run.provenance();
    side["kind"] = "comparison_table";
    side["beta"] = beta;
    io::write_json(io::sidecar_path(p), side);
    run.output(p);
    run.note(fmt::format("beta={}: {}", beta, rec.dump()));
  }
}

// ---------------------------------------------------------------------- main

std::vector<int> parse_criteria(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    const int id = std::stoi(tok);
    if (id < 1 || id > acceptance::kCriteria) throw Error(ErrorCode::ConfigError, "criterion ids run from 1 to 11");
    out.push_back(id);
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum dynamics from effective potentials: exact, CMD and EPAC correlation functions"};
  app.set_version_flag("--version", QDYN_VERSION);
  std::string config_path, out_dir, scale;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "run configuration (key = value, flat sections)");
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides the config)");
  auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides the config)");
  auto* scale_opt =
      app.add_option("--scale", scale, "sampling effort: ci (21 points, 1e5 samples) or paper (51 points, 1e7 samples)")
          ->check(CLI::IsMember({"ci", "paper"}));
  app.require_subcommand(1);

  bool check = false, resample = false;
  std::string criteria, cache;
  auto* solve = app.add_subcommand("solve-exact", "eigenstates, exact and canonical correlations, line spectra");
  solve->add_flag("--check", check, "compare against harmonic closed forms (exit 4 on mismatch)");
  auto* pimd_cmd = app.add_subcommand("pimd-ecp", "centroid force tables and classical effective potentials");
  pimd_cmd->add_flag("--resample", resample, "ignore existing force tables");
  app.add_subcommand("legendre", "standard effective potential and effective frequency");
  app.add_subcommand("cmd", "centroid molecular dynamics correlation");
  app.add_subcommand("epac", "EPAC correlation and line spectrum");
  app.add_subcommand("spectra", "Fourier transforms and peaks of every stored correlation");
  app.add_subcommand("compare", "deviation metrics between approximate and exact correlations");
  app.add_subcommand("all", "every stage in order");
  auto* self = app.add_subcommand("self-test", "acceptance checks (exit 4 on failure)");
  self->add_option("--criteria", criteria, "comma-separated criterion ids (default: all)");
  self->add_option("--cache", cache, "directory for reusable force tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    if (name == "self-test") {
      acceptance::Options o;
      o.paper_scale = scale == "paper";
      if (*seed_opt) o.seed = seed;
      if (!criteria.empty()) o.only = parse_criteria(criteria);
      if (!cache.empty()) o.cache_dir = cache;
      o.log = &std::cerr;
      bool ok = true;
      for (const auto& r : acceptance::run(o)) {
        std::cout << acceptance::format(r) << '\n';
        ok = ok && r.passed;
      }
      return ok ? kOk : kAcceptance;
    }

    if (config_path.empty()) throw Error(ErrorCode::ConfigError, "--config is required for " + name);
    config::Overrides ov;
    if (*seed_opt) ov.seed = seed;
    if (*out_opt) ov.output_dir = out_dir;
    if (*scale_opt) ov.scale = scale;
    const auto cfg = config::load(config_path, ov);

    auto stage = [&](const std::string& command, auto&& body) {
      Run run(cfg, command);
      body(run);
      run.write_manifest();
    };
    if (name == "solve-exact" || name == "all") stage("solve-exact", [&](Run& r) { solve_exact(r, check); });
    if (name == "pimd-ecp" || name == "all") stage("pimd-ecp", [&](Run& r) { pimd_ecp(r, resample); });
    if (name == "legendre" || name == "all") stage("legendre", legendre);
    if (name == "cmd" || name == "all") stage("cmd", cmd_run);
    if (name == "epac" || name == "all") stage("epac", epac_run);
    if (name == "spectra" || name == "all") stage("spectra", spectra_run);
    if (name == "compare" || name == "all") stage("compare", compare);
    return kOk;
  } catch (const CheckFailed& e) {
    std::cerr << "check failed: " << e.what() << '\n';
    return e.exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::ConfigError ? kConfig : kNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
}
