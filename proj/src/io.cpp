#include "qdyn/io.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <limits>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "qdyn/error.hpp"

namespace qdyn::io {

namespace {

[[noreturn]] void fail(const fs::path& path, const std::string& what) {
  throw Error(ErrorCode::ConfigError, path.string() + ": " + what);
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open for writing");
  return out;
}

// Header plus rows of numbers; every row must have the header's width.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const fs::path& path, std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    fail(path, "missing column '" + std::string(name) + "'");
  }
};

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

Table read_table(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open for reading");
  Table t;
  std::string line;
  if (!std::getline(in, line)) fail(path, "empty file");
  t.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) fail(path, "line " + std::to_string(lineno) + " has the wrong number of fields");
    std::vector<double> row;
    for (const auto& c : cells) {
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(c.c_str(), &end);
      if (end == c.c_str() || *end != '\0') fail(path, "line " + std::to_string(lineno) + ": bad number '" + c + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_rows(std::ofstream& out, std::string_view header, std::size_t n,
                const std::vector<const std::vector<double>*>& cols) {
  out << header << '\n';
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << format_double((*cols[c])[i]);
    out << '\n';
  }
}

json sidecar(std::string_view kind, const json& extra) {
  json j;
  j["kind"] = kind;
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  return j;
}

// JSON has no inf; zero-temperature series store beta as null.
json beta_json(double beta) { return std::isfinite(beta) ? json(beta) : json(nullptr); }

}  // namespace

std::string format_double(double x) { return fmt::format("{}", x); }

fs::path sidecar_path(const fs::path& csv) { return fs::path(csv.string() + ".json"); }

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open for reading");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    fail(path, e.what());
  }
}

void write_force_table(const fs::path& path, const pimd::ForceTable& table, const json& extra) {
  table.validate();
  std::vector<double> n(table.n_samples.begin(), table.n_samples.end());
  {
    auto out = open_out(path);
    write_rows(out, "q_c,force,stderr,n_samples", table.size(), {&table.q_c, &table.force, &table.stderr_, &n});
  }
  json j = sidecar("force_table", extra);
  j["beta"] = table.beta;
  j["P"] = table.P;
  j["seed"] = table.seed;
  write_json(sidecar_path(path), j);
}

pimd::ForceTable read_force_table(const fs::path& path) {
  const auto t = read_table(path);
  const auto meta = read_json(sidecar_path(path));
  pimd::ForceTable table;
  try {
    table.beta = meta.at("beta").get<double>();
    table.P = meta.at("P").get<int>();
    table.seed = meta.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    fail(sidecar_path(path), e.what());
  }
  const auto iq = t.column(path, "q_c"), iF = t.column(path, "force"), is = t.column(path, "stderr"),
             in = t.column(path, "n_samples");
  for (const auto& r : t.rows) {
    table.q_c.push_back(r[iq]);
    table.force.push_back(r[iF]);
    table.stderr_.push_back(r[is]);
    table.n_samples.push_back(static_cast<std::size_t>(r[in]));
  }
  try {
    table.validate();
  } catch (const Error& e) {
    fail(path, e.what());
  }
  return table;
}

void write_curve(const fs::path& path, const effpot::EffectivePotentialCurve& curve, const json& extra) {
  {
    auto out = open_out(path);
    if (curve.stderr_.empty())
      write_rows(out, "q,V", curve.grid.size(), {&curve.grid, &curve.values});
    else
      write_rows(out, "q,V,stderr", curve.grid.size(), {&curve.grid, &curve.values, &curve.stderr_});
  }
  json j = sidecar("effective_potential", extra);
  j["curve"] = effpot::to_string(curve.kind);
  j["beta"] = curve.beta;
  j["anchor"] = curve.anchor;
  write_json(sidecar_path(path), j);
}

void write_correlation(const fs::path& path, const CorrelationSeries& series, const json& extra) {
  std::vector<double> re, im;
  for (const auto& v : series.values) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  {
    auto out = open_out(path);
    if (series.stderr_.empty())
      write_rows(out, "t,re,im", series.size(), {&series.times, &re, &im});
    else
      write_rows(out, "t,re,im,stderr", series.size(), {&series.times, &re, &im, &series.stderr_});
  }
  json j = sidecar("correlation", extra);
  j["series"] = to_string(series.kind);
  j["beta"] = beta_json(series.beta);
  write_json(sidecar_path(path), j);
}

CorrelationSeries read_correlation(const fs::path& path) {
  const auto t = read_table(path);
  const auto meta = read_json(sidecar_path(path));
  CorrelationSeries s;
  try {
    s.kind = series_kind_from_string(meta.at("series").get<std::string>());
    const auto& b = meta.at("beta");
    s.beta = b.is_null() ? std::numeric_limits<double>::infinity() : b.get<double>();
  } catch (const json::exception& e) {
    fail(sidecar_path(path), e.what());
  } catch (const Error& e) {
    fail(sidecar_path(path), e.what());
  }
  const auto it = t.column(path, "t"), ir = t.column(path, "re"), ii = t.column(path, "im");
  const bool has_err = std::find(t.header.begin(), t.header.end(), "stderr") != t.header.end();
  for (const auto& r : t.rows) {
    s.times.push_back(r[it]);
    s.values.emplace_back(r[ir], r[ii]);
    if (has_err) s.stderr_.push_back(r[t.column(path, "stderr")]);
  }
  return s;
}

void write_spectrum(const fs::path& path, const spectra::SpectrumEstimate& spec, const json& extra) {
  std::vector<double> re, im;
  for (const auto& v : spec.values) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  {
    auto out = open_out(path);
    write_rows(out, "omega,re,im", spec.omega.size(), {&spec.omega, &re, &im});
  }
  json j = sidecar("spectrum", extra);
  j["source"] = to_string(spec.source);
  j["window"] = spectra::to_string(spec.window);
  j["dt"] = spec.dt;
  j["t_max"] = spec.t_max;
  j["transform_length"] = spec.n;
  j["beta"] = beta_json(spec.beta);
  write_json(sidecar_path(path), j);
}

void write_lines(const fs::path& path, const SpectralLines& lines, const json& extra) {
  std::vector<double> w, a;
  for (const auto& l : lines.lines) {
    w.push_back(l.omega);
    a.push_back(l.weight);
  }
  {
    auto out = open_out(path);
    write_rows(out, "omega,weight", w.size(), {&w, &a});
  }
  json j = sidecar("lines", extra);
  j["lines"] = to_string(lines.kind);
  j["beta"] = beta_json(lines.beta);
  write_json(sidecar_path(path), j);
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::InvalidArgument, "SHA-256 failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return sha256_hex(ss.str());
}

}  // namespace qdyn::io
