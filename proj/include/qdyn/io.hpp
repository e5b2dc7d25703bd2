#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"
#include "qdyn/effpot.hpp"
#include "qdyn/pimd.hpp"
#include "qdyn/series.hpp"
#include "qdyn/spectra.hpp"

namespace qdyn::io {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

/// Shortest text that reads back to the same double ("inf", "nan" allowed).
std::string format_double(double x);

/// Every CSV has a JSON sidecar at `<path>.json` describing its contents.
fs::path sidecar_path(const fs::path& csv);

void write_json(const fs::path& path, const json& j);
json read_json(const fs::path& path);

/// Columns q_c, force, stderr, n_samples; the sidecar carries beta, P and seed.
void write_force_table(const fs::path& path, const pimd::ForceTable& table, const json& extra = json::object());
/// Round-trips write_force_table bitwise. Throws ConfigError on malformed input.
pimd::ForceTable read_force_table(const fs::path& path);

/// Columns q, V (and stderr when present).
void write_curve(const fs::path& path, const effpot::EffectivePotentialCurve& curve, const json& extra = json::object());
/// Columns t, re, im (and stderr when present).
void write_correlation(const fs::path& path, const CorrelationSeries& series, const json& extra = json::object());
CorrelationSeries read_correlation(const fs::path& path);
/// Columns omega, re, im.
void write_spectrum(const fs::path& path, const spectra::SpectrumEstimate& spec, const json& extra = json::object());
/// Columns omega, weight.
void write_lines(const fs::path& path, const SpectralLines& lines, const json& extra = json::object());

/// Lowercase hex SHA-256.
std::string sha256_hex(std::string_view data);
std::string sha256_file(const fs::path& path);

}  // namespace qdyn::io
