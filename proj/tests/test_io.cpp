#include "doctest.h"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "qdyn/error.hpp"
#include "qdyn/io.hpp"

using namespace qdyn;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "qdyn_test_io";
  fs::create_directories(dir);
  return dir / name;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("numbers survive the text round trip bitwise") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> ex(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::ldexp(mant(rng), ex(rng));
    CHECK(same_bits(std::strtod(io::format_double(x).c_str(), nullptr), x));
  }
  for (double x : {0.0, -0.0, 0.1, 1e-310, std::numeric_limits<double>::max(), std::numeric_limits<double>::infinity()})
    CHECK(same_bits(std::strtod(io::format_double(x).c_str(), nullptr), x));
  CHECK(std::isnan(std::strtod(io::format_double(std::nan("")).c_str(), nullptr)));
}

TEST_CASE("force table round trip") {
  pimd::ForceTable t;
  t.beta = 10.0;
  t.P = 64;
  t.seed = 0xFFFFFFFFFFFFFFF1ULL;
  t.q_c = {-1.0, 1.0 / 3.0, 2.5};
  t.force = {0.123456789012345678, -1e-17, 3.0};
  t.stderr_ = {1e-3, 2.0 / 7.0, 1e-12};
  t.n_samples = {100000, 100000, 99999};
  const auto p = scratch("table.csv");
  io::write_force_table(p, t, {{"note", "x"}});
  const auto r = io::read_force_table(p);
  CHECK(r.beta == t.beta);
  CHECK(r.P == t.P);
  CHECK(r.seed == t.seed);
  CHECK(r.q_c == t.q_c);
  CHECK(r.force == t.force);
  CHECK(r.stderr_ == t.stderr_);
  CHECK(r.n_samples == t.n_samples);
  CHECK(io::read_json(io::sidecar_path(p))["note"] == "x");
}

TEST_CASE("correlation round trip keeps kind, infinite beta and errors") {
  CorrelationSeries s;
  s.kind = SeriesKind::EpacZeroTemperature;
  s.beta = std::numeric_limits<double>::infinity();
  s.times = {0.0, 0.05, 0.1};
  s.values = {{1.0, 0.0}, {0.9, -0.1}, {0.7, -1.0 / 3.0}};
  const auto p = scratch("corr.csv");
  io::write_correlation(p, s);
  auto r = io::read_correlation(p);
  CHECK(r.kind == s.kind);
  CHECK(std::isinf(r.beta));
  CHECK(r.times == s.times);
  CHECK(r.values == s.values);
  CHECK(r.stderr_.empty());

  s.kind = SeriesKind::Centroid;
  s.beta = 1.0;
  s.stderr_ = {1e-3, 2e-3, 3e-3};
  io::write_correlation(p, s);
  r = io::read_correlation(p);
  CHECK(r.stderr_ == s.stderr_);
}

TEST_CASE("malformed inputs are configuration errors") {
  const auto p = scratch("bad.csv");
  std::ofstream(p) << "q_c,force,stderr,n_samples\n0,1,abc,10\n";
  io::write_json(io::sidecar_path(p), {{"beta", 1.0}, {"P", 8}, {"seed", 1}});
  try {
    io::read_force_table(p);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
    CHECK(std::string(e.what()).find("abc") != std::string::npos);
  }
  std::ofstream(p) << "q_c,force,stderr\n0,1,1\n";
  CHECK_THROWS_AS(io::read_force_table(p), Error);
  CHECK_THROWS_AS(io::read_force_table(scratch("missing.csv")), Error);
}

TEST_CASE("SHA-256 digests") {
  CHECK(io::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(io::sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const auto p = scratch("digest.txt");
  std::ofstream(p, std::ios::binary) << "abc";
  CHECK(io::sha256_file(p) == io::sha256_hex("abc"));
}
