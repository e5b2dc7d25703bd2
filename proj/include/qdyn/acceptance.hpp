#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace qdyn::acceptance {

struct Options {
  bool paper_scale = false;
  std::uint64_t seed = 20240601;
  unsigned threads = 0;
  std::vector<int> only;              // empty: all criteria
  std::filesystem::path cache_dir;    // force tables are reused from here when set
  std::ostream* log = nullptr;        // progress notes
};

struct CriterionResult {
  int id = 0;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;  // including the shared sampling it triggered
};

constexpr int kCriteria = 11;

/// Runs the selected checks in order; a check that throws is reported as a
/// failure carrying the error text.
std::vector<CriterionResult> run(const Options& opts);

/// "criterion N: PASS  detail  (T s)"
std::string format(const CriterionResult& r);

}  // namespace qdyn::acceptance
