#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pel::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  /// Measured values behind the verdict. Free of timing so reruns compare equal.
  std::string detail;
  double seconds = 0;
};

struct Options {
  std::uint64_t seed = 20061;
  std::size_t workers = 1;
};

/// Criteria 1-10 in order.
std::vector<CriterionResult> run_core(const Options& options);

/// Criteria 1-11; criterion 11 reruns the core set and compares reports byte for byte.
std::vector<CriterionResult> run_all(const Options& options);

/// One "PASS|FAIL <id> <name>: <detail>" line per criterion, without timings.
std::string format_report(const std::vector<CriterionResult>& results);

bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace pel::acceptance
