#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fbtrack {

struct AcceptanceOptions {
  std::uint64_t seed = 20100601;
  int threads = 0;
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 12;

/// Runs acceptance criterion `id` (1..12). Numeric exceptions propagate.
CriterionResult run_criterion(int id, const AcceptanceOptions& opts = {});

/// One line: "PASS|FAIL  C<id> <name>: <detail> [<seconds> s]".
std::string format_result(const CriterionResult& r);

}  // namespace fbtrack
