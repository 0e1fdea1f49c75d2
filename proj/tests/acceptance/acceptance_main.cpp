// Acceptance suite: one PASS/FAIL line per criterion; exit status 1 if any fails.
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <string>
#include <vector>

#include "fbtrack/acceptance.hpp"

int main(int argc, char** argv) {
  std::vector<int> ids;
  fbtrack::AcceptanceOptions opts;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      ids.push_back(std::atoi(argv[++i]));
    } else if (a == "--seed" && i + 1 < argc) {
      opts.seed = std::strtoull(argv[++i], nullptr, 10);
    } else if (a == "--threads" && i + 1 < argc) {
      opts.threads = std::atoi(argv[++i]);
    } else {
      std::cerr << "usage: fbtrack_acceptance [--criterion N]... [--seed S] [--threads T]\n";
      return 2;
    }
  }
  if (ids.empty())
    for (int i = 1; i <= fbtrack::kCriterionCount; ++i) ids.push_back(i);

  bool ok = true;
  for (int id : ids) {
    try {
      const auto r = fbtrack::run_criterion(id, opts);
      std::cout << fbtrack::format_result(r) << std::endl;
      ok = ok && r.passed;
    } catch (const std::exception& e) {
      std::cout << "FAIL C" << (id < 10 ? "0" : "") << id << " raised: " << e.what() << std::endl;
      ok = false;
    }
  }
  return ok ? 0 : 1;
}
