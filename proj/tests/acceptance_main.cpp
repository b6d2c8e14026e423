// Acceptance suite runner: one line per criterion, non-zero exit on failure.

#include <cstdio>
#include <cstring>
#include <string>

#include "mixglm/acceptance.hpp"

int main(int argc, char** argv) {
  mixglm::AcceptanceOptions options;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--list") == 0) {
      for (int k = 1; k <= mixglm::acceptance_criteria_count(); ++k)
        std::printf("%d: %s\n", k, mixglm::acceptance_criterion_name(k).c_str());
      return 0;
    }
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      options.only.push_back(std::atoi(argv[++i]));
    }
  }

  const std::vector<mixglm::CriterionResult> results = mixglm::run_acceptance(options);
  bool all_passed = true;
  for (const mixglm::CriterionResult& r : results) {
    std::printf("[%s] criterion %d: %s (%.1fs) - %s\n", r.passed ? "PASS" : "FAIL",
                r.index, r.name.c_str(), r.seconds, r.detail.c_str());
    std::fflush(stdout);
    all_passed = all_passed && r.passed;
  }
  std::printf("%s\n", all_passed ? "all criteria passed" : "FAILURES present");
  return all_passed ? 0 : 1;
}
