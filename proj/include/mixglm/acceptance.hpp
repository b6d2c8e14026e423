#ifndef MIXGLM_ACCEPTANCE_HPP
#define MIXGLM_ACCEPTANCE_HPP

#include <map>
#include <string>
#include <vector>

namespace mixglm {

struct CriterionResult {
  int index = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // worst deviation or failure reason
  double seconds = 0.0;
};

struct AcceptanceOptions {
  // Override a criterion's main tolerance by index (testing hook).
  std::map<int, double> tolerance_override;
  // Restrict to these criteria; empty means all.
  std::vector<int> only;
  int max_threads = 0;
};

// Runs the full verification suite end to end; one result per criterion.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options = {});

// Number of criteria in the suite.
int acceptance_criteria_count();
std::string acceptance_criterion_name(int index);

}  // namespace mixglm

#endif  // MIXGLM_ACCEPTANCE_HPP
