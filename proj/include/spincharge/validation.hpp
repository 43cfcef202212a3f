#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace spincharge {

// One measured quantity compared against a pinned tolerance.
struct SubCheck {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  std::string relation;  // "<", "<=", ">=", "in" (value within [bound, bound2])
  double bound2 = 0.0;
  bool passed = false;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<SubCheck> checks;
  std::vector<std::string> notes;
  double seconds = 0.0;
  bool passed() const;
};

struct ValidationOptions {
  // Smaller grids and shorter runs; for smoke tests only, the verdicts are not meaningful.
  bool quick = false;
  std::uint64_t seed = 1;
  std::vector<int> only;  // empty: every criterion 1..9
  std::function<void(const CriterionResult&)> on_result;
};

// Runs the acceptance criteria in order. Criterion 9 audits the snapshots recorded by the
// runs of the criteria before it.
std::vector<CriterionResult> run_validation(const ValidationOptions& opts);

// "[PASS] criterion 3: ..." plus one indented line per sub-check.
std::string format_result(const CriterionResult& r);

}  // namespace spincharge
