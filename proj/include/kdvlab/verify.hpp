#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kdvlab {

// One acceptance criterion: a named bundle of checks with pinned tolerances.
struct CriterionResult {
  std::string name;
  bool slow = false;
  bool passed = true;
  double seconds = 0.0;
  std::vector<std::string> details;
};

struct VerifySummary {
  std::vector<CriterionResult> criteria;
  bool all_passed = true;
  double total_seconds = 0.0;
};

std::vector<std::string> verification_names();

// Runs the acceptance criteria whose names contain any of the filter
// substrings (all of them when filters is empty). Expensive trajectories are
// shared between criteria within one call. Throws ConfigError when filters
// select nothing. Progress lines go to *progress when given.
VerifySummary run_verification(const std::vector<std::string>& filters = {},
                               std::ostream* progress = nullptr);

void print_table(const VerifySummary& summary, std::ostream& out);

}  // namespace kdvlab
