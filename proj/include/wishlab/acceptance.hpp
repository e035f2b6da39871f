#ifndef WISHLAB_ACCEPTANCE_HPP
#define WISHLAB_ACCEPTANCE_HPP

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

namespace wishlab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string summary;
  std::vector<std::string> details;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  /// Criteria to report, empty for 1..10. Selecting 6 also runs 1..5 silently.
  std::vector<int> only;
  int threads = 0;
  std::uint64_t seed = 20240611;
};

/// "[PASS] 3 contraction: ..." followed by indented detail lines.
std::string format_result(const CriterionResult& r);

/// Runs the acceptance criteria and prints one PASS/FAIL line per reported
/// criterion as it finishes, each followed by indented detail lines.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream& out);

}  // namespace wishlab

#endif  // WISHLAB_ACCEPTANCE_HPP
