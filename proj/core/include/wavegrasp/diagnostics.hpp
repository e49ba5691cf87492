#ifndef WAVEGRASP_DIAGNOSTICS_HPP_
#define WAVEGRASP_DIAGNOSTICS_HPP_

#include <iosfwd>
#include <string>
#include <vector>

namespace wavegrasp::diagnostics {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Options {
  // Test hook: perturbs analytic gradients so the gradient check must fail.
  bool inject_gradient_fault = false;
};

// Fast self-checks: MLP gradients vs finite differences, reward point values,
// wave periodicity, environment determinism, checkpoint round-trip.
std::vector<CheckResult> run_all(const Options& opts = {});

// One line per check: "PASS <name> <detail>" or "FAIL <name> <detail>".
void print(const std::vector<CheckResult>& results, std::ostream& out);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace wavegrasp::diagnostics

#endif  // WAVEGRASP_DIAGNOSTICS_HPP_
