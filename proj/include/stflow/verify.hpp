#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace stflow::verify {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct Options {
  /// Run only checks whose name or group equals this.
  std::optional<std::string> only;
  /// Exponent for the power-law norm study; unset runs the standard set.
  std::optional<double> beta;
};

struct Check {
  std::string name;
  std::string group;
  std::function<CheckResult(const Options&)> run;
};

/// Every invariant check, in a fixed order.
const std::vector<Check>& registry();

/// Runs the selected checks; exceptions inside a check turn into failures.
/// Throws InvalidArgument when `only` matches nothing.
std::vector<CheckResult> run(const Options& options);

/// "PASS name: detail" / "FAIL name: detail".
std::string format(const CheckResult& r);

}  // namespace stflow::verify
