#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace nearsym {

/// One verified identity: residual against tolerance. `ref` names the
/// mathematical statement the check exercises.
struct Check {
  std::string name;
  std::string ref;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline Check make_check(std::string name, std::string ref, double residual, double tolerance) {
  const bool ok = std::isfinite(residual) && residual <= tolerance;
  return {std::move(name), std::move(ref), residual, tolerance, ok};
}

/// Check whose outcome is a predicate rather than a residual.
inline Check make_flag(std::string name, std::string ref, bool ok) {
  return {std::move(name), std::move(ref), ok ? 0.0 : 1.0, 0.5, ok};
}

/// Running maximum of residuals for one identity over many samples.
struct MaxResidual {
  double value = 0.0;
  void add(double r) { value = std::isfinite(r) ? std::max(value, r) : r; }
};

}  // namespace nearsym
