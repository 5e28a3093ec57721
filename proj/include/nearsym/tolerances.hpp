#pragma once

#include <array>
#include <map>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace nearsym {

/// Numerical thresholds shared by all modules. Defaults are the library's
/// contract; every field can be overridden by name (see `set`).
struct Tolerances {
  double eps_root = 1e-9;    // root residual, relative to ||p|| max(1,|r|)^deg
  double eps_inner = 1e-8;   // residue integral vs quadrature
  double eps_fac = 1e-8;     // spectral factor grid error
  double rho_gcd = 1e-8;     // common pole/zero cancellation
  double rho_real = 1e-7;    // |Im p| below this counts as a real pole
  double kappa_max = 1e8;    // Gram condition ceiling
  double delta_reg = 1e-6;   // smallest admissible sigma_min(T - z)
  double delta_pair = 1e-8;  // smallest admissible |<psi_i, psi_z>|

  static constexpr std::array<std::string_view, 8> names() {
    return {"eps_root",  "eps_inner", "eps_fac",   "rho_gcd",
            "rho_real",  "kappa_max", "delta_reg", "delta_pair"};
  }

  double* field(std::string_view name) {
    if (name == "eps_root") return &eps_root;
    if (name == "eps_inner") return &eps_inner;
    if (name == "eps_fac") return &eps_fac;
    if (name == "rho_gcd") return &rho_gcd;
    if (name == "rho_real") return &rho_real;
    if (name == "kappa_max") return &kappa_max;
    if (name == "delta_reg") return &delta_reg;
    if (name == "delta_pair") return &delta_pair;
    return nullptr;
  }

  /// Overrides one tolerance. Unknown names and non-positive values are
  /// rejected with `Errc::ConfigInvalid`.
  void set(std::string_view name, double value) {
    double* slot = field(name);
    if (slot == nullptr) {
      throw Error(Errc::ConfigInvalid, "unknown tolerance '" + std::string(name) + "'");
    }
    if (!(value > 0.0)) {
      throw Error(Errc::ConfigInvalid, "tolerance '" + std::string(name) + "' must be positive");
    }
    *slot = value;
  }

  std::map<std::string, double> as_map() const {
    std::map<std::string, double> out;
    auto self = *this;
    for (auto n : names()) out.emplace(std::string(n), *self.field(n));
    return out;
  }
};

}  // namespace nearsym
