#pragma once

// Seeded instance generators shared by the tests, the acceptance binary and
// the lab runner.

#include <vector>

#include "inner.hpp"
#include "random.hpp"

namespace nearsym {

struct ZeroBox {
  double re_lo = -2.0, re_hi = 2.0, im_lo = 0.3, im_hi = 2.5;
  double min_separation = 0.1;
};

/// Points in the box, pairwise at least min_separation apart and away from
/// every point in `avoid`.
inline std::vector<cplx> separated_points(Rng& rng, int count, const ZeroBox& box = {},
                                          const std::vector<cplx>& avoid = {}) {
  std::vector<cplx> pts;
  while (static_cast<int>(pts.size()) < count) {
    const cplx z = rng.in_box(box.re_lo, box.re_hi, box.im_lo, box.im_hi);
    bool ok = true;
    for (cplx p : pts) ok = ok && std::abs(p - z) >= box.min_separation;
    for (cplx p : avoid) ok = ok && std::abs(p - z) >= box.min_separation;
    if (ok) pts.push_back(z);
  }
  return pts;
}

inline cplx random_unimodular(Rng& rng) { return std::polar(1.0, rng.uniform(-kPi, kPi)); }

/// Half-plane Blaschke product of the given degree with a random constant.
inline InnerFn random_inner(Rng& rng, int degree, const ZeroBox& box = {}) {
  return InnerFn(separated_points(rng, degree, box), random_unimodular(rng));
}

/// Degree-n Blaschke product with one zero at i, so theta(i) = 0.
inline InnerFn random_inner_vanishing_at_i(Rng& rng, int degree, const ZeroBox& box = {}) {
  std::vector<cplx> zeros{kI};
  const auto rest = separated_points(rng, degree - 1, box, zeros);
  zeros.insert(zeros.end(), rest.begin(), rest.end());
  return InnerFn(zeros, random_unimodular(rng));
}

/// Random coefficient vector with standard complex normal entries.
inline CVector random_coeffs(Rng& rng, int n) {
  CVector c(n);
  for (int k = 0; k < n; ++k) c(k) = rng.complex_normal();
  return c;
}

}  // namespace nearsym
