#pragma once

// Finite Blaschke products on the upper half-plane and the disk, the Cayley
// maps between the two, the unitary lift H^2(D) -> H^2(U), and the Crofoot
// transform with its isometric multiplier.

#include <cmath>
#include <vector>

#include "ratfield.hpp"

namespace nearsym {

enum class Flavor { halfplane, disk };

class InnerFn {
 public:
  /// Half-plane: constant * prod (z - l)/(z - conj l), Im l > 0.
  /// Disk: constant * prod (z - a)/(1 - conj(a) z), |a| < 1.
  InnerFn(std::vector<cplx> zeros, cplx constant = 1.0, Flavor flavor = Flavor::halfplane)
      : zeros_(std::move(zeros)), constant_(constant), flavor_(flavor) {
    if (std::abs(std::abs(constant_) - 1.0) > 1e-9) {
      throw Error(Errc::DomainViolation, "inner function constant must be unimodular");
    }
    constant_ /= std::abs(constant_);
    for (cplx z : zeros_) {
      const bool ok = flavor_ == Flavor::halfplane ? z.imag() > 0.0 : std::abs(z) < 1.0;
      if (!ok) throw Error(Errc::DomainViolation, "Blaschke zero outside the open domain");
    }
  }

  const std::vector<cplx>& zeros() const { return zeros_; }
  cplx constant() const { return constant_; }
  Flavor flavor() const { return flavor_; }
  int degree() const { return static_cast<int>(zeros_.size()); }

  /// Boundary value at infinity (half-plane flavor).
  cplx at_infinity() const { return constant_; }

  cplx operator()(cplx z) const {
    cplx v = constant_;
    for (cplx l : zeros_) {
      const cplx den = flavor_ == Flavor::halfplane ? z - std::conj(l) : 1.0 - std::conj(l) * z;
      if (den == cplx{}) throw Error(Errc::PoleEvaluation, "evaluation at a pole of the inner function");
      v *= (z - l) / den;
    }
    return v;
  }

  /// prod (z - l)
  Poly zero_poly() const { return Poly::from_roots(zeros_); }
  /// prod (z - conj l): the denominator in the half-plane flavor.
  Poly pole_poly() const { return Poly::from_roots(conj_zeros()); }
  std::vector<cplx> conj_zeros() const {
    std::vector<cplx> out;
    for (cplx l : zeros_) out.push_back(std::conj(l));
    return out;
  }

  RationalFn as_rational() const {
    if (flavor_ == Flavor::halfplane) return RationalFn(constant_ * zero_poly(), conj_zeros());
    std::vector<cplx> poles;
    cplx c = constant_;
    for (cplx a : zeros_) {
      if (a == cplx{}) continue;
      poles.push_back(1.0 / std::conj(a));
      c *= -1.0 / std::conj(a);
    }
    return RationalFn(c * zero_poly(), std::move(poles));
  }

  /// d/dx arg theta(x) on the real line (half-plane flavor).
  double phase_derivative(double x) const {
    double s = 0.0;
    for (cplx l : zeros_) s += 2.0 * l.imag() / std::norm(cplx(x, 0.0) - l);
    return s;
  }

 private:
  std::vector<cplx> zeros_;
  cplx constant_;
  Flavor flavor_;
};

inline cplx eval_inner(const InnerFn& theta, cplx z) { return theta(z); }

/// mu(z) = (z - i)/(z + i)
inline cplx mobius(cplx z) {
  if (z == -kI) throw Error(Errc::DomainViolation, "mobius is undefined at -i");
  return (z - kI) / (z + kI);
}

/// mu^{-1}(w) = i(1 + w)/(1 - w)
inline cplx mobius_inv(cplx w) {
  if (w == cplx(1.0, 0.0)) throw Error(Errc::DomainViolation, "mobius_inv is undefined at 1");
  return kI * (1.0 + w) / (1.0 - w);
}

/// Normalized circle inner product (1/N) sum f(e^{it}) conj g(e^{it}) on the
/// N-node trapezoid rule.
template <class F, class G>
cplx disk_inner(F&& f, G&& g, int nodes = 512) {
  cplx s{};
  for (int k = 0; k < nodes; ++k) {
    const cplx w = std::polar(1.0, 2.0 * kPi * k / nodes);
    s += f(w) * std::conj(g(w));
  }
  return s / static_cast<double>(nodes);
}

/// The unitary (U f)(z) = (1 - mu(z)) / (2 sqrt(pi)) * f(mu(z)) from H^2 of
/// the disk (normalized arc measure) onto H^2 of the upper half-plane.
/// f is a rational function of the disk variable with poles off the closed
/// disk; the result is returned in closed rational form.
inline RationalFn cayley_lift(const RationalFn& f) {
  for (cplx q : f.poles()) {
    if (std::abs(q) <= 1.0 + 1e-12) throw Error(Errc::NotH2Disk, "pole in the closed unit disk");
  }
  if (f.is_zero()) return {};
  const int p = f.num_degree();
  const int m = f.den_degree();
  const int d = std::max(p, m);
  // P(mu(z)) (z+i)^d = sum_k p_k (z-i)^k (z+i)^(d-k)
  Poly tilde;
  const Poly zm = Poly::linear_factor(kI), zp = Poly::linear_factor(-kI);
  for (int k = 0; k <= p; ++k) {
    Poly term = Poly::constant(f.num().coeff(k));
    for (int j = 0; j < k; ++j) term = term * zm;
    for (int j = 0; j < d - k; ++j) term = term * zp;
    tilde = tilde + term;
  }
  cplx scale = kI / std::sqrt(kPi);
  std::vector<cplx> poles(static_cast<std::size_t>(1 + d - m), -kI);
  for (cplx q : f.poles()) {
    scale /= (1.0 - q);
    poles.push_back(mobius_inv(q));
  }
  return RationalFn(scale * tilde, std::move(poles));
}

/// theta' = (theta(i) - theta)/(1 - conj(theta(i)) theta). Zeros are the
/// roots of a D - c N; the constant is fixed from a real sample point.
inline InnerFn crofoot(const InnerFn& theta, const Tolerances& tol = {}) {
  if (theta.flavor() != Flavor::halfplane) throw Error(Errc::DomainViolation, "crofoot needs a half-plane function");
  const cplx a = theta(kI);
  if (std::abs(a) >= 1.0 - 1e-12) throw Error(Errc::NotStrictlyContractiveAtI, "|theta(i)| is not below 1");
  if (theta.degree() == 0) return InnerFn({}, (a - theta.constant()) / (1.0 - std::conj(a) * theta.constant()));
  const Poly top = a * theta.pole_poly() - theta.constant() * theta.zero_poly();
  std::vector<cplx> zeros = poly_roots(top, tol);
  for (cplx& z : zeros) {
    // zeros of an inner function lie in the open upper half-plane
    if (z.imag() <= 0.0) throw Error(Errc::NonConvergence, "Crofoot zero left the upper half-plane");
  }
  const double x0 = 0.37;
  const cplx target = (a - theta(x0)) / (1.0 - std::conj(a) * theta(x0));
  const InnerFn bare(zeros, 1.0);
  return InnerFn(zeros, target / bare(x0));
}

/// Multiplier w with w K_{theta'} = K_theta isometrically:
/// w = (1 - conj(a) theta)/sqrt(1 - |a|^2), a = theta(i).
inline RationalFn crofoot_multiplier(const InnerFn& theta, const Tolerances& tol = {}) {
  const cplx a = theta(kI);
  if (std::abs(a) >= 1.0 - 1e-12) throw Error(Errc::NotStrictlyContractiveAtI, "|theta(i)| is not below 1");
  const double s = std::sqrt(1.0 - std::norm(a));
  const Poly num = theta.pole_poly() - std::conj(a) * theta.constant() * theta.zero_poly();
  return RationalFn((1.0 / s) * num, theta.conj_zeros()).cancelled(tol.rho_gcd);
}

}  // namespace nearsym
