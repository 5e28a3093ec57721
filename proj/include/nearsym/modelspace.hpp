#pragma once

// K_theta = H^2 minus theta H^2 for a finite Blaschke product theta, as a
// reproducing kernel Hilbert space with kernel-node bases and Clark families.

#include <algorithm>
#include <limits>
#include <vector>

#include "inner.hpp"
#include "random.hpp"

namespace nearsym {

struct KernelVector {
  cplx w;
  RationalFn fn;
};

/// k_w(z) = (i/2pi)(1 - conj(theta(w)) theta(z))/(z - conj w). With
/// theta = cN/D the numerator D - conj(theta(w)) c N vanishes at conj(w),
/// so the factor (z - conj w) is divided out exactly and k_w = Q/D with
/// deg Q < deg theta. This also covers real w and w at a zero of theta.
inline KernelVector kernel(const InnerFn& theta, cplx w) {
  if (theta.flavor() != Flavor::halfplane) throw Error(Errc::DomainViolation, "kernel needs a half-plane function");
  if (w.imag() < 0.0) throw Error(Errc::DomainViolation, "kernel point below the real axis");
  const cplx tw = theta(w);
  const Poly top = theta.pole_poly() - std::conj(tw) * theta.constant() * theta.zero_poly();
  const Poly q = top.divide_root(std::conj(w));
  return {w, RationalFn((kI / (2.0 * kPi)) * q, theta.conj_zeros())};
}

/// k_x(x) on the real line: phase derivative over 2 pi.
inline double kernel_diagonal(const InnerFn& theta, double x) { return theta.phase_derivative(x) / (2.0 * kPi); }

/// k_w(z) without building the rational function.
inline cplx kernel_value(const InnerFn& theta, cplx w, cplx z) {
  if (std::abs(z - std::conj(w)) < 1e-14 * std::max(1.0, std::abs(z))) {
    if (std::abs(w.imag()) < 1e-14) return kernel_diagonal(theta, w.real());
    return kernel(theta, w).fn(z);
  }
  return (kI / (2.0 * kPi)) * (1.0 - std::conj(theta(w)) * theta(z)) / (z - std::conj(w));
}

inline double condition_number(const CMatrix& hermitian) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
  return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

class ModelSpace {
 public:
  /// Default nodes w_j = i(1 + j/2); re-drawn in [-2,2]x[0.5,3] while the
  /// Gram condition number exceeds kappa_max.
  explicit ModelSpace(InnerFn theta, const Tolerances& tol = {}) : theta_(std::move(theta)) {
    const int n = theta_.degree();
    if (n < 1) throw Error(Errc::DomainViolation, "model space of a constant inner function is trivial");
    std::vector<cplx> nodes;
    for (int j = 0; j < n; ++j) nodes.emplace_back(0.0, 1.0 + 0.5 * j);
    Rng rng(0x6b65726e656cULL + static_cast<std::uint64_t>(n));
    for (int attempt = 0;; ++attempt) {
      set_nodes(nodes);
      if (kappa_ <= tol.kappa_max) break;
      if (attempt == 200) throw Error(Errc::IllConditioned, "no well-conditioned kernel basis found");
      for (auto& w : nodes) w = rng.in_box(-2, 2, 0.5, 3);
    }
  }

  ModelSpace(InnerFn theta, std::vector<cplx> nodes, const Tolerances& tol = {}) : theta_(std::move(theta)) {
    if (static_cast<int>(nodes.size()) != theta_.degree())
      throw Error(Errc::DomainViolation, "node count must equal the degree");
    set_nodes(std::move(nodes));
    if (kappa_ > tol.kappa_max) throw Error(Errc::IllConditioned, "kernel Gram condition exceeds kappa_max");
  }

  const InnerFn& theta() const { return theta_; }
  const std::vector<cplx>& nodes() const { return nodes_; }
  const std::vector<RationalFn>& basis() const { return basis_; }
  const CMatrix& gram() const { return gram_; }
  double gram_condition() const { return kappa_; }
  int dim() const { return theta_.degree(); }

  /// sum_k c_k k_{w_k}
  RationalFn element(const CVector& c) const { return linear_combination(basis_, c); }

 private:
  void set_nodes(std::vector<cplx> nodes) {
    nodes_ = std::move(nodes);
    const int n = static_cast<int>(nodes_.size());
    basis_.clear();
    for (cplx w : nodes_) basis_.push_back(kernel(theta_, w).fn);
    gram_.resize(n, n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) gram_(j, k) = kernel_value(theta_, nodes_[k], nodes_[j]);
    gram_ = (0.5 * (gram_ + gram_.adjoint())).eval();
    kappa_ = condition_number(gram_);
  }

  InnerFn theta_;
  std::vector<cplx> nodes_;
  std::vector<RationalFn> basis_;
  CMatrix gram_;
  double kappa_ = 0.0;
};

struct Projection {
  CVector coeffs;       // in the kernel basis
  double residual_norm2;  // ||f||^2 - c^H G c
};

inline Projection project(const ModelSpace& space, const RationalFn& f, const Tolerances& tol = {}) {
  if (space.gram_condition() > tol.kappa_max) throw Error(Errc::IllConditioned, "kernel Gram condition exceeds kappa_max");
  const int n = space.dim();
  CVector b(n);
  for (int j = 0; j < n; ++j) b(j) = l2_inner(f, space.basis()[j], tol);
  CVector c = space.gram().ldlt().solve(b);
  const double ff = l2_inner(f, f, tol).real();
  const double pp = (c.adjoint() * space.gram() * c)(0, 0).real();
  return {c, ff - pp};
}

/// Real solutions of theta(x) = alpha, ascending: real roots of
/// c N(x) - alpha D(x).
inline std::vector<double> clark_nodes(const InnerFn& theta, cplx alpha, const Tolerances& tol = {}) {
  if (std::abs(std::abs(alpha) - 1.0) > 1e-10) throw Error(Errc::DomainViolation, "alpha must be unimodular");
  if (std::abs(alpha - theta.at_infinity()) < 1e-8)
    throw Error(Errc::AlphaAtInfinity, "alpha equals theta at infinity");
  const Poly p = theta.constant() * theta.zero_poly() - alpha * theta.pole_poly();
  std::vector<double> xs;
  for (cplx r : poly_roots(p, tol)) {
    if (std::abs(r.imag()) > tol.rho_real) throw Error(Errc::NonConvergence, "Clark root off the real axis");
    xs.push_back(r.real());
  }
  std::sort(xs.begin(), xs.end());
  for (double x : xs) {
    if (std::abs(theta(x) - alpha) > 1e-8) throw Error(Errc::NonConvergence, "Clark node misses theta(x) = alpha");
  }
  return xs;
}

/// Orthonormal Takenaka-Malmquist basis of K_theta (half-plane flavor):
/// e_k = sqrt(Im l_k / pi) / (z - conj l_k) * prod_{j<k} (z - l_j)/(z - conj l_j).
inline std::vector<RationalFn> takenaka_basis(const InnerFn& theta) {
  if (theta.flavor() != Flavor::halfplane) throw Error(Errc::DomainViolation, "takenaka_basis needs a half-plane function");
  std::vector<RationalFn> out;
  std::vector<cplx> head, poles;
  for (cplx l : theta.zeros()) {
    poles.push_back(std::conj(l));
    out.emplace_back(std::sqrt(l.imag() / kPi) * Poly::from_roots(head), poles);
    head.push_back(l);
  }
  return out;
}

struct ClarkFamily {
  std::vector<double> nodes;
  std::vector<double> weights;        // 1/||k_x||^2 = 2 pi / phi'(x)
  std::vector<KernelVector> vectors;  // normalized kernels
};

inline ClarkFamily clark_family(const ModelSpace& space, cplx alpha, const Tolerances& tol = {}) {
  ClarkFamily fam;
  fam.nodes = clark_nodes(space.theta(), alpha, tol);
  for (double x : fam.nodes) {
    const double d = kernel_diagonal(space.theta(), x);
    KernelVector k = kernel(space.theta(), cplx(x, 0.0));
    k.fn = (1.0 / std::sqrt(d)) * k.fn;
    fam.weights.push_back(1.0 / d);
    fam.vectors.push_back(std::move(k));
  }
  return fam;
}

}  // namespace nearsym
