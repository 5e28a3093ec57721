#pragma once

// Complex polynomials and rational functions with residue-exact L^2(R)
// inner products, companion-matrix root finding, an independent adaptive
// quadrature oracle, and rational spectral factorization.

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "tolerances.hpp"

namespace nearsym {

using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kPi = std::numbers::pi;

/// Poles closer than this (relative) are treated as one repeated pole.
inline constexpr double kSamePole = 1e-12;

inline bool same_point(cplx a, cplx b) {
  return std::abs(a - b) <= kSamePole * std::max(1.0, std::abs(a));
}

// ---------------------------------------------------------------------------
// Poly
// ---------------------------------------------------------------------------

/// Dense polynomial, coefficients lowest degree first. The zero polynomial
/// has no coefficients and degree -1.
class Poly {
 public:
  Poly() = default;
  Poly(std::initializer_list<cplx> c) : c_(c) { trim(); }
  explicit Poly(std::vector<cplx> c) : c_(std::move(c)) { trim(); }

  static Poly constant(cplx a) { return Poly({a}); }
  static Poly linear_factor(cplx root) { return Poly({-root, 1.0}); }

  static Poly from_roots(std::span<const cplx> roots, cplx lead = 1.0) {
    std::vector<cplx> c{lead};
    for (cplx r : roots) {
      std::vector<cplx> next(c.size() + 1, cplx{});
      for (std::size_t k = 0; k < c.size(); ++k) {
        next[k + 1] += c[k];
        next[k] -= r * c[k];
      }
      c = std::move(next);
    }
    return Poly(std::move(c));
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<cplx>& coeffs() const { return c_; }
  cplx coeff(int k) const {
    return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : cplx{};
  }
  cplx leading() const { return c_.empty() ? cplx{} : c_.back(); }

  cplx operator()(cplx z) const {
    cplx acc{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  /// Sum of |a_k| |z|^k: the natural magnitude against which p(z) is small.
  double scale_at(cplx z) const {
    double r = std::abs(z), acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * r + std::abs(*it);
    return acc;
  }

  double norm() const {
    double s = 0.0;
    for (cplx a : c_) s += std::norm(a);
    return std::sqrt(s);
  }

  double max_abs_coeff() const {
    double m = 0.0;
    for (cplx a : c_) m = std::max(m, std::abs(a));
    return m;
  }

  Poly derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<cplx> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
    return Poly(std::move(d));
  }

  /// p*(z) = conj(p(conj z)).
  Poly paraconj() const {
    std::vector<cplx> d(c_.size());
    std::transform(c_.begin(), c_.end(), d.begin(), [](cplx a) { return std::conj(a); });
    return Poly(std::move(d));
  }

  /// Coefficients of t -> p(s + t).
  Poly taylor_shift(cplx s) const {
    std::vector<cplx> a = c_;
    const int n = static_cast<int>(a.size());
    for (int i = 0; i < n; ++i)
      for (int k = n - 2; k >= i; --k) a[k] += s * a[k + 1];
    return Poly(std::move(a));
  }

  /// Synthetic division by (z - r); the remainder p(r) is returned through
  /// `remainder` when requested and otherwise dropped.
  Poly deflate(cplx r, cplx* remainder = nullptr) const {
    if (c_.size() <= 1) {
      if (remainder) *remainder = leading();
      return {};
    }
    std::vector<cplx> q(c_.size() - 1);
    cplx carry = c_.back();
    for (std::size_t k = c_.size() - 1; k-- > 0;) {
      q[k] = carry;
      carry = c_[k] + r * carry;
    }
    if (remainder) *remainder = carry;
    return Poly(std::move(q));
  }

  /// Quotient by (z - r) for a known root r. Backward recurrence when
  /// |r| > 1: forward synthetic division amplifies rounding by |r|^k there.
  Poly divide_root(cplx r) const {
    if (std::abs(r) <= 1.0 || c_.size() <= 1) return deflate(r);
    std::vector<cplx> q(c_.size() - 1);
    cplx prev = 0.0;
    for (std::size_t k = 0; k < q.size(); ++k) prev = q[k] = (prev - c_[k]) / r;
    return Poly(std::move(q));
  }

  /// Drops leading coefficients below `rel` times the largest coefficient.
  Poly trimmed(double rel) const {
    std::vector<cplx> c = c_;
    const double cut = rel * max_abs_coeff();
    while (!c.empty() && std::abs(c.back()) <= cut) c.pop_back();
    return Poly(std::move(c));
  }

  Poly operator-() const {
    std::vector<cplx> d(c_.size());
    std::transform(c_.begin(), c_.end(), d.begin(), [](cplx a) { return -a; });
    return Poly(std::move(d));
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<cplx> c(std::max(a.c_.size(), b.c_.size()), cplx{});
    for (std::size_t k = 0; k < a.c_.size(); ++k) c[k] += a.c_[k];
    for (std::size_t k = 0; k < b.c_.size(); ++k) c[k] += b.c_[k];
    return Poly(std::move(c));
  }
  friend Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<cplx> c(a.c_.size() + b.c_.size() - 1, cplx{});
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Poly(std::move(c));
  }
  friend Poly operator*(cplx s, const Poly& p) {
    std::vector<cplx> c(p.c_.size());
    std::transform(p.c_.begin(), p.c_.end(), c.begin(), [s](cplx a) { return s * a; });
    return Poly(std::move(c));
  }
  friend Poly operator*(const Poly& p, cplx s) { return s * p; }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == cplx{}) c_.pop_back();
  }

  std::vector<cplx> c_;
};

// ---------------------------------------------------------------------------
// Roots
// ---------------------------------------------------------------------------

/// Roots of p (repeated according to multiplicity) from the eigenvalues of
/// the companion matrix, each refined by one Newton step when that step
/// lowers the residual.
inline std::vector<cplx> poly_roots(const Poly& p, const Tolerances& tol = {}) {
  const int n = p.degree();
  if (n < 1) throw Error(Errc::DomainViolation, "poly_roots needs degree >= 1");
  std::vector<cplx> roots;
  if (n == 1) {
    roots.push_back(-p.coeff(0) / p.coeff(1));
  } else {
    CMatrix comp = CMatrix::Zero(n, n);
    const cplx lead = p.leading();
    for (int k = 1; k < n; ++k) comp(k, k - 1) = 1.0;
    for (int k = 0; k < n; ++k) comp(k, n - 1) = -p.coeff(k) / lead;
    Eigen::ComplexEigenSolver<CMatrix> es(comp, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
      throw Error(Errc::NonConvergence, "companion eigenvalue solve failed");
    }
    const Poly dp = p.derivative();
    for (int k = 0; k < n; ++k) {
      cplx r = es.eigenvalues()(k);
      const cplx d = dp(r);
      if (std::abs(d) > 0.0) {
        const cplx r1 = r - p(r) / d;
        if (std::isfinite(r1.real()) && std::isfinite(r1.imag()) && std::abs(p(r1)) < std::abs(p(r)))
          r = r1;
      }
      roots.push_back(r);
    }
  }
  const double pn = p.norm() / std::abs(p.leading());
  for (cplx r : roots) {
    const double bound = tol.eps_root * pn * std::pow(std::max(1.0, std::abs(r)), n);
    if (!(std::abs(p(r) / p.leading()) <= bound)) {
      throw Error(Errc::NonConvergence, "root residual exceeds eps_root");
    }
  }
  return roots;
}

// ---------------------------------------------------------------------------
// RationalFn
// ---------------------------------------------------------------------------

/// num(z) / prod_k (z - poles[k]). The denominator is kept in factored,
/// monic form so pole locations never need to be re-derived by root finding.
class RationalFn {
 public:
  RationalFn() = default;
  explicit RationalFn(Poly num, std::vector<cplx> poles = {})
      : num_(std::move(num)), poles_(std::move(poles)) {
    if (num_.is_zero()) poles_.clear();
  }

  static RationalFn constant(cplx a) { return RationalFn(Poly::constant(a)); }
  static RationalFn polynomial(Poly p) { return RationalFn(std::move(p)); }
  /// a / (z - pole)
  static RationalFn cauchy(cplx pole, cplx a = 1.0) { return RationalFn(Poly::constant(a), {pole}); }
  /// a / (z - pole)^m
  static RationalFn cauchy_power(cplx pole, int m, cplx a = 1.0) {
    return RationalFn(Poly::constant(a), std::vector<cplx>(static_cast<std::size_t>(m), pole));
  }

  /// Builds num/den from coefficient form; den is factored by poly_roots.
  static RationalFn from_polys(const Poly& num, const Poly& den, const Tolerances& tol = {}) {
    if (den.is_zero()) throw Error(Errc::DomainViolation, "zero denominator");
    std::vector<cplx> poles;
    if (den.degree() >= 1) poles = poly_roots(den, tol);
    return RationalFn((1.0 / den.leading()) * num, std::move(poles));
  }

  const Poly& num() const { return num_; }
  const std::vector<cplx>& poles() const { return poles_; }
  Poly den() const { return Poly::from_roots(poles_); }
  bool is_zero() const { return num_.is_zero(); }

  int num_degree() const { return num_.degree(); }
  int den_degree() const { return static_cast<int>(poles_.size()); }

  cplx operator()(cplx z) const {
    if (std::abs(z) > 1.0 && !num_.is_zero()) {
      // z^(m - N) * sum a_k w^(m-k) / prod(1 - p w), w = 1/z: no overflow for large |z|
      const cplx w = 1.0 / z;
      cplx acc{};
      for (cplx a : num_.coeffs()) acc = acc * w + a;
      cplx d = 1.0;
      for (cplx p : poles_) {
        if (z == p) throw Error(Errc::PoleEvaluation, "evaluation at a pole");
        d *= 1.0 - p * w;
      }
      return acc / d * std::pow(z, num_.degree() - den_degree());
    }
    cplx d = 1.0;
    for (cplx p : poles_) {
      const cplx f = z - p;
      if (f == cplx{}) throw Error(Errc::PoleEvaluation, "evaluation at a pole");
      d *= f;
    }
    return num_(z) / d;
  }

  RationalFn paraconj() const {
    std::vector<cplx> pc(poles_.size());
    std::transform(poles_.begin(), poles_.end(), pc.begin(), [](cplx p) { return std::conj(p); });
    return RationalFn(num_.paraconj(), std::move(pc));
  }

  /// Removes every pole at which the numerator vanishes to relative
  /// accuracy `rho` (|num(p)| <= rho * sum |a_k||p|^k) by exact deflation.
  RationalFn cancelled(double rho) const {
    Poly num = num_;
    std::vector<cplx> kept;
    std::vector<cplx> pending = poles_;
    bool progress = true;
    while (progress) {
      progress = false;
      kept.clear();
      for (std::size_t k = 0; k < pending.size(); ++k) {
        const cplx p = pending[k];
        if (!progress && num.degree() >= 1 && std::abs(num(p)) <= rho * num.scale_at(p)) {
          num = num.divide_root(p);
          progress = true;
          continue;
        }
        kept.push_back(p);
      }
      pending = kept;
    }
    return RationalFn(std::move(num), std::move(pending));
  }

  /// Cancels only poles lying within `band` of the real axis.
  RationalFn cancelled_near_real(double band, double rho) const {
    Poly num = num_;
    std::vector<cplx> kept;
    for (cplx p : poles_) {
      if (std::abs(p.imag()) < band && num.degree() >= 1 && std::abs(num(p)) <= rho * num.scale_at(p)) {
        num = num.divide_root(p);
      } else {
        kept.push_back(p);
      }
    }
    return RationalFn(std::move(num), std::move(kept));
  }

  friend RationalFn operator*(const RationalFn& a, const RationalFn& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<cplx> poles = a.poles_;
    poles.insert(poles.end(), b.poles_.begin(), b.poles_.end());
    return RationalFn(a.num_ * b.num_, std::move(poles));
  }
  friend RationalFn operator*(cplx s, const RationalFn& a) { return RationalFn(s * a.num_, a.poles_); }
  friend RationalFn operator*(const RationalFn& a, cplx s) { return s * a; }
  friend RationalFn operator*(const Poly& p, const RationalFn& a) { return RationalFn(p * a.num_, a.poles_); }

  /// Sum over the least common denominator: the pole multiset union with
  /// coincident poles (see `same_point`) merged.
  friend RationalFn operator+(const RationalFn& a, const RationalFn& b) {
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    std::vector<cplx> lcd = a.poles_;
    std::vector<cplx> a_extra;  // poles of lcd missing from a
    std::vector<cplx> b_extra;  // poles of lcd missing from b
    std::vector<bool> used(a.poles_.size(), false);
    for (cplx q : b.poles_) {
      bool matched = false;
      for (std::size_t k = 0; k < a.poles_.size(); ++k) {
        if (!used[k] && same_point(a.poles_[k], q)) {
          used[k] = true;
          matched = true;
          break;
        }
      }
      if (!matched) {
        lcd.push_back(q);
        a_extra.push_back(q);
      }
    }
    for (std::size_t k = 0; k < a.poles_.size(); ++k)
      if (!used[k]) b_extra.push_back(a.poles_[k]);
    Poly num = a.num_ * Poly::from_roots(a_extra) + b.num_ * Poly::from_roots(b_extra);
    return RationalFn(std::move(num), std::move(lcd));
  }
  friend RationalFn operator-(const RationalFn& a, const RationalFn& b) { return a + (-1.0) * b; }

 private:
  Poly num_;
  std::vector<cplx> poles_;
};

/// sum_k c_k f_k as one rational function.
inline RationalFn linear_combination(std::span<const RationalFn> fns, const CVector& c) {
  RationalFn acc;
  for (std::size_t k = 0; k < fns.size(); ++k) {
    if (c(static_cast<Eigen::Index>(k)) == cplx{}) continue;
    acc = acc + c(static_cast<Eigen::Index>(k)) * fns[k];
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Residues and the L^2(R) inner product
// ---------------------------------------------------------------------------

struct PoleCluster {
  cplx pole;
  int multiplicity;
};

inline std::vector<PoleCluster> cluster_poles(std::span<const cplx> poles) {
  std::vector<PoleCluster> out;
  for (cplx p : poles) {
    auto it = std::find_if(out.begin(), out.end(), [&](const PoleCluster& c) { return same_point(c.pole, p); });
    if (it == out.end()) {
      out.push_back({p, 1});
    } else {
      ++it->multiplicity;
    }
  }
  return out;
}

/// Laurent coefficients of F at one pole cluster: out[j-1] multiplies
/// (z - p)^{-j}, j = 1..multiplicity.
inline std::vector<cplx> principal_part(const Poly& num, const std::vector<PoleCluster>& clusters,
                                        std::size_t which) {
  const cplx p = clusters[which].pole;
  const int m = clusters[which].multiplicity;
  std::vector<cplx> series(static_cast<std::size_t>(m), cplx{});
  const Poly shifted = num.taylor_shift(p);
  for (int k = 0; k < m; ++k) series[k] = shifted.coeff(k);
  for (std::size_t j = 0; j < clusters.size(); ++j) {
    if (j == which) continue;
    const cplx d = p - clusters[j].pole;
    std::vector<cplx> inv(static_cast<std::size_t>(m));
    cplx term = 1.0 / d;
    for (int k = 0; k < m; ++k) {
      inv[k] = term;
      term *= -1.0 / d;
    }
    for (int rep = 0; rep < clusters[j].multiplicity; ++rep) {
      std::vector<cplx> next(static_cast<std::size_t>(m), cplx{});
      for (int a = 0; a < m; ++a)
        for (int b = 0; a + b < m; ++b) next[a + b] += series[a] * inv[b];
      series = std::move(next);
    }
  }
  std::vector<cplx> out(static_cast<std::size_t>(m));
  for (int j = 1; j <= m; ++j) out[j - 1] = series[m - j];
  return out;
}

/// Residue of F = num / prod(z - p) at one pole cluster.
inline cplx residue(const Poly& num, const std::vector<PoleCluster>& clusters, std::size_t which) {
  return principal_part(num, clusters, which)[0];
}

struct PartialFraction {
  cplx pole;
  std::vector<cplx> coeffs;  // coeffs[j-1] multiplies (z - pole)^{-j}
};

/// Principal parts of a proper rational function (deg num < deg den).
inline std::vector<PartialFraction> partial_fractions(const RationalFn& F) {
  std::vector<PartialFraction> out;
  if (F.is_zero()) return out;
  if (F.num_degree() >= F.den_degree()) throw Error(Errc::DomainViolation, "partial fractions need a proper function");
  const auto clusters = cluster_poles(F.poles());
  for (std::size_t k = 0; k < clusters.size(); ++k)
    out.push_back({clusters[k].pole, principal_part(F.num(), clusters, k)});
  return out;
}

namespace detail {

/// f * g^* prepared for integration along R: leading noise trimmed, real
/// removable poles cancelled, decay and real-pole preconditions checked.
inline RationalFn line_integrand(const RationalFn& f, const RationalFn& g, const Tolerances& tol) {
  RationalFn F = f * g.paraconj();
  if (F.is_zero()) return F;
  F = RationalFn(F.num().trimmed(1e-13), F.poles());
  F = F.cancelled_near_real(tol.rho_real, tol.rho_gcd);
  for (cplx p : F.poles()) {
    if (std::abs(p.imag()) < tol.rho_real) throw Error(Errc::RealPole, "integrand has a pole on the real axis");
  }
  if (F.num_degree() > F.den_degree() - 2) {
    throw Error(Errc::SlowDecay, "integrand does not decay like |x|^-2");
  }
  return F;
}

}  // namespace detail

/// Integral over R of F = num/den by residues in the upper half-plane.
inline cplx integrate_rational_line(const RationalFn& F) {
  if (F.is_zero()) return {};
  const auto clusters = cluster_poles(F.poles());
  cplx sum{};
  for (std::size_t k = 0; k < clusters.size(); ++k) {
    if (clusters[k].pole.imag() > 0.0) sum += residue(F.num(), clusters, k);
  }
  return 2.0 * kPi * kI * sum;
}

/// <f, g> = int_R f(x) conj(g(x)) dx, computed as 2 pi i times the residues
/// of f g^* in the open upper half-plane.
inline cplx l2_inner(const RationalFn& f, const RationalFn& g, const Tolerances& tol = {}) {
  return integrate_rational_line(detail::line_integrand(f, g, tol));
}

inline double l2_norm(const RationalFn& f, const Tolerances& tol = {}) {
  return std::sqrt(std::max(0.0, l2_inner(f, f, tol).real()));
}

// ---------------------------------------------------------------------------
// Quadrature oracle
// ---------------------------------------------------------------------------

struct QuadratureOptions {
  double rel_tol = 1e-10;
  unsigned max_depth = 25;
};

/// Adaptive Gauss-Kronrod (15-point) integral over R after x = tan(t). The
/// error estimate is tested against rel_tol times the L1 norm so that
/// near-zero results (orthogonal pairs) are judged on an absolute scale.
template <class F>
cplx integrate_line(F&& integrand, QuadratureOptions opts = {}) {
  auto mapped = [&](double t) -> cplx {
    const double c = std::cos(t);
    return integrand(std::tan(t)) / (c * c);
  };
  double err = 0.0, l1 = 0.0;
  const cplx val = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      mapped, -kPi / 2, kPi / 2, opts.max_depth, opts.rel_tol, &err, &l1);
  if (!(err <= opts.rel_tol * std::max(l1, 1e-300) * 10.0) || !std::isfinite(val.real()) ||
      !std::isfinite(val.imag())) {
    throw Error(Errc::QuadratureFailure, "line quadrature error estimate above target");
  }
  return val;
}

/// Adaptive Gauss-Kronrod over a finite interval [a, b].
template <class F>
cplx integrate_interval(F&& integrand, double a, double b, QuadratureOptions opts = {}) {
  double err = 0.0, l1 = 0.0;
  const cplx val = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      [&](double x) -> cplx { return integrand(x); }, a, b, opts.max_depth, opts.rel_tol, &err, &l1);
  if (!(err <= opts.rel_tol * std::max(l1, 1e-300) * 10.0)) {
    throw Error(Errc::QuadratureFailure, "interval quadrature error estimate above target");
  }
  return val;
}

/// Independent check of l2_inner: same preconditions, value by quadrature.
inline cplx quad_oracle(const RationalFn& f, const RationalFn& g, const Tolerances& tol = {},
                        QuadratureOptions opts = {}) {
  (void)detail::line_integrand(f, g, tol);
  return integrate_line([&](double x) { return f(cplx(x, 0.0)) * std::conj(g(cplx(x, 0.0))); }, opts);
}

// ---------------------------------------------------------------------------
// Spectral factorization
// ---------------------------------------------------------------------------

/// 256 abscissae covering R, x = tan(t) on an open uniform t-grid.
inline std::vector<double> real_test_grid(int n = 256) {
  std::vector<double> xs(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) xs[k] = std::tan(-kPi / 2 + kPi * (k + 0.5) / n);
  return xs;
}

/// Outer factor a of a self-paraconjugate F >= 0 on R: a a^* = F, zeros of a
/// in the closed lower half-plane, poles in the open lower half-plane, and
/// a(0) direction fixed so that the leading constant is real positive.
inline RationalFn spectral_factor(const RationalFn& F, const Tolerances& tol = {}) {
  if (F.is_zero()) return {};
  const RationalFn Fs = F.paraconj();
  for (cplx z : {cplx(0.3, 0.7), cplx(-1.1, 0.4), cplx(2.0, -0.9)}) {
    const cplx a = F(z), b = Fs(z);
    if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a))) {
      throw Error(Errc::NotSelfParaconjugate, "F differs from F^*");
    }
  }
  if (F.num_degree() > F.den_degree()) throw Error(Errc::SlowDecay, "F grows on R");
  for (cplx p : F.poles())
    if (std::abs(p.imag()) < tol.rho_real) throw Error(Errc::RealPole, "F has a real pole");
  double fmax = 0.0;
  for (double x : real_test_grid()) {
    const double v = F(cplx(x, 0.0)).real();
    fmax = std::max(fmax, std::abs(v));
    if (v < -tol.eps_fac) throw Error(Errc::NotNonnegative, "F takes negative values on R");
  }

  std::vector<cplx> lower_poles;
  for (cplx p : F.poles())
    if (p.imag() < 0.0) lower_poles.push_back(p);

  std::vector<cplx> zeros;
  const Poly num = F.num().trimmed(1e-14);
  if (num.degree() >= 1) {
    std::vector<cplx> roots = poly_roots(num, tol);
    std::vector<double> real_roots;
    for (cplx r : roots) {
      if (std::abs(r.imag()) <= std::sqrt(tol.rho_real)) {
        real_roots.push_back(r.real());
      } else if (r.imag() < 0.0) {
        zeros.push_back(r);
      }
    }
    // real zeros of a nonnegative F have even multiplicity; keep half
    std::sort(real_roots.begin(), real_roots.end());
    for (std::size_t k = 0; k + 1 < real_roots.size(); k += 2)
      zeros.emplace_back(0.5 * (real_roots[k] + real_roots[k + 1]), 0.0);
  }
  RationalFn a(Poly::from_roots(zeros), lower_poles);
  // fix |lead| on a sample point where F is largest
  double best = -1.0, xbest = 0.0;
  for (double x : real_test_grid(64)) {
    const double v = F(cplx(x, 0.0)).real();
    if (v > best) best = v, xbest = x;
  }
  const double scale = std::sqrt(best / std::norm(a(cplx(xbest, 0.0))));
  a = scale * a;
  for (double x : real_test_grid()) {
    const cplx z(x, 0.0);
    if (std::abs(std::norm(a(z)) - F(z).real()) > tol.eps_fac * std::max(1.0, fmax)) {
      throw Error(Errc::NonConvergence, "spectral factor misses F on the test grid");
    }
  }
  return a;
}

}  // namespace nearsym
