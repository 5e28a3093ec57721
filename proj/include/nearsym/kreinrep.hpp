#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "nearsym/inner.hpp"
#include "nearsym/report.hpp"
#include "nearsym/symrestrict.hpp"

namespace nearsym {

/// Spectral data of one self-adjoint extension A of T, a unit gauge vector
/// u in ran(T + i)^perp, and the polynomials built from them.
///
/// With A v_k = x_k v_k and sigma_k = |<u, v_k>|^2:
///   h(z) = prod (z - x_k)
///   r(z) = h(z) <u, psi(conj z)> = -sum_k sigma_k (x_k + i) prod_{l != k} (z - x_l)
///   E    = E_scale * E_monic, the de Branges function with E(-i) = 0
struct KreinFrame {
  SymRestriction T;
  cplx alpha = -1.0;
  CVector u;
  RationalFn u_fn;
  CMatrix A;
  Eigen::VectorXd atoms;
  CMatrix vectors;      // columns v_k
  CVector u_on_atoms;   // <u, v_k> = v_k^H u
  Eigen::VectorXd sigma;
  Poly h;
  Poly r;
  Poly E;               // monic
  double E_scale = 1.0;

  int dim() const { return T.n; }
  Poly E_full() const { return E_scale * E; }
};

namespace detail {

/// prod_{l != k} (z - x_l)
inline Poly product_except(const Eigen::VectorXd& xs, Eigen::Index k) {
  std::vector<cplx> roots;
  for (Eigen::Index l = 0; l < xs.size(); ++l)
    if (l != k) roots.emplace_back(xs(l));
  return Poly::from_roots(roots);
}

/// -sum_k (x_k + i) c_k prod_{l != k} (z - x_l)
inline Poly atom_interpolant(const Eigen::VectorXd& xs, const CVector& c) {
  Poly out;
  for (Eigen::Index k = 0; k < xs.size(); ++k) out = out + (-(xs(k) + kI) * c(k)) * product_except(xs, k);
  return out;
}

}  // namespace detail

/// Frame over the extension A_alpha. `gauge_phase` rotates the defect vector
/// (|gauge_phase| = 1); every derived identity is invariant under it.
inline KreinFrame krein_frame(const SymRestriction& T, cplx alpha = -1.0, cplx gauge_phase = 1.0) {
  if (std::abs(std::abs(gauge_phase) - 1.0) > 1e-12) throw Error(Errc::DomainViolation, "gauge phase must be unimodular");
  KreinFrame fr;
  fr.T = T;
  fr.alpha = alpha;
  fr.u = gauge_phase * T.defect_plus;
  fr.u_fn = T.space->function(fr.u);
  const SelfAdjointExtension ext = selfadjoint_extension(T, alpha);
  fr.A = ext.A;
  fr.atoms = ext.eigenvalues;
  fr.vectors = ext.eigenvectors;
  const int n = T.n;
  fr.u_on_atoms = fr.vectors.adjoint() * fr.u;
  fr.sigma = fr.u_on_atoms.cwiseAbs2();
  if (fr.sigma.minCoeff() < 1e-14) throw Error(Errc::GaugeDegenerate, "gauge vector orthogonal to an eigenvector");
  std::vector<cplx> roots(fr.atoms.data(), fr.atoms.data() + n);
  fr.h = Poly::from_roots(roots);
  fr.r = detail::atom_interpolant(fr.atoms, fr.sigma.cast<cplx>());

  // E = A - iB with A = a h, B = b h + B1/a, where B1 interpolates
  // -pi sigma_k h'(x_k)(x_k^2 + 1) at the atoms. Every (a > 0, b) gives
  // the same H(E) norm; E(-i) = 0 picks a = sqrt(pi), b = -sqrt(pi) sum sigma_k x_k.
  Poly B1;
  for (int k = 0; k < n; ++k) {
    const double xk = fr.atoms(k);
    B1 = B1 + cplx(-kPi * fr.sigma(k) * (xk * xk + 1.0)) * detail::product_except(fr.atoms, k);
  }
  const cplx rho = kI * B1(-kI) / fr.h(-kI);
  const double a = std::sqrt(rho.real());
  const double b = -rho.imag() / a;
  const cplx lead(a, -b);
  Poly E = lead * fr.h - (kI / a) * B1;
  E = (std::conj(lead) / std::abs(lead)) * E;
  fr.E_scale = std::abs(lead);
  fr.E = (1.0 / fr.E_scale) * E;
  return fr;
}

// ---------------------------------------------------------------------------
// psi and the transform
// ---------------------------------------------------------------------------

inline void check_off_spectrum(const KreinFrame& fr, cplx z) {
  for (Eigen::Index k = 0; k < fr.atoms.size(); ++k)
    if (std::abs(z - fr.atoms(k)) < 1e-8) throw Error(Errc::SpectrumCollision, "z lies on the spectrum of A");
}

/// psi(z) = u + (z - i)(A - z)^{-1} u, spanning ran(T - conj z)^perp.
inline CVector psi(const KreinFrame& fr, cplx z) {
  check_off_spectrum(fr, z);
  const int n = fr.dim();
  const CMatrix Az = fr.A - z * CMatrix::Identity(n, n);
  return fr.u + (z - kI) * Az.partialPivLu().solve(fr.u);
}

struct PsiDiagnostics {
  CVector value;
  double formula_gap = 0.0;  // |(A - i)(A - z)^{-1}u - (u + (z - i)(A - z)^{-1}u)|
  double orthogonality = 0.0;  // |P_{ran(T - conj z)} psi| / max(1, |psi|)
};

inline PsiDiagnostics psi_diagnostics(const KreinFrame& fr, cplx z) {
  PsiDiagnostics d;
  d.value = psi(fr, z);
  const int n = fr.dim();
  const CMatrix I = CMatrix::Identity(n, n);
  const CVector other = (fr.A - kI * I) * (fr.A - z * I).partialPivLu().solve(fr.u);
  d.formula_gap = (other - d.value).norm() / std::max(1.0, d.value.norm());
  if (fr.T.nu > 0) {
    Eigen::HouseholderQR<CMatrix> qr(fr.T.TQ - std::conj(z) * fr.T.Q);
    const CMatrix range = qr.householderQ() * CMatrix::Identity(n, fr.T.nu);
    d.orthogonality = (range.adjoint() * d.value).norm() / std::max(1.0, d.value.norm());
  }
  return d;
}

/// f^(z) = <f, psi(conj z)> / <u, psi(conj z)>, summed over eigenvectors.
/// At an atom the removable singularity is filled in by <f, v_k>/<u, v_k>.
inline cplx transform(const KreinFrame& fr, const CVector& f, cplx z) {
  const CVector fk = fr.vectors.adjoint() * f;
  for (Eigen::Index k = 0; k < fr.atoms.size(); ++k)
    if (std::abs(z - fr.atoms(k)) <= 1e-14 * (1.0 + std::abs(z))) return fk(k) / fr.u_on_atoms(k);
  cplx num{}, den{};
  for (Eigen::Index k = 0; k < fr.atoms.size(); ++k) {
    const cplx w = (fr.atoms(k) + kI) / (fr.atoms(k) - z);
    num += w * fk(k) * std::conj(fr.u_on_atoms(k));
    den += w * fr.sigma(k);
  }
  if (std::abs(z.imag()) > 1e-8 && std::abs(den) < 1e-12)
    throw Error(Errc::GaugeDegenerate, "<psi(z), u> vanishes");
  return num / den;
}

/// f~ = h f^, a polynomial of degree < n.
inline Poly transform_numerator(const KreinFrame& fr, const CVector& f) {
  const CVector fk = fr.vectors.adjoint() * f;
  return detail::atom_interpolant(fr.atoms, fk.cwiseProduct(fr.u_on_atoms.conjugate()));
}

/// f^ = f~ / r as a rational function.
inline RationalFn transform_fn(const KreinFrame& fr, const CVector& f) {
  return RationalFn::from_polys(transform_numerator(fr, f), fr.r);
}

// ---------------------------------------------------------------------------
// u-spectral measures
// ---------------------------------------------------------------------------

enum class MeasureKind { discrete, abscont };

struct SpectralMeasure {
  MeasureKind kind = MeasureKind::discrete;
  std::vector<double> atoms;
  std::vector<double> weights;
  RationalFn density;                 // |u(x)|^2 as u u^*
  std::vector<cplx> density_zeros;    // real zeros of u (abscont)
  CVector gauge;
};

/// Atoms and weights of the spectral measure of A at u.
inline SpectralMeasure discrete_measure(const KreinFrame& fr) {
  SpectralMeasure m;
  m.kind = MeasureKind::discrete;
  for (Eigen::Index k = 0; k < fr.atoms.size(); ++k) {
    m.atoms.push_back(fr.atoms(k));
    m.weights.push_back(fr.sigma(k));
  }
  m.gauge = fr.u;
  return m;
}

/// Spectral measure of the ambient multiplication operator at u: |u(x)|^2 dx.
inline SpectralMeasure abscont_measure(const KreinFrame& fr, const Tolerances& tol = {}) {
  SpectralMeasure m;
  m.kind = MeasureKind::abscont;
  m.density = fr.u_fn * fr.u_fn.paraconj();
  const Poly un = fr.u_fn.num().trimmed(1e-13);
  if (un.degree() >= 1)
    for (cplx z : poly_roots(un, tol))
      if (std::abs(z.imag()) < tol.rho_real) m.density_zeros.push_back(z);
  m.gauge = fr.u;
  return m;
}

/// Finite union of closed intervals.
struct Window {
  std::vector<std::pair<double, double>> intervals;
  bool contains(double x) const {
    return std::any_of(intervals.begin(), intervals.end(), [x](const auto& iv) { return iv.first <= x && x <= iv.second; });
  }
};

using CoordPair = std::pair<CVector, CVector>;

/// Max over pairs of the isometry defect between S and L^2(measure), or of
/// the windowed version <chi_Omega f, g> when `window` is given.
inline Check verify_isometry(const KreinFrame& fr, const SpectralMeasure& mu, const std::vector<CoordPair>& pairs,
                             const Window* window = nullptr, double tolerance = 1e-7) {
  if (mu.gauge.size() != fr.u.size() || (mu.gauge - fr.u).norm() > 1e-12)
    throw Error(Errc::MeasureMismatch, "measure built from a different gauge");
  const SubspaceSpec& S = *fr.T.space;
  MaxResidual res;
  if (mu.kind == MeasureKind::discrete) {
    // f^(x_k) through the function form f/u: independent of the eigenvectors
    CMatrix P = CMatrix::Zero(fr.dim(), fr.dim());
    for (Eigen::Index k = 0; k < fr.atoms.size(); ++k)
      if (!window || window->contains(fr.atoms(k))) P += fr.vectors.col(k) * fr.vectors.col(k).adjoint();
    for (const auto& [f, g] : pairs) {
      const RationalFn ff = S.function(f), gf = S.function(g);
      cplx sum{};
      for (std::size_t k = 0; k < mu.atoms.size(); ++k) {
        const double x = mu.atoms[k];
        if (window && !window->contains(x)) continue;
        const cplx ux = fr.u_fn(x);
        sum += ff(x) / ux * std::conj(gf(x) / ux) * mu.weights[k];
      }
      const cplx want = window ? g.dot(P * f) : g.dot(f);
      res.add(std::abs(sum - want) / std::max(1.0, f.norm() * g.norm()));
    }
    return make_check(window ? "krein_windowed_discrete" : "krein_isometry_discrete", "krein-transform-isometry",
                      res.value, tolerance);
  }
  for (const auto& [f, g] : pairs) {
    const double scale = std::max(1.0, f.norm() * g.norm());
    if (!window) {
      const cplx lhs = l2_inner(transform_fn(fr, f) * fr.u_fn, transform_fn(fr, g) * fr.u_fn);
      res.add(std::abs(lhs - g.dot(f)) / scale);
      continue;
    }
    const RationalFn ff = S.function(f), gf = S.function(g);
    cplx lhs{}, rhs{};
    for (const auto& [a, b] : window->intervals) {
      lhs += integrate_interval(
          [&](double x) {
            const cplx ux = fr.u_fn(x);
            return transform(fr, f, x) * std::conj(transform(fr, g, x)) * std::norm(ux);
          },
          a, b);
      rhs += integrate_interval([&](double x) { return ff(x) * std::conj(gf(x)); }, a, b);
    }
    res.add(std::abs(lhs - rhs) / scale);
  }
  return make_check(window ? "krein_windowed_abscont" : "krein_isometry_abscont", "krein-transform-isometry", res.value,
                    tolerance);
}

// ---------------------------------------------------------------------------
// de Branges route
// ---------------------------------------------------------------------------

struct DeBrangesFrame {
  Poly E;                 // monic
  double E_scale = 1.0;   // E_full = E_scale * E
  RationalFn r;
  RationalFn R;           // |E/r|^2 mu' as E E^* u u^* / (r r^*)
  InnerFn theta;          // E^*/E
  double min_R = 0.0;     // over the 256-point test grid
  double theta_defect = 0.0;  // max | |E^*/E| - 1 | on the grid
  Poly E_full;
  Poly r_poly;
  RationalFn u;

  /// R(x) from the factors. The expanded numerator of R loses digits near its zeros.
  double weight(double x) const { return std::norm(E_full(cplx(x)) * u(x) / r_poly(cplx(x))); }
};

inline DeBrangesFrame debranges_frame(const KreinFrame& fr, const Tolerances& tol = {}) {
  std::vector<cplx> zeros;
  for (cplx e : poly_roots(fr.E, tol)) {
    if (e.imag() > -tol.rho_real) throw Error(Errc::RealZeroE, "E has a zero on or above the real axis");
    zeros.push_back(std::conj(e));
  }
  std::vector<cplx> rpoles;
  if (fr.r.degree() >= 1) {
    for (cplx z : poly_roots(fr.r, tol)) {
      if (std::abs(z.imag()) < tol.rho_real) throw Error(Errc::RealPole, "r vanishes on the real axis");
      rpoles.push_back(z);
      rpoles.push_back(std::conj(z));
    }
  }
  const Poly Ef = fr.E_full();
  const double rl = std::norm(fr.r.leading());
  DeBrangesFrame db{fr.E,
                    fr.E_scale,
                    RationalFn::polynomial(fr.r),
                    RationalFn(Ef * Ef.paraconj() * cplx(1.0 / rl), rpoles) * fr.u_fn * fr.u_fn.paraconj(),
                    InnerFn(zeros)};
  db.E_full = Ef;
  db.r_poly = fr.r;
  db.u = fr.u_fn;
  db.min_R = std::numeric_limits<double>::infinity();
  for (double x : real_test_grid()) {
    db.min_R = std::min(db.min_R, db.weight(x));
    const cplx ratio = fr.E.paraconj()(x) / fr.E(x);
    db.theta_defect = std::max(db.theta_defect, std::abs(std::abs(ratio) - 1.0));
  }
  return db;
}

/// V0 f = f~ / E in K_theta for f in S.
inline RationalFn debranges_image(const KreinFrame& fr, const CVector& f) {
  return RationalFn::from_polys(transform_numerator(fr, f), fr.E_full());
}

inline double sqrt_R(const DeBrangesFrame& db, double x) { return std::sqrt(db.weight(x)); }

/// For p, q in K_theta: <sqrt(R) p, sqrt(R) q> = <p, q>, left side by quadrature.
inline Check verify_partial_isometry(const DeBrangesFrame& db, const std::vector<std::pair<RationalFn, RationalFn>>& pairs,
                                     double tolerance = 1e-7) {
  MaxResidual res;
  for (const auto& [p, q] : pairs) {
    const cplx lhs = integrate_line([&](double x) { return db.weight(x) * p(x) * std::conj(q(x)); });
    res.add(std::abs(lhs - l2_inner(p, q)) / std::max(1.0, l2_norm(p) * l2_norm(q)));
  }
  return make_check("partial_isometry", "partial-isometry", res.value, tolerance);
}

/// Elements V0 f, V0 g of K_theta for pairs of S-coordinates.
inline std::vector<std::pair<RationalFn, RationalFn>> image_pairs(const KreinFrame& fr, const std::vector<CoordPair>& pairs) {
  std::vector<std::pair<RationalFn, RationalFn>> out;
  for (const auto& [f, g] : pairs) out.emplace_back(debranges_image(fr, f), debranges_image(fr, g));
  return out;
}

/// <P_S m f, g> against <P_theta sqrt(R) m sqrt(R) P_theta V0 f, V0 g>, both
/// by quadrature over R.
inline Check verify_cpeq(const KreinFrame& fr, const DeBrangesFrame& db, const std::vector<RationalFn>& multipliers,
                         const std::vector<CoordPair>& pairs, double tolerance = 1e-6) {
  const SubspaceSpec& S = *fr.T.space;
  MaxResidual res;
  for (const RationalFn& m : multipliers) {
    double sup = 0.0;
    for (double x : real_test_grid()) sup = std::max(sup, std::abs(m(x)));
    if (sup > 1e3) throw Error(Errc::UnboundedMultiplier, "multiplier exceeds 1e3 on the test grid");
    for (const auto& [f, g] : pairs) {
      const RationalFn ff = S.function(f), gf = S.function(g);
      const RationalFn vf = debranges_image(fr, f), vg = debranges_image(fr, g);
      const cplx lhs = integrate_line([&](double x) { return m(x) * ff(x) * std::conj(gf(x)); });
      const cplx rhs = integrate_line([&](double x) {
        const double s = sqrt_R(db, x);
        return s * m(x) * s * vf(x) * std::conj(vg(x));
      });
      res.add(std::abs(lhs - rhs) / std::max(1.0, f.norm() * g.norm()));
    }
  }
  return make_check("cp_equivalence", "cp-equivalence", res.value, tolerance);
}

}  // namespace nearsym
