#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "nearsym/generators.hpp"
#include "nearsym/kreinrep.hpp"
#include "nearsym/modelspace.hpp"
#include "nearsym/report.hpp"
#include "nearsym/symrestrict.hpp"

namespace nearsym {

/// 1/F for a nonzero rational F; zeros of F become poles.
inline RationalFn reciprocal(const RationalFn& F, const Tolerances& tol = {}) {
  if (F.is_zero()) throw Error(Errc::DomainViolation, "reciprocal of zero");
  return RationalFn::from_polys(F.den(), F.num(), tol);
}

/// prod (z - conj r)/(z - r): unimodular on R for roots r off the axis.
inline RationalFn unimodular_from_roots(const std::vector<cplx>& q_roots) {
  std::vector<cplx> conj_roots;
  for (cplx r : q_roots) {
    if (std::abs(r.imag()) <= 0.0) throw Error(Errc::DomainViolation, "q must have no real roots");
    conj_roots.push_back(std::conj(r));
  }
  return RationalFn(Poly::from_roots(conj_roots), q_roots);
}

// ---------------------------------------------------------------------------
// Isometric multipliers h = a/(1 - b phi)
// ---------------------------------------------------------------------------

inline double sup_on_grid(const RationalFn& f, int n = 1024) {
  double s = 0.0;
  for (double x : real_test_grid(n)) s = std::max(s, std::abs(f(x)));
  return s;
}

inline RationalFn isometric_multiplier(const RationalFn& b, const InnerFn& phi, const Tolerances& tol = {}) {
  if (b.is_zero()) return RationalFn::constant(1.0);
  for (cplx p : b.poles())
    if (p.imag() >= 0.0) throw Error(Errc::DomainViolation, "b must be analytic in the upper half-plane");
  if (b.num_degree() > b.den_degree()) throw Error(Errc::ContractivityViolation, "b is unbounded on R");
  if (sup_on_grid(b) >= 1.0 - 1e-6) throw Error(Errc::ContractivityViolation, "sup |b| must stay below 1");
  const RationalFn one = RationalFn::constant(1.0);
  const RationalFn a = spectral_factor((one - b * b.paraconj()).cancelled(tol.rho_gcd), tol);
  const RationalFn denom = (one - b * phi.as_rational()).cancelled(tol.rho_gcd);
  return (a * reciprocal(denom, tol)).cancelled(tol.rho_gcd);
}

/// h/(z + i) in H^2: poles in the open lower half-plane and decay.
inline bool h_over_z_plus_i_in_h2(const RationalFn& h, const Tolerances& tol = {}) {
  const RationalFn q = (h * RationalFn::cauchy(-kI)).cancelled(tol.rho_gcd);
  for (cplx p : q.poles())
    if (p.imag() > -tol.rho_real) return false;
  return q.num_degree() <= q.den_degree() - 1;
}

/// |Gram{h k_j} - Gram{k_j}| / |Gram{k_j}| over a kernel basis of K_phi.
/// The left Gram is taken by quadrature or by residues.
inline double multiplier_gram_residual(const RationalFn& h, const ModelSpace& K, bool quadrature = true,
                                       const Tolerances& tol = {}) {
  const int n = K.dim();
  CMatrix G(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const RationalFn a = h * K.basis()[k], b = h * K.basis()[j];
      G(j, k) = quadrature ? integrate_line([&](double x) { return a(x) * std::conj(b(x)); }) : l2_inner(a, b, tol);
    }
  return (G - K.gram()).norm() / K.gram().norm();
}

// ---------------------------------------------------------------------------
// Near invariance
// ---------------------------------------------------------------------------

/// Relative L^2 distance from f to S, computed from the explicit residual.
inline double distance_to_subspace(const SubspaceSpec& S, const RationalFn& f, const Tolerances& tol = {}) {
  const double nf = l2_norm(f, tol);
  if (nf == 0.0) return 0.0;
  const RationalFn p = S.function(S.project_coords(f, tol));
  return l2_norm(f - p, tol) / nf;
}

struct Factorization {
  RationalFn g;      // u h
  RationalFn u;      // unimodular on R
  RationalFn h;      // no zeros or poles in the closed upper half-plane, h(2i) > 0
  InnerFn theta = InnerFn(std::vector<cplx>{kI});  // theta'(i) = 0
  double theta_at_i = 0.0;
  double gram_residual = 0.0;   // Gram{g k_j} vs Gram{k_j}
  double image_residual = 0.0;  // max distance of g k_j to S
};

struct NearInvReport {
  bool is_nearly_invariant = false;
  std::optional<RationalFn> witness;  // f in S, f(i) = 0, f/(z - i) outside S
  double max_residual = 0.0;
  std::optional<Factorization> factorization;
};

/// Divides every f in S with f(i) = 0 by (z - i) and tests membership in S.
inline NearInvReport check_nearly_invariant(const SubspaceSpec& S, double threshold = 1e-8, const Tolerances& tol = {}) {
  const int n = S.dim();
  Eigen::RowVectorXcd ev = S.onb_values(kI);  // f(i) for f = sum y_k e_k
  CMatrix null = detail::complement(ev.adjoint(), n);  // n x (n-1), ev * null = 0
  NearInvReport rep;
  rep.is_nearly_invariant = true;
  for (Eigen::Index k = 0; k < null.cols(); ++k) {
    const RationalFn f = S.function(null.col(k));
    cplx rem{};
    const Poly q = f.num().deflate(kI, &rem);
    const RationalFn quotient(q, f.poles());
    const double d = distance_to_subspace(S, quotient, tol);
    rep.max_residual = std::max(rep.max_residual, d);
    if (d > threshold && (!rep.witness || d >= rep.max_residual)) {
      rep.is_nearly_invariant = false;
      rep.witness = f;
    }
  }
  return rep;
}

namespace detail {

/// Zeros of the characteristic function: mu^{-1} of the spectrum of
/// U0 = V on ran(T + i), U0 u+ = 0. The eigenvalue nearest 0 is snapped to 0.
inline std::vector<cplx> characteristic_zeros(const SymRestriction& T) {
  const int n = T.n;
  CMatrix from(n, n), to(n, n);
  from << T.TQ + kI * T.Q, T.defect_plus;
  to << T.TQ - kI * T.Q, CVector::Zero(n);
  const CMatrix U0 = from.transpose().partialPivLu().solve(to.transpose()).transpose();
  Eigen::ComplexEigenSolver<CMatrix> es(U0, false);
  std::vector<cplx> eig(es.eigenvalues().data(), es.eigenvalues().data() + n);
  const auto nearest = std::min_element(eig.begin(), eig.end(), [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
  if (std::abs(*nearest) > 1e-6) throw Error(Errc::FactorizationResidual, "no characteristic zero at i");
  *nearest = 0.0;
  std::vector<cplx> zeros;
  for (cplx w : eig) {
    if (std::abs(w) >= 1.0) throw Error(Errc::FactorizationResidual, "compressed shift is not a strict contraction");
    zeros.push_back(mobius_inv(w));
  }
  return zeros;
}

}  // namespace detail

/// S = u h K_theta' from the defect data of the restriction of M_x to S.
inline Factorization factor_nearly_invariant(const SubspaceSpec& S, double gram_tol = 1e-7, const Tolerances& tol = {}) {
  SymRestriction T;
  try {
    T = build_restriction(S, tol);
  } catch (const Error& e) {
    if (e.code() == Errc::NoSymmetricRestriction) throw Error(Errc::NotRestrictable, e.what());
    throw;
  }
  Factorization fz;
  fz.theta = InnerFn(detail::characteristic_zeros(T));
  fz.theta_at_i = std::abs(fz.theta(kI));

  // g k_i^theta' spans ran(M_S - i)^perp; k_i = (i/2pi)/(z + i) has norm 1/(2 sqrt(pi))
  const RationalFn um = S.function(T.defect_minus);
  RationalFn g = (cplx(0.0, -std::sqrt(kPi)) * RationalFn(Poly({kI, 1.0})) * um).cancelled(tol.rho_gcd);
  g = RationalFn(g.num().trimmed(1e-13), g.poles()).cancelled(1e-7);

  // u takes every zero and pole of g in the upper half-plane
  std::vector<cplx> q_roots;
  for (cplx p : g.poles())
    if (p.imag() > 0.0) q_roots.push_back(p);
  if (g.num_degree() >= 1)
    for (cplx z : poly_roots(g.num(), tol))
      if (z.imag() > 0.0) q_roots.push_back(std::conj(z));
  RationalFn u = unimodular_from_roots(q_roots);
  RationalFn h = (g * reciprocal(u, tol)).cancelled(1e-7);
  const cplx h2 = h(2.0 * kI);
  const cplx phase = h2 / std::abs(h2);
  fz.u = phase * u;
  fz.h = std::conj(phase) * h;
  fz.g = g;

  const ModelSpace K(fz.theta, tol);
  fz.gram_residual = multiplier_gram_residual(g, K, false, tol);
  for (const RationalFn& k : K.basis()) fz.image_residual = std::max(fz.image_residual, distance_to_subspace(S, g * k, tol));
  if (fz.gram_residual > gram_tol || fz.image_residual > gram_tol)
    throw Error(Errc::FactorizationResidual, "multiplication by g does not map K_theta' onto S");
  return fz;
}

struct SeminvarianceResult {
  bool seminvariant = false;
  double spread = 0.0;  // (max |g| - min |g|) / max |g| on the grid
};

/// |g| constant on a 128-point grid within 1e-6 (R = 1 in rational form).
inline SeminvarianceResult check_seminvariant(const Factorization& fz, double threshold = 1e-6) {
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (double x : real_test_grid(128)) {
    const double m = std::abs(fz.g(x));
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }
  SeminvarianceResult r;
  r.spread = hi > 0.0 ? (hi - lo) / hi : 0.0;
  r.seminvariant = r.spread <= threshold;
  return r;
}

inline SeminvarianceResult check_seminvariant(const SubspaceSpec& S, double threshold = 1e-6, const Tolerances& tol = {}) {
  return check_seminvariant(factor_nearly_invariant(S, 1e-7, tol), threshold);
}

/// The division test followed, when it passes, by the factorization. A
/// factorization whose Gram match exceeds `gram_tol` is left empty.
inline NearInvReport near_invariance_report(const SubspaceSpec& S, double gram_tol = 1e-8, const Tolerances& tol = {}) {
  NearInvReport rep = check_nearly_invariant(S, 1e-8, tol);
  if (!rep.is_nearly_invariant) return rep;
  try {
    rep.factorization = factor_nearly_invariant(S, gram_tol, tol);
  } catch (const Error& e) {
    if (e.code() != Errc::NotRestrictable && e.code() != Errc::FactorizationResidual) throw;
  }
  return rep;
}

/// Disk form of the division test: f(0) = 0 => f(z)/z in S, with the
/// trapezoid inner product on the circle.
inline NearInvReport check_nearly_invariant_disk(const std::vector<RationalFn>& basis, double threshold = 1e-8,
                                                 int nodes = 1024) {
  const int n = static_cast<int>(basis.size());
  CMatrix G(n, n);
  Eigen::RowVectorXcd ev(n);
  for (int j = 0; j < n; ++j) {
    ev(j) = basis[j](0.0);
    for (int k = 0; k < n; ++k) G(j, k) = disk_inner(basis[k], basis[j], nodes);
  }
  const Eigen::LDLT<CMatrix> ldlt(G);
  CMatrix null = detail::complement(ev.adjoint(), n);
  NearInvReport rep;
  rep.is_nearly_invariant = true;
  for (Eigen::Index k = 0; k < null.cols(); ++k) {
    const RationalFn f = linear_combination(basis, null.col(k));
    const RationalFn q(f.num().deflate(0.0), f.poles());
    CVector b(n);
    for (int j = 0; j < n; ++j) b(j) = disk_inner(q, basis[j], nodes);
    const RationalFn r = q - linear_combination(basis, ldlt.solve(b));
    const double d = std::sqrt(disk_inner(r, r, nodes).real() / disk_inner(q, q, nodes).real());
    rep.max_residual = std::max(rep.max_residual, d);
    if (d > threshold && d >= rep.max_residual) {
      rep.is_nearly_invariant = false;
      rep.witness = f;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Planted instances and the round trip
// ---------------------------------------------------------------------------

struct PlantedInstance {
  InnerFn theta;  // theta(i) = 0
  RationalFn u;   // q^*/q
  RationalFn b;   // 0 when h = 1
  RationalFn h;
  std::vector<RationalFn> basis;  // u h e_k, orthonormal
};

/// b(z) = s (z - p)/(z - q), Im q < 0, scaled to sup |b| = 0.6 on R.
inline RationalFn random_contraction(Rng& rng) {
  const cplx p = rng.in_box(-2, 2, -2, 2);
  const cplx q = rng.in_box(-2, 2, -2.5, -0.3);
  const RationalFn m(Poly({-p, 1.0}), {q});
  const double s = 0.6 / sup_on_grid(m, 4096);
  return (s * random_unimodular(rng)) * m;
}

/// Roots of q for u = q^*/q: `count` points off R, either half-plane, away
/// from `avoid` and its conjugates.
inline std::vector<cplx> random_q_roots(Rng& rng, int count, const std::vector<cplx>& avoid) {
  std::vector<cplx> avoid_all = avoid;
  for (cplx a : avoid) avoid_all.push_back(std::conj(a));
  avoid_all.push_back(kI);
  avoid_all.push_back(-kI);
  std::vector<cplx> out;
  while (static_cast<int>(out.size()) < count) {
    cplx r = rng.in_box(-2, 2, 0.3, 2.5);
    if (rng.uniform() < 0.5) r = std::conj(r);
    bool ok = true;
    for (cplx a : avoid_all) ok = ok && std::abs(a - r) >= 0.2;
    for (cplx a : out) ok = ok && std::abs(a - r) >= 0.2 && std::abs(std::conj(a) - r) >= 0.2;
    if (ok) out.push_back(r);
  }
  return out;
}

inline PlantedInstance plant_instance(Rng& rng, int degree, bool with_u, bool with_b, const Tolerances& tol = {}) {
  PlantedInstance inst{random_inner_vanishing_at_i(rng, degree), RationalFn::constant(1.0), {}, RationalFn::constant(1.0), {}};
  inst.theta = InnerFn(inst.theta.zeros());  // constant 1
  if (with_u) inst.u = unimodular_from_roots(random_q_roots(rng, rng.uniform_int(1, 2), inst.theta.zeros()));
  // planted basis: u h e_k with e_k the orthonormal Takenaka functions of K_theta
  if (!with_b) {
    for (const RationalFn& e : takenaka_basis(inst.theta)) inst.basis.push_back(inst.u * e);
    return inst;
  }
  inst.b = random_contraction(rng);
  inst.h = isometric_multiplier(inst.b, inst.theta, tol);
  // h = a D / N with 1 - b theta = N/D, and every e_k = P_k / prod_{j<=k} (z - conj l_j)
  // has its poles among the roots of D, so h e_k = a P_k D_k / N in closed form
  const RationalFn one = RationalFn::constant(1.0);
  const RationalFn a = spectral_factor((one - inst.b * inst.b.paraconj()).cancelled(tol.rho_gcd), tol);
  const RationalFn F = one - inst.b * inst.theta.as_rational();
  const RationalFn inv_n = reciprocal(RationalFn(F.num()), tol);
  // the poles of a are poles of b, hence roots of D as well
  auto drop_nearest = [](std::vector<cplx>& v, cplx w) {
    v.erase(std::min_element(v.begin(), v.end(), [&](cplx p, cplx q) { return std::abs(p - w) < std::abs(q - w); }));
  };
  std::vector<cplx> rest = F.poles();
  for (cplx p : a.poles()) drop_nearest(rest, p);
  std::vector<cplx> head;
  for (cplx l : inst.theta.zeros()) {
    drop_nearest(rest, std::conj(l));
    const Poly pk = std::sqrt(l.imag() / kPi) * Poly::from_roots(head);
    inst.basis.push_back(inst.u * RationalFn(a.num() * pk * Poly::from_roots(rest)) * inv_n);
    head.push_back(l);
  }
  return inst;
}

/// Largest distance from a planted zero to the nearest recovered zero.
inline double zero_set_distance(const std::vector<cplx>& planted, const std::vector<cplx>& recovered) {
  if (planted.size() != recovered.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  std::vector<bool> used(recovered.size(), false);
  for (cplx p : planted) {
    std::size_t best = 0;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < recovered.size(); ++k)
      if (!used[k] && std::abs(recovered[k] - p) < bd) bd = std::abs(recovered[k] - p), best = k;
    used[best] = true;
    worst = std::max(worst, bd);
  }
  return worst;
}

struct RoundTripReport {
  std::vector<Check> checks;
  std::optional<RationalFn> witness;
  bool pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

/// Both directions of the equivalence on S given by `basis`, with an
/// optional planted theta' to compare against.
inline RoundTripReport roundtrip_subspace(const std::vector<RationalFn>& basis, const InnerFn* planted,
                                          const Tolerances& tol = {}) {
  RoundTripReport rep;
  const auto S = std::make_shared<const SubspaceSpec>(basis, tol);
  // direction A: near invariance => symmetric restriction with defects (1, 1)
  std::optional<SymRestriction> T;
  try {
    T = build_restriction(*S, tol);
  } catch (const Error& e) {
    if (e.code() != Errc::NoSymmetricRestriction) throw;
  }
  rep.checks.push_back(make_flag("defects_1_1", "deficiency-indices", T.has_value()));
  if (T) {
    rep.checks.push_back(make_check("domain_gap", "deficiency-indices", 1.0 / T->domain_gap, 1e-6));
    const RegularityReport reg = regularity_check(*T, standard_regularity_grid(), tol);
    rep.checks.push_back(make_flag("regular", "regular-point-pairing", reg.regular && reg.min_pairing > 0.0));
    rep.checks.push_back(make_flag("simple", "simplicity", simplicity_check(*T)));
  }
  // direction B: restriction => nearly invariant with recovered theta'
  const NearInvReport nir = check_nearly_invariant(*S, 1e-8, tol);
  rep.checks.push_back(make_check("nearly_invariant", "near-invariance", nir.max_residual, 1e-8));
  if (nir.witness) rep.witness = nir.witness;
  if (!T) return rep;
  Factorization fz;
  try {
    fz = factor_nearly_invariant(*S, 1e-7, tol);
  } catch (const Error& e) {
    rep.checks.push_back(make_flag(std::string("factorization: ") + e.what(), "factorization", false));
    return rep;
  }
  rep.checks.push_back(make_check("theta_at_i", "factorization", fz.theta_at_i, 1e-8));
  rep.checks.push_back(make_check("gram_g", "factorization", fz.gram_residual, 1e-7));
  rep.checks.push_back(make_check("image_g", "factorization", fz.image_residual, 1e-7));
  if (planted) {
    rep.checks.push_back(make_check("theta_zeros", "factorization", zero_set_distance(planted->zeros(), fz.theta.zeros()), 1e-6));
  }
  // unitary equivalence of M_S and M_theta': equal spectra of matching extensions
  const SymRestriction Tm = build_restriction(SubspaceSpec(takenaka_basis(fz.theta), tol), tol);
  double spec = 0.0;
  for (double arg : {0.7, 2.3, -1.9}) {
    const cplx alpha = std::polar(1.0, arg);
    const auto a = selfadjoint_extension(*T, alpha).eigenvalues, b = selfadjoint_extension(Tm, alpha).eigenvalues;
    spec = std::max(spec, (a - b).cwiseAbs().maxCoeff() / (1.0 + b.cwiseAbs().maxCoeff()));
  }
  rep.checks.push_back(make_check("unitary_equivalence", "characteristic-function", spec, 1e-6));
  rep.checks.push_back(make_flag("clark_interlacing", "characteristic-function",
                                 strictly_interlaced(selfadjoint_extension(*T, std::polar(1.0, 0.7)).eigenvalues,
                                                     selfadjoint_extension(*T, std::polar(1.0, 2.3)).eigenvalues)));
  // Clark basis of K_theta' pulled back through g is an orthonormal basis of S
  const ModelSpace K(fz.theta, tol);
  const ClarkFamily fam = clark_family(K, -fz.theta.at_infinity(), tol);
  const int n = S->dim();
  CMatrix G(n, n);
  std::vector<RationalFn> img;
  for (const KernelVector& v : fam.vectors) img.push_back(fz.g * v.fn);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) G(j, k) = l2_inner(img[k], img[j], tol);
  rep.checks.push_back(make_check("clark_orthonormal", "clark-basis", (G - CMatrix::Identity(n, n)).norm(), 1e-7));
  Rng rng(0x70617273ULL);
  const RationalFn f = S->function(random_coeffs(rng, n));
  double parseval = 0.0;
  for (const RationalFn& e : img) parseval += std::norm(l2_inner(f, e, tol));
  const double ff = l2_inner(f, f, tol).real();
  rep.checks.push_back(make_check("clark_parseval", "clark-basis", std::abs(parseval - ff) / ff, 1e-7));
  return rep;
}

inline RoundTripReport roundtrip_theorem(std::uint64_t seed, int degree, const Tolerances& tol = {}) {
  if (degree < 1 || degree > 6) throw Error(Errc::DomainViolation, "round trip degree must be in 1..6");
  Rng rng(seed);
  const bool with_u = rng.uniform() < 0.5, with_b = rng.uniform() < 0.75;
  const PlantedInstance inst = plant_instance(rng, degree, with_u, with_b, tol);
  return roundtrip_subspace(inst.basis, &inst.theta, tol);
}

// ---------------------------------------------------------------------------
// Disk extremal problem
// ---------------------------------------------------------------------------

/// Unit-norm maximizer of Re f(0) over span(basis) in H^2(D): proportional
/// to G^{-1} e with e_j = conj(b_j(0)).
inline RationalFn disk_extremal(const std::vector<RationalFn>& basis, int nodes = 512) {
  const int n = static_cast<int>(basis.size());
  CMatrix G(n, n);
  CVector e(n);
  for (int j = 0; j < n; ++j) {
    e(j) = std::conj(basis[j](0.0));
    for (int k = 0; k < n; ++k) G(j, k) = disk_inner(basis[k], basis[j], nodes);
  }
  // f = sum c_k b_k, Re f(0) = Re e^H c, ||f||^2 = c^H G c
  const CVector c = G.ldlt().solve(e);
  const double nrm = std::sqrt(std::max(0.0, (c.adjoint() * G * c)(0, 0).real()));
  return linear_combination(basis, c / nrm);
}

/// Kernel of K_phi on the disk at w: (1 - conj(phi(w)) phi(z))/(1 - conj(w) z).
inline RationalFn disk_kernel(const InnerFn& phi, cplx w) {
  const RationalFn num = RationalFn::constant(1.0) - std::conj(phi(w)) * phi.as_rational();
  const RationalFn den = w == cplx{} ? RationalFn::constant(1.0) : RationalFn::cauchy(1.0 / std::conj(w), -1.0 / std::conj(w));
  return (num * den).cancelled(1e-12);
}

}  // namespace nearsym
