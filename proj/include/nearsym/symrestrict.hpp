#pragma once

// The symmetric restriction M_S of multiplication by x to a finite-dimensional
// subspace S of L^2(R): domain, deficiency vectors, dissipative extensions
// T_w, the self-adjoint extension family, and the regularity / simplicity
// predicates.
//
// Everything below works in orthonormal coordinates of S: with Gram matrix
// G = L L^H of the spanning functions b_k, the coordinate vector of
// f = sum c_k b_k is y = L^H c, and <f, g> = y_g^H y_f.

#include <algorithm>
#include <limits>
#include <memory>
#include <vector>

#include "ratfield.hpp"

namespace nearsym {

class SubspaceSpec {
 public:
  explicit SubspaceSpec(std::vector<RationalFn> basis, const Tolerances& tol = {}) : basis_(std::move(basis)) {
    const int n = static_cast<int>(basis_.size());
    if (n == 0) throw Error(Errc::DomainViolation, "empty basis");
    gram_.resize(n, n);
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        gram_(j, k) = l2_inner(basis_[k], basis_[j], tol);
        gram_(k, j) = std::conj(gram_(j, k));
      }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(gram_, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    kappa_ = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    if (!(kappa_ <= tol.kappa_max)) throw Error(Errc::IllConditioned, "basis Gram condition exceeds kappa_max");
    chol_ = gram_.llt().matrixL();
  }

  int dim() const { return static_cast<int>(basis_.size()); }
  const std::vector<RationalFn>& basis() const { return basis_; }
  const CMatrix& gram() const { return gram_; }
  double gram_condition() const { return kappa_; }
  /// Lower Cholesky factor L of the Gram matrix.
  const CMatrix& chol() const { return chol_; }

  /// Basis coefficients c from orthonormal coordinates y.
  CVector coeffs_of(const CVector& y) const {
    return chol_.adjoint().triangularView<Eigen::Upper>().solve(y);
  }
  /// Orthonormal coordinates y from basis coefficients c.
  CVector coords_of(const CVector& c) const { return chol_.adjoint() * c; }

  RationalFn function(const CVector& y) const { return linear_combination(basis_, coeffs_of(y)); }

  /// Values at z of the orthonormal basis e_k = sum_j b_j (L^{-H})_{jk}.
  Eigen::RowVectorXcd onb_values(cplx z) const {
    const int n = dim();
    Eigen::RowVectorXcd b(n);
    for (int k = 0; k < n; ++k) b(k) = basis_[k](z);
    // row b times L^{-H}
    CMatrix rhs = b.transpose();
    CMatrix sol = chol_.conjugate().triangularView<Eigen::Lower>().solve(rhs);
    return sol.transpose();
  }

  /// Orthonormal coordinates of an arbitrary L^2 function's projection:
  /// y_k = <f, e_k>.
  CVector project_coords(const RationalFn& f, const Tolerances& tol = {}) const {
    const int n = dim();
    CVector b(n);
    for (int j = 0; j < n; ++j) b(j) = l2_inner(f, basis_[j], tol);
    // <f, e_k> = sum_j conj((L^{-H})_{jk}) <f, b_j> = (L^{-1} b)_k
    return chol_.triangularView<Eigen::Lower>().solve(b);
  }

 private:
  std::vector<RationalFn> basis_;
  CMatrix gram_;
  CMatrix chol_;
  double kappa_ = 0.0;
};

namespace detail {

/// Orthonormal basis of the orthogonal complement of the column span of M
/// (n x m, full column rank assumed) in C^n.
inline CMatrix complement(const CMatrix& M, int n) {
  if (M.cols() == 0) return CMatrix::Identity(n, n);
  Eigen::HouseholderQR<CMatrix> qr(M);
  CMatrix full = qr.householderQ() * CMatrix::Identity(n, n);
  return full.rightCols(n - M.cols());
}

/// Makes <v, w> real positive by a phase rotation of v.
inline bool fix_phase(CVector& v, const CVector& w) {
  const cplx p = w.dot(v);  // w^H v = <v, w>
  if (std::abs(p) < 1e-12 * v.norm() * w.norm()) return false;
  v *= std::conj(p) / std::abs(p);
  return true;
}

}  // namespace detail

struct SymRestriction {
  std::shared_ptr<const SubspaceSpec> space;
  int n = 0;                 // dim S
  int nu = 0;                // dim D
  CMatrix Q;                 // n x nu orthonormal basis of D
  CMatrix TQ;                // x * Q in S-coordinates
  CVector defect_plus;       // spans ran(T + i)^perp
  CVector defect_minus;      // spans ran(T - i)^perp
  CVector domain_normal;     // unit vector orthogonal to D
  std::vector<double> domain_singular_values;
  double domain_gap = 0.0;   // smallest nonzero over largest zero singular value
  double symmetry_residual = 0.0;

  int codim() const { return n - nu; }
  /// <T f, g> - <f, T g> over D, as a matrix (should vanish).
  CMatrix symmetry_defect() const { return Q.adjoint() * TQ - TQ.adjoint() * Q; }
};

/// Partial-fraction coordinates of the orthonormal basis of S: rows are
/// (pole, order) pairs, columns the orthonormal basis functions.
struct PartialFractionFrame {
  std::vector<cplx> poles;
  std::vector<int> orders;  // multiplicity per pole
  std::vector<int> offset;  // first row of each pole
  CMatrix B;                // rows: coefficient of (z - p)^{-j}
};

inline PartialFractionFrame partial_fraction_frame(const SubspaceSpec& space) {
  PartialFractionFrame fr;
  const int n = space.dim();
  std::vector<std::vector<PartialFraction>> pf;
  for (const auto& b : space.basis()) {
    pf.push_back(partial_fractions(b));
    for (const auto& term : pf.back()) {
      const int m = static_cast<int>(term.coeffs.size());
      auto it = std::find_if(fr.poles.begin(), fr.poles.end(), [&](cplx p) { return same_point(p, term.pole); });
      if (it == fr.poles.end()) {
        fr.poles.push_back(term.pole);
        fr.orders.push_back(m);
      } else {
        int& o = fr.orders[static_cast<std::size_t>(it - fr.poles.begin())];
        o = std::max(o, m);
      }
    }
  }
  int rows = 0;
  for (int o : fr.orders) fr.offset.push_back(rows), rows += o;
  CMatrix Bc = CMatrix::Zero(rows, n);
  for (int k = 0; k < n; ++k)
    for (const auto& term : pf[k]) {
      const auto g = static_cast<std::size_t>(
          std::find_if(fr.poles.begin(), fr.poles.end(), [&](cplx p) { return same_point(p, term.pole); }) -
          fr.poles.begin());
      for (std::size_t j = 0; j < term.coeffs.size(); ++j) Bc(fr.offset[g] + static_cast<int>(j), k) = term.coeffs[j];
    }
  // orthonormal basis: B L^{-H}
  fr.B = space.chol().conjugate().triangularView<Eigen::Lower>().solve(Bc.transpose()).transpose();
  return fr;
}

/// Computes D = {f in S : x f in S}. In partial-fraction coordinates
/// x (z-p)^{-j} = (z-p)^{-j+1} + p (z-p)^{-j}, so x f = f' is linear in the
/// coefficients, with the single constraint that the constant term
/// (sum of the order-1 coefficients of f) vanishes. The null space of
/// [X B, -B; s B, 0] over (y, y') gives D and T on it.
inline SymRestriction build_restriction(const SubspaceSpec& space, const Tolerances& tol = {}) {
  (void)tol;
  SymRestriction T;
  T.space = std::make_shared<const SubspaceSpec>(space);
  const int n = space.dim();
  T.n = n;
  const PartialFractionFrame fr = partial_fraction_frame(space);
  const int rows = static_cast<int>(fr.B.rows());
  CMatrix XB = CMatrix::Zero(rows, n);
  Eigen::RowVectorXcd constant = Eigen::RowVectorXcd::Zero(n);
  for (std::size_t g = 0; g < fr.poles.size(); ++g) {
    const int o = fr.offset[g], m = fr.orders[g];
    for (int j = 0; j < m; ++j) {
      XB.row(o + j) = fr.poles[g] * fr.B.row(o + j);
      if (j + 1 < m) XB.row(o + j) += fr.B.row(o + j + 1);
    }
    constant += fr.B.row(o);
  }
  CMatrix A = CMatrix::Zero(rows + 1, 2 * n);
  A.topLeftCorner(rows, n) = XB;
  A.topRightCorner(rows, n) = -fr.B;
  A.bottomLeftCorner(1, n) = constant;
  // Rows of a pole that cancels in every basis function hold rounding only;
  // normalizing them would turn noise into a constraint.
  double row_max = 0.0;
  for (int r = 0; r < A.rows(); ++r) row_max = std::max(row_max, A.row(r).norm());
  for (int r = 0; r < A.rows(); ++r) {
    const double rn = A.row(r).norm();
    if (rn > 1e-10 * row_max) A.row(r) /= rn;
    else A.row(r).setZero();
  }
  Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  T.domain_singular_values.assign(s.data(), s.data() + s.size());
  const double cut = 1e-8 * s(0);
  int rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  const int nu = 2 * n - rank;
  T.nu = nu;
  const double smallest_kept = rank > 0 ? s(rank - 1) : s(0);
  const double largest_null = rank < s.size() ? s(rank) : 0.0;
  T.domain_gap = largest_null > 0.0 ? smallest_kept / largest_null : std::numeric_limits<double>::infinity();
  if (nu != n - 1) {
    throw Error(Errc::NoSymmetricRestriction,
                "domain codimension is " + std::to_string(n - nu) + ", deficiency indices are not (1,1)");
  }
  if (nu > 0) {
    const CMatrix null = svd.matrixV().rightCols(nu);
    const CMatrix Y = null.topRows(n), Yp = null.bottomRows(n);
    Eigen::HouseholderQR<CMatrix> qr(Y);
    const CMatrix R = qr.matrixQR().topRows(nu).triangularView<Eigen::Upper>();
    T.Q = qr.householderQ() * CMatrix::Identity(n, nu);
    // Y = Q R  =>  T Q = Y' R^{-1}
    T.TQ = R.transpose().triangularView<Eigen::Lower>().solve(Yp.transpose()).transpose();
  } else {
    T.Q = CMatrix(n, 0);
    T.TQ = CMatrix(n, 0);
  }
  T.symmetry_residual = nu > 0 ? T.symmetry_defect().norm() : 0.0;
  if (nu > 0) {
    // Rounding in the orthonormal coordinates (of order kappa(G) * eps)
    // breaks <Tf, g> = <f, Tg> slightly; restore it on the compression so
    // that the Cayley transforms below are exactly unitary.
    const CMatrix H = T.Q.adjoint() * T.TQ;
    T.TQ += T.Q * (0.5 * (H.adjoint() - H));
  }

  const CMatrix plus = detail::complement(T.TQ + kI * T.Q, n);
  const CMatrix minus = detail::complement(T.TQ - kI * T.Q, n);
  T.defect_plus = plus.col(0);
  T.defect_minus = minus.col(0);
  T.domain_normal = detail::complement(T.Q, n).col(0);
  // gauge: <defect, b_1> real positive (next basis element if degenerate)
  for (int k = 0; k < n; ++k) {
    const CVector bk = space.chol().adjoint().col(k);
    if (detail::fix_phase(T.defect_plus, bk)) break;
    if (k == n - 1) throw Error(Errc::GaugeDegenerate, "defect orthogonal to every basis element");
  }
  for (int k = 0; k < n; ++k) {
    const CVector bk = space.chol().adjoint().col(k);
    if (detail::fix_phase(T.defect_minus, bk)) break;
  }
  detail::fix_phase(T.domain_normal, space.chol().adjoint().col(0));
  return T;
}

/// Unit vector spanning ran(T - conj(z))^perp.
inline CVector defect_at(const SymRestriction& T, cplx z) {
  return detail::complement(T.TQ - std::conj(z) * T.Q, T.n).col(0);
}

// ---------------------------------------------------------------------------
// Extensions
// ---------------------------------------------------------------------------

struct ExtensionTw {
  cplx w;
  CMatrix dom;  // n x (nu+1): [Q, phi_w]
  CMatrix act;  // n x (nu+1): [TQ, w phi_w]
  CVector apply(const CVector& a) const { return act * a; }
};

inline ExtensionTw extension_Tw(const SymRestriction& T, cplx w, const CVector& phi_w) {
  const CVector orth = (T.TQ - std::conj(w) * T.Q).adjoint() * phi_w;
  const double scale = std::max(1.0, (T.TQ - std::conj(w) * T.Q).norm()) * phi_w.norm();
  if (phi_w.norm() == 0.0 || orth.norm() > 1e-8 * scale) {
    throw Error(Errc::NotDefectVector, "phi_w is not orthogonal to ran(T - conj w)");
  }
  ExtensionTw ext;
  ext.w = w;
  ext.dom.resize(T.n, T.nu + 1);
  ext.act.resize(T.n, T.nu + 1);
  ext.dom << T.Q, phi_w;
  ext.act << T.TQ, w * phi_w;
  return ext;
}

/// The parameter beta_inf for which the Cayley-transform extension is not
/// densely defined: U e = e for the unit normal e of D.
inline cplx beta_at_infinity(const SymRestriction& T) {
  const cplx num = T.defect_minus.dot(T.domain_normal);  // <e, u->
  const cplx den = T.defect_plus.dot(T.domain_normal);   // <e, u+>
  if (std::abs(den) < 1e-14) throw Error(Errc::GaugeDegenerate, "domain normal orthogonal to the defect");
  return num / den;
}

struct SelfAdjointExtension {
  cplx alpha;
  CMatrix A;                    // Hermitian, orthonormal S-coordinates
  CMatrix U;                    // Cayley transform (A - i)(A + i)^{-1}
  Eigen::VectorXd eigenvalues;  // ascending
  CMatrix eigenvectors;
  double hermiticity_residual = 0.0;
  double restriction_residual = 0.0;  // ||A Q - T Q||
};

/// Self-adjoint extension with Cayley transform U = V on ran(T + i) and
/// U u+ = alpha beta_inf u-. alpha = 1 is the non-densely-defined member.
inline SelfAdjointExtension selfadjoint_extension(const SymRestriction& T, cplx alpha) {
  if (std::abs(std::abs(alpha) - 1.0) > 1e-10) throw Error(Errc::DomainViolation, "alpha must be unimodular");
  if (std::abs(alpha - 1.0) < 1e-8)
    throw Error(Errc::NonDenselyDefinedExtension, "alpha = 1 gives the extension that is not densely defined");
  const int n = T.n, nu = T.nu;
  const cplx beta = alpha * beta_at_infinity(T);
  CMatrix from(n, n), to(n, n);
  from << T.TQ + kI * T.Q, T.defect_plus;
  to << T.TQ - kI * T.Q, beta * T.defect_minus;
  (void)nu;
  SelfAdjointExtension ext;
  ext.alpha = alpha;
  ext.U = from.transpose().partialPivLu().solve(to.transpose()).transpose();
  const CMatrix I = CMatrix::Identity(n, n);
  // A = i (I + U)(I - U)^{-1}
  const CMatrix lhs = (I - ext.U).transpose();
  CMatrix A = (kI * lhs.partialPivLu().solve(((I + ext.U)).transpose())).transpose();
  ext.hermiticity_residual = (A - A.adjoint()).norm();
  ext.restriction_residual = T.nu > 0 ? (A * T.Q - T.TQ).norm() : 0.0;
  ext.A = 0.5 * (A + A.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(ext.A);
  ext.eigenvalues = es.eigenvalues();
  ext.eigenvectors = es.eigenvectors();
  return ext;
}

/// Alias with the spec-level name; returns only the Hermitian matrix.
inline CMatrix selfadjoint_extensions(const SymRestriction& T, cplx alpha) {
  return selfadjoint_extension(T, alpha).A;
}

// ---------------------------------------------------------------------------
// Predicates
// ---------------------------------------------------------------------------

struct RegularityReport {
  std::vector<cplx> grid;
  std::vector<double> sigma_min;  // +inf when D = {0}
  std::vector<double> pairing;    // |<psi_i, psi_z>| with unit vectors
  double min_sigma = std::numeric_limits<double>::infinity();
  double min_pairing = std::numeric_limits<double>::infinity();
  bool regular = true;
  std::vector<cplx> failures;
};

inline RegularityReport regularity_check(const SymRestriction& T, const std::vector<cplx>& grid,
                                         const Tolerances& tol = {}) {
  RegularityReport rep;
  rep.grid = grid;
  const CVector psi_i = T.defect_plus;
  for (cplx z : grid) {
    double smin = std::numeric_limits<double>::infinity();
    if (T.nu > 0) {
      Eigen::JacobiSVD<CMatrix> svd(T.TQ - z * T.Q);
      smin = svd.singularValues()(T.nu - 1);
    }
    const CVector psi_z = defect_at(T, z);
    const double pair = std::abs(psi_z.dot(psi_i));
    rep.sigma_min.push_back(smin);
    rep.pairing.push_back(pair);
    rep.min_sigma = std::min(rep.min_sigma, smin);
    rep.min_pairing = std::min(rep.min_pairing, pair);
    if (smin < tol.delta_reg || pair < tol.delta_pair) {
      rep.regular = false;
      rep.failures.push_back(z);
    }
  }
  return rep;
}

/// The closed upper half-plane grid [-5,5] x [0,3], 15 x 15.
inline std::vector<cplx> standard_regularity_grid(int nx = 15, int ny = 15) {
  std::vector<cplx> g;
  for (int a = 0; a < nx; ++a)
    for (int b = 0; b < ny; ++b) g.emplace_back(-5.0 + 10.0 * a / (nx - 1), 3.0 * b / (ny - 1));
  return g;
}

/// No eigenvector of A_{-1} is simultaneously an eigenvector of A_i lying in D.
inline bool simplicity_check(const SymRestriction& T) {
  if (T.nu == 0) return true;
  const SelfAdjointExtension a = selfadjoint_extension(T, -1.0);
  const SelfAdjointExtension b = selfadjoint_extension(T, kI);
  for (int k = 0; k < T.n; ++k) {
    const CVector v = a.eigenvectors.col(k);
    const cplx lam = v.dot(b.A * v);
    const bool shared = (b.A * v - lam * v).norm() < 1e-8;
    const bool in_domain = (v - T.Q * (T.Q.adjoint() * v)).norm() < 1e-8;
    if (shared && in_domain) return false;
  }
  return true;
}

/// Strict interlacing of two ascending spectra of equal length.
inline bool strictly_interlaced(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::Index n = a.size();
  if (b.size() != n) return false;
  std::vector<std::pair<double, int>> all;
  for (Eigen::Index k = 0; k < n; ++k) all.push_back({a(k), 0}), all.push_back({b(k), 1});
  std::sort(all.begin(), all.end());
  for (std::size_t k = 1; k < all.size(); ++k) {
    if (all[k].second == all[k - 1].second) return false;
    if (all[k].first - all[k - 1].first <= 0.0) return false;
  }
  return true;
}

}  // namespace nearsym
