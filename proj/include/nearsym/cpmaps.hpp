#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <algorithm>
#include <cmath>
#include <vector>

#include "nearsym/errors.hpp"
#include "nearsym/random.hpp"
#include "nearsym/ratfield.hpp"
#include "nearsym/report.hpp"

namespace nearsym {

/// Linear map Phi: M_in -> M_out stored through its Choi matrix
/// C = sum_{ij} E_ij (x) Phi(E_ij); block (i, j) of size dim_out is Phi(E_ij).
struct FiniteChannel {
  int dim_in = 0;
  int dim_out = 0;
  CMatrix choi;

  CMatrix block(int i, int j) const { return choi.block(i * dim_out, j * dim_out, dim_out, dim_out); }

  CMatrix operator()(const CMatrix& A) const {
    CMatrix out = CMatrix::Zero(dim_out, dim_out);
    for (int i = 0; i < dim_in; ++i)
      for (int j = 0; j < dim_in; ++j)
        if (A(i, j) != cplx{}) out += A(i, j) * block(i, j);
    return out;
  }
};

struct KrausSet {
  std::vector<CMatrix> ops;  // dim_out x dim_in

  CMatrix operator()(const CMatrix& A) const {
    CMatrix out = CMatrix::Zero(ops.front().rows(), ops.front().rows());
    for (const CMatrix& K : ops) out += K * A * K.adjoint();
    return out;
  }
};

/// V: C^dim_out -> C^dim_in (x) C^k with V^*(A (x) 1)V = Phi(A); index i * k + l.
struct StinespringDilation {
  CMatrix V;
  int multiplicity = 0;
};

inline CMatrix matrix_unit(int n, int i, int j) {
  CMatrix E = CMatrix::Zero(n, n);
  E(i, j) = 1.0;
  return E;
}

inline FiniteChannel choi_of(const KrausSet& ks) {
  FiniteChannel ch;
  ch.dim_out = static_cast<int>(ks.ops.front().rows());
  ch.dim_in = static_cast<int>(ks.ops.front().cols());
  const int d = ch.dim_in * ch.dim_out;
  ch.choi = CMatrix::Zero(d, d);
  for (const CMatrix& K : ks.ops) {
    const Eigen::Map<const CVector> w(K.data(), d);  // column-major vec: index i * dim_out + a = K(a, i)
    ch.choi += w * w.adjoint();
  }
  return ch;
}

/// Channel from its action on matrix units.
template <class Map>
FiniteChannel channel_from_action(int dim_in, int dim_out, Map&& phi) {
  FiniteChannel ch{dim_in, dim_out, CMatrix::Zero(dim_in * dim_out, dim_in * dim_out)};
  for (int i = 0; i < dim_in; ++i)
    for (int j = 0; j < dim_in; ++j) ch.choi.block(i * dim_out, j * dim_out, dim_out, dim_out) = phi(matrix_unit(dim_in, i, j));
  return ch;
}

inline double choi_min_eigenvalue(const FiniteChannel& ch) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (ch.choi + ch.choi.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline bool is_cp(const FiniteChannel& ch) { return choi_min_eigenvalue(ch) >= -1e-10 * std::max(1.0, ch.choi.norm()); }

inline double unitality_defect(const FiniteChannel& ch) {
  return (ch(CMatrix::Identity(ch.dim_in, ch.dim_in)) - CMatrix::Identity(ch.dim_out, ch.dim_out)).norm();
}

/// || tr Phi(E_ij) - delta_ij || over all matrix units.
inline double trace_preservation_defect(const FiniteChannel& ch) {
  CMatrix tr(ch.dim_in, ch.dim_in);
  for (int i = 0; i < ch.dim_in; ++i)
    for (int j = 0; j < ch.dim_in; ++j) tr(i, j) = ch.block(i, j).trace();
  return (tr - CMatrix::Identity(ch.dim_in, ch.dim_in)).norm();
}

inline bool is_unital(const FiniteChannel& ch, double tol = 1e-9) { return unitality_defect(ch) <= tol; }
inline bool is_trace_preserving(const FiniteChannel& ch, double tol = 1e-9) { return trace_preservation_defect(ch) <= tol; }

/// Kraus operators from the eigenvectors of the Choi matrix above the cutoff.
inline KrausSet kraus_from_choi(const FiniteChannel& ch, double cutoff = 1e-12) {
  const CMatrix H = 0.5 * (ch.choi + ch.choi.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  const auto& lam = es.eigenvalues();
  const double scale = std::max(1.0, std::abs(lam(lam.size() - 1)));
  if (lam(0) < -1e-10 * scale) throw Error(Errc::NotPSD, "Choi matrix has a negative eigenvalue");
  KrausSet ks;
  for (Eigen::Index k = lam.size() - 1; k >= 0; --k) {
    if (lam(k) <= cutoff * scale) break;
    const CVector w = std::sqrt(lam(k)) * es.eigenvectors().col(k);
    ks.ops.push_back(Eigen::Map<const CMatrix>(w.data(), ch.dim_out, ch.dim_in));
  }
  if (ks.ops.empty()) ks.ops.push_back(CMatrix::Zero(ch.dim_out, ch.dim_in));
  return ks;
}

/// Phi^dagger: M_out -> M_in with tr(T Phi(A)) = tr(Phi^dagger(T) A).
inline FiniteChannel dual(const FiniteChannel& ch) {
  return channel_from_action(ch.dim_out, ch.dim_in, [&](const CMatrix& T) {
    CMatrix out(ch.dim_in, ch.dim_in);
    for (int i = 0; i < ch.dim_in; ++i)
      for (int j = 0; j < ch.dim_in; ++j) out(j, i) = (T * ch.block(i, j)).trace();
    return out;
  });
}

/// (outer o inner)(A) = outer(inner(A)).
inline FiniteChannel compose(const FiniteChannel& outer, const FiniteChannel& inner) {
  if (outer.dim_in != inner.dim_out) throw Error(Errc::DomainViolation, "composition dimensions differ");
  return channel_from_action(inner.dim_in, outer.dim_out, [&](const CMatrix& A) { return outer(inner(A)); });
}

inline StinespringDilation stinespring_from_kraus(const KrausSet& ks) {
  const int k = static_cast<int>(ks.ops.size());
  const int dout = static_cast<int>(ks.ops.front().rows()), din = static_cast<int>(ks.ops.front().cols());
  StinespringDilation st;
  st.multiplicity = k;
  st.V = CMatrix::Zero(din * k, dout);
  for (int l = 0; l < k; ++l) {
    const CMatrix Ks = ks.ops[l].adjoint();
    for (int i = 0; i < din; ++i) st.V.row(i * k + l) = Ks.row(i);
  }
  return st;
}

inline CMatrix ampliate(const CMatrix& A, int k) {
  return Eigen::kroneckerProduct(A, CMatrix::Identity(k, k));
}

inline StinespringDilation minimal_stinespring(const FiniteChannel& ch) {
  if (!is_unital(ch)) throw Error(Errc::NotUnital, "isometric Stinespring form needs a unital map");
  return stinespring_from_kraus(kraus_from_choi(ch));
}

/// Largest |V^*(E_ij (x) 1)V - Phi(E_ij)| over matrix units.
inline double dilation_residual(const FiniteChannel& ch, const StinespringDilation& st) {
  double worst = 0.0;
  for (int i = 0; i < ch.dim_in; ++i)
    for (int j = 0; j < ch.dim_in; ++j) {
      const CMatrix lhs = st.V.adjoint() * ampliate(matrix_unit(ch.dim_in, i, j), st.multiplicity) * st.V;
      worst = std::max(worst, (lhs - ch.block(i, j)).norm());
    }
  return worst;
}

inline int numerical_rank(const CMatrix& M, double rel = 1e-10) {
  if (M.size() == 0) return 0;
  Eigen::JacobiSVD<CMatrix> svd(M);
  const auto& s = svd.singularValues();
  int r = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > rel * std::max(s(0), 1e-300)) ++r;
  return s(0) == 0.0 ? 0 : r;
}

/// Columns (A (x) 1) V e_b over matrix units A and basis vectors e_b.
inline CMatrix dilation_span(const StinespringDilation& st, int dim_in, bool diagonal_only = false) {
  std::vector<CVector> cols;
  for (int i = 0; i < dim_in; ++i)
    for (int j = 0; j < dim_in; ++j) {
      if (diagonal_only && i != j) continue;
      const CMatrix AV = ampliate(matrix_unit(dim_in, i, j), st.multiplicity) * st.V;
      for (Eigen::Index b = 0; b < AV.cols(); ++b) cols.push_back(AV.col(b));
    }
  CMatrix M(st.V.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) M.col(static_cast<Eigen::Index>(c)) = cols[c];
  return M;
}

// ---------------------------------------------------------------------------
// Effects
// ---------------------------------------------------------------------------

struct EffectRelation {
  CMatrix U;                    // l x k, sum_i U_ji E_i^* = F_j^*
  double solve_residual = 0.0;
  double isometry_residual = 0.0;  // ||U^* U - I_k||
  int span_rank_1 = 0, span_rank_2 = 0, span_rank_joint = 0;
  bool same_span() const { return span_rank_1 == span_rank_joint && span_rank_2 == span_rank_joint; }
};

inline CMatrix vectorized(const std::vector<CMatrix>& ops) {
  const Eigen::Index d = ops.front().size();
  CMatrix M(d, static_cast<Eigen::Index>(ops.size()));
  for (std::size_t k = 0; k < ops.size(); ++k) M.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const CVector>(ops[k].data(), d);
  return M;
}

inline double choi_distance(const FiniteChannel& a, const FiniteChannel& b) {
  if (a.dim_in != b.dim_in || a.dim_out != b.dim_out) return std::numeric_limits<double>::infinity();
  return (a.choi - b.choi).norm();
}

/// Scalar matrix relating two Kraus decompositions of one channel.
inline EffectRelation effect_relation(const KrausSet& K1, const KrausSet& K2) {
  if (choi_distance(choi_of(K1), choi_of(K2)) > 1e-8) throw Error(Errc::ChannelMismatch, "Kraus sets define different channels");
  const CMatrix E = vectorized(K1.ops), F = vectorized(K2.ops);
  // sum_i conj(U_ji) vec(E_i) = vec(F_j)
  const Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(E);
  const CMatrix C = cod.solve(F);  // k x l, C(i, j) = conj(U_ji)
  EffectRelation rel;
  rel.U = C.adjoint();
  rel.solve_residual = (E * C - F).norm() / std::max(1.0, F.norm());
  const Eigen::Index k = E.cols();
  rel.isometry_residual = (rel.U.adjoint() * rel.U - CMatrix::Identity(k, k)).norm();
  CMatrix joint(E.rows(), E.cols() + F.cols());
  joint << E, F;
  rel.span_rank_1 = numerical_rank(E);
  rel.span_rank_2 = numerical_rank(F);
  rel.span_rank_joint = numerical_rank(joint);
  if (rel.solve_residual > 1e-7) throw Error(Errc::NoIsometry, "effects of the second set are not in the span of the first");
  return rel;
}

/// Diagonal-algebra fixing channel: effects must be diagonal and the map TP.
inline std::vector<Check> verify_commutant_effects(const FiniteChannel& theta) {
  const int n = theta.dim_in;
  if (theta.dim_out != n) throw Error(Errc::NotFixingAlgebra, "channel must act on one matrix algebra");
  double fix = 0.0;
  for (int k = 0; k < n; ++k) fix = std::max(fix, (theta(matrix_unit(n, k, k)) - matrix_unit(n, k, k)).norm());
  if (fix > 1e-9 || !is_unital(theta)) throw Error(Errc::NotFixingAlgebra, "channel does not fix the diagonal algebra");
  double offdiag = 0.0;
  for (const CMatrix& K : kraus_from_choi(theta).ops) {
    CMatrix off = K;
    off.diagonal().setZero();
    offdiag = std::max(offdiag, off.norm());
  }
  return {make_check("effects_diagonal", "fixed-algebra-effects", offdiag, 1e-8),
          make_check("trace_preserving", "fixed-algebra-effects", trace_preservation_defect(theta), 1e-9)};
}

// ---------------------------------------------------------------------------
// Dilation factorization
// ---------------------------------------------------------------------------

enum class Algebra { full, diagonal };

/// Minimal Stinespring space over the full or diagonal algebra: K is the
/// span of pi(A) V h; pi(A) = (A (x) 1)|_K.
struct MinimalDilation {
  StinespringDilation st;
  CMatrix K;                      // orthonormal basis of the dilation space
  std::vector<int> multiplicities;  // diagonal algebra: rank of (E_kk (x) 1) K per k
};

inline MinimalDilation minimal_dilation(const FiniteChannel& ch, Algebra alg) {
  MinimalDilation md;
  md.st = stinespring_from_kraus(kraus_from_choi(ch));
  const CMatrix span = dilation_span(md.st, ch.dim_in, alg == Algebra::diagonal);
  Eigen::JacobiSVD<CMatrix> svd(span, Eigen::ComputeThinU);
  const int r = numerical_rank(span);
  md.K = svd.matrixU().leftCols(r);
  if (alg == Algebra::diagonal)
    for (int k = 0; k < ch.dim_in; ++k)
      md.multiplicities.push_back(numerical_rank(ampliate(matrix_unit(ch.dim_in, k, k), md.st.multiplicity) * md.K));
  return md;
}

/// pi(A) restricted to K, in the basis K.
inline CMatrix represent(const MinimalDilation& md, const CMatrix& A) {
  return md.K.adjoint() * ampliate(A, md.st.multiplicity) * md.K;
}

struct FactorizationReport {
  MinimalDilation d1, d2;
  int kernel_dim = 0;            // dim ker pi_1 within the algebra
  double kernel_inclusion = 0.0; // max |pi_2(A)| over unit A in ker pi_1
  double connecting_residual = 0.0;  // least-squares fit of pi_2 as a linear function of pi_1
  double contractivity = 0.0;    // max (|pi_2(A)| - |pi_1(A)|)_+ over samples
  std::vector<Check> checks;
};

/// Phi2 = Phi o Phi1: the dilation of Phi2 factors through that of Phi1.
inline FactorizationReport verify_dilation_factorization(const FiniteChannel& phi1, const FiniteChannel& phi2,
                                                         const FiniteChannel& phi, Algebra alg = Algebra::full,
                                                         std::uint64_t seed = 7) {
  if (choi_distance(phi2, compose(phi, phi1)) > 1e-8) throw Error(Errc::NotComposed, "phi2 is not phi o phi1");
  FactorizationReport rep;
  rep.d1 = minimal_dilation(phi1, alg);
  rep.d2 = minimal_dilation(phi2, alg);
  const int n = phi1.dim_in;
  std::vector<CMatrix> units;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (alg == Algebra::full || i == j) units.push_back(matrix_unit(n, i, j));
  const Eigen::Index m = static_cast<Eigen::Index>(units.size());
  // pi_1 and pi_2 as linear maps from algebra coordinates to vectorized operators
  CMatrix P1(rep.d1.K.cols() * rep.d1.K.cols(), m), P2(rep.d2.K.cols() * rep.d2.K.cols(), m);
  for (Eigen::Index c = 0; c < m; ++c) {
    const CMatrix a = represent(rep.d1, units[c]), b = represent(rep.d2, units[c]);
    P1.col(c) = Eigen::Map<const CVector>(a.data(), a.size());
    P2.col(c) = Eigen::Map<const CVector>(b.data(), b.size());
  }
  Eigen::JacobiSVD<CMatrix> svd(P1, Eigen::ComputeFullV);
  const int r = numerical_rank(P1);
  rep.kernel_dim = static_cast<int>(m) - r;
  if (rep.kernel_dim > 0) rep.kernel_inclusion = (P2 * svd.matrixV().rightCols(rep.kernel_dim)).norm();
  // connecting map L with L P1 = P2
  const CMatrix L = P1.transpose().completeOrthogonalDecomposition().solve(P2.transpose()).transpose();
  rep.connecting_residual = (L * P1 - P2).norm() / std::max(1.0, P2.norm());
  Rng rng(seed);
  for (int t = 0; t < 20; ++t) {
    CMatrix A = CMatrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (alg == Algebra::full || i == j) A(i, j) = rng.complex_normal();
    const double n1 = represent(rep.d1, A).operatorNorm(), n2 = represent(rep.d2, A).operatorNorm();
    rep.contractivity = std::max(rep.contractivity, n2 - n1);
  }
  rep.checks = {make_check("kernel_inclusion", "dilation-factorization", rep.kernel_inclusion, 1e-8),
                make_check("connecting_map", "dilation-factorization", rep.connecting_residual, 1e-8),
                make_check("connecting_contractive", "dilation-factorization", std::max(0.0, rep.contractivity), 1e-8)};
  return rep;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

inline CMatrix random_matrix(Rng& rng, int rows, int cols) {
  CMatrix M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = rng.complex_normal();
  return M;
}

/// Haar-like unitary from the QR factor of a complex Gaussian matrix.
inline CMatrix random_unitary(Rng& rng, int n) {
  const CMatrix G = random_matrix(rng, n, n);
  Eigen::HouseholderQR<CMatrix> qr(G);
  CMatrix Q = qr.householderQ() * CMatrix::Identity(n, n);
  const CMatrix R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const cplx d = R(k, k);
    if (std::abs(d) > 0.0) Q.col(k) *= d / std::abs(d);
  }
  return Q;
}

inline FiniteChannel random_psd_choi(Rng& rng, int dim_in, int dim_out, int rank) {
  const CMatrix W = random_matrix(rng, dim_in * dim_out, rank);
  return {dim_in, dim_out, W * W.adjoint()};
}

/// Unital channel with `count` Kraus operators: K_l = S^{-1/2} G_l with S = sum G G^*.
/// count is raised to ceil(dim_out / dim_in) so that S is invertible.
inline KrausSet random_unital_kraus(Rng& rng, int dim_in, int dim_out, int count) {
  count = std::max(count, (dim_out + dim_in - 1) / dim_in);
  std::vector<CMatrix> G;
  CMatrix S = CMatrix::Zero(dim_out, dim_out);
  for (int l = 0; l < count; ++l) {
    G.push_back(random_matrix(rng, dim_out, dim_in));
    S += G.back() * G.back().adjoint();
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(S);
  const CMatrix isqrt = es.operatorInverseSqrt();
  KrausSet ks;
  for (const CMatrix& g : G) ks.ops.push_back(isqrt * g);
  return ks;
}

inline FiniteChannel unitary_conjugation(const CMatrix& U) {
  return choi_of(KrausSet{{U}});
}

}  // namespace nearsym
