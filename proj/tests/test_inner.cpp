#include <gtest/gtest.h>

#include "nearsym/generators.hpp"
#include "nearsym/modelspace.hpp"

using namespace nearsym;

namespace {

constexpr cplx i1{0.0, 1.0};

const InnerFn theta1({i1});

template <class Fn>
Errc error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return Errc::ConfigInvalid;
}

/// Random rational function of the disk variable, poles outside |w| <= 1.3.
RationalFn random_disk_rational(Rng& rng) {
  const int m = rng.uniform_int(0, 3);
  std::vector<cplx> poles;
  for (int k = 0; k < m; ++k) poles.push_back(std::polar(rng.uniform(1.3, 3.0), rng.uniform(-kPi, kPi)));
  std::vector<cplx> c;
  for (int k = 0; k <= rng.uniform_int(0, 3); ++k) c.push_back(rng.complex_normal());
  return RationalFn(Poly(c), poles);
}

}  // namespace

TEST(InnerFn, SingleZeroValues) {
  EXPECT_NEAR(std::abs(theta1(i1)), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(theta1(0.0) - cplx(-1.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(theta1(5.3)), 1.0, 1e-12);
  EXPECT_EQ(error_of([] { theta1(-i1); }), Errc::PoleEvaluation);
}

TEST(InnerFn, RejectsBadZeros) {
  EXPECT_EQ(error_of([] { InnerFn({cplx(0.0, -1.0)}); }), Errc::DomainViolation);
  EXPECT_EQ(error_of([] { InnerFn({cplx(1.5, 0.0)}, 1.0, Flavor::disk); }), Errc::DomainViolation);
}

TEST(InnerFn, UnimodularOnLineContractiveInside) {
  Rng rng(3);
  for (int t = 0; t < 20; ++t) {
    const InnerFn th = random_inner(rng, rng.uniform_int(1, 6));
    for (int k = 0; k < 64; ++k) {
      const double x = std::tan(-kPi / 2 + kPi * (k + 0.5) / 64);
      EXPECT_LE(std::abs(std::abs(th(x)) - 1.0), 1e-10);
    }
    for (double s : {1.0, 2.0, 5.0}) EXPECT_LT(std::abs(th(cplx(0, s))), 1.0);
    const RationalFn r = th.as_rational();
    EXPECT_NEAR(std::abs(r(cplx(0.3, 0.8)) - th(cplx(0.3, 0.8))), 0.0, 1e-12);
  }
}

TEST(InnerFn, DiskFlavorRationalForm) {
  const InnerFn phi({cplx(0.3, 0.2), 0.0}, cplx(0.0, 1.0), Flavor::disk);
  const RationalFn r = phi.as_rational();
  for (cplx w : {cplx(0.1, 0.5), cplx(-0.7, 0.1)}) EXPECT_NEAR(std::abs(r(w) - phi(w)), 0.0, 1e-13);
  EXPECT_NEAR(std::abs(phi(std::polar(1.0, 0.4))), 1.0, 1e-13);
}

TEST(Mobius, ClosedForms) {
  EXPECT_NEAR(std::abs(mobius(i1)), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(mobius_inv(-1.0)), 0.0, 1e-16);
  EXPECT_NEAR(std::abs(mobius(0.0) - cplx(-1.0)), 0.0, 1e-16);
  EXPECT_EQ(error_of([] { mobius(-i1); }), Errc::DomainViolation);
  EXPECT_EQ(error_of([] { mobius_inv(1.0); }), Errc::DomainViolation);
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const cplx w = std::polar(rng.uniform(0, 0.99), rng.uniform(-kPi, kPi));
    EXPECT_NEAR(std::abs(mobius(mobius_inv(w)) - w), 0.0, 1e-13);
    EXPECT_GT(mobius_inv(w).imag(), 0.0);
  }
}

TEST(CayleyLift, ConstantFunction) {
  const RationalFn g = cayley_lift(RationalFn::constant(1.0));
  // unit vector of H^2(D) goes to (i/sqrt(pi))/(z+i)
  for (cplx z : {cplx(0.4, 0.1), cplx(-2.0, 1.0)}) {
    EXPECT_NEAR(std::abs(g(z) - (i1 / std::sqrt(kPi)) / (z + i1)), 0.0, 1e-14);
  }
  EXPECT_NEAR(l2_norm(g), 1.0, 1e-12);
}

TEST(CayleyLift, NormOfIdentity) {
  const RationalFn f(Poly({0.0, 1.0}));
  const double disk = std::sqrt(disk_inner(f, f).real());
  EXPECT_NEAR(l2_norm(cayley_lift(f)), disk, 1e-9);
}

TEST(CayleyLift, PreservesInnerProducts) {
  Rng rng(21);
  for (int t = 0; t < 40; ++t) {
    const RationalFn f = random_disk_rational(rng), g = random_disk_rational(rng);
    const cplx disk = disk_inner(f, g);
    EXPECT_LE(std::abs(l2_inner(cayley_lift(f), cayley_lift(g)) - disk), 1e-8);
    // pointwise agreement with the defining formula
    const cplx z(0.3, 0.9);
    const cplx direct = (1.0 - mobius(z)) / (2.0 * std::sqrt(kPi)) * f(mobius(z));
    EXPECT_NEAR(std::abs(cayley_lift(f)(z) - direct), 0.0, 1e-12 * (1 + std::abs(direct)));
  }
}

TEST(CayleyLift, ModelSpaceImage) {
  // K_phi on the disk is spanned by 1/(1 - conj(a) w); its image lies in the
  // half-plane model space of phi o mu, whose zeros are mu^{-1}(a).
  const std::vector<cplx> a{cplx(0.2, 0.3), cplx(-0.5, 0.1), 0.0};
  std::vector<cplx> lifted_zeros;
  for (cplx ak : a) lifted_zeros.push_back(mobius_inv(ak));
  const ModelSpace target{InnerFn(lifted_zeros)};
  for (cplx ak : a) {
    const RationalFn disk_kernel = ak == cplx{} ? RationalFn::constant(1.0)
                                                : RationalFn::cauchy(1.0 / std::conj(ak), -1.0 / std::conj(ak));
    const Projection p = project(target, cayley_lift(disk_kernel));
    EXPECT_LE(std::abs(p.residual_norm2), 1e-12);
  }
  // phi(w) = w: constants go to span{1/(z+i)} = K_mu
  const ModelSpace kmu{InnerFn({i1})};
  EXPECT_LE(std::abs(project(kmu, cayley_lift(RationalFn::constant(1.0))).residual_norm2), 1e-13);
}

TEST(CayleyLift, RejectsPolesInDisk) {
  EXPECT_EQ(error_of([] { cayley_lift(RationalFn::cauchy(0.5)); }), Errc::NotH2Disk);
}

TEST(Crofoot, VanishingAtI) {
  const InnerFn th({i1, cplx(0.5, 1.5)}, std::polar(1.0, 0.3));
  const InnerFn tp = crofoot(th);
  for (cplx z : {cplx(0.1, 0.2), cplx(2.0, 0.0), cplx(-1.0, 3.0)}) EXPECT_NEAR(std::abs(tp(z) + th(z)), 0.0, 1e-12);
}

TEST(Crofoot, SingleZeroAtTwoI) {
  const InnerFn th({2.0 * i1});
  EXPECT_NEAR(std::abs(th(i1) - cplx(-1.0 / 3.0)), 0.0, 1e-15);
  const InnerFn tp = crofoot(th);
  EXPECT_NEAR(std::abs(tp(i1)), 0.0, 1e-10);
  for (cplx z : {cplx(0.3, 0.4), cplx(-2.0, 0.0)}) {
    const cplx want = (-1.0 / 3.0 - th(z)) / (1.0 + th(z) / 3.0);
    EXPECT_NEAR(std::abs(tp(z) - want), 0.0, 1e-12);
  }
}

TEST(Crofoot, DegreePreservedAndFormulaHolds) {
  Rng rng(99);
  for (int t = 0; t < 20; ++t) {
    const InnerFn th = random_inner(rng, rng.uniform_int(1, 5));
    const InnerFn tp = crofoot(th);
    EXPECT_EQ(tp.degree(), th.degree());
    EXPECT_LE(std::abs(tp(i1)), 1e-10);
    const cplx a = th(i1);
    const cplx z(0.7, 0.6);
    EXPECT_NEAR(std::abs(tp(z) - (a - th(z)) / (1.0 - std::conj(a) * th(z))), 0.0, 1e-9);
  }
}

TEST(Crofoot, InvolutionOnNormalForm) {
  Rng rng(5);
  for (int t = 0; t < 10; ++t) {
    const InnerFn tp = crofoot(random_inner(rng, 3));
    const InnerFn tpp = crofoot(tp);
    for (cplx z : {cplx(0.2, 0.3), cplx(1.5, 0.0)}) EXPECT_NEAR(std::abs(tpp(z) + tp(z)), 0.0, 1e-9);
    // equal model spaces: stacking both kernel bases keeps the rank at n
    const ModelSpace a(tp), b(tpp);
    std::vector<RationalFn> all = a.basis();
    all.insert(all.end(), b.basis().begin(), b.basis().end());
    const int m = static_cast<int>(all.size());
    CMatrix g(m, m);
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) g(j, k) = l2_inner(all[k], all[j]);
    Eigen::JacobiSVD<CMatrix> svd(g);
    const auto& s = svd.singularValues();
    EXPECT_GT(s(2) / s(3), 1e6);
  }
}

TEST(Crofoot, RejectsBoundaryCase) {
  EXPECT_EQ(error_of([] { crofoot(InnerFn({cplx(0.0, 1e-14)})); }), Errc::NotStrictlyContractiveAtI);
}

TEST(CrofootMultiplier, TrivialWhenVanishingAtI) {
  const RationalFn w = crofoot_multiplier(InnerFn({i1, cplx(1, 1)}));
  EXPECT_EQ(w.den_degree(), 0);
  EXPECT_NEAR(std::abs(w(0.3) - 1.0), 0.0, 1e-12);
}

TEST(CrofootMultiplier, IsometryOntoModelSpace) {
  for (const InnerFn& th : {InnerFn({2.0 * i1}), InnerFn({cplx(0.4, 0.5), cplx(-1, 2), cplx(1, 0.7)}, i1)}) {
    const InnerFn tp = crofoot(th);
    const RationalFn w = crofoot_multiplier(th);
    const ModelSpace src(tp), dst(th);
    const int n = src.dim();
    CMatrix g(n, n);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) g(j, k) = l2_inner(w * src.basis()[k], w * src.basis()[j]);
    EXPECT_LE((g - src.gram()).norm(), 1e-8 * src.gram().norm());
    for (int k = 0; k < n; ++k) EXPECT_LE(std::abs(project(dst, w * src.basis()[k]).residual_norm2), 1e-10);
    const RationalFn ki = kernel(tp, i1).fn;
    EXPECT_NEAR(l2_norm(w * ki), l2_norm(ki), 1e-8);
  }
}
