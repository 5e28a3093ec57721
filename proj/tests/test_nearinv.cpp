#include <gtest/gtest.h>

#include "nearsym/generators.hpp"
#include "nearsym/modelspace.hpp"
#include "nearsym/nearinv.hpp"

using namespace nearsym;

namespace {

SubspaceSpec span_of(std::vector<RationalFn> fns) { return SubspaceSpec(std::move(fns)); }

SubspaceSpec codim_two_control() {
  return span_of({RationalFn::cauchy(-kI), RationalFn::cauchy_power(-kI, 3)});
}

void expect_all_pass(const RoundTripReport& rep) {
  for (const Check& c : rep.checks) EXPECT_TRUE(c.pass) << c.name << " residual " << c.residual << " tol " << c.tolerance;
}

}  // namespace

TEST(Multiplier, ZeroSymbolGivesOne) {
  const InnerFn th({kI, cplx(1, 1)});
  const RationalFn h = isometric_multiplier(RationalFn(), th);
  EXPECT_NEAR(std::abs(h(cplx(0.3, 0.2)) - 1.0), 0.0, 1e-14);
}

TEST(Multiplier, IsometricOnModelSpace) {
  Rng rng(11);
  for (int t = 0; t < 5; ++t) {
    const InnerFn th = random_inner_vanishing_at_i(rng, 1 + t % 3);
    const RationalFn b = random_contraction(rng);
    EXPECT_NEAR(sup_on_grid(b, 4096), 0.6, 1e-9);
    const RationalFn h = isometric_multiplier(b, th);
    EXPECT_TRUE(h_over_z_plus_i_in_h2(h));
    EXPECT_LT(multiplier_gram_residual(h, ModelSpace(th)), 1e-7);
  }
}

TEST(Multiplier, RejectsNonContraction) {
  const InnerFn th({kI});
  const RationalFn b(Poly({cplx(1.2)}));
  EXPECT_THROW(
      {
        try {
          isometric_multiplier(b, th);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), Errc::ContractivityViolation);
          throw;
        }
      },
      Error);
  const RationalFn up = RationalFn::cauchy(cplx(0, 1), 0.1);
  EXPECT_THROW(isometric_multiplier(up, th), Error);
}

TEST(NearInvariance, ModelSpaceIsNearlyInvariant) {
  Rng rng(3);
  const ModelSpace K(random_inner(rng, 3));
  const NearInvReport rep = check_nearly_invariant(SubspaceSpec(K.basis()));
  EXPECT_TRUE(rep.is_nearly_invariant);
  EXPECT_LT(rep.max_residual, 1e-10);
  EXPECT_FALSE(rep.witness.has_value());
}

TEST(NearInvariance, TwoPoleFixtureIsNearlyInvariant) {
  const NearInvReport rep = check_nearly_invariant(span_of({RationalFn::cauchy(-kI), RationalFn::cauchy(-2.0 * kI)}));
  EXPECT_TRUE(rep.is_nearly_invariant);
}

TEST(NearInvariance, CodimTwoControlHasWitness) {
  const SubspaceSpec S = codim_two_control();
  const NearInvReport rep = check_nearly_invariant(S);
  EXPECT_FALSE(rep.is_nearly_invariant);
  ASSERT_TRUE(rep.witness.has_value());
  EXPECT_LT(std::abs((*rep.witness)(kI)), 1e-12);
  EXPECT_GT(rep.max_residual, 1e-3);
  EXPECT_THROW(
      {
        try {
          factor_nearly_invariant(S);
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), Errc::NotRestrictable);
          throw;
        }
      },
      Error);
}

TEST(Factorization, ModelSpaceGivesUnimodularConstant) {
  Rng rng(5);
  const InnerFn th = random_inner_vanishing_at_i(rng, 3);
  const Factorization fz = factor_nearly_invariant(SubspaceSpec(ModelSpace(th).basis()));
  EXPECT_LT(zero_set_distance(th.zeros(), fz.theta.zeros()), 1e-8);
  EXPECT_LT(fz.theta_at_i, 1e-12);
  EXPECT_NEAR(std::abs(fz.g(0.7)), 1.0, 1e-9);
  EXPECT_NEAR(std::abs(fz.g(-3.1)), 1.0, 1e-9);
  EXPECT_TRUE(check_seminvariant(fz).seminvariant);
}

TEST(Factorization, RecoversPlantedData) {
  Rng rng(21);
  for (int t = 0; t < 6; ++t) {
    const PlantedInstance inst = plant_instance(rng, 1 + t % 4, t % 2 == 0, t % 3 != 0);
    const Factorization fz = factor_nearly_invariant(SubspaceSpec(inst.basis));
    EXPECT_LT(zero_set_distance(inst.theta.zeros(), fz.theta.zeros()), 1e-6) << t;
    EXPECT_LT(fz.theta_at_i, 1e-8);
    EXPECT_LT(fz.gram_residual, 1e-7);
    EXPECT_LT(fz.image_residual, 1e-7);
    // u is unimodular and h is outer-like
    EXPECT_NEAR(std::abs(fz.u(0.4)), 1.0, 1e-9);
    for (cplx p : fz.h.poles()) EXPECT_LT(p.imag(), 0.0);
    EXPECT_GT(fz.h(2.0 * kI).real(), 0.0);
    EXPECT_NEAR(fz.h(2.0 * kI).imag(), 0.0, 1e-9);
  }
}

TEST(Factorization, UnimodularPartMatchesPlantedUpToPhase) {
  Rng rng(8);
  const PlantedInstance inst = plant_instance(rng, 2, true, false);
  const Factorization fz = factor_nearly_invariant(SubspaceSpec(inst.basis));
  // with h = 1 the recovered g is the planted u times a unimodular constant
  const cplx c = fz.g(0.0) / inst.u(0.0);
  EXPECT_NEAR(std::abs(c), 1.0, 1e-8);
  for (double x : {-2.0, 0.5, 3.0}) EXPECT_LT(std::abs(fz.g(x) - c * inst.u(x)), 1e-8);
}

TEST(Seminvariance, ClassifiesByMultiplier) {
  Rng rng(31);
  for (int t = 0; t < 8; ++t) {
    const bool with_b = t % 2 == 1;
    const PlantedInstance inst = plant_instance(rng, 1 + t % 3, true, with_b);
    const Factorization fz = factor_nearly_invariant(SubspaceSpec(inst.basis));
    EXPECT_EQ(check_seminvariant(fz).seminvariant, !with_b) << t;
  }
}

TEST(RoundTrip, PlantedInstancesPass) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const RoundTripReport rep = roundtrip_theorem(seed, 1 + static_cast<int>(seed % 5));
    EXPECT_TRUE(rep.pass()) << "seed " << seed;
    expect_all_pass(rep);
  }
}

TEST(RoundTrip, NegativeControlFailsWithWitness) {
  const RoundTripReport rep = roundtrip_subspace(codim_two_control().basis(), nullptr);
  EXPECT_FALSE(rep.pass());
  EXPECT_TRUE(rep.witness.has_value());
}

TEST(DiskExtremal, MaximizerIsTheMultiplier) {
  const InnerFn phi({cplx{}, cplx(0.3, 0.4), cplx(-0.5, 0.1)}, 1.0, Flavor::disk);
  const cplx beta(0.35, -0.2);
  const double s = std::sqrt(1.0 - std::norm(beta));
  const RationalFn h = (s * RationalFn::constant(1.0)) * reciprocal(RationalFn::constant(1.0) - beta * phi.as_rational());
  std::vector<RationalFn> basis;
  for (cplx w : {cplx{}, cplx(0.2, 0.1), cplx(-0.4, -0.3)}) basis.push_back(h * disk_kernel(phi, w));
  const RationalFn G = disk_extremal(basis);
  double err = 0.0;
  for (int k = 0; k < 16; ++k) {
    const cplx z = std::polar(0.9, 2.0 * kPi * k / 16);
    err = std::max(err, std::abs(G(z) - h(z)));
  }
  EXPECT_LT(err, 1e-6);
}

TEST(Multiplier, ConstantHalf) {
  const InnerFn th({kI});
  const RationalFn h = isometric_multiplier(RationalFn::constant(0.5), th);
  for (cplx z : {cplx(0.3, 0.0), cplx(-1.0, 2.0)})
    EXPECT_LT(std::abs(h(z) - (std::sqrt(3.0) / 2.0) / (1.0 - 0.5 * th(z))), 1e-12);
  EXPECT_LT(multiplier_gram_residual(h, ModelSpace(th)), 1e-7);
}

TEST(Multiplier, RationalSymbol) {
  const RationalFn b(Poly({0.0, 0.5}), {-3.0 * kI});
  const InnerFn th({kI, cplx(0.5, 1.5)});
  const RationalFn h = isometric_multiplier(b, th);
  EXPECT_TRUE(h_over_z_plus_i_in_h2(h));
  EXPECT_LT(multiplier_gram_residual(h, ModelSpace(th)), 1e-7);
  EXPECT_LT(multiplier_gram_residual(h, ModelSpace(th), false), 1e-7);
}

TEST(NearInvariance, ReportCarriesFactorization) {
  const InnerFn sq({kI, kI});
  const NearInvReport rep = near_invariance_report(SubspaceSpec(ModelSpace(sq).basis()));
  ASSERT_TRUE(rep.factorization.has_value());
  EXPECT_LT(rep.factorization->theta_at_i, 1e-8);
  EXPECT_LT(rep.factorization->gram_residual, 1e-8);
  EXPECT_LT(zero_set_distance(sq.zeros(), rep.factorization->theta.zeros()), 1e-6);
  EXPECT_FALSE(near_invariance_report(codim_two_control()).factorization.has_value());
}

TEST(NearInvariance, DiskCriterion) {
  const InnerFn phi({cplx{}, cplx(0.3, 0.4)}, 1.0, Flavor::disk);
  std::vector<RationalFn> model;
  for (cplx w : {cplx{}, cplx(0.2, -0.1)}) model.push_back(disk_kernel(phi, w));
  EXPECT_TRUE(check_nearly_invariant_disk(model).is_nearly_invariant);
  const NearInvReport bad = check_nearly_invariant_disk({RationalFn::constant(1.0), RationalFn(Poly({0.0, 0.0, 1.0}))});
  EXPECT_FALSE(bad.is_nearly_invariant);
  ASSERT_TRUE(bad.witness.has_value());
  EXPECT_LT(std::abs((*bad.witness)(0.0)), 1e-12);
}

TEST(Seminvariance, SpaceLevelExamples) {
  const InnerFn sq({kI, kI});
  const ModelSpace K(sq);
  EXPECT_TRUE(check_seminvariant(SubspaceSpec(K.basis())).seminvariant);
  const RationalFn u = unimodular_from_roots({-2.0 * kI, -3.0 * kI});
  std::vector<RationalFn> uk;
  for (const RationalFn& k : K.basis()) uk.push_back(u * k);
  EXPECT_TRUE(check_seminvariant(SubspaceSpec(uk)).seminvariant);
  const RationalFn h = isometric_multiplier(RationalFn::constant(0.5), sq);
  std::vector<RationalFn> hk;
  for (const RationalFn& k : K.basis()) hk.push_back(h * k);
  const SeminvarianceResult r = check_seminvariant(SubspaceSpec(hk));
  EXPECT_FALSE(r.seminvariant);
  EXPECT_GT(r.spread, 0.1);
}

TEST(Planted, BasisIsOrthonormal) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    Rng rng(seed);
    const PlantedInstance inst = plant_instance(rng, 5, seed % 2 == 0, seed % 4 < 2);
    const SubspaceSpec S(inst.basis);
    EXPECT_LE((S.gram() - CMatrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-9) << "seed " << seed;
  }
}

TEST(Restriction, CancellingPolesAddNoConstraint) {
  // h k has a pole at -i that cancels against the numerator of h
  const InnerFn sq({kI, kI});
  const RationalFn h = isometric_multiplier(RationalFn::constant(0.5), sq);
  const ModelSpace K(sq);
  std::vector<RationalFn> hk;
  for (const RationalFn& k : K.basis()) hk.push_back(h * k);
  EXPECT_EQ(build_restriction(SubspaceSpec(hk)).codim(), 1);
}
