#include <gtest/gtest.h>

#include <filesystem>

#include "nearsym/io.hpp"
#include "nearsym/nearinv.hpp"

using namespace nearsym;
using io::json;

namespace {

std::string fixture(const std::string& name) { return std::string(NEARSYM_FIXTURE_DIR) + "/" + name + ".json"; }

std::optional<Errc> restriction_error(const SubspaceSpec& S) {
  try {
    build_restriction(S);
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST(Json, InnerFnRoundTrip) {
  const InnerFn th({kI, cplx(0.5, 1.5)}, std::polar(1.0, 0.3));
  const json j = io::to_json(th);
  EXPECT_EQ(j["flavor"], "halfplane");
  EXPECT_EQ(j["zeros"].size(), 2u);
  const InnerFn back = io::inner_from_json(json::parse(j.dump()));
  EXPECT_LT(std::abs(back(cplx(0.2, 0.7)) - th(cplx(0.2, 0.7))), 1e-15);
  EXPECT_EQ(io::inner_from_json(io::to_json(InnerFn({0.5}, 1.0, Flavor::disk))).flavor(), Flavor::disk);
}

TEST(Json, RejectsMalformedInput) {
  EXPECT_THROW(io::cplx_from_json(json::array({1.0})), Error);
  EXPECT_THROW(io::inner_from_json(json{{"flavor", "strip"}, {"zeros", json::array()}}), Error);
  EXPECT_THROW(io::channel_from_json(json{{"dim_in", 2}, {"dim_out", 2}, {"choi", json::array()}}), Error);
  EXPECT_THROW(io::read_json_file("/nonexistent/file.json"), Error);
}

TEST(Json, ModelSpaceRoundTrip) {
  const ModelSpace K(InnerFn({kI, cplx(1.0, 0.5)}));
  const ModelSpace back = io::model_space_from_json(io::to_json(K));
  EXPECT_LT((back.gram() - K.gram()).norm(), 1e-14);
}

TEST(Json, ChannelRowMajor) {
  FiniteChannel ch;
  ch.dim_in = 1;
  ch.dim_out = 2;
  ch.choi.resize(2, 2);
  ch.choi << 1.0, cplx(0, 2), cplx(0, -2), 5.0;
  const json j = io::to_json(ch);
  EXPECT_EQ(j["choi"][1], json::array({0.0, 2.0}));
  const FiniteChannel back = io::channel_from_json(j);
  EXPECT_EQ(back.choi, ch.choi);
}

TEST(Json, RegularityReportSchema) {
  RegularityReport rep;
  rep.grid = {kI};
  rep.sigma_min = {std::numeric_limits<double>::infinity()};
  rep.pairing = {1.0};
  const json j = io::to_json(rep);
  EXPECT_TRUE(j["sigma_min"][0].is_null());
  EXPECT_EQ(j["pairing"][0], 1.0);
  EXPECT_EQ(j["grid"][0], json::array({0.0, 1.0}));
}

TEST(Fixtures, SubspaceOutcomes) {
  for (const char* name : {"codim_two", "two_cauchy", "theta1_squared", "unimodular_theta1_squared", "half_multiplier"}) {
    SCOPED_TRACE(name);
    const io::SubspaceFixture fx = io::subspace_fixture_from_json(io::read_json_file(fixture(name)));
    const SubspaceSpec S(fx.basis);
    const std::optional<Errc> err = restriction_error(S);
    if (fx.expected["restriction"] == "ok") {
      EXPECT_FALSE(err.has_value());
    } else {
      ASSERT_TRUE(err.has_value());
      EXPECT_EQ(std::string(to_string(*err)), fx.expected["restriction"].get<std::string>());
    }
    const NearInvReport rep = near_invariance_report(S);
    EXPECT_EQ(rep.is_nearly_invariant, fx.expected["nearly_invariant"].get<bool>());
    EXPECT_EQ(rep.witness.has_value(), !rep.is_nearly_invariant);
    if (fx.expected.contains("theta_zeros")) {
      ASSERT_TRUE(rep.factorization.has_value());
      EXPECT_LT(zero_set_distance(io::cplx_list_from_json(fx.expected["theta_zeros"]), rep.factorization->theta.zeros()), 1e-6);
      EXPECT_EQ(check_seminvariant(*rep.factorization).seminvariant, fx.expected["seminvariant"].get<bool>());
    }
  }
}

TEST(Fixtures, NearRealConcentration) {
  const io::SubspaceFixture fx = io::subspace_fixture_from_json(io::read_json_file(fixture("near_real_concentration")));
  const SymRestriction T = build_restriction(SubspaceSpec(fx.basis));
  const RegularityReport bad = regularity_check(T, io::cplx_list_from_json(fx.expected["irregular_at"]));
  const RegularityReport good = regularity_check(T, io::cplx_list_from_json(fx.expected["regular_at"]));
  EXPECT_FALSE(bad.regular);
  EXPECT_TRUE(good.regular);
}

TEST(Fixtures, Channels) {
  const json dep = io::read_json_file(fixture("half_depolarizing"));
  const FiniteChannel ch = io::channel_from_json(dep);
  EXPECT_EQ(is_cp(ch), dep["expected"]["cp"].get<bool>());
  EXPECT_EQ(is_unital(ch), dep["expected"]["unital"].get<bool>());
  EXPECT_EQ(is_trace_preserving(ch), dep["expected"]["trace_preserving"].get<bool>());
  EXPECT_EQ(static_cast<int>(kraus_from_choi(ch).ops.size()), dep["expected"]["kraus_rank"].get<int>());
  const json tr = io::read_json_file(fixture("transpose"));
  const FiniteChannel t = io::channel_from_json(tr);
  EXPECT_FALSE(is_cp(t));
  EXPECT_THROW(kraus_from_choi(t), Error);
}

TEST(Csv, ClarkRows) {
  const ModelSpace K(InnerFn({kI, kI}));
  std::string csv;
  io::append_clark_rows(csv, 0, -1.0, clark_family(K, -1.0));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  EXPECT_EQ(csv.substr(0, 2), "0,");
}
