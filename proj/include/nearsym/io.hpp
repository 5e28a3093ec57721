#pragma once

// JSON encodings of the library's value types and the CSV tables emitted by
// the lab runner. Complex numbers are [re, im] pairs throughout.

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nearsym/cpmaps.hpp"
#include "nearsym/inner.hpp"
#include "nearsym/kreinrep.hpp"
#include "nearsym/modelspace.hpp"
#include "nearsym/report.hpp"
#include "nearsym/symrestrict.hpp"

namespace nearsym::io {

using json = nlohmann::json;

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx cplx_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw Error(Errc::ConfigInvalid, "complex numbers are encoded as [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const std::vector<cplx>& v) {
  json out = json::array();
  for (cplx z : v) out.push_back(to_json(z));
  return out;
}

inline std::vector<cplx> cplx_list_from_json(const json& j) {
  if (!j.is_array()) throw Error(Errc::ConfigInvalid, "expected a list of [re, im] pairs");
  std::vector<cplx> out;
  for (const json& e : j) out.push_back(cplx_from_json(e));
  return out;
}

/// Finite doubles as numbers, everything else as null.
inline json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

// ---------------------------------------------------------------------------
// Functions and spaces
// ---------------------------------------------------------------------------

inline json to_json(const InnerFn& theta) {
  return {{"flavor", theta.flavor() == Flavor::disk ? "disk" : "halfplane"},
          {"zeros", to_json(theta.zeros())},
          {"constant", to_json(theta.constant())}};
}

inline InnerFn inner_from_json(const json& j) {
  const std::string flavor = j.value("flavor", std::string("halfplane"));
  if (flavor != "halfplane" && flavor != "disk") throw Error(Errc::ConfigInvalid, "unknown inner function flavor " + flavor);
  const cplx c = j.contains("constant") ? cplx_from_json(j.at("constant")) : cplx(1.0);
  return InnerFn(cplx_list_from_json(j.at("zeros")), c, flavor == "disk" ? Flavor::disk : Flavor::halfplane);
}

/// {"num": ascending coefficients, "poles": [...]}
inline json to_json(const RationalFn& f) { return {{"num", to_json(f.num().coeffs())}, {"poles", to_json(f.poles())}}; }

inline RationalFn rational_from_json(const json& j) {
  return RationalFn(Poly(cplx_list_from_json(j.at("num"))), cplx_list_from_json(j.value("poles", json::array())));
}

inline json to_json(const ModelSpace& K) { return {{"theta", to_json(K.theta())}, {"nodes", to_json(K.nodes())}}; }

inline ModelSpace model_space_from_json(const json& j, const Tolerances& tol = {}) {
  InnerFn theta = inner_from_json(j.at("theta"));
  if (j.contains("nodes")) return ModelSpace(std::move(theta), cplx_list_from_json(j.at("nodes")), tol);
  return ModelSpace(std::move(theta), tol);
}

// ---------------------------------------------------------------------------
// Channels
// ---------------------------------------------------------------------------

/// {"dim_in": n, "dim_out": m, "choi": [[re, im], ...]} with the (nm)^2
/// Choi entries in row-major order.
inline json to_json(const FiniteChannel& ch) {
  json entries = json::array();
  for (Eigen::Index r = 0; r < ch.choi.rows(); ++r)
    for (Eigen::Index c = 0; c < ch.choi.cols(); ++c) entries.push_back(to_json(ch.choi(r, c)));
  return {{"dim_in", ch.dim_in}, {"dim_out", ch.dim_out}, {"choi", entries}};
}

inline FiniteChannel channel_from_json(const json& j) {
  FiniteChannel ch;
  ch.dim_in = j.at("dim_in").get<int>();
  ch.dim_out = j.at("dim_out").get<int>();
  if (ch.dim_in < 1 || ch.dim_out < 1) throw Error(Errc::ConfigInvalid, "channel dimensions must be positive");
  const int d = ch.dim_in * ch.dim_out;
  const std::vector<cplx> e = cplx_list_from_json(j.at("choi"));
  if (static_cast<int>(e.size()) != d * d) throw Error(Errc::ConfigInvalid, "choi must hold (dim_in*dim_out)^2 entries");
  ch.choi.resize(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) ch.choi(r, c) = e[static_cast<std::size_t>(r * d + c)];
  return ch;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

inline json to_json(const RegularityReport& rep) {
  json grid = to_json(rep.grid), sigma = json::array(), pairing = json::array();
  for (double s : rep.sigma_min) sigma.push_back(number(s));
  for (double p : rep.pairing) pairing.push_back(number(p));
  return {{"grid", grid}, {"sigma_min", sigma}, {"pairing", pairing}};
}

inline json to_json(const Check& c) {
  return {{"name", c.name}, {"paper_ref", c.ref}, {"residual", number(c.residual)},
          {"tolerance", number(c.tolerance)}, {"pass", c.pass}};
}

// ---------------------------------------------------------------------------
// Fixtures
// ---------------------------------------------------------------------------

/// A subspace of L^2(R) given by a rational basis, with the outcome the
/// library is expected to produce.
struct SubspaceFixture {
  std::string name;
  std::string description;
  std::vector<RationalFn> basis;
  json expected;
};

inline SubspaceFixture subspace_fixture_from_json(const json& j) {
  SubspaceFixture fx{j.value("name", std::string()), j.value("description", std::string()), {}, j.value("expected", json::object())};
  if (!j.contains("basis") || !j.at("basis").is_array() || j.at("basis").empty())
    throw Error(Errc::ConfigInvalid, "fixture needs a non-empty basis");
  for (const json& f : j.at("basis")) fx.basis.push_back(rational_from_json(f));
  return fx;
}

inline json to_json(const SubspaceFixture& fx) {
  json basis = json::array();
  for (const RationalFn& f : fx.basis) basis.push_back(to_json(f));
  return {{"name", fx.name}, {"description", fx.description}, {"basis", basis}, {"expected", fx.expected}};
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::ConfigInvalid, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::ConfigInvalid, path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::ConfigInvalid, "cannot write " + path);
  out << text;
}

// ---------------------------------------------------------------------------
// CSV tables
// ---------------------------------------------------------------------------

inline std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(17) << x;
  return s.str();
}

/// Columns: instance, alpha_re, alpha_im, x, weight.
inline void append_clark_rows(std::string& csv, int instance, cplx alpha, const ClarkFamily& fam) {
  for (std::size_t k = 0; k < fam.nodes.size(); ++k)
    csv += std::to_string(instance) + "," + fmt(alpha.real()) + "," + fmt(alpha.imag()) + "," + fmt(fam.nodes[k]) + "," +
           fmt(fam.weights[k]) + "\n";
}

/// Columns: instance, x, mu_density, R. mu_density is |u(x)|^2 for the
/// absolutely continuous measure; R is the de Branges weight.
inline void append_density_rows(std::string& csv, int instance, const SpectralMeasure& mu, const DeBrangesFrame& db,
                                 const std::vector<double>& xs) {
  for (double x : xs)
    csv += std::to_string(instance) + "," + fmt(x) + "," + fmt(mu.density(x).real()) + "," + fmt(db.weight(x)) + "\n";
}

}  // namespace nearsym::io
