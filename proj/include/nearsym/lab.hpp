#pragma once

// Batch runner behind the `lab` executable: instance generation, the
// per-suite checks, and the report/table writers.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "nearsym/cpmaps.hpp"
#include "nearsym/generators.hpp"
#include "nearsym/io.hpp"
#include "nearsym/kreinrep.hpp"
#include "nearsym/modelspace.hpp"
#include "nearsym/nearinv.hpp"
#include "nearsym/report.hpp"
#include "nearsym/symrestrict.hpp"

namespace nearsym::lab {

using io::json;

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"modelspace", "symrestrict", "krein", "cpmaps", "nearinv"};
  return names;
}

struct RunConfig {
  std::string suite = "all";
  std::uint64_t seed = 1;
  int instances = 1;
  int degree_max = 4;
  std::map<std::string, double> tolerances;
  std::string output = "lab-out";

  /// Throws ConfigInvalid on an unknown suite, out-of-range counts or an
  /// unknown tolerance key.
  Tolerances validate() const {
    const auto& names = suite_names();
    if (suite != "all" && std::find(names.begin(), names.end(), suite) == names.end())
      throw Error(Errc::ConfigInvalid, "unknown suite '" + suite + "'");
    if (instances < 1) throw Error(Errc::ConfigInvalid, "instances must be at least 1");
    if (degree_max < 1 || degree_max > 8) throw Error(Errc::ConfigInvalid, "degree_max must be in 1..8");
    if (output.empty()) throw Error(Errc::ConfigInvalid, "output directory is empty");
    Tolerances tol;
    for (const auto& [k, v] : tolerances) tol.set(k, v);
    return tol;
  }

  std::vector<std::string> suites() const { return suite == "all" ? suite_names() : std::vector<std::string>{suite}; }
};

/// Reads {"suite", "seed", "instances", "degree_max", "tolerances", "output"};
/// absent keys keep their defaults.
inline RunConfig config_from_json(const json& j) {
  if (!j.is_object()) throw Error(Errc::ConfigInvalid, "config must be a JSON object");
  static const std::vector<std::string> keys{"suite", "seed", "instances", "degree_max", "tolerances", "output"};
  for (const auto& [k, v] : j.items())
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw Error(Errc::ConfigInvalid, "unknown config key '" + k + "'");
  RunConfig cfg;
  try {
    if (j.contains("suite")) cfg.suite = j.at("suite").get<std::string>();
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("instances")) cfg.instances = j.at("instances").get<int>();
    if (j.contains("degree_max")) cfg.degree_max = j.at("degree_max").get<int>();
    if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
    if (j.contains("tolerances"))
      for (const auto& [k, v] : j.at("tolerances").items()) cfg.tolerances[k] = v.get<double>();
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigInvalid, e.what());
  }
  return cfg;
}

struct Row {
  std::string suite;
  int instance = 0;
  Check check;
};

struct Tables {
  std::string clark_nodes = "instance,alpha_re,alpha_im,x,weight\n";
  std::string density_R = "instance,x,mu_density,R\n";
};

struct RunResult {
  std::vector<Row> rows;
  Tables tables;
  bool pass() const {
    return std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.check.pass; });
  }
  std::vector<std::string> failing() const {
    std::vector<std::string> out;
    for (const Row& r : rows)
      if (!r.check.pass) out.push_back(r.suite + "[" + std::to_string(r.instance) + "]." + r.check.name);
    return out;
  }
};

// ---------------------------------------------------------------------------
// Instance generators
// ---------------------------------------------------------------------------

/// Random L^2 rational function with poles on both sides of R.
inline RationalFn random_l2_rational(Rng& rng, int max_poles) {
  const int npoles = rng.uniform_int(1, max_poles);
  std::vector<cplx> poles;
  for (int k = 0; k < npoles; ++k) {
    cplx p = rng.in_box(-3, 3, 0.2, 3);
    if (rng.uniform() < 0.5) p = std::conj(p);
    poles.push_back(p);
  }
  std::vector<cplx> c;
  for (int k = 0; k <= rng.uniform_int(0, npoles - 1); ++k) c.push_back(rng.complex_normal());
  return RationalFn(Poly(c), poles);
}

/// K_theta in its orthonormal rational basis.
inline SymRestriction model_restriction(const InnerFn& th, const Tolerances& tol = {}) {
  return build_restriction(SubspaceSpec(takenaka_basis(th), tol), tol);
}

/// w K_theta with the bounded outer weight w = (z + 3i)/(z + 2i).
inline SymRestriction weighted_restriction(const InnerFn& th, const Tolerances& tol = {}) {
  const RationalFn w(Poly({3.0 * kI, 1.0}), {-2.0 * kI});
  std::vector<RationalFn> basis;
  for (const RationalFn& e : takenaka_basis(th)) basis.push_back(w * e);
  return build_restriction(SubspaceSpec(basis, tol), tol);
}

inline std::vector<CoordPair> random_pairs(Rng& rng, int n, int count) {
  std::vector<CoordPair> out;
  for (int t = 0; t < count; ++t) out.emplace_back(random_coeffs(rng, n), random_coeffs(rng, n));
  return out;
}

inline CMatrix diagonal_unitary(Rng& rng, int n) {
  CMatrix D = CMatrix::Zero(n, n);
  for (int k = 0; k < n; ++k) D(k, k) = std::polar(1.0, rng.uniform(-kPi, kPi));
  return D;
}

/// Unimodular alpha at least 1e-3 away from theta(infinity).
inline cplx admissible_alpha(Rng& rng, const InnerFn& th) {
  cplx a = random_unimodular(rng);
  if (std::abs(a - th.at_infinity()) < 1e-3) a = -a;
  return a;
}

inline const std::vector<RationalFn>& cpeq_multipliers() {
  static const std::vector<RationalFn> ms{RationalFn::constant(1.0), RationalFn(Poly({1.0}), {kI, -kI}),
                                          RationalFn(Poly({0.0, 1.0}), {2.0 * kI, -2.0 * kI})};
  return ms;
}

// ---------------------------------------------------------------------------
// Per-instance checks
// ---------------------------------------------------------------------------

struct ClarkResiduals {
  double orthogonality = 0.0;
  double parseval = 0.0;
};

inline ClarkResiduals clark_residuals(const ModelSpace& K, const ClarkFamily& fam, const RationalFn& f, const Tolerances& tol) {
  const int n = K.dim();
  CMatrix G(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) G(j, k) = l2_inner(fam.vectors[k].fn, fam.vectors[j].fn, tol);
  double sum = 0.0;
  for (const KernelVector& v : fam.vectors) sum += std::norm(l2_inner(f, v.fn, tol));
  const double ff = l2_inner(f, f, tol).real();
  return {(G - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff(), std::abs(sum - ff) / (1.0 + ff)};
}

inline double reproducing_residual(Rng& rng, const InnerFn& th, const ModelSpace& K, const Tolerances& tol) {
  const RationalFn f = K.element(random_coeffs(rng, th.degree()));
  const cplx w(rng.uniform(-3, 3), rng.uniform(0.1, 3));
  return std::abs(l2_inner(f, kernel(th, w).fn, tol) - f(w)) / (1.0 + l2_norm(f, tol));
}

inline std::vector<Check> modelspace_instance(Rng& rng, int degree, const Tolerances& tol, Tables& tables, int idx) {
  const InnerFn th = random_inner(rng, degree);
  const ModelSpace K(th, tol);
  std::vector<Check> out;
  MaxResidual rk;
  for (int t = 0; t < 3; ++t) rk.add(reproducing_residual(rng, th, K, tol));
  out.push_back(make_check("reproducing_kernel", "reproducing-kernel", rk.value, 1e-8));

  const cplx alpha = admissible_alpha(rng, th);
  const RationalFn f = K.element(random_coeffs(rng, degree));
  const ClarkResiduals cr = clark_residuals(K, clark_family(K, alpha, tol), f, tol);
  out.push_back(make_check("clark_orthogonality", "clark-basis", cr.orthogonality, 1e-8));
  out.push_back(make_check("clark_parseval", "clark-basis", cr.parseval, 1e-7));

  // the circle of Clark bases, one per alpha
  MaxResidual sweep;
  const double offset = rng.uniform(0.0, 2.0 * kPi / 8);
  for (int k = 0; k < 8; ++k) {
    cplx a = std::polar(1.0, offset + 2.0 * kPi * k / 8);
    if (std::abs(a - th.at_infinity()) < 1e-3) a *= std::polar(1.0, 0.05);
    const ClarkFamily fam = clark_family(K, a, tol);
    io::append_clark_rows(tables.clark_nodes, idx, a, fam);
    const ClarkResiduals r = clark_residuals(K, fam, f, tol);
    sweep.add(std::max(r.orthogonality, r.parseval));
  }
  out.push_back(make_check("clark_alpha_sweep", "clark-basis", sweep.value, 1e-7));

  const Projection p = project(K, f, tol);
  out.push_back(make_check("projection_fixes_space", "reproducing-kernel", l2_norm(K.element(p.coeffs) - f, tol) / (1.0 + l2_norm(f, tol)), 1e-8));

  const RationalFn g = random_l2_rational(rng, 5), h = random_l2_rational(rng, 5);
  const double scale = 1.0 + l2_norm(g, tol) * l2_norm(h, tol);
  out.push_back(make_check("residue_vs_quadrature", "l2-inner-product", std::abs(l2_inner(g, h, tol) - quad_oracle(g, h, tol)) / scale, 1e-8));
  return out;
}

inline std::vector<Check> symrestrict_instance(Rng& rng, int degree, const Tolerances& tol) {
  const InnerFn th = random_inner(rng, degree);
  const SymRestriction T = rng.uniform() < 0.5 ? model_restriction(th, tol) : weighted_restriction(th, tol);
  std::vector<Check> out;
  out.push_back(make_flag("defects_1_1", "deficiency-indices", T.codim() == 1));
  out.push_back(make_check("domain_gap_inverse", "deficiency-indices", T.nu > 0 ? 1.0 / T.domain_gap : 0.0, 1e-6));
  out.push_back(make_check("symmetry", "deficiency-indices", T.symmetry_residual, 1e-8));
  const RegularityReport reg = regularity_check(T, standard_regularity_grid(), tol);
  out.push_back(make_flag("regular_grid", "regular-point-pairing", reg.regular && reg.min_pairing > 0.0));
  out.push_back(make_flag("simple", "simplicity", simplicity_check(T)));
  const cplx a1 = random_unimodular(rng), a2 = a1 * std::polar(1.0, rng.uniform(0.5, 2.0 * kPi - 0.5));
  const SelfAdjointExtension e1 = selfadjoint_extension(T, a1), e2 = selfadjoint_extension(T, a2);
  out.push_back(make_check("extension_restricts", "selfadjoint-extensions", std::max(e1.restriction_residual, e2.restriction_residual), 1e-8));
  out.push_back(make_check("extension_hermitian", "selfadjoint-extensions", std::max(e1.hermiticity_residual, e2.hermiticity_residual), 1e-8));
  out.push_back(make_flag("extensions_interlace", "selfadjoint-extensions", strictly_interlaced(e1.eigenvalues, e2.eigenvalues)));
  return out;
}

inline std::vector<Check> krein_instance(Rng& rng, int degree, const Tolerances& tol, Tables& tables, int idx) {
  const InnerFn th = random_inner(rng, degree);
  const bool weighted = rng.uniform() < 0.5;
  const KreinFrame fr = krein_frame(weighted ? weighted_restriction(th, tol) : model_restriction(th, tol), random_unimodular(rng));
  const int n = fr.dim();
  const auto pairs = random_pairs(rng, n, 4);
  const SpectralMeasure disc = discrete_measure(fr), ac = abscont_measure(fr, tol);
  std::vector<Check> out;
  out.push_back(verify_isometry(fr, disc, pairs));
  out.push_back(verify_isometry(fr, ac, pairs));
  double gap = 1.0;
  for (int k = 0; k + 1 < n; ++k) gap = std::min(gap, fr.atoms(k + 1) - fr.atoms(k));
  const double x0 = fr.atoms(n / 2);
  const Window one_atom{{{x0 - gap / 3, x0 + gap / 3}}};
  out.push_back(verify_isometry(fr, disc, pairs, &one_atom));
  const Window two_bands{{{-1.0, 0.5}, {2.0, 4.0}}};
  out.push_back(verify_isometry(fr, ac, pairs, &two_bands));

  const DeBrangesFrame db = debranges_frame(fr, tol);
  out.push_back(verify_partial_isometry(db, image_pairs(fr, pairs)));
  out.push_back(verify_cpeq(fr, db, cpeq_multipliers(), random_pairs(rng, n, 2)));
  std::vector<double> xs;
  for (int k = 0; k <= 80; ++k) xs.push_back(-5.0 + 0.125 * k);
  io::append_density_rows(tables.density_R, idx, ac, db, xs);
  return out;
}

inline std::vector<Check> cpmaps_instance(Rng& rng, int dim_max) {
  std::vector<Check> out;
  const int din = rng.uniform_int(1, dim_max), dout = rng.uniform_int(1, dim_max);
  const FiniteChannel ch = random_psd_choi(rng, din, dout, rng.uniform_int(1, din * dout));
  const KrausSet ks = kraus_from_choi(ch);
  out.push_back(make_check("choi_kraus_roundtrip", "choi-kraus", (choi_of(ks).choi - ch.choi).norm() / std::max(1.0, ch.choi.norm()), 1e-9));

  const int n = std::max(2, std::min(dim_max, 4));
  const KrausSet base = kraus_from_choi(choi_of(random_unital_kraus(rng, n, n, rng.uniform_int(1, 4))));
  const int k = static_cast<int>(base.ops.size());
  const CMatrix W = random_unitary(rng, k);
  KrausSet mixed;
  for (int j = 0; j < k; ++j) {
    CMatrix F = CMatrix::Zero(n, n);
    for (int i = 0; i < k; ++i) F += W(j, i) * base.ops[i];
    mixed.ops.push_back(F);
  }
  const EffectRelation rel = effect_relation(base, mixed);
  out.push_back(make_check("effect_relation", "effect-relation", std::max(rel.solve_residual, rel.isometry_residual), 1e-7));
  out.push_back(make_flag("effect_span", "effect-relation", rel.same_span()));

  const double p = rng.uniform(0.1, 0.9);
  const KrausSet diag{{std::sqrt(p) * diagonal_unitary(rng, n), std::sqrt(1 - p) * diagonal_unitary(rng, n)}};
  for (Check& c : verify_commutant_effects(choi_of(diag))) out.push_back(std::move(c));

  const FiniteChannel phi1 = choi_of(random_unital_kraus(rng, n, n, 2));
  const FiniteChannel phi = choi_of(random_unital_kraus(rng, n, std::max(1, n - 1), 2));
  for (Check& c : verify_dilation_factorization(phi1, compose(phi, phi1), phi).checks) out.push_back(std::move(c));
  return out;
}

/// Seminvariance on two planted instances: h = 1 must classify as
/// seminvariant and a genuine multiplier must not.
inline std::vector<Check> seminvariance_checks(Rng& rng, int degree, const Tolerances& tol) {
  const PlantedInstance plain = plant_instance(rng, degree, true, false, tol);
  const PlantedInstance weighted = plant_instance(rng, degree, rng.uniform() < 0.5, true, tol);
  const bool a = check_seminvariant(SubspaceSpec(plain.basis, tol), 1e-6, tol).seminvariant;
  const bool b = check_seminvariant(SubspaceSpec(weighted.basis, tol), 1e-6, tol).seminvariant;
  return {make_flag("seminvariant_unimodular", "seminvariance", a), make_flag("not_seminvariant_multiplier", "seminvariance", !b)};
}

inline std::vector<Check> nearinv_instance(Rng& rng, int degree, const Tolerances& tol, int idx) {
  const int d = std::min(degree, 6);
  std::vector<Check> out = roundtrip_theorem(rng.next(), d, tol).checks;
  for (Check& c : seminvariance_checks(rng, d, tol)) out.push_back(std::move(c));
  if (idx == 0) {
    // negative control: codimension 2, must be rejected with a witness
    const std::vector<RationalFn> basis{RationalFn::cauchy(-kI), RationalFn::cauchy_power(-kI, 3)};
    const RoundTripReport rep = roundtrip_subspace(basis, nullptr, tol);
    out.push_back(make_flag("negative_control_rejected", "near-invariance", !rep.pass() && rep.witness.has_value()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

/// Stream for (seed, suite, instance): independent of which other suites run.
inline std::uint64_t instance_seed(std::uint64_t seed, const std::string& suite, int idx) {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a over the suite name
  for (char c : suite) h = (h ^ static_cast<unsigned char>(c)) * 1099511628211ULL;
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32), static_cast<std::uint32_t>(idx)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

inline RunResult run(const RunConfig& cfg) {
  const Tolerances tol = cfg.validate();
  RunResult res;
  for (const std::string& suite : cfg.suites()) {
    for (int idx = 0; idx < cfg.instances; ++idx) {
      Rng rng(instance_seed(cfg.seed, suite, idx));
      const int degree = rng.uniform_int(1, cfg.degree_max);
      std::vector<Check> checks;
      try {
        if (suite == "modelspace") checks = modelspace_instance(rng, degree, tol, res.tables, idx);
        if (suite == "symrestrict") checks = symrestrict_instance(rng, degree, tol);
        if (suite == "krein") checks = krein_instance(rng, degree, tol, res.tables, idx);
        if (suite == "cpmaps") checks = cpmaps_instance(rng, std::min(cfg.degree_max + 1, 5));
        if (suite == "nearinv") checks = nearinv_instance(rng, degree, tol, idx);
      } catch (const Error& e) {
        checks.push_back(make_flag(std::string("error: ") + e.what(), suite, false));
      }
      for (Check& c : checks) res.rows.push_back({suite, idx, std::move(c)});
    }
  }
  return res;
}

/// Deterministic report: no timestamps and no output path.
inline json report_json(const RunConfig& cfg, const RunResult& res) {
  json tols = json::object();
  for (const auto& [k, v] : cfg.tolerances) tols[k] = v;
  json rows = json::array();
  for (const Row& r : res.rows) {
    json row = io::to_json(r.check);
    row["suite"] = r.suite;
    row["instance"] = r.instance;
    rows.push_back(row);
  }
  const auto passed = std::count_if(res.rows.begin(), res.rows.end(), [](const Row& r) { return r.check.pass; });
  return {{"config", {{"suite", cfg.suite}, {"seed", cfg.seed}, {"instances", cfg.instances}, {"degree_max", cfg.degree_max},
                      {"tolerances", tols}}},
          {"checks", rows},
          {"totals", {{"checks", res.rows.size()}, {"passed", passed}, {"failed", static_cast<long>(res.rows.size()) - passed}}},
          {"pass", res.pass()}};
}

inline std::string summary_text(const RunConfig& cfg, const RunResult& res) {
  std::string s = "suite " + cfg.suite + ", seed " + std::to_string(cfg.seed) + ", instances " + std::to_string(cfg.instances) +
                  ", degree_max " + std::to_string(cfg.degree_max) + "\n";
  for (const std::string& suite : cfg.suites()) {
    int total = 0, passed = 0;
    double worst = 0.0;
    for (const Row& r : res.rows) {
      if (r.suite != suite) continue;
      ++total;
      passed += r.check.pass;
      if (r.check.tolerance > 0 && std::isfinite(r.check.residual)) worst = std::max(worst, r.check.residual / r.check.tolerance);
    }
    s += "  " + suite + ": " + std::to_string(passed) + "/" + std::to_string(total) + " passed, worst residual/tolerance " +
         io::fmt(worst) + "\n";
  }
  for (const std::string& f : res.failing()) s += "  FAILED " + f + "\n";
  s += res.pass() ? "PASS\n" : "FAIL\n";
  return s;
}

inline void write_outputs(const RunConfig& cfg, const RunResult& res, double elapsed_seconds) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(cfg.output, ec);
  if (ec) throw Error(Errc::ConfigInvalid, "cannot create " + cfg.output + ": " + ec.message());
  const fs::path dir(cfg.output);
  io::write_text_file((dir / "report.json").string(), report_json(cfg, res).dump(2) + "\n");
  io::write_text_file((dir / "summary.txt").string(), summary_text(cfg, res));
  io::write_text_file((dir / "clark_nodes.csv").string(), res.tables.clark_nodes);
  io::write_text_file((dir / "density_R.csv").string(), res.tables.density_R);
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  const json meta{{"finished_utc", stamp}, {"elapsed_seconds", elapsed_seconds}, {"output", cfg.output}};
  io::write_text_file((dir / "metadata.json").string(), meta.dump(2) + "\n");
}

}  // namespace nearsym::lab
