// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>

#include "nearsym/lab.hpp"

using namespace nearsym;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Largest residual/tolerance ratio seen, plus the number of failures.
struct Tally {
  double worst = 0.0;
  int failures = 0;
  int count = 0;
  void add(double residual, double tolerance) {
    ++count;
    const bool ok = std::isfinite(residual) && residual <= tolerance;
    if (!ok) ++failures;
    worst = std::max(worst, std::isfinite(residual) ? residual / tolerance : std::numeric_limits<double>::infinity());
  }
  void add(const Check& c) { add(c.pass ? c.residual : std::max(c.residual, 2.0 * c.tolerance), c.tolerance); }
  void add_flag(bool ok) { add(ok ? 0.0 : 1.0, 0.5); }
  std::string str() const {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%d checks, %d failed, worst residual/tol %.3g", count, failures, worst);
    return buf;
  }
};

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f s", s);
  return buf;
}

io::SubspaceFixture load_fixture(const std::string& name) {
  return io::subspace_fixture_from_json(io::read_json_file(std::string(NEARSYM_FIXTURE_DIR) + "/" + name));
}

Outcome reproducing_kernel() {
  Rng rng(101);
  Tally t;
  const auto t0 = Clock::now();
  for (int k = 0; k < 50; ++k) {
    const InnerFn th = random_inner(rng, rng.uniform_int(1, 5));
    const ModelSpace K(th);
    t.add(lab::reproducing_residual(rng, th, K, {}), 1e-8);
  }
  const double dt = seconds_since(t0);
  return {t.failures == 0 && dt < 5.0, t.str() + ", " + fmt_seconds(dt) + " (limit 5 s)"};
}

Outcome clark() {
  Rng rng(202);
  Tally orth, pars, sweep;
  int distinct_failures = 0;
  for (int k = 0; k < 20; ++k) {
    const int degree = rng.uniform_int(1, 5);
    const InnerFn th = random_inner(rng, degree);
    const ModelSpace K(th);
    const RationalFn f = K.element(random_coeffs(rng, degree));
    const lab::ClarkResiduals r = lab::clark_residuals(K, clark_family(K, lab::admissible_alpha(rng, th)), f, {});
    orth.add(r.orthogonality, 1e-8);
    pars.add(r.parseval, 1e-7);
    // eight points of the circle give eight different orthonormal bases
    std::vector<std::vector<double>> node_sets;
    for (int j = 0; j < 8; ++j) {
      cplx a = std::polar(1.0, 2.0 * kPi * (j + 0.5) / 8);
      if (std::abs(a - th.at_infinity()) < 1e-3) a *= std::polar(1.0, 0.05);
      const ClarkFamily fam = clark_family(K, a);
      const lab::ClarkResiduals s = lab::clark_residuals(K, fam, f, {});
      sweep.add(s.orthogonality, 1e-8);
      sweep.add(s.parseval, 1e-7);
      node_sets.push_back(fam.nodes);
    }
    for (std::size_t a = 0; a < node_sets.size(); ++a)
      for (std::size_t b = a + 1; b < node_sets.size(); ++b)
        for (double x : node_sets[a])
          for (double y : node_sets[b])
            if (std::abs(x - y) < 1e-9) ++distinct_failures;
  }
  const bool ok = orth.failures == 0 && pars.failures == 0 && sweep.failures == 0 && distinct_failures == 0;
  return {ok, "orthogonality " + orth.str() + "; parseval " + pars.str() + "; alpha sweep " + sweep.str() +
                  "; shared nodes across alphas " + std::to_string(distinct_failures)};
}

Outcome deficiency() {
  Rng rng(303);
  Tally dims, gap, pairing;
  const std::vector<cplx> grid = standard_regularity_grid(15, 15);
  for (int k = 0; k < 30; ++k) {
    const InnerFn th = random_inner(rng, rng.uniform_int(1, 5));
    const SymRestriction T = k % 2 == 0 ? lab::model_restriction(th) : lab::weighted_restriction(th);
    const long plus = detail::complement(T.TQ + kI * T.Q, T.n).cols();
    const long minus = detail::complement(T.TQ - kI * T.Q, T.n).cols();
    dims.add_flag(T.codim() == 1 && plus == 1 && minus == 1);
    if (T.nu > 0) gap.add(1.0 / T.domain_gap, 1e-6);
    const RegularityReport reg = regularity_check(T, grid);
    pairing.add_flag(reg.regular && reg.min_pairing > 0.0);
  }
  const bool ok = dims.failures == 0 && gap.failures == 0 && pairing.failures == 0;
  return {ok, "defects (1,1) " + dims.str() + "; 1/gap " + gap.str() + "; pairing on 15x15 grid " + pairing.str()};
}

Outcome krein() {
  Rng rng(404);
  Tally disc, ac, win;
  for (int k = 0; k < 30; ++k) {
    const InnerFn th = random_inner(rng, rng.uniform_int(1, 5));
    const bool weighted = rng.uniform() < 0.5;
    const KreinFrame fr = krein_frame(weighted ? lab::weighted_restriction(th) : lab::model_restriction(th), random_unimodular(rng));
    const int n = fr.dim();
    const auto pairs = lab::random_pairs(rng, n, 4);
    const SpectralMeasure dm = discrete_measure(fr), am = abscont_measure(fr);
    disc.add(verify_isometry(fr, dm, pairs, nullptr, 1e-7));
    ac.add(verify_isometry(fr, am, pairs, nullptr, 1e-7));
    const Window bands{{{-1.0, 0.5}, {2.0, 4.0}}};
    const double x0 = fr.atoms(n / 2);
    double gap_ = 1.0;
    for (int j = 0; j + 1 < n; ++j) gap_ = std::min(gap_, fr.atoms(j + 1) - fr.atoms(j));
    const Window one_atom{{{x0 - gap_ / 3, x0 + gap_ / 3}}};
    win.add(verify_isometry(fr, dm, pairs, &one_atom, 1e-7));
    win.add(verify_isometry(fr, am, pairs, &bands, 1e-7));
  }
  const bool ok = disc.failures == 0 && ac.failures == 0 && win.failures == 0;
  return {ok, "discrete " + disc.str() + "; abs. continuous " + ac.str() + "; windowed " + win.str()};
}

Outcome partial_isometry() {
  Rng rng(505);
  Tally piso, cpeq;
  const auto t0 = Clock::now();
  for (int k = 0; k < 10; ++k) {
    const InnerFn th = random_inner(rng, rng.uniform_int(1, 5));
    const KreinFrame fr = krein_frame(k % 2 ? lab::weighted_restriction(th) : lab::model_restriction(th), random_unimodular(rng));
    const DeBrangesFrame db = debranges_frame(fr);
    const auto pairs = lab::random_pairs(rng, fr.dim(), 3);
    piso.add(verify_partial_isometry(db, image_pairs(fr, pairs), 1e-6));
    for (const RationalFn& m : lab::cpeq_multipliers()) cpeq.add(verify_cpeq(fr, db, {m}, pairs, 1e-6));
  }
  const double dt = seconds_since(t0);
  const bool ok = piso.failures == 0 && cpeq.failures == 0 && dt < 60.0;
  return {ok, "partial isometry " + piso.str() + "; cpeq " + cpeq.str() + "; " + fmt_seconds(dt) + " (limit 60 s)"};
}

Outcome cp_maps() {
  Rng rng(606);
  Tally roundtrip, effects, commutant;
  for (int k = 0; k < 50; ++k) {
    const int din = rng.uniform_int(1, 5), dout = rng.uniform_int(1, 5);
    const FiniteChannel ch = random_psd_choi(rng, din, dout, rng.uniform_int(1, din * dout));
    const KrausSet ks = kraus_from_choi(ch);
    roundtrip.add((choi_of(ks).choi - ch.choi).norm() / std::max(1.0, ch.choi.norm()), 1e-9);
  }
  for (int k = 0; k < 20; ++k) {
    const int n = rng.uniform_int(2, 4);
    const KrausSet base = kraus_from_choi(choi_of(random_unital_kraus(rng, n, n, rng.uniform_int(1, 4))));
    const int m = static_cast<int>(base.ops.size());
    const CMatrix W = random_unitary(rng, m);
    KrausSet mixed;
    for (int j = 0; j < m; ++j) {
      CMatrix F = CMatrix::Zero(n, n);
      for (int i = 0; i < m; ++i) F += W(j, i) * base.ops[i];
      mixed.ops.push_back(F);
    }
    const EffectRelation rel = effect_relation(base, mixed);
    effects.add(std::max(rel.solve_residual, rel.isometry_residual), 1e-7);
    effects.add_flag(rel.same_span());
  }
  for (int k = 0; k < 20; ++k) {
    const int n = rng.uniform_int(2, 5), count = rng.uniform_int(1, 4);
    std::vector<double> p(count);
    double total = 0.0;
    for (double& x : p) total += (x = rng.uniform(0.1, 1.0));
    KrausSet diag;
    for (int j = 0; j < count; ++j) diag.ops.push_back(std::sqrt(p[j] / total) * lab::diagonal_unitary(rng, n));
    for (const Check& c : verify_commutant_effects(choi_of(diag))) commutant.add(c);
  }
  const bool ok = roundtrip.failures == 0 && effects.failures == 0 && commutant.failures == 0;
  return {ok, "choi/kraus " + roundtrip.str() + "; effect relation " + effects.str() + "; fixed diagonal " + commutant.str()};
}

Outcome main_theorem() {
  Rng rng(707);
  Tally all, zeros, at_i;
  std::string first_failure;
  for (int k = 0; k < 100; ++k) {
    const int degree = 1 + k % 5;
    const RoundTripReport rep = roundtrip_theorem(rng.next(), degree);
    for (const Check& c : rep.checks) {
      all.add(c);
      if (c.name == "theta_zeros") zeros.add(c.residual, 1e-6);
      if (c.name == "theta_at_i") at_i.add(c.residual, 1e-8);
      if (!c.pass && first_failure.empty()) first_failure = " (first failure: instance " + std::to_string(k) + " " + c.name + ")";
    }
  }
  // negative controls: rejected, and the rejection carries a witness
  int controls = 0, rejected = 0;
  for (const std::vector<RationalFn>& basis :
       {load_fixture("codim_two.json").basis,
        std::vector<RationalFn>{RationalFn::cauchy(-kI), RationalFn::cauchy(-2.0 * kI), RationalFn::cauchy_power(-kI, 3)}}) {
    ++controls;
    const RoundTripReport rep = roundtrip_subspace(basis, nullptr);
    if (!rep.pass() && rep.witness.has_value()) ++rejected;
  }
  const bool ok = all.failures == 0 && zeros.failures == 0 && at_i.failures == 0 && rejected == controls;
  return {ok, "round trips " + all.str() + first_failure + "; zero sets " + zeros.str() + "; theta'(i) " + at_i.str() +
                  "; negative controls rejected with witness " + std::to_string(rejected) + "/" + std::to_string(controls)};
}

Outcome seminvariance() {
  int total = 0, wrong = 0;
  const auto classify = [&](const std::vector<RationalFn>& basis, bool expected) {
    ++total;
    if (check_seminvariant(SubspaceSpec(basis)).seminvariant != expected) ++wrong;
  };
  for (const char* name : {"theta1_squared.json", "unimodular_theta1_squared.json", "half_multiplier.json"}) {
    const io::SubspaceFixture fx = load_fixture(name);
    classify(fx.basis, fx.expected.at("seminvariant").get<bool>());
  }
  Rng rng(808);
  for (int k = 0; total < 40; ++k) {
    const bool multiplier = k % 2 == 1;
    const PlantedInstance inst = plant_instance(rng, rng.uniform_int(1, 5), rng.uniform() < 0.5, multiplier);
    classify(inst.basis, !multiplier);
  }
  return {wrong == 0, std::to_string(total) + " fixtures, " + std::to_string(wrong) + " misclassified"};
}

Outcome oracle_independence() {
  Rng rng(909);
  Tally t;
  for (int k = 0; k < 200; ++k) {
    const RationalFn g = lab::random_l2_rational(rng, 5), h = lab::random_l2_rational(rng, 5);
    t.add(std::abs(l2_inner(g, h) - quad_oracle(g, h)) / (1.0 + l2_norm(g) * l2_norm(h)), 1e-8);
  }
  return {t.failures == 0, t.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"1 reproducing kernel", reproducing_kernel},   {"2 clark bases", clark},
      {"3 deficiency indices", deficiency},           {"4 krein transform", krein},
      {"5 partial isometry and cpeq", partial_isometry}, {"6 cp maps", cp_maps},
      {"7 main theorem round trip", main_theorem},    {"8 seminvariance", seminvariance},
      {"9 oracle independence", oracle_independence}};
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " of 9 criteria failed" : std::string("all 9 criteria passed")) << "\n";
  return failed ? 1 : 0;
}
