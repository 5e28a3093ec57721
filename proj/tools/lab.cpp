#include <CLI11.hpp>

#include <chrono>
#include <iostream>

#include "nearsym/lab.hpp"

using namespace nearsym;

namespace {

constexpr int kExitCheckFailure = 1;
constexpr int kExitConfigInvalid = 2;

std::pair<std::string, double> parse_tol(const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos || eq == 0) throw Error(Errc::ConfigInvalid, "--tol expects name=value, got '" + kv + "'");
  try {
    std::size_t used = 0;
    const double v = std::stod(kv.substr(eq + 1), &used);
    if (used != kv.size() - eq - 1) throw std::invalid_argument(kv);
    return {kv.substr(0, eq), v};
  } catch (const std::logic_error&) {
    throw Error(Errc::ConfigInvalid, "--tol value is not a number in '" + kv + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verification suites for nearly invariant subspaces and their symmetric restrictions"};
  std::string suite, config_path, out;
  long long seed = 1, instances = 1, degree_max = 4;
  std::vector<std::string> tols;
  app.add_option("suite", suite, "modelspace, symrestrict, krein, cpmaps, nearinv or all");
  auto* o_seed = app.add_option("--seed", seed, "64-bit seed");
  auto* o_inst = app.add_option("--instances", instances, "instances per suite");
  auto* o_deg = app.add_option("--degree-max", degree_max, "largest inner-function degree (1..8)");
  auto* o_out = app.add_option("--out", out, "output directory");
  app.add_option("--tol", tols, "tolerance override name=value (repeatable)");
  app.add_option("--config", config_path, "JSON config; flags given on the command line take precedence");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigInvalid;
  }

  lab::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = lab::config_from_json(io::read_json_file(config_path));
    if (!suite.empty()) cfg.suite = suite;
    if (o_seed->count()) {
      if (seed < 0) throw Error(Errc::ConfigInvalid, "seed must be non-negative");
      cfg.seed = static_cast<std::uint64_t>(seed);
    }
    if (o_inst->count()) cfg.instances = static_cast<int>(std::clamp<long long>(instances, -1, 1 << 20));
    if (o_deg->count()) cfg.degree_max = static_cast<int>(std::clamp<long long>(degree_max, -1, 1000));
    if (o_out->count()) cfg.output = out;
    for (const std::string& kv : tols) cfg.tolerances.insert_or_assign(parse_tol(kv).first, parse_tol(kv).second);
    cfg.validate();
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigInvalid;
  }

  const auto t0 = std::chrono::steady_clock::now();
  const lab::RunResult res = lab::run(cfg);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  try {
    lab::write_outputs(cfg, res, elapsed);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return kExitConfigInvalid;
  }
  std::cout << lab::summary_text(cfg, res);
  if (!res.pass()) {
    for (const std::string& f : res.failing()) std::cerr << f << "\n";
    return kExitCheckFailure;
  }
  return 0;
}
