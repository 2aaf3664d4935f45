// wermerlab: run tower diagnostics from a key=value config and write CSV/PGM artifacts.

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "wermer/io.hpp"
#include "wermer/suite.hpp"

using namespace wermer;

namespace {

struct Flags {
  std::string config;
  std::string out;
  int workers = 1;
  std::optional<int> max_bits;
  std::optional<std::uint64_t> seed;
};

int run(const std::function<CommandResult(const RunConfig&, int)>& cmd, const Flags& f) {
  RunConfig cfg;
  try {
    if (!f.config.empty()) cfg = load_config(f.config);
  } catch (const Error& e) {
    std::cerr << e.what() << '\n' << failure_from(e).str() << '\n';
    return 2;
  }
  if (f.max_bits) cfg.max_bits = *f.max_bits;
  if (f.seed) cfg.seed = *f.seed;
  if (!f.out.empty()) cfg.out = f.out;
  if (const char* env = std::getenv("WERMERLAB_OUT"); env && *env) cfg.out = env;

  const CommandResult res = cmd(cfg, std::max(1, f.workers));
  for (const auto& n : res.notes) std::cout << n << '\n';
  for (const auto& [name, bytes] : res.artifacts) write_file((std::filesystem::path(cfg.out) / name).string(), bytes);
  if (!res.artifacts.empty())
    std::cout << res.artifacts.size() << " artifacts in " << cfg.out << " (config_hash=" << config_hash(cfg) << ")\n";
  for (const auto& fr : res.failures) std::cerr << fr.str() << '\n';
  return res.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wermerlab: Wermer tower slices, potentials and certificates"};
  app.require_subcommand(1);
  Flags flags;
  app.add_option("--config", flags.config, "key=value config file")->check(CLI::ExistingFile);
  app.add_option("--out", flags.out, "output directory (WERMERLAB_OUT overrides)");
  app.add_option("--workers", flags.workers, "worker threads")->check(CLI::Range(1, 1024));
  app.add_option("--max-bits", flags.max_bits, "precision budget in bits");
  app.add_option("--seed", flags.seed, "anchor seed");

  const std::vector<std::tuple<std::string, std::string, std::function<CommandResult(const RunConfig&, int)>>> cmds = {
      {"schedule", "build and validate the schedule, drift table", cmd_schedule},
      {"certify", "nesting certificates", cmd_certify},
      {"roots", "slice root sets", cmd_roots},
      {"measure", "slice measures", cmd_measure},
      {"profile", "mass profiles and two-regime report", cmd_profile},
      {"converge", "convergence and harmonic-gap reports", cmd_converge},
      {"gauge", "modulus and tamed gauge tables", cmd_gauge},
      {"jensen", "quadrature vs mass-integral table", cmd_jensen},
      {"capacity", "capacity drift table", cmd_capacity},
      {"dimension", "box-dimension estimates", cmd_dimension},
      {"render", "escape raster", cmd_render},
      {"suite", "every criterion plus all artifacts", cmd_suite},
  };
  int status = 0;
  for (const auto& [name, help, fn] : cmds) {
    auto* sub = app.add_subcommand(name, help);
    sub->callback([&status, &flags, fn = fn] { status = run(fn, flags); });
  }
  app.fallthrough();
  CLI11_PARSE(app, argc, argv);
  return status;
}
