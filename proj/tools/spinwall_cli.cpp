// Command-line front end: every subcommand reads a flat key=value config and
// runs one experiment; a few common settings can be overridden from the
// command line.

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "spinwall/config.hpp"

namespace {

struct SubFlags {
  std::string config_path;
  std::string output;
  std::string chain_file;
  std::string field_file;
  double alpha = 0.0;
  double delta = -1.0;
  double k = 0.0;
  double l = 0.0;
  std::string limit_kind;
};

struct GlobalFlags {
  long long seed = -1;
  int threads = 0;
  bool mm_literal = false;
};

int dispatch(const std::string& kind, const SubFlags& flags, const GlobalFlags& global) {
  spinwall::ExperimentConfig cfg;
  if (!flags.config_path.empty()) cfg = spinwall::parse_config_file(flags.config_path);
  cfg.kind = kind;
  if (!flags.output.empty()) cfg.output = flags.output;
  if (!flags.chain_file.empty()) cfg.chain_file = flags.chain_file;
  if (!flags.field_file.empty()) cfg.field_file = flags.field_file;
  if (flags.alpha > 0.0) {
    cfg.alpha = flags.alpha;
    cfg.has_alpha = true;
    cfg.has_delta = false;
  }
  if (flags.delta >= 0.0) {
    cfg.delta = flags.delta;
    cfg.has_delta = true;
  }
  if (flags.k > 0.0) cfg.k = flags.k;
  if (flags.l > 0.0) cfg.limit_l = flags.l;
  if (!flags.limit_kind.empty()) cfg.limit_kind = flags.limit_kind;
  if (global.seed >= 0) cfg.seed = static_cast<std::uint64_t>(global.seed);
  if (global.threads > 0) cfg.threads = global.threads;
  if (global.mm_literal) cfg.mm_literal = true;
  if (cfg.threads <= 0) {
    if (const char* env = std::getenv("SPINWALL_THREADS")) cfg.threads = std::atoi(env);
    if (cfg.threads <= 0) cfg.threads = 1;
  }

  if (kind == "validate") {
    const auto issues = spinwall::validate(cfg);
    if (issues.empty()) {
      std::cout << "ok\n";
      return 0;
    }
    bool hard = false;
    for (const auto& issue : issues) {
      std::cout << issue << "\n";
      if (issue.rfind("warning:", 0) != 0) hard = true;
    }
    return hard ? 2 : 0;
  }
  return spinwall::run_experiment(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(spinwall::kVersion) +
               " - frustrated two-circle spin chains: energies, walls, limits"};
  app.require_subcommand(1);

  GlobalFlags global;
  app.add_option("--seed", global.seed, "override the experiment seed");
  app.add_option("--threads", global.threads,
                 "worker threads for sweeps (env SPINWALL_THREADS as fallback)");
  app.add_flag("--mm-literal", global.mm_literal,
               "use the literal whole-interval renormalization constant in MM");

  struct Sub {
    const char* name;
    const char* desc;
    bool needs_config;
  };
  const Sub subs[] = {
      {"energy", "energy breakdown of a stored chain", false},
      {"minimize", "deterministic local minimization", true},
      {"wall", "measured wall costs along a schedule", true},
      {"fhom", "homogenized density estimates along a segment of averages", true},
      {"junction", "junction constant estimate along a schedule", true},
      {"sweep", "generic schedule sweep (wall/junction/fhom)", true},
      {"field2d", "2d energies of a stored field", false},
      {"limit-eval", "evaluate a continuum limit functional on stored data", false},
      {"validate", "check a config and report violations", true},
  };
  constexpr std::size_t n_subs = sizeof(subs) / sizeof(subs[0]);
  SubFlags flags[n_subs];
  for (std::size_t i = 0; i < n_subs; ++i) {
    CLI::App* cmd = app.add_subcommand(subs[i].name, subs[i].desc);
    auto* copt = cmd->add_option("--config", flags[i].config_path, "experiment config file");
    if (subs[i].needs_config) copt->required();
    cmd->add_option("--output", flags[i].output, "artifact path (- for stdout)");
    cmd->add_option("--chain", flags[i].chain_file, "chain file input");
    cmd->add_option("--field", flags[i].field_file, "field file input");
    cmd->add_option("--alpha", flags[i].alpha, "frustration parameter");
    cmd->add_option("--delta", flags[i].delta, "delta with alpha = 4(1-delta)");
    cmd->add_option("--k", flags[i].k, "anisotropy penalization weight");
    cmd->add_option("--l", flags[i].l, "finite-l regime parameter (limit-eval)");
    cmd->add_option("--kind", flags[i].limit_kind, "limit functional: l0 | finite | 2d");
  }

  CLI11_PARSE(app, argc, argv);

  for (std::size_t i = 0; i < n_subs; ++i) {
    if (app.got_subcommand(subs[i].name)) {
      try {
        return dispatch(subs[i].name, flags[i], global);
      } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
      }
    }
  }
  return 2;
}
