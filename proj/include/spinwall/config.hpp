#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "spinwall/limits.hpp"

namespace spinwall {

inline constexpr const char* kVersion = "spinwall 0.1.0";

// Flat key=value configuration with [section] headers. Sections: geometry,
// model, schedule, experiment. Values never nest; lists are comma separated;
// schedule rules are either explicit lists or "pow:<c>,<e>" for c * n^e.
struct ExperimentConfig {
  // geometry
  Vec3 v1{0, 0, 1};
  Vec3 v2{0, 0, -1};
  double R = 0.8;

  // model (alpha or delta; delta wins when both appear)
  bool has_alpha = false;
  double alpha = 3.9;
  bool has_delta = false;
  double delta = 0.025;
  double k = 1.0;

  // schedule
  std::vector<int> schedule_n;
  std::string delta_rule;  // "list:a,b,..." or "pow:c,e"
  std::string k_rule;
  double target_l = 0.0;
  double target_eta = 1.0;

  // experiment
  std::string kind;
  std::string output;       // artifact path ("-" or empty: stdout)
  std::string chain_file;   // kind=energy / minimize / limit-eval input
  std::string field_file;   // kind=field2d input
  std::uint64_t seed = 1;
  int threads = 1;
  bool mm_literal = false;

  // wall
  std::string wall_pin = "profile";  // profile | ground | value
  double pin_wbar = 1.0;
  double center = 0.5;

  // fhom: z sampled along the segment [z0, z1]
  int fhom_k = 256;
  double fhom_rho = 0.0;  // 0: diagonal default
  int restarts = 6;
  int fhom_samples = 9;
  bool has_z0 = false, has_z1 = false;
  Vec3 z0, z1;

  // minimize
  std::string start = "wall";  // wall | helix | ferromagnet | file
  int n = 256;
  double gradient_tolerance = 0.0;  // 0: per-experiment default
  int max_iterations = 100000;
  std::string trace_file;  // optional per-iteration energy trace (CSV)

  // limit-eval
  std::string limit_kind = "l0";  // l0 | finite | 2d
  double limit_l = 1.0;

  // sweep
  std::string sweep_kind = "wall";  // wall | junction | fhom
};

ExperimentConfig parse_config(std::istream& is);
ExperimentConfig parse_config_file(const std::string& path);

// Pure validation: hard errors first, then entries prefixed "warning:".
std::vector<std::string> validate(const ExperimentConfig& cfg);

ScalingSchedule make_schedule(const ExperimentConfig& cfg);
SystemGeometry make_geometry(const ExperimentConfig& cfg);
ModelParams1D make_params(const ExperimentConfig& cfg);

// Executes the configured experiment and writes its artifact. Returns the
// process exit status (0 on success).
int run_experiment(const ExperimentConfig& cfg);

// Reproducibility header written at the top of every artifact.
std::string artifact_header(const ExperimentConfig& cfg);

}  // namespace spinwall
