#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "doctest.h"
#include "spinwall/config.hpp"

using namespace spinwall;

namespace {
const char* kWallConfig = R"(# wall convergence experiment
[geometry]
v1 = 0,0,1
v2 = 0,0,-1
R = 0.9999

[model]
delta = 0.01
k = 64

[schedule]
n = 64,128,256
delta = pow:1,-0.6666666666666666
k = pow:1,1
target_l = 0
target_eta = 1

[experiment]
kind = wall
seed = 3
)";

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("config parsing and validation") {
  std::istringstream is(kWallConfig);
  const ExperimentConfig cfg = parse_config(is);
  CHECK(cfg.kind == "wall");
  CHECK(cfg.R == 0.9999);
  CHECK(cfg.schedule_n.size() == 3);
  CHECK(validate(cfg).empty());

  const ScalingSchedule s = make_schedule(cfg);
  CHECK(s.points[1].n == 128);
  CHECK(s.points[1].delta == doctest::Approx(std::pow(128.0, -2.0 / 3.0)).epsilon(1e-12));
  CHECK(s.points[1].eta() == doctest::Approx(1.0).epsilon(1e-12));

  // Radius above the bound is a hard error that names the bound.
  ExperimentConfig bad = cfg;
  bad.R = 1.5;
  const auto issues = validate(bad);
  REQUIRE_FALSE(issues.empty());
  CHECK(issues[0].find("R_max") != std::string::npos);

  // A drifting eta with finite declared target only warns.
  ExperimentConfig drift = cfg;
  drift.k_rule = "pow:1,0.5";
  bool warned = false, hard = false;
  for (const auto& i : validate(drift)) {
    if (i.rfind("warning:", 0) == 0) warned = true;
    else hard = true;
  }
  CHECK(warned);
  CHECK_FALSE(hard);

  std::istringstream junk("[geometry]\nbogus = 1\n");
  CHECK_THROWS_AS(parse_config(junk), std::runtime_error);
}

TEST_CASE("experiments rerun bit-for-bit") {
  std::istringstream is(kWallConfig);
  ExperimentConfig cfg = parse_config(is);
  cfg.schedule_n = {32, 64};
  cfg.output = "build_test_wall_a.csv";
  REQUIRE(run_experiment(cfg) == 0);
  cfg.output = "build_test_wall_b.csv";
  REQUIRE(run_experiment(cfg) == 0);
  const std::string a = slurp("build_test_wall_a.csv");
  const std::string b = slurp("build_test_wall_b.csv");
  CHECK(a == b);
  CHECK(a.find("# spinwall") == 0);
  CHECK(a.find("n,lambda,delta,l_n,value,cauchy_diff,status") != std::string::npos);
  std::remove("build_test_wall_a.csv");
  std::remove("build_test_wall_b.csv");
}

TEST_CASE("energy experiment emits the breakdown record") {
  // Store a chain, run the energy experiment on it, check the record keys.
  const SystemGeometry g = SystemGeometry::make({0, 0, 1}, {0, 0, -1}, 0.8);
  std::vector<Site> sites(33);
  for (int i = 0; i < 33; ++i) sites[i] = {i < 16 ? 1 : 2, 0.05 * i};
  write_chain_file(SpinChain1D(1.0 / 32, g, sites), "build_test_chain.txt");

  ExperimentConfig cfg;
  cfg.kind = "energy";
  cfg.chain_file = "build_test_chain.txt";
  cfg.has_delta = true;
  cfg.delta = 0.025;
  cfg.k = 2.0;
  cfg.output = "build_test_energy.json";
  REQUIRE(run_experiment(cfg) == 0);
  const std::string json = slurp("build_test_energy.json");
  for (const char* key : {"\"E\"", "\"P\"", "\"H\"", "\"total\"", "\"ground\"", "\"MM\"",
                          "\"R\"", "\"split_residual\""})
    CHECK(json.find(key) != std::string::npos);
  std::remove("build_test_chain.txt");
  std::remove("build_test_energy.json");
}

TEST_CASE("threaded sweeps match the sequential artifact") {
  std::istringstream is(kWallConfig);
  ExperimentConfig cfg = parse_config(is);
  cfg.schedule_n = {32, 48, 64};
  cfg.threads = 3;
  cfg.output = "build_test_wall_mt.csv";
  REQUIRE(run_experiment(cfg) == 0);
  cfg.threads = 1;
  cfg.output = "build_test_wall_st.csv";
  REQUIRE(run_experiment(cfg) == 0);
  // Artifact headers record the thread count, so compare the data rows only.
  auto rows = [](const std::string& text) {
    std::string out;
    std::istringstream ss(text);
    std::string line;
    while (std::getline(ss, line))
      if (!line.empty() && line[0] != '#') out += line + "\n";
    return out;
  };
  CHECK(rows(slurp("build_test_wall_mt.csv")) == rows(slurp("build_test_wall_st.csv")));
  std::remove("build_test_wall_mt.csv");
  std::remove("build_test_wall_st.csv");
}
