#include "spinwall/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "io_detail.hpp"
#include "nlohmann/json.hpp"

namespace spinwall {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Vec3 parse_vec3(const std::string& s) {
  Vec3 v;
  if (std::sscanf(s.c_str(), "%lf,%lf,%lf", &v.x, &v.y, &v.z) != 3)
    throw std::runtime_error("expected x,y,z triple, got: " + s);
  return v;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::string item;
  std::istringstream ss(s);
  while (std::getline(ss, item, ',')) out.push_back(std::stod(trim(item)));
  return out;
}

double parse_target(const std::string& s) {
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  return std::stod(s);
}

}  // namespace

ExperimentConfig parse_config(std::istream& is) {
  ExperimentConfig cfg;
  std::string line, section;
  int lineno = 0;
  std::vector<std::string> unknown;
  while (std::getline(is, line)) {
    ++lineno;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = section + "." + trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));

    if (key == "geometry.v1") cfg.v1 = parse_vec3(val);
    else if (key == "geometry.v2") cfg.v2 = parse_vec3(val);
    else if (key == "geometry.R") cfg.R = std::stod(val);
    else if (key == "model.alpha") { cfg.alpha = std::stod(val); cfg.has_alpha = true; }
    else if (key == "model.delta") { cfg.delta = std::stod(val); cfg.has_delta = true; }
    else if (key == "model.k") cfg.k = std::stod(val);
    else if (key == "schedule.n") {
      for (double v : parse_list(val)) cfg.schedule_n.push_back(static_cast<int>(v));
    }
    else if (key == "schedule.delta") cfg.delta_rule = val;
    else if (key == "schedule.k") cfg.k_rule = val;
    else if (key == "schedule.target_l") cfg.target_l = parse_target(val);
    else if (key == "schedule.target_eta") cfg.target_eta = parse_target(val);
    else if (key == "experiment.kind") cfg.kind = val;
    else if (key == "experiment.output") cfg.output = val;
    else if (key == "experiment.chain") cfg.chain_file = val;
    else if (key == "experiment.field") cfg.field_file = val;
    else if (key == "experiment.seed") cfg.seed = std::stoull(val);
    else if (key == "experiment.threads") cfg.threads = std::stoi(val);
    else if (key == "experiment.mm_literal") cfg.mm_literal = (val == "1" || val == "true");
    else if (key == "experiment.wall_pin") cfg.wall_pin = val;
    else if (key == "experiment.pin_wbar") cfg.pin_wbar = std::stod(val);
    else if (key == "experiment.center") cfg.center = std::stod(val);
    else if (key == "experiment.fhom_k") cfg.fhom_k = std::stoi(val);
    else if (key == "experiment.fhom_rho") cfg.fhom_rho = std::stod(val);
    else if (key == "experiment.restarts") cfg.restarts = std::stoi(val);
    else if (key == "experiment.fhom_samples") cfg.fhom_samples = std::stoi(val);
    else if (key == "experiment.z0") { cfg.z0 = parse_vec3(val); cfg.has_z0 = true; }
    else if (key == "experiment.z1") { cfg.z1 = parse_vec3(val); cfg.has_z1 = true; }
    else if (key == "experiment.start") cfg.start = val;
    else if (key == "experiment.n") cfg.n = std::stoi(val);
    else if (key == "experiment.gradient_tolerance") cfg.gradient_tolerance = std::stod(val);
    else if (key == "experiment.max_iterations") cfg.max_iterations = std::stoi(val);
    else if (key == "experiment.trace") cfg.trace_file = val;
    else if (key == "experiment.limit_kind") cfg.limit_kind = val;
    else if (key == "experiment.sweep_kind") cfg.sweep_kind = val;
    else if (key == "experiment.l") cfg.limit_l = std::stod(val);
    else throw std::runtime_error("unknown configuration key: " + key);
  }
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config " + path);
  return parse_config(f);
}

SystemGeometry make_geometry(const ExperimentConfig& cfg) {
  return SystemGeometry::make(normalized(cfg.v1), normalized(cfg.v2), cfg.R);
}

ModelParams1D make_params(const ExperimentConfig& cfg) {
  if (cfg.has_delta) return ModelParams1D::from_delta(cfg.delta, cfg.k);
  return ModelParams1D::from_alpha(cfg.alpha, cfg.k);
}

static double apply_rule(const std::string& rule, int n, std::size_t index, double fallback) {
  if (rule.empty()) return fallback;
  if (rule.rfind("pow:", 0) == 0) {
    double c, e;
    if (std::sscanf(rule.c_str() + 4, "%lf,%lf", &c, &e) != 2)
      throw std::runtime_error("bad pow rule: " + rule);
    return c * std::pow(static_cast<double>(n), e);
  }
  if (rule.rfind("list:", 0) == 0) {
    const std::vector<double> vals = parse_list(rule.substr(5));
    if (index >= vals.size()) throw std::runtime_error("schedule list too short: " + rule);
    return vals[index];
  }
  return std::stod(rule);  // constant
}

ScalingSchedule make_schedule(const ExperimentConfig& cfg) {
  ScalingSchedule s;
  s.target_l = cfg.target_l;
  s.target_eta = cfg.target_eta;
  for (std::size_t i = 0; i < cfg.schedule_n.size(); ++i) {
    const int n = cfg.schedule_n[i];
    SchedulePoint pt;
    pt.n = n;
    pt.lambda = 1.0 / n;
    pt.delta = apply_rule(cfg.delta_rule, n, i, cfg.delta);
    pt.k = apply_rule(cfg.k_rule, n, i, cfg.k);
    s.points.push_back(pt);
  }
  return s;
}

std::vector<std::string> validate(const ExperimentConfig& cfg) {
  std::vector<std::string> issues;
  try {
    const double rm = r_max(normalized(cfg.v1), normalized(cfg.v2));
    if (!(cfg.R > 0.0) || !(cfg.R < rm))
      issues.push_back("R = " + std::to_string(cfg.R) + " violates 0 < R < R_max = " +
                       std::to_string(rm));
  } catch (const std::exception& e) {
    issues.push_back(std::string("geometry: ") + e.what());
  }
  if (cfg.has_alpha && cfg.has_delta &&
      std::abs(cfg.alpha - 4.0 * (1.0 - cfg.delta)) > 1e-12)
    issues.push_back("alpha and delta are both set but alpha != 4(1-delta)");
  if (!(cfg.k > 0.0)) issues.push_back("model k must be positive");
  static const char* kinds[] = {"energy", "minimize", "wall",   "fhom",      "junction",
                                "sweep",  "field2d",  "limit-eval", "validate", ""};
  bool known = cfg.kind.empty();
  for (const char* k : kinds)
    if (cfg.kind == k) known = true;
  if (!known) issues.push_back("unknown experiment kind: " + cfg.kind);
  if (!cfg.schedule_n.empty()) {
    const ScalingSchedule sched = make_schedule(cfg);
    for (const std::string& issue : sched.validate()) {
      if (issue.rfind("warning: ", 0) == 0)
        issues.push_back("warning: schedule: " + issue.substr(9));
      else
        issues.push_back("schedule: " + issue);
    }
  }
  if (cfg.threads < 1) issues.push_back("threads must be >= 1");
  return issues;
}

std::string artifact_header(const ExperimentConfig& cfg) {
  std::ostringstream os;
  os << "# " << kVersion << "\n";
  os << "# config kind=" << cfg.kind << " seed=" << cfg.seed << " threads=" << cfg.threads
     << " mm_literal=" << (cfg.mm_literal ? 1 : 0) << "\n";
  os << "# config v1=" << fmt17(cfg.v1.x) << "," << fmt17(cfg.v1.y) << "," << fmt17(cfg.v1.z)
     << " v2=" << fmt17(cfg.v2.x) << "," << fmt17(cfg.v2.y) << "," << fmt17(cfg.v2.z)
     << " R=" << fmt17(cfg.R) << "\n";
  os << "# config alpha=" << fmt17(cfg.has_delta ? 4.0 * (1.0 - cfg.delta) : cfg.alpha)
     << " k=" << fmt17(cfg.k) << "\n";
  if (!cfg.schedule_n.empty()) {
    os << "# config schedule_n=";
    for (std::size_t i = 0; i < cfg.schedule_n.size(); ++i)
      os << (i ? "," : "") << cfg.schedule_n[i];
    os << " delta_rule=" << (cfg.delta_rule.empty() ? "-" : cfg.delta_rule)
       << " k_rule=" << (cfg.k_rule.empty() ? "-" : cfg.k_rule) << "\n";
  }
  return os.str();
}

namespace {

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw std::runtime_error("cannot open output " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

WallOptions wall_options_from(const ExperimentConfig& cfg) {
  WallOptions w;
  if (cfg.wall_pin == "ground") w.pin = WallPin::ground;
  else if (cfg.wall_pin == "value") w.pin = WallPin::value;
  else if (cfg.wall_pin == "profile") w.pin = WallPin::profile_ends;
  else throw std::runtime_error("unknown wall_pin: " + cfg.wall_pin);
  w.pin_wbar = cfg.pin_wbar;
  w.center = cfg.center;
  if (cfg.gradient_tolerance > 0.0) w.minimize.gradient_tolerance = cfg.gradient_tolerance;
  w.minimize.max_iterations = cfg.max_iterations;
  return w;
}

int run_energy(const ExperimentConfig& cfg) {
  if (cfg.chain_file.empty()) throw std::runtime_error("kind=energy needs experiment.chain");
  const SpinChain1D chain = read_chain_file(cfg.chain_file);
  const ModelParams1D p = make_params(cfg);
  const EnergyBreakdown b = energy_breakdown(chain, p, cfg.mm_literal);
  Output out(cfg.output);
  out.stream() << breakdown_to_json(b) << "\n";
  return 0;
}

int run_field2d(const ExperimentConfig& cfg) {
  if (cfg.field_file.empty()) throw std::runtime_error("kind=field2d needs experiment.field");
  const SpinField2D field = read_field_file(cfg.field_file);
  const ModelParams2D p = ModelParams2D::from_delta(
      cfg.has_delta ? cfg.delta : 1.0 - cfg.alpha / 4.0, cfg.k);
  const ScriptH2D s = energy_script_H2d(field, p);
  Output out(cfg.output);
  out.stream() << energy2d_to_json(s, energy_P2d(field, p)) << "\n";
  return 0;
}

int run_wall(const ExperimentConfig& cfg) {
  const SystemGeometry geom = make_geometry(cfg);
  const ScalingSchedule schedule = make_schedule(cfg);
  if (schedule.points.empty()) throw std::runtime_error("kind=wall needs schedule.n");
  const std::vector<WallScheduleRow> rows =
      wall_cost_schedule(geom, schedule, wall_options_from(cfg), cfg.threads);
  Output out(cfg.output);
  out.stream() << artifact_header(cfg);
  out.stream() << "n,lambda,delta,l_n,value,cauchy_diff,status\n";
  int failures = 0;
  for (const WallScheduleRow& r : rows) {
    out.stream() << r.point.n << ',' << fmt17(r.point.lambda) << ',' << fmt17(r.point.delta) << ','
                 << fmt17(r.point.l()) << ',' << fmt17(r.value) << ',' << fmt17(r.cauchy_diff)
                 << ',' << (r.converged ? "ok" : "not-converged") << "\n";
    if (!r.converged) ++failures;
  }
  return failures == static_cast<int>(rows.size()) && !rows.empty() ? 1 : 0;
}

int run_fhom(const ExperimentConfig& cfg) {
  const SystemGeometry geom = make_geometry(cfg);
  const ModelParams1D p = make_params(cfg);
  const Vec3 z0 = cfg.has_z0 ? cfg.z0 : geom.center(1);
  const Vec3 z1 = cfg.has_z1 ? cfg.z1 : geom.embed(1, 0.0);
  const double rho = cfg.fhom_rho > 0.0 ? cfg.fhom_rho : default_cell_rho(cfg.fhom_k);
  Output out(cfg.output);
  out.stream() << artifact_header(cfg);
  out.stream() << "t,zx,zy,zz,k,rho,feasible,value,raw_inf,lower_bound,lower_bound_finite_k\n";
  int failures = 0;
  const int m = std::max(2, cfg.fhom_samples);
  for (int s = 0; s < m; ++s) {
    const double t = static_cast<double>(s) / (m - 1);
    const Vec3 z = z0 + t * (z1 - z0);
    const CellProblemResult r =
        fhom_estimate(geom, z, p.alpha, cfg.fhom_k, rho, cfg.restarts, cfg.seed + s);
    out.stream() << fmt17(t) << ',' << fmt17(z.x) << ',' << fmt17(z.y) << ',' << fmt17(z.z) << ','
                 << r.k << ',' << fmt17(r.rho) << ',' << (r.feasible ? 1 : 0) << ','
                 << fmt17(r.value) << ',' << fmt17(r.raw_inf) << ',' << fmt17(r.lower_bound) << ','
                 << fmt17(r.lower_bound_finite_k) << "\n";
    if (!r.feasible) ++failures;
  }
  return failures == m ? 1 : 0;
}

int run_junction(const ExperimentConfig& cfg) {
  const SystemGeometry geom = make_geometry(cfg);
  const ScalingSchedule schedule = make_schedule(cfg);
  if (schedule.points.empty()) throw std::runtime_error("kind=junction needs schedule.n");
  MinimizeOptions opts;
  if (cfg.gradient_tolerance > 0.0) opts.gradient_tolerance = cfg.gradient_tolerance;
  const RConstantResult r =
      estimate_R_constant(geom, schedule, opts, cfg.restarts, cfg.seed);
  Output out(cfg.output);
  out.stream() << artifact_header(cfg);
  out.stream() << "n,alpha,value,cauchy_diff,status\n";
  for (const RConstantRow& row : r.rows)
    out.stream() << row.n << ',' << fmt17(row.alpha) << ',' << fmt17(row.value) << ','
                 << fmt17(row.cauchy_diff) << ',' << (row.converged ? "ok" : "not-converged")
                 << "\n";
  out.stream() << "# R_estimate=" << fmt17(r.value) << " stable=" << (r.stable ? 1 : 0) << "\n";
  return 0;
}

int run_minimize(const ExperimentConfig& cfg) {
  const SystemGeometry geom = make_geometry(cfg);
  const ModelParams1D p = make_params(cfg);
  SpinChain1D start = [&]() {
    if (cfg.start == "file") {
      if (cfg.chain_file.empty()) throw std::runtime_error("start=file needs experiment.chain");
      return read_chain_file(cfg.chain_file);
    }
    if (cfg.start == "ferromagnet") return build_ferromagnet(cfg.n + 1, 1, 0.0, geom);
    if (cfg.start == "helix") return build_ground_helix(cfg.n + 1, p, 1, 1, 0.0, geom);
    if (cfg.start == "wall") return build_wall_profile(cfg.n + 1, p, 1, cfg.center, geom);
    throw std::runtime_error("unknown start: " + cfg.start);
  }();
  MinimizeOptions opts;
  if (cfg.gradient_tolerance > 0.0) opts.gradient_tolerance = cfg.gradient_tolerance;
  opts.max_iterations = cfg.max_iterations;
  opts.record_trace = !cfg.trace_file.empty();
  ChainConstraints constraints;
  constraints.boundary_penalty = true;
  auto [chain, report] = minimize_chain(start, p, opts, constraints);
  if (!cfg.trace_file.empty()) {
    std::ofstream tf(cfg.trace_file);
    tf << artifact_header(cfg) << "iteration,energy\n";
    for (std::size_t i = 0; i < report.trace.size(); ++i)
      tf << i << ',' << fmt17(report.trace[i]) << '\n';
  }
  if (!cfg.output.empty() && cfg.output != "-") write_chain_file(chain, cfg.output);
  nlohmann::ordered_json j;
  j["iterations"] = report.iterations;
  j["converged"] = report.converged;
  j["gradient_norm"] = report.gradient_norm;
  j["energy_initial"] = report.energy_initial;
  j["energy_final"] = report.energy_final;
  j["boundary_residual"] = report.boundary_residual;
  std::cout << j.dump(2) << "\n";
  return report.converged ? 0 : 1;
}

int run_limit_eval(const ExperimentConfig& cfg) {
  const ModelParams1D p = make_params(cfg);
  Output out(cfg.output);
  if (cfg.limit_kind == "2d") {
    if (cfg.field_file.empty()) throw std::runtime_error("limit-eval 2d needs experiment.field");
    const SpinField2D field = read_field_file(cfg.field_file);
    const ChiralityField2D ch =
        normalize_chirality(transform_T2d(field, p), field.geom().radius());
    out.stream() << fmt17(limit_2d(ch, field)) << "\n";
    return 0;
  }
  if (cfg.chain_file.empty()) throw std::runtime_error("limit-eval needs experiment.chain");
  const SpinChain1D chain = read_chain_file(cfg.chain_file);
  const ChiralityField1D ch =
      normalize_chirality(transform_T1d(chain, p), chain.geom().radius());
  if (cfg.limit_kind == "l0") {
    out.stream() << fmt17(limit_second_order_l0(ch)) << "\n";
    return 0;
  }
  if (cfg.limit_kind == "finite") {
    std::vector<std::vector<double>> pieces;
    for (int j = 0; j < ch.piece_count(); ++j) pieces.push_back(ch.piece_values(j));
    const FiniteLResult r = limit_second_order_finite_l(pieces, chain.lambda(), cfg.limit_l);
    out.stream() << fmt17(r.value) << (r.boundary_ok ? "" : " # warning: |w(a)| != |w(b)|")
                 << "\n";
    return 0;
  }
  throw std::runtime_error("unknown limit kind: " + cfg.limit_kind);
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg) {
  const std::vector<std::string> issues = validate(cfg);
  bool hard = false;
  for (const std::string& issue : issues) {
    std::cerr << (issue.rfind("warning:", 0) == 0 ? "" : "error: ") << issue << "\n";
    if (issue.rfind("warning:", 0) != 0) hard = true;
  }
  if (hard) return 2;

  if (cfg.kind == "energy") return run_energy(cfg);
  if (cfg.kind == "field2d") return run_field2d(cfg);
  if (cfg.kind == "wall") return run_wall(cfg);
  if (cfg.kind == "sweep") {
    // Generic schedule driver: dispatch on the configured sub-experiment.
    if (cfg.sweep_kind == "junction") return run_junction(cfg);
    if (cfg.sweep_kind == "fhom") return run_fhom(cfg);
    return run_wall(cfg);
  }
  if (cfg.kind == "fhom") return run_fhom(cfg);
  if (cfg.kind == "junction") return run_junction(cfg);
  if (cfg.kind == "minimize") return run_minimize(cfg);
  if (cfg.kind == "limit-eval") return run_limit_eval(cfg);
  if (cfg.kind == "validate" || cfg.kind.empty()) return 0;
  std::cerr << "error: unknown kind " << cfg.kind << "\n";
  return 2;
}

}  // namespace spinwall
