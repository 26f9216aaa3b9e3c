#include "spinwall/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "spinwall/numerics.hpp"

namespace spinwall {

SpinChain1D build_ferromagnet(int n_sites, int d, double phi0, const SystemGeometry& geom) {
  if (n_sites < 2) throw std::invalid_argument("need at least 2 sites");
  std::vector<Site> sites(n_sites, Site{d, phi0});
  return SpinChain1D(1.0 / (n_sites - 1), geom, std::move(sites));
}

static double helix_angle(const ModelParams1D& p, const SystemGeometry& geom) {
  const double R2 = geom.radius() * geom.radius();
  const double c = (p.alpha / 4.0 - 1.0 + R2) / R2;
  if (c < -1.0)
    throw std::domain_error("frustration too strong: helix needs delta <= 2R^2 = " +
                            std::to_string(2.0 * R2) + ", got delta = " + std::to_string(p.delta));
  return std::acos(std::min(c, 1.0));
}

SpinChain1D build_ground_helix(int n_sites, const ModelParams1D& p, int d, int sign, double phi0,
                               const SystemGeometry& geom) {
  if (n_sites < 2) throw std::invalid_argument("need at least 2 sites");
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  const double theta = helix_angle(p, geom);
  std::vector<Site> sites(n_sites);
  for (int i = 0; i < n_sites; ++i) sites[i] = {d, phi0 + sign * i * theta};
  return SpinChain1D(1.0 / (n_sites - 1), geom, std::move(sites));
}

SpinChain1D build_wall_profile(int n_sites, const ModelParams1D& p, int d, double center,
                               const SystemGeometry& geom) {
  if (n_sites < 3) throw std::invalid_argument("need at least 3 sites");
  if (!(p.delta > 0.0)) throw std::invalid_argument("wall profile needs delta > 0");
  const double R = geom.radius();
  if (p.delta > 2.0 * R * R)
    throw std::domain_error("frustration too strong: wall profile needs delta <= 2R^2");
  const double lambda = 1.0 / (n_sites - 1);
  const double ell = lambda / std::sqrt(p.delta);
  const double amp = std::sqrt(p.delta / 2.0) / R;
  std::vector<Site> sites(n_sites);
  sites[0] = {d, 0.0};
  for (int b = 0; b + 1 < n_sites; ++b) {
    const double x = lambda * (b + 0.5);
    const double wbar = std::tanh((x - center) / ell);
    const double theta = 2.0 * std::asin(amp * wbar);
    sites[b + 1] = {d, sites[b].phi + theta};
  }
  return SpinChain1D(lambda, geom, std::move(sites));
}

SpinChain1D build_oscillating(const SystemGeometry& geom,
                              const std::vector<std::pair<Site, double>>& targets,
                              int n_oscillation, int n_sites) {
  if (targets.empty()) throw std::invalid_argument("need at least one target point");
  if (n_oscillation < 1) throw std::invalid_argument("oscillation count must be positive");
  double total = 0.0;
  const int d = targets.front().first.d;
  for (const auto& [site, frac] : targets) {
    if (site.d != d)
      throw std::domain_error("oscillation targets must lie on a single circle");
    if (frac < -1e-12) throw std::invalid_argument("fractions must be nonnegative");
    total += frac;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("fractions must sum to 1");

  const double lambda = 1.0 / (n_sites - 1);
  std::vector<Site> sites(n_sites);
  for (int i = 0; i < n_sites; ++i) {
    double s = n_oscillation * lambda * i;
    s -= std::floor(s);
    double acc = 0.0;
    Site chosen = targets.back().first;
    for (const auto& [site, frac] : targets) {
      acc += frac;
      if (s < acc - 1e-15 || acc >= 1.0 - 1e-15) {
        chosen = site;
        break;
      }
    }
    sites[i] = chosen;
  }
  return SpinChain1D(lambda, geom, std::move(sites));
}

SpinChain1D concatenate_recovery(const SpinChain1D& c1, const SpinChain1D& c2) {
  if (c1.lambda() != c2.lambda())
    throw std::domain_error("concatenation needs equal lattice spacings");
  const int N = c1.last_index();
  std::vector<Site> sites(N + 1);
  for (int i = 0; i <= N; ++i) {
    const double t = c1.lambda() * i;
    if (t <= 0.5) {
      sites[i] = c1.sites()[std::min(2 * i, N)];
    } else {
      sites[i] = c2.sites()[std::clamp(2 * i - N, 0, N)];
    }
  }
  return SpinChain1D(c1.lambda(), c1.geom(), std::move(sites));
}

// Tangent of the embed chart at a site: d/dphi embed(d, phi).
static Vec3 tangent(const SystemGeometry& g, const Site& s) {
  const CircleFrame& f = g.frame(s.d);
  return g.radius() * (-std::sin(s.phi) * f.e1 + std::cos(s.phi) * f.e2);
}

std::vector<double> gradient_E(const SpinChain1D& chain, const ModelParams1D& p) {
  const int count = stencil_count(chain);
  const auto u = chain.points();
  std::vector<Vec3> t(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) t[i] = tangent(chain.geom(), chain.sites()[i]);
  std::vector<double> g(u.size(), 0.0);
  const double lam = chain.lambda();
  for (int i = 0; i < count; ++i) {
    g[i] += lam * (-p.alpha * dot(t[i], u[i + 1]) + dot(t[i], u[i + 2]));
    g[i + 1] += lam * (-p.alpha * dot(u[i], t[i + 1]));
    g[i + 2] += lam * dot(u[i], t[i + 2]);
  }
  return g;
}

std::vector<double> gradient_H(const SpinChain1D& chain, const ModelParams1D& p) {
  const int count = stencil_count(chain);
  const auto u = chain.points();
  std::vector<Vec3> t(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) t[i] = tangent(chain.geom(), chain.sites()[i]);
  std::vector<double> g(u.size(), 0.0);
  const double lam = chain.lambda();
  const double half_alpha = p.alpha / 2.0;
  for (int i = 0; i < count; ++i) {
    const Vec3 r = u[i + 2] - half_alpha * u[i + 1] + u[i];
    g[i] += lam * dot(r, t[i]);
    g[i + 1] += lam * (-half_alpha) * dot(r, t[i + 1]);
    g[i + 2] += lam * dot(r, t[i + 2]);
  }
  return g;
}

std::vector<double> gradient_H2d(const SpinField2D& field, const ModelParams2D& p) {
  const GridDomain& dom = field.domain();
  const auto cells = dom.cells();
  std::vector<int> cell_id(static_cast<std::size_t>(dom.nx()) * dom.ny(), -1);
  for (std::size_t k = 0; k < cells.size(); ++k)
    cell_id[dom.linear(cells[k].first, cells[k].second)] = static_cast<int>(k);

  std::vector<Vec3> u(cells.size()), t(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const Site& s = field.at(cells[k].first, cells[k].second);
    u[k] = field.geom().embed(s.d, s.phi);
    t[k] = tangent(field.geom(), s);
  }
  auto id = [&](int i, int j) { return cell_id[dom.linear(i, j)]; };

  std::vector<double> g(cells.size(), 0.0);
  const double lam = field.lambda();
  const double pref = (lam * lam / 2.0) / p.normalization(lam);
  const double half_alpha = p.alpha / 2.0;
  for (const auto& [i, j] : full_stencil_index_set(dom)) {
    const int a = id(i, j);
    {
      const int b = id(i + 1, j), c = id(i + 2, j);
      const Vec3 r = u[c] - half_alpha * u[b] + u[a];
      g[a] += pref * 2.0 * dot(r, t[a]);
      g[b] += pref * 2.0 * (-half_alpha) * dot(r, t[b]);
      g[c] += pref * 2.0 * dot(r, t[c]);
    }
    {
      const int b = id(i, j + 1), c = id(i, j + 2);
      const Vec3 r = u[c] - half_alpha * u[b] + u[a];
      g[a] += pref * 2.0 * dot(r, t[a]);
      g[b] += pref * 2.0 * (-half_alpha) * dot(r, t[b]);
      g[c] += pref * 2.0 * dot(r, t[c]);
    }
  }
  return g;
}

static LbfgsResult lbfgsMinimizeImpl(
    const std::function<double(const std::vector<double>&, std::vector<double>*)>& fg,
    std::vector<double> x, const MinimizeOptions& opt) {
  const std::size_t n = x.size();
  LbfgsResult res;
  if (n == 0) {
    res.f = fg(x, nullptr);
    res.converged = true;
    res.x = std::move(x);
    return res;
  }
  std::vector<double> g(n), g_new(n), x_new(n), d(n);
  double f = fg(x, &g);
  if (opt.record_trace) res.trace.push_back(f);

  std::deque<std::vector<double>> s_hist, y_hist;
  std::deque<double> rho_hist;

  auto sup_norm = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double e : v) m = std::max(m, std::abs(e));
    return m;
  };
  auto dot_v = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };

  int it = 0;
  double checkpoint_f = f;
  for (; it < opt.max_iterations; ++it) {
    const double gnorm = sup_norm(g);
    if (gnorm <= opt.gradient_tolerance) {
      res.converged = true;
      break;
    }
    if (opt.stagnation_window > 0 && it > 0 && it % opt.stagnation_window == 0) {
      if (checkpoint_f - f <= opt.stagnation_rtol * std::max(1.0, std::abs(f))) {
        res.limited_by_precision = true;
        break;
      }
      checkpoint_f = f;
    }
    // Two-loop recursion with a diagonal gamma*I seed.
    d = g;
    std::vector<double> alpha_coeff(s_hist.size());
    for (int h = static_cast<int>(s_hist.size()) - 1; h >= 0; --h) {
      alpha_coeff[h] = rho_hist[h] * dot_v(s_hist[h], d);
      for (std::size_t i = 0; i < n; ++i) d[i] -= alpha_coeff[h] * y_hist[h][i];
    }
    double gamma = 1.0;
    if (!s_hist.empty()) {
      const double yy = dot_v(y_hist.back(), y_hist.back());
      if (yy > 0.0) gamma = dot_v(s_hist.back(), y_hist.back()) / yy;
    } else {
      const double g2 = std::sqrt(dot_v(g, g));
      gamma = 1.0 / std::max(1.0, g2);
    }
    for (double& e : d) e *= gamma;
    for (std::size_t h = 0; h < s_hist.size(); ++h) {
      const double beta = rho_hist[h] * dot_v(y_hist[h], d);
      for (std::size_t i = 0; i < n; ++i) d[i] += (alpha_coeff[h] - beta) * s_hist[h][i];
    }
    for (double& e : d) e = -e;

    double gd = dot_v(g, d);
    if (!(gd < 0.0)) {  // not a descent direction, fall back to steepest descent
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i] * gamma;
      gd = dot_v(g, d);
      if (!(gd < 0.0)) break;
    }

    // Armijo backtracking; when the quasi-Newton direction cannot produce a
    // strict decrease the history is dropped and plain steepest descent gets
    // one more try before declaring the precision floor reached.
    auto line_search = [&](double& f_out) {
      double step = 1.0;
      for (int bt = 0; bt < opt.max_backtracks; ++bt) {
        for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + step * d[i];
        f_out = fg(x_new, &g_new);
        if (f_out <= f + opt.armijo_c * step * gd && f_out < f) return true;
        step *= opt.backtrack_factor;
      }
      return false;
    };
    double f_new = 0.0;
    bool accepted = line_search(f_new);
    if (!accepted && !s_hist.empty()) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      const double g2 = std::sqrt(dot_v(g, g));
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i] / std::max(1.0, g2);
      gd = dot_v(g, d);
      accepted = line_search(f_new);
    }
    if (!accepted) {
      res.limited_by_precision = true;
      break;  // no strict decrease available in double precision
    }

    std::vector<double> s_vec(n), y_vec(n);
    for (std::size_t i = 0; i < n; ++i) {
      s_vec[i] = x_new[i] - x[i];
      y_vec[i] = g_new[i] - g[i];
    }
    const double sy = dot_v(s_vec, y_vec);
    if (sy > 1e-300) {
      s_hist.push_back(std::move(s_vec));
      y_hist.push_back(std::move(y_vec));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > opt.lbfgs_memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    x.swap(x_new);
    g.swap(g_new);
    f = f_new;
    if (opt.record_trace) res.trace.push_back(f);
  }

  res.x = std::move(x);
  res.f = f;
  res.gradient_norm = sup_norm(g);
  res.iterations = it;
  if (res.gradient_norm <= opt.gradient_tolerance || res.limited_by_precision)
    res.converged = true;
  return res;
}

LbfgsResult lbfgs_minimize(
    const std::function<double(const std::vector<double>&, std::vector<double>*)>& fg,
    std::vector<double> x0, const MinimizeOptions& options) {
  return lbfgsMinimizeImpl(fg, std::move(x0), options);
}

// Weighted union-find over angle variables: members of a group differ from
// the root by fixed offsets, so pinned bonds become exact substitutions.
namespace {

class AngleGroups {
 public:
  explicit AngleGroups(int n) : parent_(n), offset_(n, 0.0), pinned_(n, 0), pin_value_(n, 0.0) {
    for (int i = 0; i < n; ++i) parent_[i] = i;
  }

  std::pair<int, double> find(int a) {
    if (parent_[a] == a) return {a, 0.0};
    auto [root, off] = find(parent_[a]);
    parent_[a] = root;
    offset_[a] += off;
    return {root, offset_[a]};
  }

  // phi_b = phi_a + delta
  void link(int a, int b, double delta) {
    auto [ra, oa] = find(a);
    auto [rb, ob] = find(b);
    if (ra == rb) {
      if (std::abs((oa + delta) - ob) > 1e-9)
        throw std::invalid_argument("conflicting pinned bonds");
      return;
    }
    parent_[rb] = ra;
    offset_[rb] = oa + delta - ob;
    if (pinned_[rb]) {
      const double implied = pin_value_[rb] - offset_[rb];
      if (pinned_[ra] && std::abs(implied - pin_value_[ra]) > 1e-9)
        throw std::invalid_argument("conflicting pins");
      pinned_[ra] = 1;
      pin_value_[ra] = implied;
    }
  }

  void pin(int a, double value) {
    auto [root, off] = find(a);
    if (pinned_[root] && std::abs((value - off) - pin_value_[root]) > 1e-9)
      throw std::invalid_argument("conflicting pinned sites");
    pinned_[root] = 1;
    pin_value_[root] = value - off;
  }

  bool is_pinned_root(int root) const { return pinned_[root] != 0; }
  double pin_value(int root) const { return pin_value_[root]; }

 private:
  std::vector<int> parent_;
  std::vector<double> offset_;
  std::vector<char> pinned_;
  std::vector<double> pin_value_;
};

struct VariableMap {
  std::vector<int> var_of_node;      // -1 for fully pinned nodes
  std::vector<double> base_offset;   // phi_node = x[var] + base (or just base if pinned)
  int n_free = 0;
};

VariableMap build_variable_map(AngleGroups& groups, int n_nodes) {
  VariableMap m;
  m.var_of_node.assign(n_nodes, -1);
  m.base_offset.assign(n_nodes, 0.0);
  std::vector<int> var_of_root(n_nodes, -1);
  for (int i = 0; i < n_nodes; ++i) {
    auto [root, off] = groups.find(i);
    if (groups.is_pinned_root(root)) {
      m.base_offset[i] = groups.pin_value(root) + off;
      continue;
    }
    if (var_of_root[root] < 0) {
      var_of_root[root] = m.n_free++;
    }
    m.var_of_node[i] = var_of_root[root];
    m.base_offset[i] = off;
  }
  return m;
}

}  // namespace

std::pair<SpinChain1D, MinimizeReport> minimize_chain(const SpinChain1D& start,
                                                      const ModelParams1D& p,
                                                      const MinimizeOptions& options,
                                                      const ChainConstraints& constraints) {
  const int n = start.n_sites();
  AngleGroups groups(n);
  for (const PinnedBond& b : constraints.pinned_bonds) {
    if (b.bond < 0 || b.bond + 1 >= n) throw std::invalid_argument("pinned bond out of range");
    if (start.sites()[b.bond].d != start.sites()[b.bond + 1].d)
      throw std::invalid_argument("pinned bond must join sites on one circle");
    groups.link(b.bond, b.bond + 1, b.delta_phi);
  }
  for (const auto& [site, angle] : constraints.pinned_sites) {
    if (site < 0 || site >= n) throw std::invalid_argument("pinned site out of range");
    groups.pin(site, angle);
  }
  VariableMap vm = build_variable_map(groups, n);

  // Free roots start from the configuration passed in.
  std::vector<double> x0(vm.n_free, 0.0);
  std::vector<char> seen(vm.n_free, 0);
  for (int i = 0; i < n; ++i) {
    const int v = vm.var_of_node[i];
    if (v >= 0 && !seen[v]) {
      x0[v] = start.sites()[i].phi - vm.base_offset[i];
      seen[v] = 1;
    }
  }

  SpinChain1D work = start;
  double penalty_weight = constraints.boundary_penalty ? constraints.initial_penalty_weight : 0.0;
  const SystemGeometry& geom = start.geom();
  const int N = start.last_index();

  auto apply_x = [&](const std::vector<double>& x, SpinChain1D& chain) {
    for (int i = 0; i < n; ++i) {
      const int v = vm.var_of_node[i];
      chain.sites()[i].phi = (v >= 0 ? x[v] : 0.0) + vm.base_offset[i];
    }
  };

  auto fg = [&](const std::vector<double>& x, std::vector<double>* grad) {
    apply_x(x, work);
    double f = options.objective_scale * energy_H(work, p);
    std::vector<double> gsite;
    if (grad) {
      gsite = gradient_H(work, p);
      for (double& e : gsite) e *= options.objective_scale;
    }
    if (penalty_weight > 0.0) {
      const Vec3 u0 = work.point(0), u1 = work.point(1);
      const Vec3 uA = work.point(N - 1), uB = work.point(N);
      const double viol = dot(u0, u1) - dot(uA, uB);
      f += options.objective_scale * penalty_weight * viol * viol;
      if (grad) {
        const double c = options.objective_scale * penalty_weight * 2.0 * viol;
        const Vec3 t0 = tangent(geom, work.sites()[0]);
        const Vec3 t1 = tangent(geom, work.sites()[1]);
        const Vec3 tA = tangent(geom, work.sites()[N - 1]);
        const Vec3 tB = tangent(geom, work.sites()[N]);
        gsite[0] += c * dot(t0, u1);
        gsite[1] += c * dot(u0, t1);
        gsite[N - 1] -= c * dot(tA, uB);
        gsite[N] -= c * dot(uA, tB);
      }
    }
    if (grad) {
      grad->assign(vm.n_free, 0.0);
      for (int i = 0; i < n; ++i)
        if (vm.var_of_node[i] >= 0) (*grad)[vm.var_of_node[i]] += gsite[i];
    }
    return f;
  };

  MinimizeReport report;
  {
    apply_x(x0, work);
    report.energy_initial = energy_H(work, p);
  }
  LbfgsResult res;
  int ramps = 0;
  for (;;) {
    res = lbfgsMinimizeImpl(fg, x0, options);
    x0 = res.x;
    report.iterations += res.iterations;
    if (options.record_trace)
      report.trace.insert(report.trace.end(), res.trace.begin(), res.trace.end());
    if (!constraints.boundary_penalty) break;
    apply_x(x0, work);
    const double resid = check_boundary_condition(work).residual;
    if (resid < 1e-10 || ++ramps > 25) break;
    penalty_weight *= 10.0;
  }

  apply_x(x0, work);
  report.gradient_norm = res.gradient_norm;
  report.energy_final = energy_H(work, p);
  report.converged = res.converged;
  report.limited_by_precision = res.limited_by_precision;
  report.boundary_residual = check_boundary_condition(work).residual;
  return {work, report};
}

std::pair<SpinField2D, MinimizeReport> minimize_field2d(const SpinField2D& start,
                                                        const ModelParams2D& p,
                                                        const MinimizeOptions& options,
                                                        const FieldConstraints& constraints) {
  const GridDomain& dom = start.domain();
  const auto cells = dom.cells();
  const int n = static_cast<int>(cells.size());
  std::vector<int> cell_id(static_cast<std::size_t>(dom.nx()) * dom.ny(), -1);
  for (int k = 0; k < n; ++k) cell_id[dom.linear(cells[k].first, cells[k].second)] = k;
  auto id = [&](int i, int j) {
    if (!dom.contains(i, j)) throw std::invalid_argument("pinned bond outside domain");
    return cell_id[dom.linear(i, j)];
  };

  AngleGroups groups(n);
  for (const PinnedBond2D& b : constraints.pinned_bonds) {
    const int a = id(b.i, b.j);
    const int c = b.direction == 1 ? id(b.i + 1, b.j) : id(b.i, b.j + 1);
    if (start.at(b.i, b.j).d !=
        (b.direction == 1 ? start.at(b.i + 1, b.j).d : start.at(b.i, b.j + 1).d))
      throw std::invalid_argument("pinned bond must join cells on one circle");
    groups.link(a, c, b.delta_phi);
  }
  for (const auto& [cell, angle] : constraints.pinned_cells) groups.pin(id(cell.first, cell.second), angle);
  VariableMap vm = build_variable_map(groups, n);

  std::vector<double> x0(vm.n_free, 0.0);
  std::vector<char> seen(vm.n_free, 0);
  for (int k = 0; k < n; ++k) {
    const int v = vm.var_of_node[k];
    if (v >= 0 && !seen[v]) {
      x0[v] = start.at(cells[k].first, cells[k].second).phi - vm.base_offset[k];
      seen[v] = 1;
    }
  }

  SpinField2D work = start;
  auto apply_x = [&](const std::vector<double>& x, SpinField2D& field) {
    for (int k = 0; k < n; ++k) {
      const int v = vm.var_of_node[k];
      field.at(cells[k].first, cells[k].second).phi = (v >= 0 ? x[v] : 0.0) + vm.base_offset[k];
    }
  };

  auto fg = [&](const std::vector<double>& x, std::vector<double>* grad) {
    apply_x(x, work);
    const double f = options.objective_scale * energy_H2d(work, p);
    if (grad) {
      const std::vector<double> gcell = gradient_H2d(work, p);
      grad->assign(vm.n_free, 0.0);
      for (int k = 0; k < n; ++k)
        if (vm.var_of_node[k] >= 0)
          (*grad)[vm.var_of_node[k]] += options.objective_scale * gcell[k];
    }
    return f;
  };

  MinimizeReport report;
  apply_x(x0, work);
  report.energy_initial = energy_H2d(work, p);
  LbfgsResult res = lbfgsMinimizeImpl(fg, std::move(x0), options);
  apply_x(res.x, work);
  report.iterations = res.iterations;
  report.gradient_norm = res.gradient_norm;
  report.energy_final = energy_H2d(work, p);
  report.converged = res.converged;
  report.limited_by_precision = res.limited_by_precision;
  if (options.record_trace) report.trace = std::move(res.trace);
  return {work, report};
}

}  // namespace spinwall
