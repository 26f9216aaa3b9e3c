#include "spinwall/limits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "spinwall/numerics.hpp"

namespace spinwall {

std::vector<std::string> ScalingSchedule::validate() const {
  std::vector<std::string> issues;
  if (points.empty()) {
    issues.push_back("schedule has no points");
    return issues;
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const SchedulePoint& pt = points[i];
    if (!(pt.lambda > 0.0)) issues.push_back("lambda must be positive");
    if (!(pt.delta > 0.0)) issues.push_back("delta must be positive");
    if (!(pt.k > 0.0)) issues.push_back("k must be positive");
    if (i > 0 && !(pt.lambda < points[i - 1].lambda))
      issues.push_back("lambda must be strictly decreasing along the schedule");
  }
  // Soft checks: trends should move toward the declared targets.
  if (points.size() >= 2) {
    const double l_first = points.front().l(), l_last = points.back().l();
    if (std::isfinite(target_l)) {
      if (std::abs(l_last - target_l) > std::abs(l_first - target_l) + 1e-12)
        issues.push_back("warning: l_n drifts away from the declared target l");
    } else if (l_last <= l_first) {
      issues.push_back("warning: l_n does not grow although target l is infinite");
    }
    const double e_first = points.front().eta(), e_last = points.back().eta();
    if (std::isfinite(target_eta)) {
      if (std::abs(e_last - target_eta) > std::abs(e_first - target_eta) + 1e-12)
        issues.push_back("warning: eta_n drifts away from the declared target eta");
    } else if (e_last <= e_first) {
      issues.push_back("warning: eta_n does not grow although target eta is infinite");
    }
  }
  return issues;
}

double default_cell_rho(int k) { return std::max(0.01, 4.0 / std::sqrt(static_cast<double>(k))); }

// Distance from z to the closed disk spanned by circle d.
static double disk_distance(const SystemGeometry& geom, const Vec3& z, int d) {
  const Vec3& v = geom.axis(d);
  const double h = dot(z, v);
  const Vec3 perp = z - h * v;
  const double radial = std::max(0.0, norm(perp) - geom.radius());
  const double axial = h - geom.center_height();
  return std::sqrt(radial * radial + axial * axial);
}

namespace {

struct CellObjective {
  const SystemGeometry& geom;
  int d;
  double alpha;
  int k;
  Vec3 z;
  double rho;
  double weight;  // average-constraint penalty weight

  double operator()(const std::vector<double>& phi, std::vector<double>* grad) const {
    const int n = k;
    std::vector<Vec3> u(n), t(n);
    const CircleFrame& f = geom.frame(d);
    const Vec3 c = geom.center(d);
    const double R = geom.radius();
    for (int i = 0; i < n; ++i) {
      u[i] = c + R * (std::cos(phi[i]) * f.e1 + std::sin(phi[i]) * f.e2);
      t[i] = R * (-std::sin(phi[i]) * f.e1 + std::cos(phi[i]) * f.e2);
    }
    std::vector<double> terms(n - 2);
    for (int i = 0; i + 2 < n; ++i)
      terms[i] = -alpha * dot(u[i], u[i + 1]) + dot(u[i], u[i + 2]);
    double fval = pairwise_sum(terms);
    if (grad) {
      grad->assign(n, 0.0);
      for (int i = 0; i + 2 < n; ++i) {
        (*grad)[i] += -alpha * dot(t[i], u[i + 1]) + dot(t[i], u[i + 2]);
        (*grad)[i + 1] += -alpha * dot(u[i], t[i + 1]);
        (*grad)[i + 2] += dot(u[i], t[i + 2]);
      }
    }
    Vec3 avg{0, 0, 0};
    for (const Vec3& p : u) avg += p;
    avg = avg * (1.0 / n);
    const Vec3 dev = avg - z;
    const double dist = norm(dev);
    const double excess = dist - rho;
    if (excess > 0.0) {
      fval += weight * excess * excess;
      if (grad && dist > 1e-300) {
        const double cgrad = weight * 2.0 * excess / dist / n;
        for (int i = 0; i < n; ++i) (*grad)[i] += cgrad * dot(dev, t[i]);
      }
    }
    return fval;
  }

  double constraint_excess(const std::vector<double>& phi) const {
    Vec3 avg{0, 0, 0};
    for (int i = 0; i < k; ++i) avg += geom.embed(d, phi[i]);
    avg = avg * (1.0 / k);
    return std::max(0.0, norm(avg - z) - rho);
  }
};

}  // namespace

CellProblemResult fhom_estimate(const SystemGeometry& geom, const Vec3& z, double alpha, int k,
                                double rho, int restarts, std::uint64_t seed) {
  if (k < 3) throw std::invalid_argument("cell problem needs at least 3 sites");
  if (!(rho > 0.0)) throw std::invalid_argument("rho must be positive");
  CellProblemResult res;
  res.z = z;
  res.k = k;
  res.rho = rho;
  res.restarts = restarts;
  res.lower_bound = -(1.0 + alpha * alpha / 8.0);
  const double R = geom.radius();
  res.lower_bound_finite_k = res.lower_bound - alpha * R * R / (k - 2);

  std::vector<int> circles;
  for (int d = 1; d <= 2; ++d)
    if (disk_distance(geom, z, d) <= rho + 1e-9) circles.push_back(d);
  if (circles.empty()) {
    res.feasible = false;
    return res;
  }

  MinimizeOptions inner;
  inner.max_iterations = 20000;
  inner.gradient_tolerance = 1e-9;

  double best = std::numeric_limits<double>::infinity();
  const double delta = 1.0 - alpha / 4.0;
  for (int d : circles) {
    // Phase of the in-plane projection of z, used to aim the starts.
    const Vec3 perp = z - dot(z, geom.axis(d)) * geom.axis(d);
    const double base_phase =
        norm(perp) > 1e-12
            ? std::atan2(dot(perp, geom.frame(d).e2), dot(perp, geom.frame(d).e1))
            : 0.0;
    const double theta_helix =
        (delta > 0.0 && delta <= 2.0 * R * R) ? std::acos(1.0 - delta / (R * R)) : 0.0;

    Rng rng(seed * 2 + d);
    for (int r = 0; r < restarts; ++r) {
      std::vector<double> phi(k);
      if (r == 0) {
        for (int i = 0; i < k; ++i) phi[i] = base_phase;
      } else if (r == 1 && theta_helix > 0.0) {
        for (int i = 0; i < k; ++i) phi[i] = base_phase + i * theta_helix;
      } else if (r == 2 && theta_helix > 0.0) {
        for (int i = 0; i < k; ++i) phi[i] = base_phase - i * theta_helix;
      } else {
        for (int i = 0; i < k; ++i) phi[i] = rng.uniform(-M_PI, M_PI);
      }

      CellObjective obj{geom, d, alpha, k, z, rho, 1.0};
      LbfgsResult lr;
      for (int ramp = 0; ramp < 14; ++ramp) {
        lr = lbfgs_minimize([&obj](const std::vector<double>& x,
                                   std::vector<double>* g) { return obj(x, g); },
                            phi, inner);
        phi = lr.x;
        if (obj.constraint_excess(phi) <= 1e-9) break;
        obj.weight *= 10.0;
      }
      const double excess = obj.constraint_excess(phi);
      if (excess > 1e-9) continue;  // restart failed to reach the constraint set
      CellObjective plain{geom, d, alpha, k, z, rho, 0.0};
      const double w = plain(phi, nullptr);
      if (w < best) {
        best = w;
        res.d = d;
        res.best_angles = phi;
        res.constraint_residual = excess;
      }
    }
  }
  if (!std::isfinite(best)) {
    res.feasible = false;
    return res;
  }
  res.feasible = true;
  res.raw_inf = best;
  res.value = best / (k - 2);
  return res;
}

ZeroOrderResult limit_zero_order(const SystemGeometry& geom, double alpha,
                                 const std::vector<LimitPiece>& pieces, double eta, int k,
                                 int restarts, std::uint64_t seed) {
  ZeroOrderResult out;
  int jumps = 0;
  for (std::size_t i = 1; i < pieces.size(); ++i)
    if (pieces[i].d != pieces[i - 1].d) ++jumps;
  if (!std::isfinite(eta) && jumps > 0) {
    out.finite = false;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  double acc = 0.0;
  const double rho = default_cell_rho(k);
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    const CellProblemResult cell =
        fhom_estimate(geom, pieces[i].value, alpha, k, rho, restarts, seed + i);
    if (!cell.feasible) {
      out.feasible = false;
      out.value = std::numeric_limits<double>::quiet_NaN();
      return out;
    }
    acc += pieces[i].length * cell.value;
  }
  if (jumps > 0) acc += eta * jumps * norm(geom.axis(1) - geom.axis(2));
  out.value = acc;
  return out;
}

// ---- junction pricing ----

static SpinChain1D assemble_junction_chain(const SystemGeometry& geom, const JunctionStub& left,
                                           const JunctionStub& right) {
  if (left.phis.size() < 3 || right.phis.size() < 3)
    throw std::invalid_argument("junction stubs need at least 3 spins each");
  if (left.d == right.d)
    throw std::invalid_argument("junction stubs must lie on different circles");
  // Bulk sites replicate the innermost stub angles so that only the stub spins
  // enter the junction formula; the final bond is set to mirror the first so
  // the assembled chain satisfies the joint boundary condition.
  const int nl = static_cast<int>(left.phis.size());
  const int nr = static_cast<int>(right.phis.size());
  const int pad = 3;
  const int n_sites = nl + nr + 2 * pad;
  std::vector<Site> sites;
  sites.reserve(n_sites);
  const double theta_last = right.phis[nr - 1] - right.phis[nr - 2];
  // Left padding keeps the first bond equal to the final one.
  for (int i = 0; i < pad; ++i)
    sites.push_back({left.d, left.phis[0] - theta_last * (pad - i)});
  for (double phi : left.phis) sites.push_back({left.d, phi});
  for (double phi : right.phis) sites.push_back({right.d, phi});
  for (int i = 0; i < pad; ++i)
    sites.push_back({right.d, right.phis[nr - 1] + theta_last * (i + 1)});
  return SpinChain1D(1.0 / (n_sites - 1), geom, std::move(sites));
}

double junction_cost(const SystemGeometry& geom, const ModelParams1D& p, const JunctionStub& left,
                     const JunctionStub& right) {
  const SpinChain1D chain = assemble_junction_chain(geom, left, right);
  const double value = remainder_R(chain, 0, p) / chain.lambda();
  if (value < junction_lower_bound(p.alpha) - 1e-9)
    throw std::runtime_error("junction cost fell below its crude bound; check inputs");
  return value;
}

RConstantResult estimate_R_constant(const SystemGeometry& geom, const ScalingSchedule& schedule,
                                    const MinimizeOptions& options, int restarts,
                                    std::uint64_t seed) {
  RConstantResult out;
  const double theta0 = 0.3;
  for (std::size_t pi = 0; pi < schedule.points.size(); ++pi) {
    const SchedulePoint& pt = schedule.points[pi];
    const ModelParams1D p = pt.params();

    // Free variables: left stub (2 angles feeding the bracket), right stub
    // start (2 angles) and the final-piece tail (3 angles).
    auto eval = [&](const std::vector<double>& x) {
      const JunctionStub left{1, {x[0] - theta0, x[0], x[1]}};
      const JunctionStub right{2, {x[2], x[3], x[4], x[5], x[6]}};
      return junction_cost(geom, p, left, right);
    };
    auto fg = [&](const std::vector<double>& x, std::vector<double>* grad) {
      const double f0 = eval(x);
      if (grad) {
        grad->assign(x.size(), 0.0);
        const double h = 1e-6;
        std::vector<double> xs = x;
        for (std::size_t i = 0; i < x.size(); ++i) {
          xs[i] = x[i] + h;
          const double fp = eval(xs);
          xs[i] = x[i] - h;
          const double fm = eval(xs);
          xs[i] = x[i];
          (*grad)[i] = (fp - fm) / (2.0 * h);
        }
      }
      return f0;
    };

    MinimizeOptions inner = options;
    inner.gradient_tolerance = std::max(options.gradient_tolerance, 1e-9);
    inner.max_iterations = 5000;

    Rng rng(seed + pi);
    double best = std::numeric_limits<double>::infinity();
    bool converged = false;
    for (int r = 0; r < restarts; ++r) {
      std::vector<double> x0(7);
      if (r == 0) {
        x0 = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
      } else if (r == 1) {
        x0 = {0.0, 0.0, M_PI, M_PI, M_PI, M_PI, M_PI};
      } else {
        for (double& v : x0) v = rng.uniform(-M_PI, M_PI);
      }
      const LbfgsResult lr = lbfgs_minimize(fg, x0, inner);
      if (lr.f < best) {
        best = lr.f;
        converged = lr.converged;
      }
    }

    RConstantRow row;
    row.n = pt.n;
    row.alpha = p.alpha;
    row.value = best;
    row.converged = converged;
    if (!out.rows.empty())
      row.cauchy_diff =
          std::abs(best - out.rows.back().value) / std::max(1.0, std::abs(out.rows.back().value));
    out.rows.push_back(row);
  }
  out.value = out.rows.back().value;
  if (out.rows.size() >= 2) {
    const double a = out.rows[out.rows.size() - 2].value;
    const double b = out.rows.back().value;
    out.stable = std::abs(b - a) <= 0.01 * std::max(1.0, std::abs(a));
  }
  return out;
}

// ---- second order ----

double limit_second_order_l0(const ChiralityField1D& field) {
  for (const ChiralityBond& b : field.bonds) {
    if (b.synthetic) continue;
    if (std::abs(std::abs(b.w) - 1.0) > 1e-6)
      throw std::domain_error(
          "chirality is not sharp (values off {-1,+1}); use the finite-l functional");
  }
  return (8.0 / 3.0) * total_variation_w(field, false);
}

FiniteLResult limit_second_order_finite_l(const std::vector<std::vector<double>>& piece_samples,
                                          double h, double l) {
  if (!(l > 0.0) || !std::isfinite(l))
    throw std::invalid_argument("l must be finite and positive");
  if (!(h > 0.0)) throw std::invalid_argument("grid spacing must be positive");
  FiniteLResult out;
  double acc = 0.0;
  for (const std::vector<double>& w : piece_samples) {
    if (w.size() < 2) continue;
    if (std::abs(std::abs(w.front()) - std::abs(w.back())) > 1e-6) out.boundary_ok = false;
    std::vector<double> well(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      const double q = w[i] * w[i] - 1.0;
      well[i] = q * q;
    }
    double well_integral = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
      well_integral += 0.5 * (well[i] + well[i + 1]) * h;
    double grad_integral = 0.0;
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      const double dw = (w[i + 1] - w[i]) / h;
      grad_integral += dw * dw * h;
    }
    acc += well_integral / l + l * grad_integral;
  }
  out.value = acc;
  return out;
}

double limit_2d(const ChiralityField2D& normalized, const SpinField2D& spins) {
  const Partition2D part = partition(spins);
  const double lambda = spins.lambda();
  for (int j = normalized.w.j0; j < normalized.w.j0 + normalized.w.ny; ++j)
    for (int i = normalized.w.i0; i < normalized.w.i0 + normalized.w.nx; ++i) {
      if (normalized.w.has(i, j) && std::abs(std::abs(normalized.w.at(i, j)) - 1.0) > 1e-6)
        throw std::domain_error("w is not sharp (values off {-1,+1})");
      if (normalized.z.has(i, j) && std::abs(std::abs(normalized.z.at(i, j)) - 1.0) > 1e-6)
        throw std::domain_error("z is not sharp (values off {-1,+1})");
    }
  const double curl = discrete_curl_residual(normalized.w, normalized.z, lambda);
  if (curl >= 1e-6)
    throw std::domain_error("curl residual " + std::to_string(curl) +
                            " violates the curl-free domain condition");
  double acc = 0.0;
  for (const Component& comp : part.components) {
    acc += directional_total_variation(normalized.w, 1, lambda, comp);
    acc += directional_total_variation(normalized.z, 2, lambda, comp);
  }
  return (4.0 / 3.0) * acc;
}

// ---- measured wall cost ----

WallCost wall_cost_measured(const SystemGeometry& geom, const SchedulePoint& point,
                            const WallOptions& options) {
  const ModelParams1D p = point.params();
  const int n_sites = point.n + 1;
  SpinChain1D start = build_wall_profile(n_sites, p, 1, options.center, geom);
  const int N = start.last_index();
  const double R = geom.radius();

  auto bond_angle_of_wbar = [&](double wbar) {
    return 2.0 * std::asin(std::sqrt(p.delta / 2.0) * wbar / R);
  };

  double theta_left, theta_right;
  switch (options.pin) {
    case WallPin::ground: {
      const double tg = std::acos(1.0 - p.delta / (R * R));
      theta_left = -tg;
      theta_right = tg;
      break;
    }
    case WallPin::value: {
      theta_left = -bond_angle_of_wbar(options.pin_wbar);
      theta_right = bond_angle_of_wbar(options.pin_wbar);
      // Rescale the starting profile so that its end bonds hit the pinned
      // values; otherwise wide profiles (l of order one) start with a cliff
      // against the pins.
      const double ell = start.lambda() / std::sqrt(p.delta);
      const double amp = options.pin_wbar / std::tanh(0.5 / ell);
      std::vector<Site>& sites = start.sites();
      for (int b = 0; b + 1 < n_sites; ++b) {
        const double x = start.lambda() * (b + 0.5);
        const double wbar = amp * std::tanh((x - options.center) / ell);
        sites[b + 1].phi = sites[b].phi + bond_angle_of_wbar(std::clamp(wbar, -1.0, 1.0));
      }
      break;
    }
    case WallPin::profile_ends:
    default: {
      theta_left = start.sites()[1].phi - start.sites()[0].phi;
      theta_right = start.sites()[N].phi - start.sites()[N - 1].phi;
      break;
    }
  }

  ChainConstraints constraints;
  constraints.pinned_bonds = {{0, theta_left},
                              {1, theta_left},
                              {N - 2, theta_right},
                              {N - 1, theta_right}};

  WallCost out{0.0, 0.0, {}, start};
  MinimizeOptions opts = options.minimize;
  const double normalization = std::sqrt(2.0) * point.lambda * std::pow(p.delta, 1.5);
  opts.objective_scale = 1.0 / normalization;
  auto [chain, report] = minimize_chain(start, p, opts, constraints);
  out.normalization = normalization;
  out.value = report.energy_final / normalization;
  out.report = report;
  out.chain = std::move(chain);
  return out;
}

std::vector<WallScheduleRow> wall_cost_schedule(const SystemGeometry& geom,
                                                const ScalingSchedule& schedule,
                                                const WallOptions& options, int threads) {
  const std::size_t n = schedule.points.size();
  std::vector<WallScheduleRow> rows(n);
  auto run_point = [&](std::size_t i) {
    const WallCost wc = wall_cost_measured(geom, schedule.points[i], options);
    rows[i].point = schedule.points[i];
    rows[i].value = wc.value;
    rows[i].converged = wc.report.converged;
  };
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) run_point(i);
  } else {
    std::vector<std::thread> pool;
    std::size_t next = 0;
    std::mutex mu;
    const int tcount = std::min<std::size_t>(threads, n);
    for (int t = 0; t < tcount; ++t)
      pool.emplace_back([&]() {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= n) return;
            i = next++;
          }
          run_point(i);
        }
      });
    for (std::thread& t : pool) t.join();
  }
  for (std::size_t i = 1; i < n; ++i)
    rows[i].cauchy_diff =
        std::abs(rows[i].value - rows[i - 1].value) / std::max(1.0, std::abs(rows[i - 1].value));
  return rows;
}

}  // namespace spinwall
