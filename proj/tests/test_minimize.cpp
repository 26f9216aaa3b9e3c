#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "doctest.h"
#include "helpers.hpp"
#include "spinwall/limits.hpp"
#include "spinwall/minimize.hpp"

using namespace spinwall;
using testing::antipodal_geometry;
using testing::random_bc_chain;

TEST_CASE("builders") {
  const SystemGeometry g = antipodal_geometry(0.8);
  const ModelParams1D p = ModelParams1D::from_alpha(3.9, 1.0);

  const SpinChain1D f = build_ferromagnet(10, 1, 0.3, g);
  CHECK(anisotropy_map(f).total_variation == 0.0);
  CHECK(energy_E(f, p) ==
        doctest::Approx(-f.lambda() * (p.alpha - 1) * stencil_count(f)).epsilon(1e-14));
  // At alpha = 4 the ferromagnet sits exactly on the energy floor.
  const ModelParams1D p4 = ModelParams1D::from_alpha(4.0, 1.0);
  CHECK(energy_H(f, p4) < 1e-15);

  // alpha = 4 helix degenerates to the ferromagnet.
  const SpinChain1D h4 = build_ground_helix(10, p4, 1, 1, 0.3, g);
  for (const Site& s : h4.sites()) CHECK(s.phi == doctest::Approx(0.3).epsilon(1e-15));

  // alpha = 3.9, R = 0.8: the bond angle solves cos(theta) = 0.9609375.
  const SpinChain1D h = build_ground_helix(101, p, 1, 1, 0.0, g);
  CHECK(dot(h.point(7), h.point(8)) == doctest::Approx(0.975).epsilon(1e-13));
  CHECK(h.sites()[1].phi == doctest::Approx(std::acos(0.9609375)).epsilon(1e-13));
  CHECK(check_boundary_condition(h).satisfied);

  // Too much frustration for the circle radius.
  const ModelParams1D strong = ModelParams1D::from_delta(0.9, 1.0);
  CHECK_THROWS_AS(build_ground_helix(10, strong, 1, 1, 0.0, antipodal_geometry(0.5)),
                  std::domain_error);
}

TEST_CASE("wall profile") {
  const SystemGeometry g = antipodal_geometry(0.8);
  const ModelParams1D p = ModelParams1D::from_delta(0.01, 1.0);
  // 513 bonds put one bond midpoint exactly at the wall center.
  const int n = 514;
  const SpinChain1D c = build_wall_profile(n, p, 1, 0.5, g);
  const double theta_g = std::acos(1.0 - p.delta / 0.64);
  // Saturated tails carry the ground bond angle with opposite signs.
  const double first = c.sites()[1].phi - c.sites()[0].phi;
  const double last = c.sites()[n - 1].phi - c.sites()[n - 2].phi;
  CHECK(first == doctest::Approx(-theta_g).epsilon(1e-6));
  CHECK(last == doctest::Approx(theta_g).epsilon(1e-6));
  // Center bond is flat.
  const int mid = (n - 2) / 2;
  CHECK(std::abs(c.sites()[mid + 1].phi - c.sites()[mid].phi) < 1e-12);

  // The chirality transform recovers the tanh profile.
  const ChiralityField1D ch = normalize_chirality(transform_T1d(c, p), 0.8);
  const double ell = c.lambda() / std::sqrt(p.delta);
  for (int b : {10, 100, 256, 400, 500}) {
    const double x = c.lambda() * (b + 0.5);
    CHECK(ch.bonds[b].w == doctest::Approx(std::tanh((x - 0.5) / ell)).epsilon(1e-8));
  }
}

TEST_CASE("oscillating construction averages toward the convex combination") {
  const SystemGeometry g = antipodal_geometry(0.8);
  // Antipodal circle points with equal fractions: averages approach the
  // circle center.
  const int n = 2049;
  const SpinChain1D c = build_oscillating(
      g, {{Site{1, 0.0}, 0.5}, {Site{1, M_PI}, 0.5}}, (n - 1) / 2, n);
  const Vec3 center = g.center(1);
  for (int window : {32, 128, 512}) {
    double worst = 0.0;
    for (int start = 0; start + window <= n; start += 97) {
      Vec3 avg{0, 0, 0};
      for (int i = start; i < start + window; ++i) avg += c.point(i);
      avg = avg * (1.0 / window);
      worst = std::max(worst, norm(avg - center));
    }
    CHECK(worst <= 2.0 / window);
  }

  // Degenerate fraction lists give constant chains.
  const SpinChain1D single = build_oscillating(g, {{Site{1, 0.7}, 1.0}}, 16, 65);
  for (const Site& s : single.sites()) CHECK(s.phi == 0.7);
  const SpinChain1D skewed =
      build_oscillating(g, {{Site{2, 0.7}, 1.0}, {Site{2, 2.0}, 0.0}}, 16, 65);
  for (const Site& s : skewed.sites()) CHECK(s.phi == 0.7);

  CHECK_THROWS_AS(build_oscillating(g, {{Site{1, 0.0}, 0.5}, {Site{2, 0.0}, 0.5}}, 8, 33),
                  std::domain_error);
}

TEST_CASE("concatenation of recovery sequences") {
  const SystemGeometry g = antipodal_geometry(0.8);
  const ModelParams1D p = ModelParams1D::from_alpha(3.9, 1.0);
  const SpinChain1D f1 = build_ferromagnet(101, 1, 0.2, g);
  const SpinChain1D f2 = build_ferromagnet(101, 2, -0.4, g);
  const SpinChain1D c = concatenate_recovery(f1, f2);
  CHECK(anisotropy_map(c).jump_count == 1);
  CHECK(anisotropy_map(c).total_variation == doctest::Approx(2.0).epsilon(1e-14));
  // Junction terms are bounded by the coupling constants.
  const double e = energy_E(c, p);
  const double bulk = -c.lambda() * (p.alpha - 1) *
                      (stencil_count(c) - 3);  // up to 3 stencils touch the junction
  CHECK(std::abs(e - bulk) <= 2 * (p.alpha + 1) * 3 * c.lambda());

  const SpinChain1D other(0.5, g, std::vector<Site>(3, Site{1, 0.0}));
  CHECK_THROWS_AS(concatenate_recovery(f1, other), std::domain_error);
}

TEST_CASE("analytic gradients match central differences") {
  const SystemGeometry g = antipodal_geometry(0.8);
  const ModelParams1D p = ModelParams1D::from_alpha(3.9, 1.0);
  Rng rng(1234);
  for (int t = 0; t < 10; ++t) {
    SpinChain1D c = random_bc_chain(g, 40, 2, rng);
    const std::vector<double> ge = gradient_E(c, p);
    const std::vector<double> gh = gradient_H(c, p);
    const double h = 1e-6;
    double worst_e = 0.0, worst_h = 0.0, scale_e = 0.0, scale_h = 0.0;
    for (int i = 0; i < c.n_sites(); ++i) {
      const double phi0 = c.sites()[i].phi;
      c.sites()[i].phi = phi0 + h;
      const double ep = energy_E(c, p), hp = energy_H(c, p);
      c.sites()[i].phi = phi0 - h;
      const double em = energy_E(c, p), hm = energy_H(c, p);
      c.sites()[i].phi = phi0;
      worst_e = std::max(worst_e, std::abs(ge[i] - (ep - em) / (2 * h)));
      worst_h = std::max(worst_h, std::abs(gh[i] - (hp - hm) / (2 * h)));
      scale_e = std::max(scale_e, std::abs(ge[i]));
      scale_h = std::max(scale_h, std::abs(gh[i]));
    }
    CHECK(worst_e <= 1e-6 * std::max(1.0, scale_e));
    CHECK(worst_h <= 1e-6 * std::max(1.0, scale_h));
  }

  // 2D.
  const ModelParams2D p2 = ModelParams2D::from_delta(0.025, 1.0);
  GridDomain dom(0.125, {CellRect{0, 0, 8, 8}});
  std::vector<Site> vals;
  for (int k = 0; k < dom.cell_count(); ++k)
    vals.push_back({1 + static_cast<int>(rng.below(2)), rng.uniform(-M_PI, M_PI)});
  SpinField2D f(dom, g, vals);
  const std::vector<double> g2 = gradient_H2d(f, p2);
  const auto cells = dom.cells();
  const double h = 1e-6;
  double worst = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    Site& s = f.at(cells[k].first, cells[k].second);
    const double phi0 = s.phi;
    s.phi = phi0 + h;
    const double ep = energy_H2d(f, p2);
    s.phi = phi0 - h;
    const double em = energy_H2d(f, p2);
    s.phi = phi0;
    worst = std::max(worst, std::abs(g2[k] - (ep - em) / (2 * h)));
    scale = std::max(scale, std::abs(g2[k]));
  }
  CHECK(worst <= 1e-6 * std::max(1.0, scale));
}

TEST_CASE("stationary configurations") {
  const ModelParams1D p = ModelParams1D::from_alpha(3.9, 1.0);

  // The ferromagnet is an exact critical point of both energies at any R.
  const SystemGeometry g8 = antipodal_geometry(0.8);
  const SpinChain1D f = build_ferromagnet(60, 1, 0.4, g8);
  for (double v : gradient_E(f, p)) CHECK(std::abs(v) < 1e-10);
  for (double v : gradient_H(f, p)) CHECK(std::abs(v) < 1e-10);
  // ... but not a minimum below the transition point: a helical tilt lowers E.
  SpinChain1D tilted = f;
  for (int i = 0; i < tilted.n_sites(); ++i) tilted.sites()[i].phi += 0.05 * i;
  CHECK(energy_E(tilted, p) < energy_E(f, p));

  // The renormalized energy is stationary on the chart helix once the circle
  // is close to unit radius.
  const SystemGeometry g1 = antipodal_geometry(1.0 - 1e-9);
  const SpinChain1D h = build_ground_helix(60, p, 1, 1, 0.0, g1);
  for (double v : gradient_H(h, p)) CHECK(std::abs(v) < 1e-10);

  // The helix whose in-plane step solves cos(theta) = alpha/4 is an exact
  // critical point of the renormalized energy at every radius.
  const double theta = std::acos(p.alpha / 4.0);
  std::vector<Site> sites(60);
  for (int i = 0; i < 60; ++i) sites[i] = {1, theta * i};
  const SpinChain1D hc(1.0 / 59, g8, sites);
  for (double v : gradient_H(hc, p)) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("descent from a perturbed helix restores the floor") {
  const SystemGeometry g = antipodal_geometry(1.0 - 1e-9);
  const ModelParams1D p = ModelParams1D::from_delta(0.02, 1.0);
  const SpinChain1D h = build_ground_helix(101, p, 1, 1, 0.0, g);
  SpinChain1D start = h;
  Rng rng(88);
  for (Site& s : start.sites()) s.phi += rng.uniform(-0.02, 0.02);

  MinimizeOptions opts;
  opts.record_trace = true;
  const auto [best, report] = minimize_chain(start, p, opts);
  CHECK(report.converged);
  CHECK(energy_H(best, p) < 1e-10);
  for (std::size_t i = 1; i < report.trace.size(); ++i)
    CHECK(report.trace[i] <= report.trace[i - 1]);

  // Bit-for-bit determinism.
  const auto [best2, report2] = minimize_chain(start, p, opts);
  CHECK(report2.iterations == report.iterations);
  for (int i = 0; i < best.n_sites(); ++i)
    CHECK(best2.sites()[i].phi == best.sites()[i].phi);
}

TEST_CASE("above the transition point descent lands on ferromagnets") {
  const SystemGeometry g = antipodal_geometry(0.8);
  const ModelParams1D p = ModelParams1D::from_alpha(4.5, 1.0);
  const int n = 51;
  const SpinChain1D ferro = build_ferromagnet(n, 1, 0.0, g);
  const double e_ferro = energy_E(ferro, p);

  Rng rng(404);
  int reached = 0;
  for (int t = 0; t < 100; ++t) {
    std::vector<Site> sites(n);
    for (Site& s : sites) s = {1, rng.uniform(-M_PI, M_PI)};
    const SpinChain1D start(1.0 / (n - 1), g, sites);
    MinimizeOptions opts;
    ChainConstraints cons;
    cons.boundary_penalty = true;
    const auto [best, report] = minimize_chain(start, p, opts, cons);
    CHECK(energy_E(best, p) >= e_ferro - 1e-10);
    bool constant = true;
    for (int i = 0; i + 1 < n; ++i)
      if (dot(best.point(i), best.point(i + 1)) < 1.0 - 1e-6) constant = false;
    if (constant) ++reached;
  }
  CHECK(reached == 100);

  // A free minimization started at the ferromagnet stays there.
  MinimizeOptions opts;
  const auto [stay, report] = minimize_chain(ferro, p, opts);
  CHECK(report.iterations == 0);
  Rng rng2(77);
  for (int t = 0; t < 20; ++t) {
    SpinChain1D jig = stay;
    for (Site& s : jig.sites()) s.phi += rng2.uniform(-1e-3, 1e-3);
    CHECK(energy_E(jig, p) >= energy_E(stay, p) - 1e-10);
  }
}

TEST_CASE("multistart reaches the ground value near unit radius") {
  const SystemGeometry g = antipodal_geometry(1.0 - 1e-9);
  const ModelParams1D p = ModelParams1D::from_alpha(3.9, 1.0);
  const int n = 201;
  const double ground = -(1.0 / (n - 1)) * (1 + p.alpha * p.alpha / 8) * (n - 2);
  const double R2 = g.radius() * g.radius();
  const double tg = std::acos((p.alpha / 4 - 1 + R2) / R2);
  MinimizeOptions opts;
  ChainConstraints cons;
  cons.boundary_penalty = true;

  // Rough random walks: isolated chirality walls survive descent, so these
  // runs stop at small wall multiples above the floor but never below it.
  Rng rng(2024);
  for (int t = 0; t < 12; ++t) {
    std::vector<Site> sites(n);
    double phi = rng.uniform(-M_PI, M_PI);
    for (int i = 0; i < n; ++i) {
      sites[i] = {1, phi};
      phi += rng.uniform(-0.6, 0.6);
    }
    const auto [best, report] = minimize_chain(SpinChain1D(1.0 / (n - 1), g, sites), p, opts, cons);
    const double e = energy_E(best, p);
    CHECK(e >= ground - 1e-9);
  }

  // Helix-neighborhood starts (random chirality sign and phase, +-0.3 rad
  // site noise): at least 95% land on the ground value.
  int reached = 0;
  const int runs = 50;
  for (int t = 0; t < runs; ++t) {
    const int sign = rng.uniform() < 0.5 ? -1 : 1;
    const double phase = rng.uniform(-M_PI, M_PI);
    std::vector<Site> sites(n);
    for (int i = 0; i < n; ++i) sites[i] = {1, phase + sign * tg * i + rng.uniform(-0.3, 0.3)};
    const auto [best, report] = minimize_chain(SpinChain1D(1.0 / (n - 1), g, sites), p, opts, cons);
    const double e = energy_E(best, p);
    CHECK(e >= ground - 1e-9);
    if (e <= ground + 1e-9) ++reached;
  }
  CHECK(reached >= static_cast<int>(0.95 * runs));
}

TEST_CASE("pinned bonds are enforced exactly") {
  const SystemGeometry g = antipodal_geometry(0.8);
  const ModelParams1D p = ModelParams1D::from_delta(0.01, 1.0);
  const int n = 257;
  const SpinChain1D start = build_wall_profile(n, p, 1, 0.5, g);
  const double tg = std::acos(1.0 - p.delta / 0.64);
  ChainConstraints cons;
  cons.pinned_bonds = {{0, -tg}, {1, -tg}, {n - 3, tg}, {n - 2, tg}};
  MinimizeOptions opts;
  const auto [best, report] = minimize_chain(start, p, opts, cons);
  CHECK(best.sites()[1].phi - best.sites()[0].phi == doctest::Approx(-tg).epsilon(1e-14));
  CHECK(best.sites()[n - 1].phi - best.sites()[n - 2].phi ==
        doctest::Approx(tg).epsilon(1e-14));
  // Opposite pins satisfy the joint boundary condition automatically.
  CHECK(report.boundary_residual < 1e-12);
  CHECK(energy_H(best, p) <= energy_H(start, p));
}

TEST_CASE("2d minimization against a coordinate-sweep oracle") {
  const SystemGeometry g = antipodal_geometry(0.8);
  const ModelParams2D p = ModelParams2D::from_delta(0.05, 1.0);
  GridDomain dom(1.0 / 6, {CellRect{0, 0, 6, 6}});
  Rng rng(99);
  std::vector<Site> vals;
  for (int k = 0; k < dom.cell_count(); ++k) vals.push_back({1, rng.uniform(-M_PI, M_PI)});
  const SpinField2D start(dom, g, vals);

  // Oracle: exhaustive per-cell sweep over a 12-degree grid, iterated to a
  // grid-local minimum, then the continuous minimizer must do at least as
  // well from the same start.
  SpinField2D sweep = start;
  const auto cells = dom.cells();
  bool improved = true;
  int rounds = 0;
  while (improved && rounds < 200) {
    improved = false;
    ++rounds;
    for (const auto& [i, j] : cells) {
      double best_phi = sweep.at(i, j).phi;
      double best_e = energy_H2d(sweep, p);
      for (int step = 0; step < 30; ++step) {
        sweep.at(i, j).phi = -M_PI + step * (M_PI / 15.0);
        const double e = energy_H2d(sweep, p);
        if (e < best_e - 1e-15) {
          best_e = e;
          best_phi = sweep.at(i, j).phi;
          improved = true;
        }
      }
      sweep.at(i, j).phi = best_phi;
    }
  }
  const double oracle = energy_H2d(sweep, p);

  // The normalized 2d energy is order one, so gradient components below
  // ~1e-7 drown in rounding; 1e-7 is the realistic target there.
  MinimizeOptions opts;
  opts.gradient_tolerance = 1e-7;
  const auto [best, report] = minimize_field2d(start, p, opts);
  CHECK(report.converged);
  CHECK(energy_H2d(best, p) <= oracle + 1e-9);

  // Constant fields stay put at alpha >= 4.
  const ModelParams2D p4 = ModelParams2D::from_delta(0.0, 1.0);
  std::vector<Site> flat(dom.cell_count(), Site{1, 0.2});
  const SpinField2D constant(dom, g, flat);
  const auto [kept, report4] = minimize_field2d(constant, p4, opts);
  CHECK(report4.iterations == 0);
  for (const auto& [i, j] : cells) CHECK(kept.at(i, j).phi == 0.2);
}

TEST_CASE("minimized row walls stay aligned across rows") {
  const double R = 0.9999;
  const SystemGeometry g = antipodal_geometry(R);
  const int n = 32;
  const ModelParams1D p1 = ModelParams1D::from_delta(0.02, 1.0);
  const ModelParams2D p2 = ModelParams2D::from_delta(0.02, 32.0);
  const SpinChain1D profile = build_wall_profile(n + 1, p1, 1, 0.5, g);
  const double tg = std::acos(1.0 - p1.delta / (R * R));
  GridDomain dom(1.0 / n, {CellRect{0, 0, n, n}});
  std::vector<Site> vals;
  for (const auto& [i, j] : dom.cells()) vals.push_back({1, profile.sites()[i].phi + tg * j});
  const SpinField2D start(dom, g, vals);
  FieldConstraints cons;
  const double tl = profile.sites()[1].phi - profile.sites()[0].phi;
  const double tr = profile.sites()[n].phi - profile.sites()[n - 1].phi;
  for (int j = 0; j < n; ++j) {
    cons.pinned_bonds.push_back({0, j, 1, tl});
    cons.pinned_bonds.push_back({1, j, 1, tl});
    cons.pinned_bonds.push_back({n - 3, j, 1, tr});
    cons.pinned_bonds.push_back({n - 2, j, 1, tr});
  }
  MinimizeOptions mo;
  mo.gradient_tolerance = 1e-6;
  const auto [field, report] = minimize_field2d(start, p2, mo, cons);
  CHECK(report.converged);

  // All rows carry the same horizontal chirality profile.
  const ChiralityField2D ch = transform_T2d(field, p1);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!ch.w.has(i, 0)) continue;
    for (int j = 1; j < n; ++j)
      if (ch.w.has(i, j)) worst = std::max(worst, std::abs(ch.w.at(i, j) - ch.w.at(i, 0)));
  }
  CHECK(worst < 1e-3);
}
