#include <cmath>
#include <stdexcept>
#include <algorithm>
#include <functional>

#include "doctest.h"
#include "helpers.hpp"
#include "spinwall/energy2d.hpp"

using namespace spinwall;
using testing::antipodal_geometry;

namespace {
SpinField2D make_field(const GridDomain& dom, const SystemGeometry& g,
                       const std::function<Site(int, int)>& f) {
  std::vector<Site> vals;
  for (const auto& [i, j] : dom.cells()) vals.push_back(f(i, j));
  return SpinField2D(dom, g, std::move(vals));
}

SpinField2D random_field(const GridDomain& dom, const SystemGeometry& g, Rng& rng,
                         int max_circles = 2) {
  return make_field(dom, g, [&](int, int) {
    return Site{1 + static_cast<int>(rng.below(max_circles)), rng.uniform(-M_PI, M_PI)};
  });
}
}  // namespace

TEST_CASE("interior index sets") {
  GridDomain unit(0.25, {CellRect{0, 0, 4, 4}});
  CHECK(index_set_2d(unit).size() == 9);     // 3-square rule
  CHECK(full_stencil_index_set(unit).size() == 4);  // the energy's 5-square cross

  GridDomain coarse(0.6, {CellRect{0, 0, 1, 1}});
  CHECK(index_set_2d(coarse).empty());

  // L-shape on a 6x6 grid: a 6x3 bar plus a 3x3 block above its left half.
  GridDomain ell(1.0 / 6, {CellRect{0, 0, 6, 3}, CellRect{0, 3, 3, 6}});
  // By hand: the 3-square rule needs (i+1,j) and (i,j+1) inside. Bar rows
  // j=0,1: i=0..4; j=2: the cell above must lie in the block, so i=0..2;
  // block rows j=3,4: the right neighbor caps i at 1.
  std::vector<std::pair<int, int>> expect;
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 5; ++i) expect.emplace_back(i, j);
  for (int i = 0; i < 3; ++i) expect.emplace_back(i, 2);
  for (int j = 3; j < 5; ++j)
    for (int i = 0; i < 2; ++i) expect.emplace_back(i, j);
  auto got = index_set_2d(ell);
  std::sort(got.begin(), got.end());
  std::sort(expect.begin(), expect.end());
  CHECK(got == expect);
}

TEST_CASE("constant field H value") {
  const SystemGeometry g = antipodal_geometry(0.8);
  const ModelParams2D p = ModelParams2D::from_delta(0.01, 1.0);
  GridDomain dom(1.0 / 16, {CellRect{0, 0, 16, 16}});
  const SpinField2D f = make_field(dom, g, [](int, int) { return Site{1, 0.7}; });
  const double count = full_stencil_index_set(dom).size();
  const double expected = 2.0 * std::sqrt(2.0) * f.lambda() * std::sqrt(p.delta) * count;
  CHECK(energy_H2d(f, p) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(energy_H2d(f, p) >= 0.0);
}

TEST_CASE("row helix with constant columns against a direct 5x5 sum") {
  const SystemGeometry g = antipodal_geometry(0.8);
  const ModelParams2D p = ModelParams2D::from_delta(0.02, 1.0);
  const double theta = std::acos(1.0 - p.delta / 0.64);
  GridDomain dom(0.2, {CellRect{0, 0, 5, 5}});
  const SpinField2D f =
      make_field(dom, g, [&](int i, int) { return Site{1, theta * i}; });
  // Independent evaluation of the double sum.
  double sum = 0.0;
  for (const auto& [i, j] : full_stencil_index_set(dom)) {
    const Vec3 row = f.point(i + 2, j) - (p.alpha / 2) * f.point(i + 1, j) + f.point(i, j);
    const Vec3 col = f.point(i, j + 2) - (p.alpha / 2) * f.point(i, j + 1) + f.point(i, j);
    sum += dot(row, row) + dot(col, col);
  }
  const double expected = (0.2 * 0.2 / 2.0) * sum / p.normalization(0.2);
  CHECK(energy_H2d(f, p) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("2d anisotropy pricing") {
  const SystemGeometry g = antipodal_geometry(0.8);
  const ModelParams2D p = ModelParams2D::from_delta(0.01, 5.0);
  GridDomain dom(1.0 / 64, {CellRect{0, 0, 64, 64}});
  const SpinField2D split =
      make_field(dom, g, [](int i, int) { return Site{i < 32 ? 1 : 2, 0.0}; });
  CHECK(energy_P2d(split, p) ==
        doctest::Approx(split.lambda() * p.k * 1.0 * 2.0).epsilon(1e-12));

  const SpinField2D one = make_field(dom, g, [](int i, int j) {
    return Site{(i == 10 && j == 12) ? 2 : 1, 0.0};
  });
  CHECK(energy_P2d(one, p) ==
        doctest::Approx(one.lambda() * p.k * 4 * one.lambda() * 2.0).epsilon(1e-12));

  const SpinField2D constant = make_field(dom, g, [](int, int) { return Site{2, 0.4}; });
  CHECK(energy_P2d(constant, p) == 0.0);
}

TEST_CASE("remainders and the component split") {
  const SystemGeometry g = antipodal_geometry(0.8);
  const ModelParams2D p = ModelParams2D::from_delta(0.02, 1.0);

  // Single component: no remainder.
  GridDomain dom8(0.125, {CellRect{0, 0, 8, 8}});
  Rng rng(31);
  const SpinField2D single = random_field(dom8, g, rng, 1);
  const Partition2D part1 = partition(single);
  REQUIRE(part1.M() == 1);
  CHECK(remainder_R2d(single, part1.components[0], p) == 0.0);
  const ScriptH2D s1 = energy_script_H2d(single, p);
  CHECK(s1.scriptH == doctest::Approx(s1.H).epsilon(1e-13));

  // Vertical split: the remainder matches a brute-force recount.
  const SpinField2D split =
      make_field(dom8, g, [&](int i, int) { return Site{i < 4 ? 1 : 2, 0.15 * i}; });
  const Partition2D part2 = partition(split);
  REQUIRE(part2.M() == 2);
  for (const Component& comp : part2.components) {
    std::vector<std::pair<int, int>> cells = comp.cells;
    std::sort(cells.begin(), cells.end());
    auto in_comp = [&](int i, int j) {
      return std::binary_search(cells.begin(), cells.end(), std::make_pair(i, j));
    };
    double sum = 0.0;
    for (const auto& [i, j] : full_stencil_index_set(dom8)) {
      if (!in_comp(i, j)) continue;
      const bool interior = in_comp(i + 1, j) && in_comp(i + 2, j) && in_comp(i, j + 1) &&
                            in_comp(i, j + 2);
      if (interior) continue;
      const Vec3 row = split.point(i + 2, j) - (p.alpha / 2) * split.point(i + 1, j) +
                       split.point(i, j);
      const Vec3 col = split.point(i, j + 2) - (p.alpha / 2) * split.point(i, j + 1) +
                       split.point(i, j);
      sum += dot(row, row) + dot(col, col);
    }
    const double expected = (split.lambda() * split.lambda() / 2.0) * sum /
                            p.normalization(split.lambda());
    CHECK(remainder_R2d(split, comp, p) == doctest::Approx(expected).epsilon(1e-13));
  }

  // A single dissenting square carries its whole stencil contribution.
  const SpinField2D lone = make_field(dom8, g, [](int i, int j) {
    return Site{(i == 3 && j == 3) ? 2 : 1, 0.2};
  });
  const Partition2D part3 = partition(lone);
  for (const Component& comp : part3.components) {
    if (comp.cells.size() != 1) continue;
    const double r = remainder_R2d(lone, comp, p);
    const Vec3 row = lone.point(5, 3) - (p.alpha / 2) * lone.point(4, 3) + lone.point(3, 3);
    const Vec3 col = lone.point(3, 5) - (p.alpha / 2) * lone.point(3, 4) + lone.point(3, 3);
    const double expected = (lone.lambda() * lone.lambda() / 2.0) *
                            (dot(row, row) + dot(col, col)) / p.normalization(lone.lambda());
    CHECK(r == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("H decomposes into components plus remainders") {
  const SystemGeometry g = antipodal_geometry(0.8);
  const ModelParams2D p = ModelParams2D::from_delta(0.02, 1.0);
  Rng rng(47);
  for (int t = 0; t < 100; ++t) {
    // Random union of two overlapping rectangles.
    const int w1 = 4 + static_cast<int>(rng.below(6));
    const int h1 = 4 + static_cast<int>(rng.below(6));
    const int w2 = 4 + static_cast<int>(rng.below(6));
    const int h2 = 4 + static_cast<int>(rng.below(6));
    const int ox = static_cast<int>(rng.below(5));
    const int oy = static_cast<int>(rng.below(5));
    GridDomain dom(1.0 / 16,
                   {CellRect{0, 0, w1, h1}, CellRect{ox, oy, ox + w2, oy + h2}});
    const SpinField2D f = random_field(dom, g, rng);
    const ScriptH2D s = energy_script_H2d(f, p);
    CHECK(std::abs(s.residual) <= 1e-12 * std::max(1.0, std::abs(s.H)));
  }
}

TEST_CASE("a field constant in j reduces to rows of the 1d energy") {
  const SystemGeometry g = antipodal_geometry(0.8);
  const ModelParams2D p = ModelParams2D::from_delta(0.02, 1.0);
  const int nx = 24, ny = 7;
  Rng rng(91);
  std::vector<double> phis(nx);
  for (double& v : phis) v = rng.uniform(-M_PI, M_PI);
  GridDomain dom(1.0 / 24, {CellRect{0, 0, nx, ny}});
  const SpinField2D f = make_field(dom, g, [&](int i, int) { return Site{1, phis[i]}; });

  // Every row carries the same 1d stencil sum; the constant columns add the
  // fixed (2 - alpha/2)^2 = 4 delta^2 per index.
  const ModelParams1D p1 = p.as_1d();
  std::vector<Site> sites;
  for (int i = 0; i < nx; ++i) sites.push_back({1, phis[i]});
  const SpinChain1D row(1.0 / (nx - 1), g, sites);
  const double row_sum = 2.0 * energy_H(row, p1) / row.lambda();  // sum of |r_i|^2, i=0..nx-3
  const double lam = f.lambda();
  const std::size_t n_idx = full_stencil_index_set(f.domain()).size();
  const double col_sum = 4.0 * p.delta * p.delta * n_idx;
  const double expected =
      (lam * lam / 2.0) * ((ny - 2) * row_sum + col_sum) / p.normalization(lam);
  CHECK(energy_H2d(f, p) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("normalized energy scales linearly in the spacing") {
  const SystemGeometry g = antipodal_geometry(0.8);
  const ModelParams2D p = ModelParams2D::from_delta(0.02, 1.0);
  Rng rng(13);
  GridDomain dom1(1.0 / 8, {CellRect{0, 0, 8, 8}});
  const SpinField2D f1 = random_field(dom1, g, rng, 1);
  GridDomain dom2(1.0 / 16, {CellRect{0, 0, 8, 8}});
  std::vector<Site> same;
  for (const auto& [i, j] : dom1.cells()) same.push_back(f1.at(i, j));
  const SpinField2D f2(dom2, g, same);
  CHECK(energy_H2d(f2, p) == doctest::Approx(0.5 * energy_H2d(f1, p)).epsilon(1e-13));
}
