#include "spinwall/energy2d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "nlohmann/json.hpp"
#include "spinwall/numerics.hpp"

namespace spinwall {

ModelParams2D ModelParams2D::from_delta(double delta, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("k must be positive");
  const double alpha = 4.0 * (1.0 - delta);
  if (!(alpha > 0.0)) throw std::invalid_argument("delta must be below 1");
  return {alpha, delta, k};
}

double ModelParams2D::normalization(double lambda) const {
  return std::sqrt(2.0) * lambda * std::pow(delta, 1.5);
}

std::vector<std::pair<int, int>> index_set_2d(const GridDomain& domain) {
  std::vector<std::pair<int, int>> out;
  for (const auto& [i, j] : domain.cells())
    if (domain.contains(i + 1, j) && domain.contains(i, j + 1)) out.emplace_back(i, j);
  return out;
}

std::vector<std::pair<int, int>> full_stencil_index_set(const GridDomain& domain) {
  std::vector<std::pair<int, int>> out;
  for (const auto& [i, j] : domain.cells())
    if (domain.contains(i + 1, j) && domain.contains(i + 2, j) && domain.contains(i, j + 1) &&
        domain.contains(i, j + 2))
      out.emplace_back(i, j);
  return out;
}

std::vector<std::pair<int, int>> full_stencil_index_set(const Component& component) {
  std::vector<std::pair<int, int>> cells = component.cells;
  std::sort(cells.begin(), cells.end());
  auto in = [&](int i, int j) {
    return std::binary_search(cells.begin(), cells.end(), std::make_pair(i, j));
  };
  std::vector<std::pair<int, int>> out;
  for (const auto& [i, j] : cells)
    if (in(i + 1, j) && in(i + 2, j) && in(i, j + 1) && in(i, j + 2)) out.emplace_back(i, j);
  return out;
}

static double stencil_term_sum(const SpinField2D& field, const ModelParams2D& p,
                               const std::vector<std::pair<int, int>>& indices) {
  std::vector<double> terms;
  terms.reserve(indices.size());
  for (const auto& [i, j] : indices) {
    const Vec3 row = field.point(i + 2, j) - (p.alpha / 2.0) * field.point(i + 1, j) +
                     field.point(i, j);
    const Vec3 col = field.point(i, j + 2) - (p.alpha / 2.0) * field.point(i, j + 1) +
                     field.point(i, j);
    terms.push_back(dot(row, row) + dot(col, col));
  }
  return pairwise_sum(terms);
}

double energy_H2d(const SpinField2D& field, const ModelParams2D& p) {
  const double lam = field.lambda();
  const double sum = stencil_term_sum(field, p, full_stencil_index_set(field.domain()));
  return (lam * lam / 2.0) * sum / p.normalization(lam);
}

double energy_P2d(const SpinField2D& field, const ModelParams2D& p) {
  return field.lambda() * p.k * anisotropy_map(field).total_variation;
}

double remainder_R2d(const SpinField2D& field, const Component& component,
                     const ModelParams2D& p) {
  const GridDomain& dom = field.domain();
  std::vector<std::pair<int, int>> inner = full_stencil_index_set(component);
  std::sort(inner.begin(), inner.end());
  std::vector<std::pair<int, int>> comp_cells = component.cells;
  std::sort(comp_cells.begin(), comp_cells.end());
  const std::vector<std::pair<int, int>> whole = full_stencil_index_set(dom);
  std::vector<std::pair<int, int>> indices;
  for (const auto& ij : whole) {
    if (!std::binary_search(comp_cells.begin(), comp_cells.end(), ij)) continue;
    if (std::binary_search(inner.begin(), inner.end(), ij)) continue;
    indices.push_back(ij);
  }
  const double lam = field.lambda();
  return (lam * lam / 2.0) * stencil_term_sum(field, p, indices) / p.normalization(lam);
}

ScriptH2D energy_script_H2d(const SpinField2D& field, const ModelParams2D& p) {
  ScriptH2D out;
  out.H = energy_H2d(field, p);
  const Partition2D part = partition(field);
  const double lam = field.lambda();
  for (const Component& comp : part.components) {
    const double h_comp = (lam * lam / 2.0) *
                          stencil_term_sum(field, p, full_stencil_index_set(comp)) /
                          p.normalization(lam);
    out.per_component.push_back(h_comp);
    out.remainders.push_back(remainder_R2d(field, comp, p));
  }
  double acc = 0.0;
  for (double h : out.per_component) acc += h;
  out.scriptH = acc;
  double racc = 0.0;
  for (double r : out.remainders) racc += r;
  out.residual = out.H - out.scriptH - racc;
  return out;
}

std::string energy2d_to_json(const ScriptH2D& s, double P) {
  nlohmann::ordered_json j;
  j["H"] = s.H;
  j["P"] = P;
  j["scriptH"] = s.scriptH;
  j["H_components"] = s.per_component;
  j["R"] = s.remainders;
  j["residual"] = s.residual;
  return j.dump(2);
}

}  // namespace spinwall
