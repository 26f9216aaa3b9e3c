#pragma once

#include <vector>

#include "spinwall/energy1d.hpp"
#include "spinwall/field2d.hpp"

namespace spinwall {

// 2D model parameters. The 2D energy is normalized by sqrt(2) lambda delta^{3/2}.
struct ModelParams2D {
  double alpha = 4.0;
  double delta = 0.0;
  double k = 1.0;

  static ModelParams2D from_delta(double delta, double k);
  ModelParams1D as_1d() const { return {alpha, delta, k}; }
  double normalization(double lambda) const;  // sqrt(2) * lambda * delta^{3/2}
};

// The literal interior index set: cells (i,j) whose squares (i,j), (i+1,j),
// (i,j+1) all lie in the domain. The energy sum references i+2 and j+2 as
// well, so the energies below clip to the full-stencil subset instead; both
// sets are exposed.
std::vector<std::pair<int, int>> index_set_2d(const GridDomain& domain);
std::vector<std::pair<int, int>> full_stencil_index_set(const GridDomain& domain);

// Full-stencil index set of a component's cell set (cross of 5 squares).
std::vector<std::pair<int, int>> full_stencil_index_set(const Component& component);

// (1/(sqrt(2) lambda delta^{3/2})) (lambda^2/2) sum over full-stencil indices of
// row and column stencil terms.
double energy_H2d(const SpinField2D& field, const ModelParams2D& p);

// lambda * k * (interface edge count * lambda) * |v1 - v2|
double energy_P2d(const SpinField2D& field, const ModelParams2D& p);

// Normalized stencil sum over (C_s intersect I(Omega)) minus I(C_s), the
// cross-component interactions attributed to component s.
double remainder_R2d(const SpinField2D& field, const Component& component,
                     const ModelParams2D& p);

struct ScriptH2D {
  double H = 0.0;                        // energy_H2d of the whole domain
  double scriptH = 0.0;                  // sum of per-component energies
  std::vector<double> per_component;     // H restricted to each component
  std::vector<double> remainders;        // R for each component
  double residual = 0.0;                 // H - scriptH - sum(remainders)
};

ScriptH2D energy_script_H2d(const SpinField2D& field, const ModelParams2D& p);

std::string energy2d_to_json(const ScriptH2D& s, double P);

}  // namespace spinwall
