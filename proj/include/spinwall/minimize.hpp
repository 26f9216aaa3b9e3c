#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "spinwall/energy1d.hpp"
#include "spinwall/energy2d.hpp"

namespace spinwall {

// Deterministic local minimization over site angles with the circle
// assignment held fixed. The optimizer is gradient descent with Armijo
// backtracking, accelerated by a diagonally seeded L-BFGS direction; identical
// inputs produce bit-identical outputs.

struct MinimizeOptions {
  int max_iterations = 100000;
  double gradient_tolerance = 1e-10;  // sup-norm over free variables
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  int max_backtracks = 60;
  int lbfgs_memory = 8;
  // Stop as precision-limited when a full window of accepted steps decreases
  // the objective by less than stagnation_rtol * max(1, |f|).
  int stagnation_window = 50;
  double stagnation_rtol = 1e-12;
  std::uint64_t seed = 0;       // consumed by multistart drivers, not by a single run
  bool record_trace = false;
  double objective_scale = 1.0; // multiplies the energy before minimizing
};

struct MinimizeReport {
  int iterations = 0;
  double gradient_norm = 0.0;
  double energy_initial = 0.0;
  double energy_final = 0.0;
  bool converged = false;
  // Set when the line search could not resolve any further strict decrease in
  // double precision; the iterate is then a minimum to working accuracy and
  // counts as converged.
  bool limited_by_precision = false;
  double boundary_residual = 0.0;  // |<u0,u1> - <u^{N-1},u^N>| of the result
  std::vector<double> trace;       // accepted energies, monotone nonincreasing
};

// phi_{i+1} - phi_i = delta_phi for bond i.
struct PinnedBond {
  int bond = 0;
  double delta_phi = 0.0;
};

struct ChainConstraints {
  std::vector<PinnedBond> pinned_bonds;
  std::vector<std::pair<int, double>> pinned_sites;  // (site, angle)
  // Enforce the joint boundary condition by a quadratic penalty whose weight
  // is ramped x10 until the residual is below 1e-10.
  bool boundary_penalty = false;
  double initial_penalty_weight = 1.0;
};

struct PinnedBond2D {
  int i = 0, j = 0;
  int direction = 1;  // 1: (i,j)-(i+1,j), 2: (i,j)-(i,j+1)
  double delta_phi = 0.0;
};

struct FieldConstraints {
  std::vector<PinnedBond2D> pinned_bonds;
  std::vector<std::pair<std::pair<int, int>, double>> pinned_cells;
};

// ---- analytic configurations ----

SpinChain1D build_ferromagnet(int n_sites, int d, double phi0, const SystemGeometry& geom);

// Constant-angle helix with theta = acos((alpha/4 - 1 + R^2)/R^2), the chain
// whose consecutive dot products all equal alpha/4. Requires delta <= 2R^2.
SpinChain1D build_ground_helix(int n_sites, const ModelParams1D& p, int d, int sign, double phi0,
                               const SystemGeometry& geom);

// tanh chirality profile of width ell = lambda/sqrt(delta) centered at
// `center`, converted to bond angles and integrated.
SpinChain1D build_wall_profile(int n_sites, const ModelParams1D& p, int d, double center,
                               const SystemGeometry& geom);

// Fine oscillation h(n_oscillation * t) between circle points with prescribed
// volume fractions. All target points must sit on one circle.
SpinChain1D build_oscillating(const SystemGeometry& geom,
                              const std::vector<std::pair<Site, double>>& targets,
                              int n_oscillation, int n_sites);

// Time-compressed concatenation: first chain's values on [0,1/2], second on
// (1/2,1]. Spacings must match.
SpinChain1D concatenate_recovery(const SpinChain1D& c1, const SpinChain1D& c2);

// ---- gradients (exact, in the embed chart) ----

std::vector<double> gradient_E(const SpinChain1D& chain, const ModelParams1D& p);
std::vector<double> gradient_H(const SpinChain1D& chain, const ModelParams1D& p);
// Per domain cell, in domain().cells() order.
std::vector<double> gradient_H2d(const SpinField2D& field, const ModelParams2D& p);

// ---- minimization ----

std::pair<SpinChain1D, MinimizeReport> minimize_chain(const SpinChain1D& start,
                                                      const ModelParams1D& p,
                                                      const MinimizeOptions& options,
                                                      const ChainConstraints& constraints = {});

std::pair<SpinField2D, MinimizeReport> minimize_field2d(const SpinField2D& start,
                                                        const ModelParams2D& p,
                                                        const MinimizeOptions& options,
                                                        const FieldConstraints& constraints = {});

// Shared engine: minimizes f with gradient (written into *grad) over x.
struct LbfgsResult {
  std::vector<double> x;
  double f = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool limited_by_precision = false;
  std::vector<double> trace;
};

LbfgsResult lbfgs_minimize(
    const std::function<double(const std::vector<double>&, std::vector<double>*)>& fg,
    std::vector<double> x0, const MinimizeOptions& options);

}  // namespace spinwall
