#pragma once

#include <optional>
#include <string>
#include <vector>

#include "spinwall/chirality.hpp"
#include "spinwall/minimize.hpp"

namespace spinwall {

// Scaling schedules and the continuum functionals the discrete measurements
// are compared against. The relevant derived scales per point are
//   l_n   = lambda_n / sqrt(2 delta_n)   (chirality transition regime)
//   eta_n = lambda_n k_n                 (anisotropy transition price)
//   eps_n = lambda_n / sqrt(delta_n)     (wall width)

struct SchedulePoint {
  int n = 0;
  double lambda = 0.0;
  double delta = 0.0;
  double k = 1.0;

  double l() const { return lambda / std::sqrt(2.0 * delta); }
  double eta() const { return lambda * k; }
  double eps() const { return lambda / std::sqrt(delta); }
  ModelParams1D params() const { return ModelParams1D::from_delta(delta, k); }
};

struct ScalingSchedule {
  std::vector<SchedulePoint> points;
  double target_l = 0.0;    // may be +inf
  double target_eta = 1.0;  // may be +inf

  // Errors for non-monotonic lambda etc.; prefix "warning:" for soft issues.
  std::vector<std::string> validate() const;
};

// ---- cell problem (zero order) ----

struct CellProblemResult {
  Vec3 z;
  int k = 0;
  double rho = 0.0;
  bool feasible = false;
  int d = 0;                   // circle that produced the best value (0 if infeasible)
  double value = 0.0;          // best window sum divided by the stencil count k-2
  double raw_inf = 0.0;        // best window sum
  int restarts = 0;
  std::vector<double> best_angles;
  double lower_bound = 0.0;          // -(1 + alpha^2/8), the per-site bound
  double lower_bound_finite_k = 0.0; // corrected by the free window boundary term
  double constraint_residual = 0.0;  // max(0, |avg - z| - rho) of the best window
};

// Penalized multistart estimate of the homogenized density: infimum of the
// k-site window sum with the discrete average constrained to B(z, rho),
// normalized per stencil. The reported value is an upper bound on the true
// infimum; the printed lower bounds certify the bracket.
CellProblemResult fhom_estimate(const SystemGeometry& geom, const Vec3& z, double alpha, int k,
                                double rho, int restarts, std::uint64_t seed);

// rho -> 0 after k -> infinity, approximated diagonally.
double default_cell_rho(int k);

struct LimitPiece {
  double length = 0.0;
  int d = 1;
  Vec3 value;  // constant value in the disk of circle d
};

struct ZeroOrderResult {
  double value = 0.0;
  bool finite = true;    // false when eta = inf rejects a multi-circle field
  bool feasible = true;  // false when a cell problem was infeasible
};

ZeroOrderResult limit_zero_order(const SystemGeometry& geom, double alpha,
                                 const std::vector<LimitPiece>& pieces, double eta, int k,
                                 int restarts, std::uint64_t seed);

// ---- first order: junction pricing ----

// (R_n)_j / lambda evaluated on a two-piece chain assembled from the given
// boundary stubs (angles of the spins entering the junction formula).
struct JunctionStub {
  int d = 1;
  std::vector<double> phis;  // at least 3 angles
};

double junction_cost(const SystemGeometry& geom, const ModelParams1D& p, const JunctionStub& left,
                     const JunctionStub& right);

struct RConstantRow {
  int n = 0;
  double alpha = 0.0;
  double value = 0.0;
  double cauchy_diff = 0.0;  // |value - previous| / max(1, |previous|)
  bool converged = true;
};

struct RConstantResult {
  std::vector<RConstantRow> rows;
  double value = 0.0;
  bool stable = false;  // last two points within 1%
};

// Minimizes junction_cost over the free boundary angles (7 of them) at every
// schedule point. Reports the per-point minima and their Cauchy differences;
// the estimator tracks trends, it does not certify the infimum.
RConstantResult estimate_R_constant(const SystemGeometry& geom, const ScalingSchedule& schedule,
                                    const MinimizeOptions& options, int restarts,
                                    std::uint64_t seed);

// Crude bound used as a sanity assert on every junction evaluation.
inline double junction_lower_bound(double alpha) { return -4.0 * (1.0 + alpha); }

// ---- second order functionals ----

// (8/3) sum over pieces of |Dw|; the field must carry normalized values in
// {-1, +1} (within 1e-6) on every non-synthetic bond.
double limit_second_order_l0(const ChiralityField1D& normalized_field);

struct FiniteLResult {
  double value = 0.0;
  bool boundary_ok = true;  // | |w(a)| - |w(b)| | <= 1e-6 on every piece
};

// (1/l) integral (w^2-1)^2 + l integral (w')^2 per piece, trapezoidal with
// forward-difference derivative; pieces are uniform grids of spacing h.
FiniteLResult limit_second_order_finite_l(const std::vector<std::vector<double>>& piece_samples,
                                          double h, double l);

// (4/3) sum over components of |D1 w| + |D2 z| for sharp normalized fields;
// requires values in {-1,1} within 1e-6 and discrete curl residual < 1e-6.
double limit_2d(const ChiralityField2D& normalized, const SpinField2D& spins);

// ---- measured wall cost ----

enum class WallPin {
  profile_ends,  // pin end bonds to the tanh profile's own end values
  ground,        // pin end bonds at the full ground chirality +-theta_g
  value,         // pin end bonds at normalized chirality +-pin_wbar
};

inline MinimizeOptions wall_minimize_defaults() {
  MinimizeOptions m;
  // The objective is the order-one normalized energy. The chirality scaling
  // makes the angle-space Hessian extremely stiff at small delta, so the
  // practical stop is value stagnation at nine digits rather than a small
  // gradient norm.
  m.gradient_tolerance = 1e-6;
  m.stagnation_rtol = 1e-9;
  return m;
}

struct WallOptions {
  WallPin pin = WallPin::profile_ends;
  double pin_wbar = 1.0;
  double center = 0.5;
  MinimizeOptions minimize = wall_minimize_defaults();
};

struct WallCost {
  double value = 0.0;  // min H / (sqrt(2) lambda delta^{3/2})
  double normalization = 0.0;
  MinimizeReport report;
  SpinChain1D chain;
};

// Minimizes the renormalized chain energy over chains with opposite chirality
// pinned at the two ends (two bonds per end), starting from the tanh wall
// profile.
WallCost wall_cost_measured(const SystemGeometry& geom, const SchedulePoint& point,
                            const WallOptions& options);

struct WallScheduleRow {
  SchedulePoint point;
  double value = 0.0;
  double cauchy_diff = 0.0;
  bool converged = true;
};

std::vector<WallScheduleRow> wall_cost_schedule(const SystemGeometry& geom,
                                                const ScalingSchedule& schedule,
                                                const WallOptions& options, int threads = 1);

}  // namespace spinwall
