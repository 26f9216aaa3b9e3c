#include "spinwall/energy1d.hpp"

#include <cmath>
#include <stdexcept>

#include "nlohmann/json.hpp"
#include "spinwall/numerics.hpp"

namespace spinwall {

ModelParams1D ModelParams1D::from_alpha(double alpha, double k) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(k > 0.0)) throw std::invalid_argument("k must be positive");
  return {alpha, 1.0 - alpha / 4.0, k};
}

ModelParams1D ModelParams1D::from_delta(double delta, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("k must be positive");
  const double alpha = 4.0 * (1.0 - delta);
  if (!(alpha > 0.0)) throw std::invalid_argument("delta must be below 1");
  return {alpha, delta, k};
}

int stencil_count(const SpinChain1D& chain) {
  const int n = chain.last_index() - 1;  // i = 0..N-2
  if (n < 1) throw std::domain_error("chain too short: need at least 3 sites");
  return n;
}

double energy_E(const SpinChain1D& chain, const ModelParams1D& p) {
  const int count = stencil_count(chain);
  const auto u = chain.points();
  std::vector<double> terms(count);
  for (int i = 0; i < count; ++i)
    terms[i] = -p.alpha * dot(u[i], u[i + 1]) + dot(u[i], u[i + 2]);
  return chain.lambda() * pairwise_sum(terms);
}

double energy_P(const SpinChain1D& chain, const ModelParams1D& p) {
  return chain.lambda() * p.k * anisotropy_map(chain).total_variation;
}

double energy_H(const SpinChain1D& chain, const ModelParams1D& p) {
  const int count = stencil_count(chain);
  const auto u = chain.points();
  std::vector<double> terms(count);
  for (int i = 0; i < count; ++i) {
    const Vec3 r = u[i + 2] - (p.alpha / 2.0) * u[i + 1] + u[i];
    terms[i] = dot(r, r);
  }
  return 0.5 * chain.lambda() * pairwise_sum(terms);
}

double ground_constant(const SpinChain1D& chain, const ModelParams1D& p) {
  return -chain.lambda() * (1.0 + p.alpha * p.alpha / 8.0) * stencil_count(chain);
}

double decomposition_residual(const SpinChain1D& chain, const ModelParams1D& p) {
  const BoundaryCheck bc = check_boundary_condition(chain);
  if (!bc.satisfied)
    throw std::domain_error("decomposition requires the joint boundary condition (residual " +
                            std::to_string(bc.residual) + ")");
  const double e = energy_E(chain, p);
  const double pn = energy_P(chain, p);
  const double h = energy_H(chain, p);
  return (e + pn) - (h + pn + ground_constant(chain, p));
}

TildeSegment modify_tilde(const SpinChain1D& chain, int piece_index) {
  const Partition1D part = partition(chain);
  if (piece_index < 0 || piece_index >= part.M())
    throw std::invalid_argument("piece index out of range");
  const Piece piece = part.pieces[piece_index];
  if (piece.n_sites() < 2) throw std::domain_error("degenerate piece: fewer than 2 sites");

  const SystemGeometry& g = chain.geom();
  const int a = piece.first;
  const int last = piece.last - 1;  // site whose value is replaced
  const double target = dot(chain.point(a), chain.point(a + 1));
  const double psi = g.bond_angle(target);

  // Sign of the bond being replaced; ties (parallel or antipodal bond) toward +1.
  const double orig = g.oriented_angle(chain.point(last - 1), chain.point(last), piece.d);
  const int sign = (orig < 0.0 && orig > -M_PI + 1e-15) ? -1 : 1;

  TildeSegment seg;
  seg.d = piece.d;
  seg.first = a;
  seg.phis.reserve(piece.n_sites());
  for (int i = a; i < last; ++i) seg.phis.push_back(chain.sites()[i].phi);
  seg.phis.push_back(chain.sites()[last - 1].phi + sign * psi);
  seg.closing_dot = target;
  return seg;
}

static double segment_energy_sum(const TildeSegment& seg, const SystemGeometry& g,
                                 const ModelParams1D& p) {
  const int n = seg.n_sites();
  std::vector<Vec3> u(n);
  for (int i = 0; i < n; ++i) u[i] = g.embed(seg.d, seg.phis[i]);
  const int count = n - 2;
  std::vector<double> terms(count);
  for (int i = 0; i < count; ++i)
    terms[i] = -p.alpha * dot(u[i], u[i + 1]) + dot(u[i], u[i + 2]);
  return pairwise_sum(terms);
}

static double piece_length(const SpinChain1D& chain, const Piece& piece, bool is_last) {
  if (is_last) return 1.0 - chain.lambda() * piece.first;
  return chain.lambda() * piece.n_sites();
}

double energy_MM(const SpinChain1D& chain, int piece_index, const ModelParams1D& p,
                 bool literal_constant) {
  const Partition1D part = partition(chain);
  if (piece_index < 0 || piece_index >= part.M())
    throw std::invalid_argument("piece index out of range");
  const Piece piece = part.pieces[piece_index];
  const TildeSegment seg = modify_tilde(chain, piece_index);
  const double sum = segment_energy_sum(seg, chain.geom(), p);
  const double unit = 1.0 + p.alpha * p.alpha / 8.0;
  double constant;
  if (literal_constant) {
    constant = unit * stencil_count(chain) *
               piece_length(chain, piece, piece_index == part.M() - 1);
  } else {
    constant = unit * (seg.n_sites() - 2);
  }
  return chain.lambda() * (sum + constant);
}

double remainder_R(const SpinChain1D& chain, int junction_index, const ModelParams1D& p) {
  const Partition1D part = partition(chain);
  const int M = part.M();
  if (M < 2) throw std::domain_error("no junctions: the chain has a single piece");
  if (junction_index < 0 || junction_index >= M - 1)
    throw std::invalid_argument("junction index out of range");

  const int m = part.pieces[junction_index].last;  // junction lattice index
  const int N = chain.last_index();
  if (m - 2 < part.pieces[junction_index].first)
    throw std::domain_error("degenerate piece left of the junction");
  if (m + 1 > N) throw std::domain_error("degenerate piece right of the junction");
  if (part.pieces[M - 1].n_sites() < 2) throw std::domain_error("degenerate final piece");

  const SystemGeometry& g = chain.geom();
  const TildeSegment left = modify_tilde(chain, junction_index);
  const TildeSegment lastseg = modify_tilde(chain, M - 1);
  const Vec3 w_j = g.embed(left.d, left.phis.back());
  const Vec3 w_M = g.embed(lastseg.d, lastseg.phis.back());

  const double lam = chain.lambda();
  const double bracket = -p.alpha * dot(chain.point(m - 1), chain.point(m)) +
                         dot(chain.point(m - 2), chain.point(m)) +
                         dot(chain.point(m - 1), chain.point(m + 1)) +
                         dot(chain.point(m - 2), w_j);
  const double tail = dot(chain.point(N - 2), chain.point(N)) - dot(chain.point(N - 2), w_M);
  return -lam * bracket + lam / (M - 1) * tail;
}

double split_residual(const SpinChain1D& chain, const ModelParams1D& p, bool literal_constant) {
  const Partition1D part = partition(chain);
  double acc = energy_H(chain, p);
  for (int j = 0; j < part.M(); ++j) acc -= energy_MM(chain, j, p, literal_constant);
  for (int j = 0; j + 1 < part.M(); ++j) acc -= remainder_R(chain, j, p);
  return acc;
}

EnergyBreakdown energy_breakdown(const SpinChain1D& chain, const ModelParams1D& p,
                                 bool literal_constant) {
  EnergyBreakdown b;
  b.E = energy_E(chain, p);
  b.P = energy_P(chain, p);
  b.H = energy_H(chain, p);
  b.total = b.E + b.P;
  b.ground = ground_constant(chain, p);
  const Partition1D part = partition(chain);
  for (int j = 0; j < part.M(); ++j) b.MM.push_back(energy_MM(chain, j, p, literal_constant));
  for (int j = 0; j + 1 < part.M(); ++j) b.R.push_back(remainder_R(chain, j, p));
  double acc = b.H;
  for (double mm : b.MM) acc -= mm;
  for (double r : b.R) acc -= r;
  b.split_residual = acc;
  return b;
}

std::string breakdown_to_json(const EnergyBreakdown& b) {
  nlohmann::ordered_json j;
  j["E"] = b.E;
  j["P"] = b.P;
  j["H"] = b.H;
  j["total"] = b.total;
  j["ground"] = b.ground;
  j["MM"] = b.MM;
  j["R"] = b.R;
  j["split_residual"] = b.split_residual;
  return j.dump(2);
}

}  // namespace spinwall
