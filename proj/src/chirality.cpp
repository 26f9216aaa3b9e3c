#include "spinwall/chirality.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "io_detail.hpp"

namespace spinwall {

std::vector<double> ChiralityField1D::piece_values(int piece, bool include_synthetic) const {
  std::vector<double> out;
  for (const ChiralityBond& b : bonds)
    if (b.piece == piece && (include_synthetic || !b.synthetic)) out.push_back(b.w);
  return out;
}

int ChiralityField1D::piece_count() const {
  int m = 0;
  for (const ChiralityBond& b : bonds) m = std::max(m, b.piece + 1);
  for (int s : skipped_pieces) m = std::max(m, s + 1);
  return m;
}

ChiralityField1D transform_T1d(const SpinChain1D& chain, const ModelParams1D& p) {
  if (!(p.delta > 0.0))
    throw std::invalid_argument("transform needs delta > 0 (alpha below 4)");
  ChiralityField1D out;
  out.delta = p.delta;
  const SystemGeometry& g = chain.geom();
  const double scale = std::sqrt(2.0 / p.delta);
  const Partition1D part = partition(chain);
  for (int j = 0; j < part.M(); ++j) {
    const Piece& piece = part.pieces[j];
    if (piece.n_sites() < 2) {
      out.skipped_pieces.push_back(j);
      continue;
    }
    const TildeSegment seg = modify_tilde(chain, j);
    for (int b = 0; b + 1 < seg.n_sites(); ++b) {
      const Vec3 u = g.embed(seg.d, seg.phis[b]);
      const Vec3 u2 = g.embed(seg.d, seg.phis[b + 1]);
      const double theta = g.oriented_angle(u, u2, seg.d);
      ChiralityBond bond;
      bond.i = seg.first + b;
      bond.piece = j;
      bond.d = seg.d;
      bond.w = scale * std::sin(theta / 2.0);
      bond.synthetic = (b + 2 == seg.n_sites());
      out.bonds.push_back(bond);
    }
  }
  return out;
}

ChiralityField1D normalize_chirality(ChiralityField1D field, double R) {
  for (ChiralityBond& b : field.bonds) b.w *= R;
  field.normalized = !field.normalized;
  return field;
}

double total_variation_w(const ChiralityField1D& field, bool include_synthetic) {
  double tv = 0.0;
  for (int j = 0; j < field.piece_count(); ++j) {
    const std::vector<double> w = field.piece_values(j, include_synthetic);
    for (std::size_t i = 1; i < w.size(); ++i) tv += std::abs(w[i] - w[i - 1]);
  }
  return tv;
}

ChiralityField2D transform_T2d(const SpinField2D& field, const ModelParams1D& p) {
  if (!(p.delta > 0.0))
    throw std::invalid_argument("transform needs delta > 0 (alpha below 4)");
  ChiralityField2D out;
  out.delta = p.delta;
  const GridDomain& dom = field.domain();
  out.w = ScalarField2D::zeros(dom.i0(), dom.j0(), dom.nx(), dom.ny());
  out.z = ScalarField2D::zeros(dom.i0(), dom.j0(), dom.nx(), dom.ny());
  const SystemGeometry& g = field.geom();
  const double scale = std::sqrt(2.0 / p.delta);
  const Partition2D part = partition(field);
  for (const Component& comp : part.components) {
    // 3-square interior index set of the component.
    std::vector<char> in(static_cast<std::size_t>(dom.nx()) * dom.ny(), 0);
    for (const auto& [i, j] : comp.cells) in[dom.linear(i, j)] = 1;
    auto inside = [&](int i, int j) {
      return i >= dom.i0() && i < dom.i0() + dom.nx() && j >= dom.j0() && j < dom.j0() + dom.ny() &&
             in[dom.linear(i, j)];
    };
    for (const auto& [i, j] : comp.cells) {
      if (!inside(i + 1, j) || !inside(i, j + 1)) continue;
      const Vec3 u = field.point(i, j);
      const double th_h = g.oriented_angle(u, field.point(i + 1, j), comp.d);
      const double th_v = g.oriented_angle(u, field.point(i, j + 1), comp.d);
      out.w.set(i, j, scale * std::sin(th_h / 2.0));
      out.z.set(i, j, scale * std::sin(th_v / 2.0));
    }
  }
  return out;
}

ChiralityField2D normalize_chirality(ChiralityField2D field, double R) {
  for (double& v : field.w.value) v *= R;
  for (double& v : field.z.value) v *= R;
  field.normalized = !field.normalized;
  return field;
}

double discrete_curl_residual(const ScalarField2D& w, const ScalarField2D& z, double lambda) {
  double worst = 0.0;
  for (int j = w.j0; j < w.j0 + w.ny; ++j)
    for (int i = w.i0; i < w.i0 + w.nx; ++i) {
      if (!w.has(i, j) || !w.has(i, j + 1)) continue;
      if (!z.has(i, j) || !z.has(i + 1, j)) continue;
      const double d1z = (z.at(i + 1, j) - z.at(i, j)) / lambda;
      const double d2w = (w.at(i, j + 1) - w.at(i, j)) / lambda;
      worst = std::max(worst, std::abs(d1z - d2w));
    }
  return worst;
}

double directional_total_variation(const ScalarField2D& f, int direction, double lambda,
                                   const Component& component) {
  if (direction != 1 && direction != 2)
    throw std::invalid_argument("direction must be 1 or 2");
  std::vector<std::pair<int, int>> cells = component.cells;
  std::sort(cells.begin(), cells.end());
  auto in_comp = [&](int i, int j) {
    return std::binary_search(cells.begin(), cells.end(), std::make_pair(i, j));
  };
  const int di = direction == 1 ? 1 : 0;
  const int dj = direction == 1 ? 0 : 1;
  double tv = 0.0;
  for (const auto& [i, j] : cells) {
    if (!f.has(i, j) || !f.has(i + di, j + dj)) continue;
    if (!in_comp(i + di, j + dj)) continue;
    tv += std::abs(f.at(i + di, j + dj) - f.at(i, j)) * lambda;
  }
  return tv;
}

std::string chirality_csv(const ChiralityField1D& field, double R) {
  std::ostringstream os;
  os << "i,piece,d,w,wbar,synthetic\n";
  const double to_raw = field.normalized ? 1.0 / R : 1.0;
  for (const ChiralityBond& b : field.bonds) {
    const double raw = b.w * to_raw;
    os << b.i << ',' << b.piece << ',' << b.d << ',' << fmt17(raw) << ',' << fmt17(raw * R) << ','
       << (b.synthetic ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string chirality_csv(const ChiralityField2D& field, const SpinField2D& spins, double R) {
  std::ostringstream os;
  os << "i,j,d,w,z,wbar,zbar\n";
  const double to_raw = field.normalized ? 1.0 / R : 1.0;
  for (const auto& [i, j] : spins.domain().cells()) {
    if (!field.w.has(i, j)) continue;
    const double rw = field.w.at(i, j) * to_raw;
    const double rz = field.z.at(i, j) * to_raw;
    os << i << ',' << j << ',' << spins.at(i, j).d << ',' << fmt17(rw) << ',' << fmt17(rz) << ','
       << fmt17(rw * R) << ',' << fmt17(rz * R) << '\n';
  }
  return os.str();
}

}  // namespace spinwall
