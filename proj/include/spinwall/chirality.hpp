#pragma once

#include <vector>

#include "spinwall/energy1d.hpp"
#include "spinwall/field2d.hpp"

namespace spinwall {

// Chirality order parameter w = sqrt(2/delta) sin(theta/2), where theta is the
// oriented angle between consecutive spins around their circle center. On an
// exact helix with bond dot alpha/4 the raw value is +-1/R; multiplying by R
// (the normalized variant) maps helices to +-1.

struct ChiralityBond {
  int i = 0;       // bond between lattice sites i and i+1
  int piece = 0;
  int d = 1;
  double w = 0.0;  // raw or normalized, per field flag
  bool synthetic = false;  // closing bond introduced by the tilde modification
};

struct ChiralityField1D {
  double delta = 0.0;
  bool normalized = false;
  std::vector<ChiralityBond> bonds;
  std::vector<int> skipped_pieces;  // degenerate pieces (< 2 sites)

  // Bond values of one piece, optionally including the synthetic closing bond.
  std::vector<double> piece_values(int piece, bool include_synthetic = false) const;
  int piece_count() const;
};

// Per piece, bond angles are read from the tilde-modified segment, so every
// piece with s sites contributes s-1 values of which the last is synthetic.
ChiralityField1D transform_T1d(const SpinChain1D& chain, const ModelParams1D& p);

ChiralityField1D normalize_chirality(ChiralityField1D field, double R);

// 1D total variation: sum over pieces of sum |w^{i+1} - w^i| over consecutive
// bonds. Synthetic bonds are excluded unless requested.
double total_variation_w(const ChiralityField1D& field, bool include_synthetic = false);

struct ChiralityField2D {
  double delta = 0.0;
  bool normalized = false;
  ScalarField2D w, z;  // zero (and undefined) outside component interiors
};

// Horizontal angles feed w, vertical angles feed z; indices outside the
// 3-square interior index set of their component carry no value.
ChiralityField2D transform_T2d(const SpinField2D& field, const ModelParams1D& p);

ChiralityField2D normalize_chirality(ChiralityField2D field, double R);

// max over plaquettes of |d1 z - d2 w| where both forward differences exist.
double discrete_curl_residual(const ScalarField2D& w, const ScalarField2D& z, double lambda);

// Directional total variation of a lattice scalar field restricted to a
// component: lambda-weighted absolute forward differences between cells that
// both carry values and both lie in the component. direction is 1 or 2.
double directional_total_variation(const ScalarField2D& f, int direction, double lambda,
                                   const Component& component);

// CSV emission, one line per bond/cell.
std::string chirality_csv(const ChiralityField1D& field, double R);
std::string chirality_csv(const ChiralityField2D& field, const SpinField2D& spins, double R);

}  // namespace spinwall
