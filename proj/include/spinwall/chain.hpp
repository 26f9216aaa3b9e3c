#pragma once

#include <iosfwd>
#include <vector>

#include "spinwall/geometry.hpp"

namespace spinwall {

struct Site {
  int d = 1;         // circle index, 1 or 2
  double phi = 0.0;  // chart angle on circle d
};

// A lattice spin configuration on [0,1]: sites i = 0..N with N = floor(1/lambda),
// each site storing (circle index, chart angle). The 3d spin at site i is
// geom.embed(d_i, phi_i).
class SpinChain1D {
 public:
  SpinChain1D(double lambda, SystemGeometry geom, std::vector<Site> sites);

  double lambda() const { return lambda_; }
  const SystemGeometry& geom() const { return geom_; }
  const std::vector<Site>& sites() const { return sites_; }
  std::vector<Site>& sites() { return sites_; }
  int last_index() const { return static_cast<int>(sites_.size()) - 1; }  // N
  int n_sites() const { return static_cast<int>(sites_.size()); }

  Vec3 point(int i) const { return geom_.embed(sites_[i].d, sites_[i].phi); }
  std::vector<Vec3> points() const;

 private:
  double lambda_;
  SystemGeometry geom_;
  std::vector<Site> sites_;
};

// Number of lattice sites for spacing lambda: floor(1/lambda) + 1, with a
// tolerant floor so that lambda = 1/n yields exactly n + 1 sites.
int site_count_for_spacing(double lambda);

struct AnisotropyMap {
  std::vector<int> labels;  // circle index per site
  int jump_count = 0;
  double total_variation = 0.0;  // jump_count * |v1 - v2|
};

AnisotropyMap anisotropy_map(const SpinChain1D& chain);

// Maximal run of constant circle index, stored half-open [first, last) in
// lattice units; the final piece's `last` is n_sites so it owns the last site.
struct Piece {
  int first = 0;
  int last = 0;
  int d = 1;
  int n_sites() const { return last - first; }
};

struct Partition1D {
  std::vector<Piece> pieces;
  int M() const { return static_cast<int>(pieces.size()); }
};

Partition1D partition(const SpinChain1D& chain);

struct BoundaryCheck {
  bool satisfied = false;
  double residual = 0.0;  // |<u0,u1> - <u^{N-1},u^N>|
};

// The joint condition <u^0,u^1> = <u^{N-1},u^N>. Requires at least 3 sites.
BoundaryCheck check_boundary_condition(const SpinChain1D& chain);

// Text format, round-trips bit-exactly (17 significant digits):
//   spinwall-chain v1 lambda=<l> R=<R> v1=<x,y,z> v2=<x,y,z>
//   <i> <d> <phi>
void write_chain(const SpinChain1D& chain, std::ostream& os);
SpinChain1D read_chain(std::istream& is);
void write_chain_file(const SpinChain1D& chain, const std::string& path);
SpinChain1D read_chain_file(const std::string& path);

}  // namespace spinwall
