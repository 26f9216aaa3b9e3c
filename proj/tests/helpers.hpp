#pragma once

#include <cmath>
#include <vector>

#include "spinwall/chain.hpp"
#include "spinwall/numerics.hpp"

namespace spinwall::testing {

inline SystemGeometry antipodal_geometry(double R) {
  return SystemGeometry::make({0, 0, 1}, {0, 0, -1}, R);
}

// Random chain satisfying the joint boundary condition. Pieces alternate
// circles and keep at least min_piece sites so that every piece admits the
// tilde modification; the final bond is re-solved so its dot product matches
// the first bond's.
inline SpinChain1D random_bc_chain(const SystemGeometry& geom, int n_sites, int max_jumps,
                                   Rng& rng, int min_piece = 3) {
  const int N = n_sites - 1;
  std::vector<int> ds(n_sites, 1 + static_cast<int>(rng.below(2)));
  if (max_jumps > 0) {
    const int jumps = static_cast<int>(rng.below(max_jumps + 1));
    int pos = 0;
    std::vector<int> cuts;
    for (int j = 0; j < jumps; ++j) {
      pos += min_piece + static_cast<int>(rng.below(n_sites / (max_jumps + 1)));
      if (pos > n_sites - min_piece) break;
      cuts.push_back(pos);
    }
    int d = ds[0];
    std::size_t cut = 0;
    for (int i = 0; i < n_sites; ++i) {
      if (cut < cuts.size() && i == cuts[cut]) {
        d = 3 - d;
        ++cut;
      }
      ds[i] = d;
    }
  }
  std::vector<Site> sites(n_sites);
  for (int i = 0; i < n_sites; ++i) sites[i] = {ds[i], rng.uniform(-M_PI, M_PI)};

  SpinChain1D chain(1.0 / N, geom, sites);
  // Close the boundary condition on the final bond (same circle by
  // construction since the last piece has at least min_piece sites).
  const double target = dot(chain.point(0), chain.point(1));
  const double psi = geom.bond_angle(target);
  const int sign = rng.uniform() < 0.5 ? -1 : 1;
  chain.sites()[N].phi = chain.sites()[N - 1].phi + sign * psi;
  return chain;
}

}  // namespace spinwall::testing
