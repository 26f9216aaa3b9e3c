#pragma once

#include <vector>

#include "spinwall/chain.hpp"

namespace spinwall {

// Model parameters of the frustrated chain. The nearest-neighbor coupling is
// alpha, the next-to-nearest coupling is 1, and anisotropy transitions are
// priced at lambda*k per unit of |D A(u)|. Near the transition point alpha is
// parametrized as alpha = 4(1 - delta).
struct ModelParams1D {
  double alpha = 4.0;
  double delta = 0.0;  // alpha = 4(1 - delta), kept consistent with alpha
  double k = 1.0;      // penalization weight

  static ModelParams1D from_alpha(double alpha, double k);
  static ModelParams1D from_delta(double delta, double k);
};

// Index count of the interior stencil set: sites 0..N contribute stencils at
// i = 0..N-2, i.e. floor(1/lambda) - 1 of them.
int stencil_count(const SpinChain1D& chain);

// lambda * sum_i [ -alpha <u^i,u^{i+1}> + <u^i,u^{i+2}> ]
double energy_E(const SpinChain1D& chain, const ModelParams1D& p);

// lambda * k * |D A(u)|(I)
double energy_P(const SpinChain1D& chain, const ModelParams1D& p);

// (1/2) lambda * sum_i | u^{i+2} - (alpha/2) u^{i+1} + u^i |^2  >= 0
double energy_H(const SpinChain1D& chain, const ModelParams1D& p);

// -lambda (1 + alpha^2/8) #stencils, the additive constant of the energy
// decomposition E = H - lambda(1+alpha^2/8)#I under the joint boundary
// condition.
double ground_constant(const SpinChain1D& chain, const ModelParams1D& p);

// (E+P) - (H+P+ground). Requires the joint boundary condition; the identity is
// exact (up to rounding) whenever it holds.
double decomposition_residual(const SpinChain1D& chain, const ModelParams1D& p);

// Restriction of the chain to a partition piece with its final value replaced
// by the closing point w_j on the same circle, chosen so that
//   <u^{end-1}, w_j> = <u^{first}, u^{first+1}>.
// Of the two circle points solving the equation, the one whose oriented angle
// from u^{end-1} has the sign of the bond it replaces is picked (ties toward
// positive). With that closing bond the segment energy MM equals the H-energy
// of the modified segment, hence MM >= 0.
struct TildeSegment {
  int d = 1;
  int first = 0;                // lattice index of the first site
  std::vector<double> phis;     // angles; phis.back() is the synthetic closing value
  double closing_dot = 0.0;     // <u^{end-1}, w_j>, equals the piece's first bond dot

  int n_sites() const { return static_cast<int>(phis.size()); }
};

TildeSegment modify_tilde(const SpinChain1D& chain, int piece_index);

// Local energy of the modified segment:
//   lambda * sum_{stencils} [ -alpha <.,.> + <.,.> ] + lambda (1+alpha^2/8) C
// where C is the segment's own stencil count. With literal_constant the
// renormalization uses the whole-chain stencil count times the piece length
// instead; that variant can be negative and is reported for comparison only.
double energy_MM(const SpinChain1D& chain, int piece_index, const ModelParams1D& p,
                 bool literal_constant = false);

// Junction remainder at junction j (between pieces j and j+1, 0-based):
//   -lambda [ -alpha <u^{m-1},u^m> + <u^{m-2},u^m> + <u^{m-1},u^{m+1}>
//             + <u^{m-2}, w_j> ]
//   + lambda/(M-1) [ <u^{N-2},u^N> - <u^{N-2}, w_M> ]
// with m the junction lattice index, w_j the closing value of piece j and w_M
// the closing value of the last piece.
double remainder_R(const SpinChain1D& chain, int junction_index, const ModelParams1D& p);

// H^{hf}(chain) - sum_j MM_j - sum_j R_j. Zero (to rounding) for M = 1 chains
// satisfying the boundary condition; reported as a diagnostic for M >= 2 where
// the junction bookkeeping is convention-dependent.
double split_residual(const SpinChain1D& chain, const ModelParams1D& p,
                      bool literal_constant = false);

struct EnergyBreakdown {
  double E = 0.0;
  double P = 0.0;
  double H = 0.0;
  double total = 0.0;   // E + P
  double ground = 0.0;  // -lambda (1+alpha^2/8) #I
  std::vector<double> MM;
  std::vector<double> R;
  double split_residual = 0.0;
};

EnergyBreakdown energy_breakdown(const SpinChain1D& chain, const ModelParams1D& p,
                                 bool literal_constant = false);

std::string breakdown_to_json(const EnergyBreakdown& b);

}  // namespace spinwall
