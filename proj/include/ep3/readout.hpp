#pragma once

// Phase-scan readout of off-diagonal density-matrix elements.
//
// A pi/2 pulse R_ij(pi/2, beta) is applied and the population of |1> is
// recorded for each beta. For (i, j) containing |1> this gives
//   N1(beta) = (rho_ii + rho_jj)/2 + s r sin(chi - beta),  rho_ij = r e^{i chi},
// with s = +1 for j = 1 and s = -1 for i = 1. Pairs (0,3) and (2,3) are first
// mapped by a pi pulse R_13(pi, 0), after which rho_k3 = -i rho'_k1.

#include "ep3/linalg.hpp"

#include <cstdint>
#include <vector>

namespace ep3 {

struct ReadoutOptions {
  /// Repetitions per phase. 0 selects exact probabilities (no sampling).
  int shots = 0;
  int phases = 12;           ///< uniform beta grid over [0, 2 pi)
  double flip_prob = 0.002;  ///< symmetric detection error
};

struct ReadoutResult {
  Complex rho;  ///< estimate of rho_ij
  double r = 0.0;
  double chi = 0.0;
  std::vector<double> betas;
  std::vector<double> populations;  ///< measured N1 per beta
};

std::vector<double> phase_grid(int phases);

/// Exact N1 after the readout pulses for one beta.
double readout_population(const CMatrix& rho, int i, int j, double beta);

/// Supported pairs: (0,1), (1,2), (1,3), (0,3), (2,3) and their transposes.
/// rho must have at least 4 levels. Phase k draws from stream (seed, k).
ReadoutResult phase_scan_readout(const CMatrix& rho, int i, int j, const ReadoutOptions& opts,
                                 std::uint64_t seed);

}  // namespace ep3
