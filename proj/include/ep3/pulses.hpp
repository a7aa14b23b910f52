#pragma once

// Pulse-sequence state preparation on the manifold |0>,|1>,|2>,|3>,|a>.
//
// R_ij(alpha, beta) = exp(-i alpha T_ij(beta)),
// T_ij(beta) = (e^{i beta}|i><j| + e^{-i beta}|j><i|) / 2.
// Sequences are stored in application order: element 0 acts first.

#include "ep3/linalg.hpp"

#include <vector>

namespace ep3 {

/// Index of |a> in the pulse manifold.
inline constexpr int kPulseAux = 4;
inline constexpr int kPulseDim = 5;

struct PulseOp {
  int i = 0;
  int j = 0;
  double alpha = 0.0;  ///< pulse area, rad
  double beta = 0.0;   ///< phase, rad
  /// Two-tone R_{10+12}(alpha) = exp[-i alpha (|1><0| + |1><2| + h.c.)/sqrt2];
  /// i, j and beta are ignored.
  bool two_tone = false;

  static PulseOp rot(int i, int j, double alpha, double beta) { return {i, j, alpha, beta, false}; }
  static PulseOp two_tone_10_12(double alpha) { return {1, 0, alpha, 0.0, true}; }
};

/// Hermitian generator: T_ij(beta) or the two-tone generator.
CMatrix pulse_generator(const PulseOp& op, int dim = kPulseDim);
CMatrix pulse_unitary(const PulseOp& op, int dim = kPulseDim);

/// Applies seq to |start>. Throws std::out_of_range for bad level indices.
CVector apply_sequence(const std::vector<PulseOp>& seq, int start, int dim = kPulseDim);
CVector apply_sequence(const std::vector<PulseOp>& seq, const CVector& psi);

// Preparation sequences, all starting from |1>.
std::vector<PulseOp> prep_aux();           ///< -> -i|a>
std::vector<PulseOp> prep_quench();        ///< -> -(i/sqrt2)(|0> + |3>)
std::vector<PulseOp> prep_uz(double phi);  ///< -> (i/sqrt2)(|u_z(phi)> + |3>)
std::vector<PulseOp> prep_ux(double phi);  ///< -> (i/sqrt2)(|u_x(phi)> + |3>)
std::vector<PulseOp> prep_u0(double phi);  ///< -> (i/sqrt2)(|u_0(phi)> + |3>)
std::vector<PulseOp> prep_u1();            ///< -> -(i/sqrt2)(|0> - i|2>)

}  // namespace ep3
