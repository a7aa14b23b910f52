#pragma once

// Spectrum of the four-level Lindbladian as a 16x16 operator and the
// intrinsic EP3 formed by eigenmatrices that do not touch |3>.

#include "ep3/dynamics.hpp"
#include "ep3/model.hpp"
#include "ep3/readout.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ep3 {

/// Ordering of the intrinsic triplet everywhere in this header.
enum TripletIndex { kLambdaPlus = 0, kLambdaMinus = 1, kLambdaZero = 2 };

struct LiouvillianEigens {
  std::vector<Complex> eigenvalues;  ///< all 16, sorted as eig()
  std::array<int, 3> selected{0, 0, 0};
  std::array<Complex, 3> closed_form{};  ///< lambda_+, lambda_-, lambda_0
  /// Eigenmatrices of the selected eigenvalues. Gauge: (0,1) + (1,2) = 2,
  /// which reproduces the printed matrices. Unit Frobenius norm when flagged.
  std::array<CMatrix, 3> eigenmatrices;
  /// Set when the triplet cannot be told apart (Omega within ~1e-6 of gamma).
  /// The three eigenmatrices are then the same coalesced null vector.
  bool condition_flag = false;
  /// max ||L[rho] - lambda rho|| / (||L|| ||rho||) over the selected triplet.
  double max_residual = 0.0;
  std::string diagnostic;
};

/// lambda_+- = -2 gamma +- i sqrt(Omega^2 - gamma^2), lambda_0 = -2 gamma.
std::array<Complex, 3> intrinsic_eigenvalues_closed(double omega, double gamma);

/// Needs symmetric params.
LiouvillianEigens liouvillian_spectrum(const SystemParams& p);

/// rho_+, rho_-, rho_0 as printed (four-level, zero row and column for |3>).
std::array<CMatrix, 3> intrinsic_eigenmatrices_closed(double omega, double gamma);

/// The coalesced eigenmatrix at Omega = gamma.
CMatrix rho_ep();

/// {-i E_n} and {+i conj(E_n)} for the eigenvalues E_n of H_eff: the modes
/// |psi_n><3| and |3><psi_n|.
std::vector<Complex> boundary_eigenvalues(const SystemParams& p);

/// Normalized kernel of the generator (trace one).
DensityMatrix steady_state(const SystemParams& p);

/// diag(1,-1,1,1) conjugation composed with complex conjugation.
DensityMatrix apt_conjugate(const DensityMatrix& m);

/// (|0> - i|2>)/sqrt2 and (|0> + i|2>)/sqrt2 in the four-level space.
CVector u1_state();
CVector u2_state();

struct DetectionSample {
  double t = 0.0;       ///< us
  double signal = 0.0;  ///< 2 Re(sigma_12 - sigma_01)
};

/// Prepares |u1><u1|, evolves under the four-level Lindbladian and returns
/// 2 Re(sigma_12 - sigma_01) at each time. With readout options the two
/// coherences go through the phase-scan emulator; time k, element e in
/// {0: sigma_12, 1: sigma_01} uses stream (seed, k, e).
std::vector<DetectionSample> detect_ep3(const SystemParams& p, const std::vector<double>& t_grid,
                                        const std::optional<ReadoutOptions>& readout = std::nullopt,
                                        std::uint64_t seed = 0);

}  // namespace ep3
