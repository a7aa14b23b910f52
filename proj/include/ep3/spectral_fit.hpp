#pragma once

// Constrained multi-line fit of absorption spectra.
//
// Each line i carries {Omega_i (shared by both couplings), gamma1_i, gamma2_i,
// N0_i} and optionally {Delta0_i, Delta1_i}. The loss is the plain sum of
// squared residuals over all lines and detunings. Constraints:
//   gamma_n,i in [0.95, 1.05] * mean_i(gamma_n,i)
//   mean(gamma2) = 2 mean(gamma1)
//   Omega_i >= 0, 0 < N0_i <= 1

#include "ep3/parallel.hpp"
#include "ep3/spectroscopy.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ep3 {

struct LineParams {
  double omega = 0.0;   ///< Omega_1 = Omega_2, rad/us
  double gamma1 = 0.0;  ///< rad/us
  double gamma2 = 0.0;  ///< rad/us
  double n0 = 1.0;
  double delta0 = 0.0;  ///< rad/us, fitted only with fit_detunings
  double delta1 = 0.0;

  [[nodiscard]] SystemParams system() const;
};

struct FitParams {
  std::vector<LineParams> lines;
  bool fit_detunings = false;
};

struct FitOptions {
  /// Omega_a, gamma_a and branch_f of the auxiliary level; n0 and delta_a are
  /// taken from the fit parameters and the line grid.
  AuxParams aux;
  int restarts = 8;          ///< number of starts; start 0 is the init itself
  double jitter = 0.2;       ///< relative jitter of the extra starts
  double gamma_band = 0.05;  ///< allowed relative deviation from the mean
  int max_iterations = 400;  ///< LM iterations per start
  double ftol = 1e-10;       ///< relative loss decrease that ends a start
  std::uint64_t seed = 0;
  Exec exec = Exec::serial;
};

struct FitResult {
  FitParams params;
  double loss = 0.0;
  std::vector<double> line_loss;
  int restarts_used = 0;
  int iterations = 0;  ///< LM iterations of the winning start
  bool converged = false;
  /// Constraint activity per line: gamma1 / gamma2 sitting on the band edge.
  std::vector<std::array<bool, 2>> gamma_at_bound;
  std::string model = "omega1=omega2";
  std::string diagnostic;
};

/// Sum over lines and grid points of (N_exp - N_tgt)^2.
double spectra_loss(const std::vector<SpectralLine>& lines, const FitParams& params,
                    const AuxParams& aux);

/// Throws std::invalid_argument when `params` violates the constraints.
void check_fit_constraints(const FitParams& params, double gamma_band = 0.05);

/// Joint projected Levenberg-Marquardt over all lines. The gammas are carried
/// as a common mean g with per-line deviations,
///   gamma1_i = g (1 + d1_i),  gamma2_i = 2 g (1 + d2_i),
/// sum(d) = 0 and |d| <= gamma_band, so the mean relation holds exactly. The
/// sum constraint enters each step through the KKT system; the box is kept by
/// freezing variables pushed outward and projecting the trial point.
FitResult fit_spectra(const std::vector<SpectralLine>& lines, const FitParams& init,
                      const FitOptions& opts = {});

struct FittedSpectrum {
  std::array<Complex, 3> values;
  bool condition_flag = false;
};

/// Eigenvalues of H_eff built from the fitted parameters of one line.
FittedSpectrum eigenenergies_from_fit(const FitResult& fr, std::size_t line_index);

/// Eigenvalues of the symmetric H_eff at (Omega_i, mean gamma1). The per-line
/// gamma scatter is treated as noise; near the EP it would otherwise split the
/// triplet by roughly the square root of the scatter.
FittedSpectrum symmetric_eigenenergies_from_fit(const FitResult& fr, std::size_t line_index);

}  // namespace ep3
