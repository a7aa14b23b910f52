#pragma once

// Quench signals and damped-oscillation versus hyperbolic model selection.
//
// All signals are expressed in x = gamma t. Fitted models:
//   sin2  : A e^{-x} sin^2(B x + C)     sinh2 : A e^{-x} sinh^2(B x + C)
//   sin   : A e^{-2x} sin(B x)          sinh  : A e^{-2x} sinh(B x)

#include "ep3/model.hpp"
#include "ep3/readout.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ep3 {

/// rho_03(t) after preparing (|0> + |3>)(<0| + <3|)/2, symmetric params.
/// Omega > gamma: Omega^2 e^{-gamma t} / (2 (Omega^2 - gamma^2)) sin^2(s t/2 + acos(gamma/Omega))
/// Omega < gamma: the sinh^2 form with acosh(gamma/Omega); Omega = gamma:
/// e^{-gamma t} (1 + gamma t/2)^2 / 2.
double rho03_closed(double omega, double gamma, double t);

/// e^{-gamma t}/2 (cos(s t/2) + (gamma t/2) sinc(s t/2))^2 with s^2 = Omega^2 - gamma^2,
/// evaluated through a power series for small |s t|. Equal to rho03_closed in
/// every phase and continuous across Omega = gamma.
double rho03_series(double omega, double gamma, double t);

/// 2 Re(sigma_12 - sigma_01) = sqrt2 Omega / s e^{-2 gamma t} sin(s t) with
/// the sinh continuation for Omega < gamma and sqrt2 Omega t e^{-2 gamma t} at
/// Omega = gamma.
double liouvillian_signal_closed(double omega, double gamma, double t);

enum class QuenchFamily { h_eff, liouvillian };
enum class QuenchModel { sin, sinh, sin2, sinh2 };

const char* to_string(QuenchFamily f);
const char* to_string(QuenchModel m);

struct QuenchSample {
  double gamma_t = 0.0;
  double value = 0.0;
};

struct QuenchFit {
  QuenchModel model = QuenchModel::sin2;
  double A = 0.0;
  double B = 0.0;  ///< in units of gamma
  double C = 0.0;  ///< phase offset, sin2/sinh2 only
  double residual = 0.0;
  double ci95_B = 0.0;
  /// Residual of the rejected model of the same family.
  double other_residual = 0.0;
  bool converged = true;
  std::string diagnostic;
};

/// Model value at x = gamma t.
double quench_model_value(QuenchModel m, double a, double b, double c, double x);

/// Theory factor: |sqrt((Omega/gamma)^2 - 1)|, halved for the H_eff family.
double expected_quench_b(QuenchFamily f, double omega_over_gamma);

/// Uniform grid of `points` values of gamma t over [0, span].
std::vector<double> quench_grid(int points = 60, double span = 6.0);

/// Noiseless samples of the closed form at gamma = 1.
std::vector<QuenchSample> quench_samples(QuenchFamily f, double omega_over_gamma,
                                         const std::vector<double>& gamma_t);

/// rho_03 read with the phase-scan emulator after four-level Lindblad
/// evolution; point k draws from stream (seed, k).
std::vector<QuenchSample> quench_samples_readout(const SystemParams& p,
                                                 const std::vector<double>& gamma_t,
                                                 const ReadoutOptions& readout,
                                                 std::uint64_t seed);

struct QuenchFitOptions {
  int bootstrap = 200;
  std::uint64_t seed = 0;
};

/// Fits both models of the family (amplitude by linear projection, B and C by
/// grid search and Nelder-Mead) and keeps the lower residual sum of squares.
/// ci95_B is the half-width of the 2.5-97.5 percentile band over residual
/// bootstrap refits.
QuenchFit fit_quench(const std::vector<QuenchSample>& samples, QuenchFamily family,
                     const QuenchFitOptions& opts = {});

}  // namespace ep3
