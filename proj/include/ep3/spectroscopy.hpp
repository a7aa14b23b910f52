#pragma once

// Absorption spectroscopy through a weakly coupled auxiliary level |a>:
// population curves, shot-noise synthesis and CSV exchange.

#include "ep3/model.hpp"
#include "ep3/parallel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ep3 {

struct SpectralLine {
  std::vector<double> detunings;    ///< delta_a grid, rad/us, strictly increasing
  std::vector<double> populations;  ///< N_a per point, clipped to [0, 1]
  std::vector<double> errbars;      ///< sample std over rounds (0 for exact lines)
  double t_evolve = 0.0;            ///< us
  int shots = 0;                    ///< per point and round; 0 marks an exact line
  int rounds = 0;

  /// Throws when sizes disagree, the grid is not increasing or a population
  /// lies outside [0, 1].
  void validate() const;
};

/// Defaults used by the spectroscopy pipelines.
namespace spectro_defaults {
inline constexpr int kGridPoints = 41;
inline constexpr double kGridSpan = kTwoPi * 0.1;   ///< +-span, rad/us
inline constexpr double kOmegaA = kTwoPi * 0.004;   ///< rad/us
inline constexpr double kGammaA = 1.0 / 7400.0;     ///< 1/us
inline constexpr double kTEvolve = 200.0;           ///< us
inline constexpr int kShots = 200;
inline constexpr int kRounds = 5;
}  // namespace spectro_defaults

/// Uniform grid of `points` detunings over [-span, span].
std::vector<double> detuning_grid(int points = spectro_defaults::kGridPoints,
                                  double span = spectro_defaults::kGridSpan);

/// |<a| exp(-i H_aux t) |a>|^2 with H_aux = build_heff_aux(p, a).
double na_nh(const SystemParams& p, const AuxParams& a, double t);

/// Finite-lifetime and shelving correction applied to a non-Hermitian
/// population value. Returns n0 at t = 0.
double na_tgt_from_nh(double nnh, const AuxParams& a, double t);

double na_tgt(const SystemParams& p, const AuxParams& a, double t);

/// Population of |a> after full Lindblad evolution of |a><a| in the
/// five-level model (reduced jumps switched on, no |a> lifetime).
double na_lindblad(const SystemParams& p, const AuxParams& a, double t);

/// na_tgt over a detuning grid (a.delta_a is replaced by each grid value).
std::vector<double> na_tgt_curve(const SystemParams& p, const AuxParams& a, double t,
                                 const std::vector<double>& grid, Exec exec = Exec::serial);

/// Binomial(shots, N_a) / shots drawn `rounds` times per grid point; mean and
/// sample std are stored. Grid point k draws from stream (seed, k). With
/// exact = true the noiseless curve is returned.
SpectralLine synth_line(const SystemParams& p, const AuxParams& a, double t,
                        const std::vector<double>& grid, int shots, int rounds,
                        std::uint64_t seed, bool exact = false, Exec exec = Exec::serial);

/// Header `delta_a_MHz,na_mean,na_std,shots,rounds,t_us`; detunings in MHz.
std::string spectral_line_to_csv(const SpectralLine& line);
SpectralLine spectral_line_from_csv(const std::string& text);

}  // namespace ep3
