#pragma once

// Eigenstate tomography with symmetry-constrained trial families.
//
// A trial state psi is loaded as rho(0) = (|psi> + |3>)(<psi| + <3|)/2, so the
// sector v = (rho_03, rho_13, rho_23) starts at psi/2 and evolves under H_eff.
// Eigenstates keep the normalized components |v_j|^2/|v|^2 fixed.

#include "ep3/model.hpp"
#include "ep3/readout.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ep3 {

enum class FamilyKind { z, x, zero };

struct TrialFamily {
  FamilyKind kind = FamilyKind::z;
  double angle = 0.0;  ///< phi (z, x) or varphi (zero), rad
};

const char* to_string(FamilyKind kind);

/// u_z(phi) = (-e^{i phi}, i sqrt2, e^{-i phi})/2
/// u_x(phi) = (-(1 + sin phi)/2, i cos(phi)/sqrt2, (1 - sin phi)/2)
/// u_0(phi) = (-sin phi, i sqrt2 cos phi, sin phi)/sqrt2
CVector trial_state(const TrialFamily& f);

/// Default gamma * dt.
inline constexpr double kDefaultGammaDt = 0.5;

/// Normalized-component change of v_j between 0 and dt, evolving with H_eff.
/// Throws std::runtime_error when |v(dt)| < 1e-12.
double delta_rho_norm(const TrialFamily& f, const SystemParams& p, double dt, int j);

/// Same quantity from the four-level Lindblad evolution of rho(0).
double delta_rho_norm_lindblad(const TrialFamily& f, const SystemParams& p, double dt, int j);

/// Shot-noise variant: rho_03, rho_13, rho_23 at 0 and dt are read with the
/// phase-scan emulator. Streams are derived from `seed`.
double delta_rho_norm_readout(const TrialFamily& f, const SystemParams& p, double dt, int j,
                              const ReadoutOptions& readout, std::uint64_t seed);

struct ZeroCrossing {
  double angle = 0.0;
  double left_angle = 0.0;
  double left_value = 0.0;
  double right_angle = 0.0;
  double right_value = 0.0;
  /// The zero fell exactly on a sample (|value| <= kExactZero).
  bool on_sample = false;
  /// ||(H_eff - lambda) u|| / ||H_eff|| with lambda the Rayleigh quotient.
  double residual = 0.0;
  bool excluded = false;
  std::string reason;
};

/// Samples with |value| at or below this count as exact zeros.
inline constexpr double kExactZero = 1e-12;
/// Eigen-residual threshold for spurious zeros (relative to ||H_eff||).
inline constexpr double kResidualThreshold = 0.1;

struct NoiseSpec {
  ReadoutOptions readout;
  std::uint64_t seed = 0;
};

struct ScanResult {
  FamilyKind kind = FamilyKind::z;
  int component = 0;
  std::vector<double> angles;
  std::vector<double> values;
  std::vector<ZeroCrossing> zeros;
  std::string diagnostic;
};

/// Component used per family by the default pipeline: z -> 2, x -> 1, zero -> 2.
int default_component(FamilyKind kind);

/// 61 points over [-pi, pi] for z/x, over [0, pi/2] for zero.
std::vector<double> default_scan_grid(FamilyKind kind, int points = 61);

double eigen_residual(const CMatrix& h, const CVector& u);

/// Samples delta_rho_norm over `grid`, interpolates zeros at sign changes and
/// applies the exclusion rules. For kind x the smallest and largest zeros in
/// the phi < 0 region are dropped when that region holds three or more.
/// Sample point k in noisy mode uses stream (noise->seed, k).
ScanResult scan_zeros(FamilyKind kind, const SystemParams& p, double dt, int j,
                      const std::vector<double>& grid, const NoiseSpec* noise = nullptr);

struct TomographyGrids {
  std::vector<double> z = default_scan_grid(FamilyKind::z);
  std::vector<double> x = default_scan_grid(FamilyKind::x);
  std::vector<double> zero = default_scan_grid(FamilyKind::zero);
};

struct EigenstateEstimate {
  CVector psi_plus;
  CVector psi_minus;
  CVector psi_zero;
  double phi_plus = 0.0;
  double phi_minus = 0.0;
  double phi_zero = 0.0;
  FamilyKind branch = FamilyKind::z;  ///< z for Omega >= gamma, x otherwise
  bool partial = false;
  std::string diagnostic;
  ScanResult pm_scan;
  ScanResult zero_scan;
};

/// Averages the retained zeros per sign region. psi_+ is the state whose
/// Rayleigh quotient has the larger real part (larger imaginary part when
/// Omega < gamma), matching the labels of closed_form_spectrum.
EigenstateEstimate extract_eigenstates(const SystemParams& p, double dt,
                                       const TomographyGrids& grids = {},
                                       const NoiseSpec* noise = nullptr);

/// (|<psi-|psi+>|, |<psi+|psi0>|, |<psi-|psi0>|) of the normalized inputs.
std::array<double, 3> inner_products(const CVector& psi_minus, const CVector& psi_plus,
                                     const CVector& psi_zero);

}  // namespace ep3
