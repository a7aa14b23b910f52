#pragma once

// Operators of the dissipative three-level ion.
//
// Units: angular frequencies in rad/us, times in us. Configuration files carry
// linear frequencies in MHz and are multiplied by 2*pi on load (see
// ep3/config.hpp), so gamma = 2*pi*0.040 MHz becomes 0.2513 rad/us here.
//
// Basis ordering is global and literal:
//   |0>, |1>, |2>, |3>            reduced ground manifold (|3> is the loss level)
//   |e1>, |e2>                    appended for the full six-level model
//   |a>                           appended (index 3 of the 4x4 H_eff + aux
//                                 matrix, index 4 of the five-level model)

#include "ep3/linalg.hpp"

#include <array>
#include <vector>

namespace ep3 {

namespace level {
inline constexpr int k0 = 0;
inline constexpr int k1 = 1;
inline constexpr int k2 = 2;
inline constexpr int k3 = 3;
inline constexpr int kE1 = 4;
inline constexpr int kE2 = 5;
/// |a> in the five-level system + auxiliary model.
inline constexpr int kAux = 4;
}  // namespace level

struct SystemParams {
  double omega1 = 0.0;  ///< microwave coupling |0>-|1>, rad/us
  double omega2 = 0.0;  ///< microwave coupling |1>-|2>, rad/us
  double gamma1 = 0.0;  ///< loss rate of |1>, rad/us
  double gamma2 = 0.0;  ///< loss rate of |2>, rad/us
  double delta0 = 0.0;  ///< extra detuning -delta0 |0><0|, rad/us
  double delta1 = 0.0;  ///< extra detuning -delta1 |1><1|, rad/us

  /// omega1 = omega2 = omega, gamma1 = gamma, gamma2 = 2 gamma, no detuning.
  static SystemParams symmetric(double omega, double gamma);

  /// True when omega1 = omega2 and gamma2 = 2 gamma1 to 1e-12 relative, i.e.
  /// H_eff = Omega S_x + i gamma S_z - i gamma I.
  [[nodiscard]] bool is_symmetric() const;

  /// Throws std::invalid_argument on negative rates or non-finite fields.
  void validate() const;
};

struct AuxParams {
  double omega_a = 0.0;    ///< |1>-|a> Rabi frequency, rad/us
  double delta_a = 0.0;    ///< |a> detuning, rad/us
  double gamma_a = 0.0;    ///< 1 / lifetime of |a>, 1/us
  double branch_f = 0.816; ///< D5/2 -> F7/2 branching fraction
  double n0 = 1.0;         ///< state preparation and measurement scale

  void validate() const;
};

/// Six-level model parameters. The effective loss rates follow from the
/// optical couplings, gamma_n = 2 J_n^2 / Gamma.
struct FullParams {
  double j1 = 0.0;
  double j2 = 0.0;
  double big_gamma = 0.0;  ///< excited-state decay rate, rad/us
  SystemParams base;       ///< omega1/omega2/detunings used; gammas derived

  /// Chooses J_n so that the reduced model reproduces base.gamma1/gamma2.
  static FullParams from_rates(const SystemParams& base, double big_gamma);

  [[nodiscard]] double gamma1() const { return 2.0 * j1 * j1 / big_gamma; }
  [[nodiscard]] double gamma2() const { return 2.0 * j2 * j2 / big_gamma; }
  /// The reduced system parameters with the derived loss rates.
  [[nodiscard]] SystemParams reduced() const;
  /// Set when J_n exceeds Gamma/50; adiabatic elimination gets less accurate.
  [[nodiscard]] bool elimination_warning() const;
  /// Throws when J_n > Gamma/10 or Gamma <= 0.
  void validate() const;
};

/// Antiunitary (conjugates = true) or unitary symmetry U or U*kappa.
struct SymmetryOp {
  CMatrix unitary_part;
  bool conjugates = false;
};

SymmetryOp pt_symmetry();          ///< antidiag(1,1,1) kappa
SymmetryOp anti_pt_symmetry();     ///< diag(1,-1,1) kappa
SymmetryOp anti_pt_symmetry_4();   ///< diag(1,-1,1,1) kappa, four-level space
SymmetryOp identity_symmetry(int dim);

/// H_eff = H - (i/2) sum L^dag L plus diag(-delta0, -delta1, 0).
CMatrix build_heff(const SystemParams& p);

/// H_eff in basis |0>,|1>,|2>,|a> with (Omega_a/2)(|1><a| + h.c.) - delta_a |a><a|.
CMatrix build_heff_aux(const SystemParams& p, const AuxParams& a);

/// Hermitian part H of the reduced four-level master equation (dim 4).
CMatrix build_reduced_hamiltonian(const SystemParams& p, int dim = 4);

/// L1..L6 with c_n = sqrt(2 gamma_n / 3), in dimension `dim` >= 4.
std::vector<CMatrix> build_reduced_jumps(const SystemParams& p, int dim = 4);

struct FullModel {
  CMatrix hamiltonian;           ///< 6x6
  std::vector<CMatrix> jumps;    ///< six 6x6 operators, c = sqrt(Gamma/3)
};
FullModel build_full_model(const FullParams& fp);

/// Five-level model |0>,|1>,|2>,|3>,|a> with the reduced jumps switched on.
struct AuxModel {
  CMatrix hamiltonian;
  std::vector<CMatrix> jumps;
};
AuxModel build_aux_lindblad_model(const SystemParams& p, const AuxParams& a);

enum class SpinAxis { x, y, z };
/// Spin-1 matrices; y is obtained as -i[S_z, S_x].
CMatrix spin1(SpinAxis axis);

/// U M U^-1, with M conjugated elementwise first when op.conjugates.
CMatrix symmetry_transform(const SymmetryOp& op, const CMatrix& m);

/// Eigenvalues and right eigenvectors of h_eff = Omega S_x + i gamma S_z,
/// exactly in the printed gauge (psi_pm not renormalized; for Omega < gamma
/// their norm is gamma/Omega).
struct ClosedFormSpectrum {
  Complex e_plus;
  Complex e_minus;
  Complex e_zero;
  CVector psi_plus;
  CVector psi_minus;
  CVector psi_zero;
};
ClosedFormSpectrum closed_form_spectrum(double omega, double gamma);

/// The coalesced state (1/2)(-1, i sqrt2, 1).
CVector ep_state();

}  // namespace ep3
