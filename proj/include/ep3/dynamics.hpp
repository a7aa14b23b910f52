#pragma once

// Lindblad and non-Hermitian propagation.
//
// Superoperators use column stacking: vec(A rho B) = (B^T kron A) vec(rho).

#include "ep3/linalg.hpp"
#include "ep3/model.hpp"

#include <vector>

namespace ep3 {

struct DensityMatrix {
  static constexpr double kHermitianTol = 1e-9;

  CMatrix mat;
  /// Opt-in physicality flag. Traceless or non-Hermitian inputs are allowed
  /// with physical = false.
  bool physical = false;
  /// ||rho - rho^dag||_max removed by the last symmetrization.
  double hermiticity_defect = 0.0;

  [[nodiscard]] Eigen::Index dim() const { return mat.rows(); }

  /// Wraps a matrix without checks (physical = false).
  static DensityMatrix raw(CMatrix m);
  /// Checks Hermiticity and eigenvalues >= -1e-9, throws otherwise.
  static DensityMatrix physical_state(CMatrix m);
  /// |psi><psi| without normalizing psi.
  static DensityMatrix pure(const CVector& psi);
};

struct Superoperator {
  Eigen::Index dim = 0;  ///< n, the Hilbert-space dimension
  CMatrix mat;           ///< n^2 x n^2
};

Superoperator vectorize_lindblad(const CMatrix& h, const std::vector<CMatrix>& jumps);

/// L[rho] for a single matrix.
CMatrix apply_superoperator(const Superoperator& s, const CMatrix& rho);

/// Superoperators with more entries than this per side are propagated with
/// the sparse exponential action instead of a dense expm.
inline constexpr Eigen::Index kDenseExpmLimit = 256;

/// rho(t) = exp(S t) vec(rho0). Physical inputs are re-symmetrized and the
/// removed anti-Hermitian part is recorded in hermiticity_defect.
DensityMatrix propagate_lindblad(const Superoperator& s, const DensityMatrix& rho0, double t);

/// Fixed-step propagator. Dense exp(S t) is built once for small systems;
/// larger ones reuse a sparse copy of the generator.
class LindbladPropagator {
 public:
  LindbladPropagator(const Superoperator& s, double t);
  [[nodiscard]] DensityMatrix apply(const DensityMatrix& rho) const;
  [[nodiscard]] double step() const { return t_; }

 private:
  Eigen::Index dim_;
  double t_;
  bool dense_;
  CMatrix propagator_;
  SparseCMatrix generator_;
};

/// exp(-i H t) v0.
CVector propagate_nh(const CMatrix& h, const CVector& v0, double t);

/// (rho_03, rho_13, rho_23) of a four-level density matrix.
CVector offdiag_sector(const DensityMatrix& rho);

/// rho(0) = (|psi> + |3>)(<psi| + <3|) / 2 with psi on levels 0..2.
DensityMatrix sector_initial_state(const CVector& psi3);

/// Trace distance between the four-level block of the six-level evolution
/// and the reduced four-level evolution, both started from rho0 (4x4, the
/// excited levels empty).
double elimination_trace_distance(const FullParams& fp, const DensityMatrix& rho0, double t);

}  // namespace ep3
