#pragma once

// Small dense complex linear algebra shared by every other module.
//
// Matrices are Eigen dynamic complex matrices. Dimensions in this project are
// tiny (3..6 levels, superoperators up to 36x36), so robustness wins over
// speed. A sparse exponential action is kept for larger generators.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <complex>
#include <span>
#include <vector>

namespace ep3 {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using SparseCMatrix = Eigen::SparseMatrix<Complex>;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Eigenvalues in global order plus the matching right eigenvectors (columns).
struct EigenSystem {
  std::vector<Complex> values;
  CMatrix right_vectors;
  /// Set when the eigenvector matrix is numerically singular (near an EP):
  /// sigma_min < 1e-6 * sigma_max.
  bool condition_flag = false;
};

/// Throws std::invalid_argument if any entry is NaN or Inf.
void require_finite(const CMatrix& m, const char* what);

/// Eigen-decomposition of a general complex square matrix (dimension 1..64).
/// Hessenberg reduction followed by shifted QR. Values are sorted by real
/// part, ties (within 1e-9 of the matrix scale) broken by imaginary part.
/// When condition_flag is set, eigenvalues that lie within 1e-4 of the matrix
/// scale and have nearly parallel eigenvectors are replaced by their mean.
EigenSystem eig(const CMatrix& m);

/// Eigenvalues only, same ordering as eig().
std::vector<Complex> eigvals(const CMatrix& m);

/// Matrix exponential by scaling-and-squaring with Pade approximants (up to
/// degree 13). Never goes through an eigendecomposition, so it stays accurate
/// at exceptional points.
CMatrix expm(const CMatrix& m);

/// exp(t * A) v for a sparse A without forming the exponential. Truncated
/// Taylor series with scaling, shifted by trace(A)/n; each substep is summed
/// until the terms drop below double precision.
CVector expm_multiply(const SparseCMatrix& a, const CVector& v, double t);

/// Result of an exhaustive 3! matching, see match_permutation().
struct PermutationMatch {
  std::array<int, 3> perm{0, 1, 2};
  double cost = 0.0;
  /// Cost of the best assignment that differs from `perm`.
  double runner_up_cost = 0.0;
};

/// perm[k] is the index into `next` assigned to prev[k]; minimizes
/// sum_k |prev[k] - next[perm[k]]|. Ties go to the lexicographically smallest
/// permutation.
PermutationMatch match_permutation_detailed(std::span<const Complex, 3> prev,
                                            std::span<const Complex, 3> next);

std::array<int, 3> match_permutation(std::span<const Complex, 3> prev,
                                     std::span<const Complex, 3> next);

// ---- helpers ---------------------------------------------------------------

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// Column-stacking vectorization: vec(M)[i + n*j] = M(i, j).
CVector vec(const CMatrix& m);
CMatrix unvec(const CVector& v, Eigen::Index n);

/// Largest singular value.
double spectral_norm(const CMatrix& m);

/// Half the trace norm of the Hermitian part of (a - b).
double trace_distance(const CMatrix& a, const CMatrix& b);

/// |<a|b>| / (|a| |b|).
double normalized_overlap(const CVector& a, const CVector& b);

CVector basis_vector(Eigen::Index dim, Eigen::Index k);

/// |i><j| in dimension dim.
CMatrix ket_bra(Eigen::Index dim, Eigen::Index i, Eigen::Index j);

SparseCMatrix to_sparse(const CMatrix& m, double drop_tol = 0.0);

}  // namespace ep3
