#pragma once

// Band tracking of eigenvalue triplets along a closed parameter loop and the
// spectral winding number relative to a base energy.

#include "ep3/linalg.hpp"
#include "ep3/model.hpp"

#include <array>
#include <stdexcept>
#include <vector>

namespace ep3 {

using Triplet = std::array<Complex, 3>;

struct BandSet {
  std::vector<double> thetas;                ///< one pass of the loop, [0, 2 pi)
  std::array<std::vector<Complex>, 3> bands; ///< continuous over one pass
  /// seam_perm[n] is the band that band n continues into after one pass.
  std::array<int, 3> seam_perm{0, 1, 2};
  /// Order of seam_perm: bands close after m passes.
  int m = 1;
  /// Set when some step had two assignments within 1e-9 of each other.
  bool ambiguous = false;
  /// Largest |E(theta_k+1) - E(theta_k)| after matching.
  double max_step = 0.0;

  /// Band n followed for m passes, m * thetas.size() points.
  [[nodiscard]] std::vector<Complex> stitched(int band) const;
};

/// Sequential matching with match_permutation, then the seam permutation
/// between the last point and the first.
BandSet track_bands(const std::vector<double>& thetas, const std::vector<Triplet>& spectra);

/// W as value = numerator / m.
struct Rational {
  double value = 0.0;
  long numerator = 0;
  int denominator = 1;
};

class RefineGridError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// W = (1 / 2 pi m) sum_k Delta arg(E_n(theta_k) - E_B) over the stitched
/// band. Throws std::invalid_argument when E_B lies on a band and
/// RefineGridError when a phase step reaches pi/2.
Rational winding_number(const BandSet& bs, Complex e_b, int band);

/// Uniform loop thetas_k = 2 pi k / points, k < points.
std::vector<double> loop_thetas(int points);

/// Spectra of H_eff along Delta0 = c0 + r cos(theta), Delta1 = c1 + r sin(theta).
std::vector<Triplet> loop_spectra(const SystemParams& base, double radius, double center0,
                                  double center1, const std::vector<double>& thetas);

}  // namespace ep3
