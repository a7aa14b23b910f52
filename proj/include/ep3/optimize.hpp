#pragma once

// Derivative-free minimization with a projection onto the feasible set.

#include <functional>
#include <span>
#include <vector>

namespace ep3 {

using Objective = std::function<double(std::span<const double>)>;
/// Maps a point onto the feasible set in place. May be empty.
using Projection = std::function<void(std::span<double>)>;

struct NelderMeadOptions {
  int max_evals = 4000;
  /// Stop when the simplex diameter (max-norm, relative to max(1, |x|)) and
  /// the spread of function values both fall below these.
  double xtol = 1e-9;
  double ftol = 1e-14;
  /// Dimension-adaptive coefficients (Gao and Han); classic values otherwise.
  bool adaptive = true;
};

struct NelderMeadResult {
  std::vector<double> x;
  double f = 0.0;
  int evals = 0;
  bool converged = false;
};

/// Nelder-Mead simplex. Every trial vertex is projected before evaluation,
/// so the objective is only called on feasible points. `step` sets the
/// initial simplex edge per coordinate.
NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const std::vector<double>& step, const Projection& project,
                             const NelderMeadOptions& opts = {});

}  // namespace ep3
