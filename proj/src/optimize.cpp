#include "ep3/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace ep3 {

namespace {

using Point = std::vector<double>;

double eval(const Objective& f, Point& x, const Projection& project, int& evals) {
  if (project) project(x);
  ++evals;
  const double v = f(x);
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

Point affine(const Point& a, const Point& b, double t) {
  // a + t (b - a)
  Point out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] + t * (b[k] - a[k]);
  return out;
}

}  // namespace

NelderMeadResult nelder_mead(const Objective& f, std::vector<double> x0,
                             const std::vector<double>& step, const Projection& project,
                             const NelderMeadOptions& opts) {
  const std::size_t n = x0.size();
  if (n == 0) throw std::invalid_argument("nelder_mead: empty parameter vector");
  if (step.size() != n) throw std::invalid_argument("nelder_mead: step size mismatch");

  const double dn = static_cast<double>(n);
  const double alpha = 1.0;
  const double beta = opts.adaptive ? 1.0 + 2.0 / dn : 2.0;
  const double gamma = opts.adaptive ? 0.75 - 0.5 / dn : 0.5;
  const double delta = opts.adaptive ? 1.0 - 1.0 / dn : 0.5;

  int evals = 0;
  std::vector<Point> simplex(n + 1, x0);
  std::vector<double> values(n + 1);
  values[0] = eval(f, simplex[0], project, evals);
  for (std::size_t k = 0; k < n; ++k) {
    simplex[k + 1][k] += step[k];
    values[k + 1] = eval(f, simplex[k + 1], project, evals);
  }

  std::vector<std::size_t> order(n + 1);
  bool converged = false;
  while (evals < opts.max_evals) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    {
      std::vector<Point> s2(n + 1);
      std::vector<double> v2(n + 1);
      for (std::size_t k = 0; k <= n; ++k) {
        s2[k] = simplex[order[k]];
        v2[k] = values[order[k]];
      }
      simplex.swap(s2);
      values.swap(v2);
    }

    double diameter = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      for (std::size_t d = 0; d < n; ++d) {
        const double scale = std::max(1.0, std::abs(simplex[0][d]));
        diameter = std::max(diameter, std::abs(simplex[k][d] - simplex[0][d]) / scale);
      }
    }
    const double spread = values[n] - values[0];
    if (diameter <= opts.xtol && spread <= opts.ftol * std::max(1.0, std::abs(values[0]))) {
      converged = true;
      break;
    }

    Point centroid(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t d = 0; d < n; ++d) centroid[d] += simplex[k][d] / dn;
    }

    Point xr = affine(centroid, simplex[n], -alpha);
    const double fr = eval(f, xr, project, evals);
    if (fr < values[0]) {
      Point xe = affine(centroid, simplex[n], -alpha * beta);
      const double fe = eval(f, xe, project, evals);
      if (fe < fr) {
        simplex[n] = std::move(xe);
        values[n] = fe;
      } else {
        simplex[n] = std::move(xr);
        values[n] = fr;
      }
      continue;
    }
    if (fr < values[n - 1]) {
      simplex[n] = std::move(xr);
      values[n] = fr;
      continue;
    }
    const bool outside = fr < values[n];
    Point xc = outside ? affine(centroid, simplex[n], -alpha * gamma)
                       : affine(centroid, simplex[n], gamma);
    const double fc = eval(f, xc, project, evals);
    if (fc < (outside ? fr : values[n])) {
      simplex[n] = std::move(xc);
      values[n] = fc;
      continue;
    }
    for (std::size_t k = 1; k <= n; ++k) {
      simplex[k] = affine(simplex[0], simplex[k], delta);
      values[k] = eval(f, simplex[k], project, evals);
    }
  }

  const auto best = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  return {simplex[best], values[best], evals, converged};
}

}  // namespace ep3
