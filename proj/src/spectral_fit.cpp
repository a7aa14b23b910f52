#include "ep3/spectral_fit.hpp"

#include "ep3/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace ep3 {

SystemParams LineParams::system() const {
  SystemParams p;
  p.omega1 = omega;
  p.omega2 = omega;
  p.gamma1 = gamma1;
  p.gamma2 = gamma2;
  p.delta0 = delta0;
  p.delta1 = delta1;
  return p;
}

namespace {

struct GammaMeans {
  double g1 = 0.0;
  double g2 = 0.0;
};

GammaMeans means(const FitParams& fp) {
  GammaMeans m;
  for (const auto& l : fp.lines) {
    m.g1 += l.gamma1;
    m.g2 += l.gamma2;
  }
  const double n = static_cast<double>(fp.lines.size());
  m.g1 /= n;
  m.g2 /= n;
  return m;
}

double line_loss(const SpectralLine& line, const LineParams& lp, const AuxParams& aux) {
  const SystemParams p = lp.system();
  AuxParams a = aux;
  a.n0 = lp.n0;
  double sum = 0.0;
  for (std::size_t k = 0; k < line.detunings.size(); ++k) {
    a.delta_a = line.detunings[k];
    const double r = line.populations[k] - na_tgt(p, a, line.t_evolve);
    sum += r * r;
  }
  return sum;
}

void line_residuals(const SpectralLine& line, const LineParams& lp, const AuxParams& aux, double* out) {
  const SystemParams p = lp.system();
  AuxParams a = aux;
  a.n0 = lp.n0;
  for (std::size_t k = 0; k < line.detunings.size(); ++k) {
    a.delta_a = line.detunings[k];
    out[k] = line.populations[k] - na_tgt(p, a, line.t_evolve);
  }
}

struct Box {
  double g1_lo, g1_hi, g2_lo, g2_hi;
};

Box band(const GammaMeans& m, double rel) {
  return {m.g1 * (1.0 - rel), m.g1 * (1.0 + rel), m.g2 * (1.0 - rel), m.g2 * (1.0 + rel)};
}

// Variable layout: x[0] = g, then per line {omega, n0, d1, d2[, delta0, delta1]}.
struct Layout {
  std::size_t lines;
  std::size_t per;
  [[nodiscard]] std::size_t size() const { return 1 + lines * per; }
  [[nodiscard]] std::size_t at(std::size_t line, std::size_t k) const { return 1 + line * per + k; }
};

enum : std::size_t { kOmega = 0, kN0 = 1, kD1 = 2, kD2 = 3, kDelta0 = 4, kDelta1 = 5 };

LineParams line_of(const Eigen::VectorXd& x, const Layout& lay, std::size_t i) {
  LineParams l;
  const double g = x[0];
  l.omega = x[lay.at(i, kOmega)];
  l.n0 = x[lay.at(i, kN0)];
  l.gamma1 = g * (1.0 + x[lay.at(i, kD1)]);
  l.gamma2 = 2.0 * g * (1.0 + x[lay.at(i, kD2)]);
  if (lay.per > 4) {
    l.delta0 = x[lay.at(i, kDelta0)];
    l.delta1 = x[lay.at(i, kDelta1)];
  }
  return l;
}

Eigen::VectorXd encode(const FitParams& fp, const Layout& lay) {
  Eigen::VectorXd x(lay.size());
  const GammaMeans m = means(fp);
  x[0] = m.g1;
  for (std::size_t i = 0; i < lay.lines; ++i) {
    const auto& l = fp.lines[i];
    x[lay.at(i, kOmega)] = l.omega;
    x[lay.at(i, kN0)] = l.n0;
    x[lay.at(i, kD1)] = l.gamma1 / m.g1 - 1.0;
    x[lay.at(i, kD2)] = l.gamma2 / (2.0 * m.g1) - 1.0;
    if (lay.per > 4) {
      x[lay.at(i, kDelta0)] = l.delta0;
      x[lay.at(i, kDelta1)] = l.delta1;
    }
  }
  return x;
}

FitParams decode(const Eigen::VectorXd& x, const Layout& lay, bool detunings) {
  FitParams fp;
  fp.fit_detunings = detunings;
  for (std::size_t i = 0; i < lay.lines; ++i) fp.lines.push_back(line_of(x, lay, i));
  return fp;
}

// Euclidean projection of the deviations at `slot` onto {sum = 0, |d| <= b}:
// d_i -> clamp(d_i - tau, -b, b) with tau found by bisection.
void project_deviations(Eigen::VectorXd& x, const Layout& lay, std::size_t slot, double b) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < lay.lines; ++i) {
    lo = std::min(lo, x[lay.at(i, slot)]);
    hi = std::max(hi, x[lay.at(i, slot)]);
  }
  auto excess = [&](double tau) {
    double s = 0.0;
    for (std::size_t i = 0; i < lay.lines; ++i) s += std::clamp(x[lay.at(i, slot)] - tau, -b, b);
    return s;
  };
  lo -= b;
  hi += b;
  for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  const double tau = 0.5 * (lo + hi);
  for (std::size_t i = 0; i < lay.lines; ++i) {
    double& d = x[lay.at(i, slot)];
    d = std::clamp(d - tau, -b, b);
  }
}

void project(Eigen::VectorXd& x, const Layout& lay, double b) {
  x[0] = std::max(x[0], 1e-12);
  for (std::size_t i = 0; i < lay.lines; ++i) {
    x[lay.at(i, kOmega)] = std::abs(x[lay.at(i, kOmega)]);
    x[lay.at(i, kN0)] = std::clamp(x[lay.at(i, kN0)], 1e-6, 1.0);
  }
  project_deviations(x, lay, kD1, b);
  project_deviations(x, lay, kD2, b);
}

struct Problem {
  const std::vector<SpectralLine>& lines;
  const AuxParams& aux;
  Layout lay;
  std::vector<std::size_t> offset;  // first residual row of each line
  std::size_t rows = 0;

  void residuals_line(const Eigen::VectorXd& x, std::size_t i, Eigen::VectorXd& r) const {
    line_residuals(lines[i], line_of(x, lay, i), aux, r.data() + offset[i]);
  }

  Eigen::VectorXd residuals(const Eigen::VectorXd& x) const {
    Eigen::VectorXd r(rows);
    for (std::size_t i = 0; i < lay.lines; ++i) residuals_line(x, i, r);
    return r;
  }

  // One-sided differences; a line block only depends on g and its own variables.
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& r0) const {
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(lay.size()));
    Eigen::VectorXd r = r0;
    auto column = [&](std::size_t col, double typical, auto&& lines_touched) {
      Eigen::VectorXd xp = x;
      double h = 1e-7 * std::max(std::abs(x[col]), typical);
      if (col != 0 && (col - 1) % lay.per == kN0 && x[col] + h > 1.0) h = -h;  // n0 <= 1
      xp[col] += h;
      for (std::size_t i : lines_touched) {
        residuals_line(xp, i, r);
        const auto n = static_cast<Eigen::Index>(lines[i].detunings.size());
        const auto o = static_cast<Eigen::Index>(offset[i]);
        jac.block(o, static_cast<Eigen::Index>(col), n, 1) = (r.segment(o, n) - r0.segment(o, n)) / h;
      }
    };
    std::vector<std::size_t> all(lay.lines);
    for (std::size_t i = 0; i < lay.lines; ++i) all[i] = i;
    column(0, x[0], all);
    for (std::size_t i = 0; i < lay.lines; ++i) {
      const std::array<std::size_t, 1> one{i};
      for (std::size_t k = 0; k < lay.per; ++k) {
        const double typical = (k == kN0 || k == kD1 || k == kD2) ? 1e-2 : x[0];
        column(lay.at(i, k), typical, one);
      }
    }
    return jac;
  }
};

struct StartResult {
  Eigen::VectorXd x;
  double loss = 0.0;
  int iterations = 0;
  bool converged = false;
};

StartResult levenberg_marquardt(const Problem& pb, Eigen::VectorXd x, const FitOptions& opts) {
  const Layout& lay = pb.lay;
  const auto n = static_cast<Eigen::Index>(lay.size());
  const double b = opts.gamma_band;
  project(x, lay, b);
  Eigen::VectorXd r = pb.residuals(x);
  double loss = r.squaredNorm();
  double mu = 1e-3;
  StartResult out;

  for (int it = 0; it < opts.max_iterations; ++it) {
    out.iterations = it + 1;
    const Eigen::MatrixXd jac = pb.jacobian(x, r);
    const Eigen::MatrixXd a = jac.transpose() * jac;
    const Eigen::VectorXd grad = jac.transpose() * r;

    // Variables on a bound whose descent direction points outward stay put.
    std::vector<char> frozen(static_cast<std::size_t>(n), 0);
    for (std::size_t i = 0; i < lay.lines; ++i) {
      const std::size_t n0 = lay.at(i, kN0);
      if (x[n0] >= 1.0 && grad[n0] < 0.0) frozen[n0] = 1;
      if (x[n0] <= 1e-6 && grad[n0] > 0.0) frozen[n0] = 1;
      for (std::size_t slot : {std::size_t{kD1}, std::size_t{kD2}}) {
        const std::size_t j = lay.at(i, slot);
        if (x[j] >= b * (1.0 - 1e-12) && grad[j] < 0.0) frozen[j] = 1;
        if (x[j] <= -b * (1.0 - 1e-12) && grad[j] > 0.0) frozen[j] = 1;
      }
    }

    bool accepted = false;
    double new_loss = loss;
    while (mu < 1e14) {
      // KKT system: damped normal equations plus sum(delta d1) = sum(delta d2) = 0.
      Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(n + 2, n + 2);
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + 2);
      kkt.topLeftCorner(n, n) = a;
      for (Eigen::Index j = 0; j < n; ++j) {
        kkt(j, j) += mu * std::max(a(j, j), 1e-12);
        rhs[j] = -grad[j];
      }
      for (std::size_t i = 0; i < lay.lines; ++i) {
        for (Eigen::Index c = 0; c < 2; ++c) {
          const auto j = static_cast<Eigen::Index>(lay.at(i, c == 0 ? kD1 : kD2));
          if (frozen[static_cast<std::size_t>(j)]) continue;
          kkt(n + c, j) = 1.0;
          kkt(j, n + c) = 1.0;
        }
      }
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!frozen[static_cast<std::size_t>(j)]) continue;
        kkt.row(j).setZero();
        kkt.col(j).setZero();
        kkt(j, j) = 1.0;
        rhs[j] = 0.0;
      }
      for (Eigen::Index c = 0; c < 2; ++c) {
        if (kkt.row(n + c).head(n).squaredNorm() == 0.0) kkt(n + c, n + c) = 1.0;
      }
      const Eigen::VectorXd sol = kkt.fullPivLu().solve(rhs);
      Eigen::VectorXd trial = x + sol.head(n);
      project(trial, lay, b);
      const Eigen::VectorXd rt = pb.residuals(trial);
      const double lt = rt.squaredNorm();
      if (std::isfinite(lt) && lt < loss) {
        x = std::move(trial);
        r = rt;
        new_loss = lt;
        mu = std::max(mu / 3.0, 1e-12);
        accepted = true;
        break;
      }
      mu *= 4.0;
    }
    if (!accepted) {
      // No descent left at machine resolution: a (constrained) stationary point.
      out.converged = true;
      break;
    }
    const double drop = loss - new_loss;
    loss = new_loss;
    if (drop <= opts.ftol * std::max(loss, 1e-300)) {
      out.converged = true;
      break;
    }
  }
  out.x = std::move(x);
  out.loss = loss;
  return out;
}

}  // namespace

double spectra_loss(const std::vector<SpectralLine>& lines, const FitParams& params,
                    const AuxParams& aux) {
  if (lines.size() != params.lines.size()) {
    throw std::invalid_argument("spectra_loss: line count differs from parameter count");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < lines.size(); ++i) sum += line_loss(lines[i], params.lines[i], aux);
  return sum;
}

void check_fit_constraints(const FitParams& params, double gamma_band) {
  if (params.lines.empty()) throw std::invalid_argument("fit: no line parameters");
  const GammaMeans m = means(params);
  if (!(m.g1 > 0.0) || !(m.g2 > 0.0)) throw std::invalid_argument("fit: mean gammas must be > 0");
  if (std::abs(m.g2 - 2.0 * m.g1) > 1e-9 * m.g2) {
    throw std::invalid_argument("fit: init violates mean(gamma2) = 2 mean(gamma1)");
  }
  const Box b = band(m, gamma_band * (1.0 + 1e-12));
  for (const auto& l : params.lines) {
    if (l.gamma1 < b.g1_lo || l.gamma1 > b.g1_hi || l.gamma2 < b.g2_lo || l.gamma2 > b.g2_hi) {
      throw std::invalid_argument("fit: init gamma outside the allowed band");
    }
    if (!(l.omega >= 0.0)) throw std::invalid_argument("fit: omega must be >= 0");
    if (!(l.n0 > 0.0 && l.n0 <= 1.0)) throw std::invalid_argument("fit: n0 must lie in (0,1]");
  }
}

FitResult fit_spectra(const std::vector<SpectralLine>& lines, const FitParams& init,
                      const FitOptions& opts) {
  if (lines.empty()) throw std::invalid_argument("fit_spectra: no lines");
  if (lines.size() != init.lines.size()) {
    throw std::invalid_argument("fit_spectra: line count differs from init parameter count");
  }
  for (const auto& l : lines) l.validate();
  check_fit_constraints(init, opts.gamma_band);
  if (opts.restarts < 1) throw std::invalid_argument("fit_spectra: restarts must be >= 1");

  const bool det = init.fit_detunings;
  Problem pb{lines, opts.aux, Layout{lines.size(), det ? std::size_t{6} : std::size_t{4}}, {}, 0};
  for (const auto& l : lines) {
    pb.offset.push_back(pb.rows);
    pb.rows += l.detunings.size();
  }
  const Eigen::VectorXd x0 = encode(init, pb.lay);

  std::vector<StartResult> runs(static_cast<std::size_t>(opts.restarts));
  parallel_for(opts.exec, runs.size(), [&](std::size_t s) {
    Eigen::VectorXd xs = x0;
    if (s > 0) {
      std::mt19937_64 rng = make_stream(opts.seed, s);
      std::uniform_real_distribution<double> jit(1.0 - opts.jitter, 1.0 + opts.jitter);
      xs[0] *= jit(rng);
      for (std::size_t i = 0; i < pb.lay.lines; ++i) xs[pb.lay.at(i, kOmega)] *= jit(rng);
    }
    runs[s] = levenberg_marquardt(pb, xs, opts);
  });
  std::size_t best = 0;
  for (std::size_t s = 1; s < runs.size(); ++s) {
    if (runs[s].loss < runs[best].loss) best = s;
  }

  FitResult out;
  out.params = decode(runs[best].x, pb.lay, det);
  out.loss = runs[best].loss;
  out.iterations = runs[best].iterations;
  out.converged = runs[best].converged;
  out.restarts_used = opts.restarts;
  const double b = opts.gamma_band;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out.line_loss.push_back(line_loss(lines[i], out.params.lines[i], opts.aux));
    const double d1 = runs[best].x[pb.lay.at(i, kD1)];
    const double d2 = runs[best].x[pb.lay.at(i, kD2)];
    out.gamma_at_bound.push_back({std::abs(d1) >= b * (1.0 - 1e-9), std::abs(d2) >= b * (1.0 - 1e-9)});
  }
  if (!out.converged) {
    out.diagnostic = "best start stopped at the iteration limit (" + std::to_string(opts.max_iterations) + ")";
  }
  return out;
}

FittedSpectrum eigenenergies_from_fit(const FitResult& fr, std::size_t line_index) {
  if (line_index >= fr.params.lines.size()) {
    throw std::out_of_range("eigenenergies_from_fit: line index out of range");
  }
  const EigenSystem es = eig(build_heff(fr.params.lines[line_index].system()));
  FittedSpectrum s;
  for (int k = 0; k < 3; ++k) s.values[static_cast<std::size_t>(k)] = es.values[static_cast<std::size_t>(k)];
  s.condition_flag = es.condition_flag;
  return s;
}

FittedSpectrum symmetric_eigenenergies_from_fit(const FitResult& fr, std::size_t line_index) {
  if (line_index >= fr.params.lines.size()) {
    throw std::out_of_range("symmetric_eigenenergies_from_fit: line index out of range");
  }
  const GammaMeans m = means(fr.params);
  const EigenSystem es = eig(build_heff(SystemParams::symmetric(fr.params.lines[line_index].omega, m.g1)));
  FittedSpectrum s;
  for (std::size_t k = 0; k < 3; ++k) s.values[k] = es.values[k];
  s.condition_flag = es.condition_flag;
  return s;
}

}  // namespace ep3
