#include "ep3/quench.hpp"

#include "ep3/dynamics.hpp"
#include "ep3/optimize.hpp"
#include "ep3/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace ep3 {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

bool at_ep(double omega, double gamma) { return std::abs(omega - gamma) <= 1e-14 * gamma; }

void check_rates(double omega, double gamma) {
  if (!(omega > 0.0) || !(gamma > 0.0)) {
    throw std::invalid_argument("quench: omega and gamma must be > 0");
  }
}

// cos(sqrt(y)) and sin(sqrt(y))/sqrt(y) for real y of either sign.
void cos_sinc(double y, double& c, double& s) {
  if (std::abs(y) <= 1.0) {
    c = 0.0;
    s = 0.0;
    double term_c = 1.0;
    double term_s = 1.0;
    for (int k = 0; k < 24; ++k) {
      c += term_c;
      s += term_s;
      term_c *= -y / ((2.0 * k + 1.0) * (2.0 * k + 2.0));
      term_s *= -y / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
    }
    return;
  }
  if (y > 0.0) {
    const double r = std::sqrt(y);
    c = std::cos(r);
    s = std::sin(r) / r;
  } else {
    const double r = std::sqrt(-y);
    c = std::cosh(r);
    s = std::sinh(r) / r;
  }
}

struct ModelFit {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double rss = std::numeric_limits<double>::infinity();
  bool converged = false;
};

bool has_phase(QuenchModel m) { return m == QuenchModel::sin2 || m == QuenchModel::sinh2; }

// Optimal amplitude for fixed (b, c) and the resulting residual.
ModelFit project_amplitude(QuenchModel m, const std::vector<double>& x,
                           const std::vector<double>& y, double b, double c) {
  double gy = 0.0;
  double gg = 0.0;
  double yy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double g = quench_model_value(m, 1.0, b, c, x[k]);
    gy += g * y[k];
    gg += g * g;
    yy += y[k] * y[k];
  }
  ModelFit f;
  f.b = b;
  f.c = c;
  if (!(gg > 0.0) || !std::isfinite(gg)) {
    f.rss = yy;
    return f;
  }
  f.a = gy / gg;
  f.rss = std::max(0.0, yy - gy * gy / gg);
  // Recompute directly when cancellation makes the shortcut unreliable.
  if (f.rss < 1e-8 * yy) {
    double r = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
      const double d = y[k] - quench_model_value(m, f.a, b, c, x[k]);
      r += d * d;
    }
    f.rss = r;
  }
  return f;
}

struct SearchBox {
  double b_max;
  double c_lo;
  double c_hi;
};

SearchBox box_for(QuenchModel m) {
  switch (m) {
    case QuenchModel::sin2:
      return {8.0, 0.0, kPi};
    case QuenchModel::sinh2:
      return {3.0, 0.0, 4.0};
    case QuenchModel::sin:
      return {16.0, 0.0, 0.0};
    case QuenchModel::sinh:
      return {3.0, 0.0, 0.0};
  }
  return {1.0, 0.0, 0.0};
}

ModelFit refine(QuenchModel m, const std::vector<double>& x, const std::vector<double>& y,
                double b0, double c0) {
  const bool phase = has_phase(m);
  auto objective = [&](std::span<const double> v) {
    return project_amplitude(m, x, y, v[0], phase ? v[1] : 0.0).rss;
  };
  auto proj = [](std::span<double> v) { v[0] = std::abs(v[0]); };
  std::vector<double> start{b0};
  std::vector<double> step{std::max(1e-3, 0.02 * b0)};
  if (phase) {
    start.push_back(c0);
    step.push_back(0.02);
  }
  NelderMeadOptions nm;
  nm.max_evals = 4000;
  nm.xtol = 1e-13;
  nm.ftol = 1e-30;
  NelderMeadResult r = nelder_mead(objective, start, step, proj, nm);
  r = nelder_mead(objective, r.x, step, proj, nm);
  ModelFit f = project_amplitude(m, x, y, r.x[0], phase ? r.x[1] : 0.0);
  f.converged = r.converged || f.rss <= 1e-28;
  return f;
}

ModelFit fit_model(QuenchModel m, const std::vector<double>& x, const std::vector<double>& y) {
  const SearchBox box = box_for(m);
  const bool phase = has_phase(m);
  const int nb = static_cast<int>(box.b_max / 0.01);
  const int nc = phase ? 64 : 1;
  ModelFit best;
  for (int ib = 1; ib <= nb; ++ib) {
    const double b = box.b_max * ib / nb;
    for (int ic = 0; ic < nc; ++ic) {
      const double c = phase ? box.c_lo + (box.c_hi - box.c_lo) * ic / nc : 0.0;
      const ModelFit f = project_amplitude(m, x, y, b, c);
      if (f.rss < best.rss) best = f;
    }
  }
  return refine(m, x, y, best.b, best.c);
}

void split(const std::vector<QuenchSample>& s, std::vector<double>& x, std::vector<double>& y) {
  x.clear();
  y.clear();
  for (const auto& q : s) {
    x.push_back(q.gamma_t);
    y.push_back(q.value);
  }
}

}  // namespace

double rho03_closed(double omega, double gamma, double t) {
  check_rates(omega, gamma);
  const double decay = std::exp(-gamma * t);
  if (at_ep(omega, gamma)) {
    const double f = 1.0 + gamma * t / 2.0;
    return 0.5 * decay * f * f;
  }
  if (omega > gamma) {
    const double s = std::sqrt(omega * omega - gamma * gamma);
    const double c1 = std::acos(gamma / omega);
    const double sn = std::sin(s * t / 2.0 + c1);
    return omega * omega * decay / (2.0 * s * s) * sn * sn;
  }
  const double q = std::sqrt(gamma * gamma - omega * omega);
  const double c2 = std::acosh(gamma / omega);
  const double sh = std::sinh(q * t / 2.0 + c2);
  return omega * omega * decay / (2.0 * q * q) * sh * sh;
}

double rho03_series(double omega, double gamma, double t) {
  check_rates(omega, gamma);
  const double y = (omega * omega - gamma * gamma) * t * t / 4.0;
  double c = 0.0;
  double s = 0.0;
  cos_sinc(y, c, s);
  const double f = c + gamma * t / 2.0 * s;
  return 0.5 * std::exp(-gamma * t) * f * f;
}

double liouvillian_signal_closed(double omega, double gamma, double t) {
  check_rates(omega, gamma);
  const double decay = std::exp(-2.0 * gamma * t);
  if (at_ep(omega, gamma)) return kSqrt2 * omega * t * decay;
  if (omega > gamma) {
    const double s = std::sqrt(omega * omega - gamma * gamma);
    return kSqrt2 * omega / s * decay * std::sin(s * t);
  }
  const double q = std::sqrt(gamma * gamma - omega * omega);
  return kSqrt2 * omega / q * decay * std::sinh(q * t);
}

const char* to_string(QuenchFamily f) {
  return f == QuenchFamily::h_eff ? "h_eff" : "liouvillian";
}

const char* to_string(QuenchModel m) {
  switch (m) {
    case QuenchModel::sin:
      return "sin";
    case QuenchModel::sinh:
      return "sinh";
    case QuenchModel::sin2:
      return "sin2";
    case QuenchModel::sinh2:
      return "sinh2";
  }
  return "?";
}

double quench_model_value(QuenchModel m, double a, double b, double c, double x) {
  switch (m) {
    case QuenchModel::sin2: {
      const double v = std::sin(b * x + c);
      return a * std::exp(-x) * v * v;
    }
    case QuenchModel::sinh2: {
      const double v = std::sinh(b * x + c);
      return a * std::exp(-x) * v * v;
    }
    case QuenchModel::sin:
      return a * std::exp(-2.0 * x) * std::sin(b * x);
    case QuenchModel::sinh:
      return a * std::exp(-2.0 * x) * std::sinh(b * x);
  }
  return 0.0;
}

double expected_quench_b(QuenchFamily f, double r) {
  const double b = std::sqrt(std::abs(r * r - 1.0));
  return f == QuenchFamily::h_eff ? 0.5 * b : b;
}

std::vector<double> quench_grid(int points, double span) {
  if (points < 2) throw std::invalid_argument("quench_grid: need >= 2 points");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = span * k / (points - 1);
  return g;
}

std::vector<QuenchSample> quench_samples(QuenchFamily f, double r,
                                         const std::vector<double>& gamma_t) {
  std::vector<QuenchSample> out;
  for (double x : gamma_t) {
    const double v = f == QuenchFamily::h_eff ? rho03_closed(r, 1.0, x)
                                              : liouvillian_signal_closed(r, 1.0, x);
    out.push_back({x, v});
  }
  return out;
}

std::vector<QuenchSample> quench_samples_readout(const SystemParams& p,
                                                 const std::vector<double>& gamma_t,
                                                 const ReadoutOptions& readout,
                                                 std::uint64_t seed) {
  if (!p.is_symmetric()) throw std::invalid_argument("quench_samples_readout: symmetric params required");
  const Superoperator s = vectorize_lindblad(build_reduced_hamiltonian(p), build_reduced_jumps(p));
  CVector psi = CVector::Zero(3);
  psi(0) = 1.0;
  const DensityMatrix rho0 = sector_initial_state(psi);
  std::vector<QuenchSample> out;
  for (std::size_t k = 0; k < gamma_t.size(); ++k) {
    const DensityMatrix rho = propagate_lindblad(s, rho0, gamma_t[k] / p.gamma1);
    const ReadoutResult r = phase_scan_readout(rho.mat, 0, 3, readout, stream_seed(seed, k));
    out.push_back({gamma_t[k], r.rho.real()});
  }
  return out;
}

QuenchFit fit_quench(const std::vector<QuenchSample>& samples, QuenchFamily family,
                     const QuenchFitOptions& opts) {
  if (samples.size() < 10) throw std::invalid_argument("fit_quench: need >= 10 samples");
  std::vector<double> x;
  std::vector<double> y;
  split(samples, x, y);

  const QuenchModel osc = family == QuenchFamily::h_eff ? QuenchModel::sin2 : QuenchModel::sin;
  const QuenchModel hyp = family == QuenchFamily::h_eff ? QuenchModel::sinh2 : QuenchModel::sinh;
  const ModelFit fo = fit_model(osc, x, y);
  const ModelFit fh = fit_model(hyp, x, y);

  QuenchFit out;
  const bool pick_osc = fo.rss <= fh.rss;
  const ModelFit& best = pick_osc ? fo : fh;
  out.model = pick_osc ? osc : hyp;
  out.A = best.a;
  out.B = best.b;
  out.C = best.c;
  out.residual = best.rss;
  out.other_residual = pick_osc ? fh.rss : fo.rss;
  out.converged = fo.converged || fh.converged;
  if (!out.converged) out.diagnostic = "neither model converged";

  if (opts.bootstrap > 0) {
    std::vector<double> fitted(x.size());
    std::vector<double> resid(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      fitted[k] = quench_model_value(out.model, out.A, out.B, out.C, x[k]);
      resid[k] = y[k] - fitted[k];
    }
    std::vector<double> bs;
    bs.reserve(static_cast<std::size_t>(opts.bootstrap));
    std::vector<double> yb(x.size());
    for (int r = 0; r < opts.bootstrap; ++r) {
      std::mt19937_64 rng = make_stream(opts.seed, static_cast<std::uint64_t>(r));
      std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
      for (std::size_t k = 0; k < x.size(); ++k) yb[k] = fitted[k] + resid[pick(rng)];
      bs.push_back(refine(out.model, x, yb, out.B, out.C).b);
    }
    std::sort(bs.begin(), bs.end());
    auto quantile = [&](double q) {
      const double pos = q * static_cast<double>(bs.size() - 1);
      const auto lo = static_cast<std::size_t>(std::floor(pos));
      const auto hi = std::min(lo + 1, bs.size() - 1);
      return bs[lo] + (pos - static_cast<double>(lo)) * (bs[hi] - bs[lo]);
    };
    out.ci95_B = 0.5 * (quantile(0.975) - quantile(0.025));
  }
  return out;
}

}  // namespace ep3
