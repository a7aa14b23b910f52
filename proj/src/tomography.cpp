#include "ep3/tomography.hpp"

#include "ep3/dynamics.hpp"
#include "ep3/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace ep3 {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
// Zeros this close to phi = 0 belong to both sign regions.
constexpr double kOriginTol = 1e-9;

double normalized_component(const CVector& v, int j) {
  const double n2 = v.squaredNorm();
  if (n2 < 1e-24) {
    throw std::runtime_error("delta_rho_norm: sector decayed below 1e-12, increase amplitude or reduce dt");
  }
  return std::norm(v(j)) / n2;
}

void check_component(int j) {
  if (j < 0 || j > 2) throw std::invalid_argument("tomography: component index must be 0, 1 or 2");
}

CVector sector_from_readout(const CMatrix& rho, const ReadoutOptions& opts, std::uint64_t seed) {
  CVector v(3);
  for (int n = 0; n < 3; ++n) {
    v(n) = phase_scan_readout(rho, n, 3, opts, stream_seed(seed, static_cast<std::uint64_t>(n))).rho;
  }
  return v;
}

double mean(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

}  // namespace

const char* to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::z:
      return "z";
    case FamilyKind::x:
      return "x";
    case FamilyKind::zero:
      return "zero";
  }
  return "?";
}

CVector trial_state(const TrialFamily& f) {
  const double phi = f.angle;
  CVector u(3);
  switch (f.kind) {
    case FamilyKind::z:
      u << -0.5 * std::exp(kI * phi), kI * (kSqrt2 / 2.0), 0.5 * std::exp(-kI * phi);
      return u;
    case FamilyKind::x:
      u << -(1.0 + std::sin(phi)) / 2.0, kI * std::cos(phi) / kSqrt2, (1.0 - std::sin(phi)) / 2.0;
      return u;
    case FamilyKind::zero:
      u << -std::sin(phi) / kSqrt2, kI * std::cos(phi), std::sin(phi) / kSqrt2;
      return u;
  }
  throw std::invalid_argument("trial_state: unknown family");
}

double delta_rho_norm(const TrialFamily& f, const SystemParams& p, double dt, int j) {
  check_component(j);
  if (!(dt > 0.0)) throw std::invalid_argument("delta_rho_norm: dt must be > 0");
  const CVector v0 = 0.5 * trial_state(f);
  const CVector v = propagate_nh(build_heff(p), v0, dt);
  return normalized_component(v, j) - normalized_component(v0, j);
}

double delta_rho_norm_lindblad(const TrialFamily& f, const SystemParams& p, double dt, int j) {
  check_component(j);
  if (!(dt > 0.0)) throw std::invalid_argument("delta_rho_norm: dt must be > 0");
  const DensityMatrix rho0 = sector_initial_state(trial_state(f));
  const Superoperator s = vectorize_lindblad(build_reduced_hamiltonian(p), build_reduced_jumps(p));
  const DensityMatrix rho = propagate_lindblad(s, rho0, dt);
  return normalized_component(offdiag_sector(rho), j) -
         normalized_component(offdiag_sector(rho0), j);
}

double delta_rho_norm_readout(const TrialFamily& f, const SystemParams& p, double dt, int j,
                              const ReadoutOptions& readout, std::uint64_t seed) {
  check_component(j);
  if (!(dt > 0.0)) throw std::invalid_argument("delta_rho_norm: dt must be > 0");
  const DensityMatrix rho0 = sector_initial_state(trial_state(f));
  const Superoperator s = vectorize_lindblad(build_reduced_hamiltonian(p), build_reduced_jumps(p));
  const DensityMatrix rho = propagate_lindblad(s, rho0, dt);
  const CVector v0 = sector_from_readout(rho0.mat, readout, stream_seed(seed, 0));
  const CVector v = sector_from_readout(rho.mat, readout, stream_seed(seed, 1));
  return normalized_component(v, j) - normalized_component(v0, j);
}

int default_component(FamilyKind kind) { return kind == FamilyKind::x ? 1 : 2; }

std::vector<double> default_scan_grid(FamilyKind kind, int points) {
  if (points < 2) throw std::invalid_argument("default_scan_grid: need >= 2 points");
  const double lo = kind == FamilyKind::zero ? 0.0 : -kPi;
  const double hi = kind == FamilyKind::zero ? kPi / 2.0 : kPi;
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) g[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (points - 1);
  return g;
}

double eigen_residual(const CMatrix& h, const CVector& u) {
  const CVector n = u.normalized();
  const Complex lambda = n.dot(h * n);
  return (h * n - lambda * n).norm() / spectral_norm(h);
}

ScanResult scan_zeros(FamilyKind kind, const SystemParams& p, double dt, int j,
                      const std::vector<double>& grid, const NoiseSpec* noise) {
  check_component(j);
  if (grid.size() < 9) throw std::invalid_argument("scan_zeros: grid needs >= 9 points");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1])) throw std::invalid_argument("scan_zeros: grid not increasing");
  }
  ScanResult out;
  out.kind = kind;
  out.component = j;
  out.angles = grid;
  out.values.resize(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const TrialFamily f{kind, grid[k]};
    out.values[k] = noise ? delta_rho_norm_readout(f, p, dt, j, noise->readout,
                                                   stream_seed(noise->seed, k))
                          : delta_rho_norm(f, p, dt, j);
  }

  const auto& a = out.angles;
  const auto& v = out.values;
  const std::size_t n = a.size();
  auto is_zero = [&](std::size_t k) { return std::abs(v[k]) <= kExactZero; };
  for (std::size_t k = 0; k < n; ++k) {
    if (is_zero(k)) {
      ZeroCrossing z;
      z.angle = a[k];
      z.on_sample = true;
      z.left_angle = a[k > 0 ? k - 1 : k];
      z.left_value = v[k > 0 ? k - 1 : k];
      z.right_angle = a[k + 1 < n ? k + 1 : k];
      z.right_value = v[k + 1 < n ? k + 1 : k];
      out.zeros.push_back(z);
      continue;
    }
    if (k + 1 < n && !is_zero(k + 1) && v[k] * v[k + 1] < 0.0) {
      ZeroCrossing z;
      z.left_angle = a[k];
      z.left_value = v[k];
      z.right_angle = a[k + 1];
      z.right_value = v[k + 1];
      z.angle = a[k] - v[k] * (a[k + 1] - a[k]) / (v[k + 1] - v[k]);
      out.zeros.push_back(z);
    }
  }

  const CMatrix h = build_heff(p);
  for (auto& z : out.zeros) {
    z.residual = eigen_residual(h, trial_state({kind, z.angle}));
    if (z.residual > kResidualThreshold) {
      z.excluded = true;
      z.reason = "eigen-residual above threshold";
    }
  }
  if (kind == FamilyKind::x) {
    std::vector<ZeroCrossing*> negative;
    for (auto& z : out.zeros) {
      if (z.angle < kOriginTol) negative.push_back(&z);
    }
    if (negative.size() >= 3) {
      for (ZeroCrossing* z : {negative.front(), negative.back()}) {
        z->excluded = true;
        z->reason = z->reason.empty() ? "extremal zero in phi < 0 region"
                                      : z->reason + "; extremal zero in phi < 0 region";
      }
    }
  }
  if (out.zeros.empty()) out.diagnostic = "no sign change found on the grid";
  return out;
}

EigenstateEstimate extract_eigenstates(const SystemParams& p, double dt,
                                       const TomographyGrids& grids, const NoiseSpec* noise) {
  if (!p.is_symmetric()) throw std::invalid_argument("extract_eigenstates: needs symmetric params");
  const double omega = p.omega1;
  const double gamma = p.gamma1;
  EigenstateEstimate est;
  est.branch = omega >= gamma ? FamilyKind::z : FamilyKind::x;
  const auto& pm_grid = est.branch == FamilyKind::z ? grids.z : grids.x;
  // Separate random streams for the two scans.
  std::optional<NoiseSpec> pm_noise;
  std::optional<NoiseSpec> zero_noise;
  if (noise) {
    pm_noise = NoiseSpec{noise->readout, stream_seed(noise->seed, 0)};
    zero_noise = NoiseSpec{noise->readout, stream_seed(noise->seed, 1)};
  }
  est.pm_scan = scan_zeros(est.branch, p, dt, default_component(est.branch), pm_grid,
                           pm_noise ? &*pm_noise : nullptr);

  std::vector<double> neg;
  std::vector<double> pos;
  for (const auto& z : est.pm_scan.zeros) {
    if (z.excluded) continue;
    if (z.angle < kOriginTol) neg.push_back(z.angle);
    if (z.angle > -kOriginTol) pos.push_back(z.angle);
  }
  if (neg.empty() || pos.empty()) {
    est.partial = true;
    est.diagnostic = "missing zeros in the phi " + std::string(neg.empty() ? "< 0" : "> 0") +
                     " region";
    if (neg.empty() && pos.empty()) {
      neg.push_back(0.0);
      pos.push_back(0.0);
    } else if (neg.empty()) {
      neg = pos;
    } else {
      pos = neg;
    }
  }
  const double phi_neg = mean(neg);
  const double phi_pos = mean(pos);
  // Region convention of the closed forms: psi_+ = u_z(-acos(gamma/Omega)),
  // psi_+ = u_x(+acos(Omega/gamma)).
  double phi_plus = est.branch == FamilyKind::z ? phi_neg : phi_pos;
  double phi_minus = est.branch == FamilyKind::z ? phi_pos : phi_neg;
  const CMatrix h = build_heff(p);
  auto rayleigh = [&](double phi) {
    const CVector u = trial_state({est.branch, phi});
    return u.dot(h * u) / u.squaredNorm();
  };
  const Complex lp = rayleigh(phi_plus);
  const Complex lm = rayleigh(phi_minus);
  const double tol = 1e-9 * spectral_norm(h);
  const double dp = omega >= gamma ? lp.real() - lm.real() : lp.imag() - lm.imag();
  if (dp < -tol) std::swap(phi_plus, phi_minus);
  est.phi_plus = phi_plus;
  est.phi_minus = phi_minus;
  est.psi_plus = trial_state({est.branch, phi_plus});
  est.psi_minus = trial_state({est.branch, phi_minus});

  est.zero_scan = scan_zeros(FamilyKind::zero, p, dt, default_component(FamilyKind::zero),
                             grids.zero, zero_noise ? &*zero_noise : nullptr);
  std::vector<double> zeros;
  for (const auto& z : est.zero_scan.zeros) {
    if (!z.excluded) zeros.push_back(z.angle);
  }
  if (zeros.empty()) {
    est.partial = true;
    est.diagnostic += (est.diagnostic.empty() ? "" : "; ") + std::string("no zero for psi_0");
    zeros.push_back(kPi / 4.0);
  }
  est.phi_zero = mean(zeros);
  est.psi_zero = trial_state({FamilyKind::zero, est.phi_zero});
  return est;
}

std::array<double, 3> inner_products(const CVector& psi_minus, const CVector& psi_plus,
                                     const CVector& psi_zero) {
  return {normalized_overlap(psi_minus, psi_plus), normalized_overlap(psi_plus, psi_zero),
          normalized_overlap(psi_minus, psi_zero)};
}

}  // namespace ep3
