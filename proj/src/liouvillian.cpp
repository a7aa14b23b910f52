#include "ep3/liouvillian.hpp"

#include "ep3/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ep3 {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
// Closed-form triplet values closer than this (relative to max(Omega, gamma))
// are treated as coalesced.
constexpr double kCoalesceTol = 1e-6;

Superoperator reduced_generator(const SystemParams& p) {
  return vectorize_lindblad(build_reduced_hamiltonian(p), build_reduced_jumps(p));
}

CVector null_vector(const CMatrix& m) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
  return svd.matrixV().col(m.cols() - 1);
}

CMatrix gauge_fix(const CMatrix& rho) {
  const Complex g = rho(0, 1) + rho(1, 2);
  if (std::abs(g) < 1e-12 * rho.norm()) return rho / rho.norm();
  return rho * (2.0 / g);
}

}  // namespace

std::array<Complex, 3> intrinsic_eigenvalues_closed(double omega, double gamma) {
  const Complex s = std::sqrt(Complex(omega * omega - gamma * gamma, 0.0));
  return {-2.0 * gamma + kI * s, -2.0 * gamma - kI * s, Complex(-2.0 * gamma, 0.0)};
}

std::array<CMatrix, 3> intrinsic_eigenmatrices_closed(double omega, double gamma) {
  if (!(omega > 0.0) || !(gamma > 0.0)) {
    throw std::invalid_argument("intrinsic_eigenmatrices_closed: omega, gamma must be > 0");
  }
  const Complex q = std::sqrt(Complex(omega * omega / (gamma * gamma) - 1.0, 0.0));
  auto make = [](Complex a01, Complex a02, Complex a12) {
    CMatrix m = CMatrix::Zero(4, 4);
    m(0, 1) = a01;
    m(1, 0) = a01;
    m(0, 2) = a02;
    m(2, 0) = -a02;
    m(1, 2) = a12;
    m(2, 1) = a12;
    return m;
  };
  const Complex c = kI * kSqrt2 * omega / gamma;
  return {make(1.0 + kI * q, c, 1.0 - kI * q), make(1.0 - kI * q, c, 1.0 + kI * q),
          make(1.0, kI * kSqrt2 * gamma / omega, 1.0)};
}

CMatrix rho_ep() { return intrinsic_eigenmatrices_closed(1.0, 1.0)[kLambdaZero]; }

LiouvillianEigens liouvillian_spectrum(const SystemParams& p) {
  p.validate();
  if (!p.is_symmetric()) throw std::invalid_argument("liouvillian_spectrum: symmetric params required");
  const double omega = p.omega1;
  const double gamma = p.gamma1;
  const double scale = std::max(omega, gamma);
  const Superoperator s = reduced_generator(p);
  const EigenSystem es = eig(s.mat);

  LiouvillianEigens out;
  out.eigenvalues = es.values;
  out.closed_form = intrinsic_eigenvalues_closed(omega, gamma);
  const auto& target = out.closed_form;

  double min_gap = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    for (int b = a + 1; b < 3; ++b) min_gap = std::min(min_gap, std::abs(target[a] - target[b]));
  }
  out.condition_flag = min_gap < kCoalesceTol * scale;

  std::vector<bool> used(es.values.size(), false);
  for (int k = 0; k < 3; ++k) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < es.values.size(); ++n) {
      const double d = std::abs(es.values[n] - target[k]);
      if (!used[n] && d < best_d) {
        best_d = d;
        best = static_cast<int>(n);
      }
    }
    used[static_cast<std::size_t>(best)] = true;
    out.selected[k] = best;
    if (!out.condition_flag && best_d > 1e-6 * scale) {
      out.diagnostic = "closed-form eigenvalue not found within 1e-6";
    }
  }

  const double lnorm = spectral_norm(s.mat);
  const Eigen::Index n2 = s.mat.rows();
  for (int k = 0; k < 3; ++k) {
    CMatrix rho;
    Complex lambda;
    if (out.condition_flag) {
      // Defective cluster: eigenvectors from eig() are unreliable, use the
      // exact kernel of L - lambda_0.
      lambda = target[kLambdaZero];
      rho = unvec(null_vector(s.mat - lambda * CMatrix::Identity(n2, n2)), 4);
      rho /= rho.norm();
    } else {
      lambda = es.values[static_cast<std::size_t>(out.selected[k])];
      rho = gauge_fix(unvec(es.right_vectors.col(out.selected[k]), 4));
    }
    out.eigenmatrices[k] = rho;
    const CMatrix r = apply_superoperator(s, rho) - lambda * rho;
    out.max_residual = std::max(out.max_residual, r.norm() / (lnorm * rho.norm()));
  }
  if (out.condition_flag) {
    out.diagnostic = "triplet coalesced; eigenmatrices are the shared null vector";
  }
  return out;
}

std::vector<Complex> boundary_eigenvalues(const SystemParams& p) {
  std::vector<Complex> out;
  for (const Complex e : eigvals(build_heff(p))) {
    out.push_back(-kI * e);
    out.push_back(kI * std::conj(e));
  }
  return out;
}

DensityMatrix steady_state(const SystemParams& p) {
  p.validate();
  const Superoperator s = reduced_generator(p);
  CMatrix rho = unvec(null_vector(s.mat), 4);
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint());
  return DensityMatrix::raw(rho);
}

DensityMatrix apt_conjugate(const DensityMatrix& m) {
  if (m.dim() != 4) throw std::invalid_argument("apt_conjugate: four-level matrix required");
  DensityMatrix out = m;
  out.mat = symmetry_transform(anti_pt_symmetry_4(), m.mat);
  return out;
}

CVector u1_state() {
  CVector u = CVector::Zero(4);
  u(0) = 1.0 / kSqrt2;
  u(2) = -kI / kSqrt2;
  return u;
}

CVector u2_state() {
  CVector u = CVector::Zero(4);
  u(0) = 1.0 / kSqrt2;
  u(2) = kI / kSqrt2;
  return u;
}

std::vector<DetectionSample> detect_ep3(const SystemParams& p, const std::vector<double>& t_grid,
                                        const std::optional<ReadoutOptions>& readout,
                                        std::uint64_t seed) {
  p.validate();
  if (!p.is_symmetric()) throw std::invalid_argument("detect_ep3: symmetric params required");
  const Superoperator s = reduced_generator(p);
  const DensityMatrix sigma0 = DensityMatrix::physical_state(DensityMatrix::pure(u1_state()).mat);
  std::vector<DetectionSample> out;
  out.reserve(t_grid.size());
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const DensityMatrix sigma = propagate_lindblad(s, sigma0, t_grid[k]);
    Complex s12 = sigma.mat(1, 2);
    Complex s01 = sigma.mat(0, 1);
    if (readout) {
      s12 = phase_scan_readout(sigma.mat, 1, 2, *readout, stream_seed(seed, k, 0)).rho;
      s01 = phase_scan_readout(sigma.mat, 0, 1, *readout, stream_seed(seed, k, 1)).rho;
    }
    out.push_back({t_grid[k], 2.0 * (s12 - s01).real()});
  }
  return out;
}

}  // namespace ep3
