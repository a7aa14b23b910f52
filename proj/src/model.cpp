#include "ep3/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ep3 {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

bool close_rel(double a, double b, double rel) {
  return std::abs(a - b) <= rel * std::max({std::abs(a), std::abs(b), 1e-300});
}

void require_nonneg_finite(double x, const char* name) {
  if (!std::isfinite(x)) throw std::invalid_argument(std::string(name) + " is not finite");
  if (x < 0.0) throw std::invalid_argument(std::string(name) + " must be >= 0");
}

}  // namespace

SystemParams SystemParams::symmetric(double omega, double gamma) {
  SystemParams p;
  p.omega1 = omega;
  p.omega2 = omega;
  p.gamma1 = gamma;
  p.gamma2 = 2.0 * gamma;
  return p;
}

bool SystemParams::is_symmetric() const {
  return close_rel(omega1, omega2, 1e-12) && close_rel(gamma2, 2.0 * gamma1, 1e-12) &&
         delta0 == 0.0 && delta1 == 0.0;
}

void SystemParams::validate() const {
  for (double x : {omega1, omega2, delta0, delta1}) {
    if (!std::isfinite(x)) throw std::invalid_argument("SystemParams: non-finite field");
  }
  require_nonneg_finite(gamma1, "gamma1");
  require_nonneg_finite(gamma2, "gamma2");
}

void AuxParams::validate() const {
  if (!std::isfinite(omega_a) || !std::isfinite(delta_a)) {
    throw std::invalid_argument("AuxParams: non-finite field");
  }
  require_nonneg_finite(gamma_a, "gamma_a");
  if (!(branch_f >= 0.0 && branch_f <= 1.0)) {
    throw std::invalid_argument("AuxParams: branch_f must lie in [0, 1]");
  }
  if (!(n0 > 0.0 && n0 <= 1.0)) {
    throw std::invalid_argument("AuxParams: n0 must lie in (0, 1]");
  }
}

FullParams FullParams::from_rates(const SystemParams& base, double big_gamma) {
  if (!(big_gamma > 0.0)) throw std::invalid_argument("FullParams: Gamma must be > 0");
  base.validate();
  FullParams fp;
  fp.big_gamma = big_gamma;
  fp.j1 = std::sqrt(base.gamma1 * big_gamma / 2.0);
  fp.j2 = std::sqrt(base.gamma2 * big_gamma / 2.0);
  fp.base = base;
  fp.base.gamma1 = fp.gamma1();
  fp.base.gamma2 = fp.gamma2();
  fp.validate();
  return fp;
}

SystemParams FullParams::reduced() const {
  SystemParams p = base;
  p.gamma1 = gamma1();
  p.gamma2 = gamma2();
  return p;
}

bool FullParams::elimination_warning() const {
  return std::abs(j1) > big_gamma / 50.0 || std::abs(j2) > big_gamma / 50.0;
}

void FullParams::validate() const {
  if (!(big_gamma > 0.0) || !std::isfinite(big_gamma)) {
    throw std::invalid_argument("FullParams: Gamma must be finite and > 0");
  }
  if (std::abs(j1) > big_gamma / 10.0 || std::abs(j2) > big_gamma / 10.0) {
    throw std::invalid_argument(
        "FullParams: J_n must not exceed Gamma/10 for adiabatic elimination");
  }
}

SymmetryOp pt_symmetry() {
  CMatrix u = CMatrix::Zero(3, 3);
  u(0, 2) = 1.0;
  u(1, 1) = 1.0;
  u(2, 0) = 1.0;
  return {u, true};
}

SymmetryOp anti_pt_symmetry() {
  CMatrix u = CMatrix::Zero(3, 3);
  u(0, 0) = 1.0;
  u(1, 1) = -1.0;
  u(2, 2) = 1.0;
  return {u, true};
}

SymmetryOp anti_pt_symmetry_4() {
  CMatrix u = CMatrix::Identity(4, 4);
  u(1, 1) = -1.0;
  return {u, true};
}

SymmetryOp identity_symmetry(int dim) { return {CMatrix::Identity(dim, dim), false}; }

CMatrix build_heff(const SystemParams& p) {
  p.validate();
  CMatrix h = CMatrix::Zero(3, 3);
  h(0, 1) = h(1, 0) = p.omega1 / kSqrt2;
  h(1, 2) = h(2, 1) = p.omega2 / kSqrt2;
  h(0, 0) = -p.delta0;
  h(1, 1) = Complex(-p.delta1, -p.gamma1);
  h(2, 2) = Complex(0.0, -p.gamma2);
  return h;
}

CMatrix build_heff_aux(const SystemParams& p, const AuxParams& a) {
  a.validate();
  CMatrix h = CMatrix::Zero(4, 4);
  h.topLeftCorner(3, 3) = build_heff(p);
  h(1, 3) = h(3, 1) = a.omega_a / 2.0;
  h(3, 3) = -a.delta_a;
  return h;
}

CMatrix build_reduced_hamiltonian(const SystemParams& p, int dim) {
  p.validate();
  if (dim < 4) throw std::invalid_argument("build_reduced_hamiltonian: dim < 4");
  CMatrix h = CMatrix::Zero(dim, dim);
  h(0, 1) = h(1, 0) = p.omega1 / kSqrt2;
  h(1, 2) = h(2, 1) = p.omega2 / kSqrt2;
  h(0, 0) = -p.delta0;
  h(1, 1) = -p.delta1;
  return h;
}

std::vector<CMatrix> build_reduced_jumps(const SystemParams& p, int dim) {
  p.validate();
  if (dim < 4) throw std::invalid_argument("build_reduced_jumps: dim < 4");
  const double c1 = std::sqrt(2.0 * p.gamma1 / 3.0);
  const double c2 = std::sqrt(2.0 * p.gamma2 / 3.0);
  using namespace level;
  return {
      c1 * ket_bra(dim, k0, k1), c1 * ket_bra(dim, k1, k1), c1 * ket_bra(dim, k3, k1),
      c2 * ket_bra(dim, k0, k2), c2 * ket_bra(dim, k2, k2), c2 * ket_bra(dim, k3, k2),
  };
}

FullModel build_full_model(const FullParams& fp) {
  fp.validate();
  using namespace level;
  FullModel m;
  m.hamiltonian = build_reduced_hamiltonian(fp.base, 6);
  m.hamiltonian(k1, kE1) = m.hamiltonian(kE1, k1) = fp.j1;
  m.hamiltonian(k2, kE2) = m.hamiltonian(kE2, k2) = fp.j2;
  const double c = std::sqrt(fp.big_gamma / 3.0);
  m.jumps = {
      c * ket_bra(6, k0, kE1), c * ket_bra(6, k1, kE1), c * ket_bra(6, k3, kE1),
      c * ket_bra(6, k0, kE2), c * ket_bra(6, k2, kE2), c * ket_bra(6, k3, kE2),
  };
  return m;
}

AuxModel build_aux_lindblad_model(const SystemParams& p, const AuxParams& a) {
  a.validate();
  AuxModel m;
  m.hamiltonian = build_reduced_hamiltonian(p, 5);
  m.hamiltonian(level::k1, level::kAux) = a.omega_a / 2.0;
  m.hamiltonian(level::kAux, level::k1) = a.omega_a / 2.0;
  m.hamiltonian(level::kAux, level::kAux) = -a.delta_a;
  m.jumps = build_reduced_jumps(p, 5);
  return m;
}

CMatrix spin1(SpinAxis axis) {
  CMatrix sz = CMatrix::Zero(3, 3);
  sz(0, 0) = 1.0;
  sz(2, 2) = -1.0;
  CMatrix sx = CMatrix::Zero(3, 3);
  sx(0, 1) = sx(1, 0) = sx(1, 2) = sx(2, 1) = 1.0 / kSqrt2;
  switch (axis) {
    case SpinAxis::x:
      return sx;
    case SpinAxis::z:
      return sz;
    case SpinAxis::y:
      return -kI * (sz * sx - sx * sz);
  }
  throw std::invalid_argument("spin1: unknown axis");
}

CMatrix symmetry_transform(const SymmetryOp& op, const CMatrix& m) {
  const CMatrix& u = op.unitary_part;
  if (u.rows() != u.cols() || u.cols() != m.rows() || m.rows() != m.cols()) {
    throw std::invalid_argument("symmetry_transform: dimension mismatch");
  }
  // U is unitary, so U^-1 = U^dagger.
  if (op.conjugates) return u * m.conjugate() * u.adjoint();
  return u * m * u.adjoint();
}

ClosedFormSpectrum closed_form_spectrum(double omega, double gamma) {
  if (!(omega > 0.0)) throw std::invalid_argument("closed_form_spectrum: omega must be > 0");
  const Complex s = std::sqrt(Complex(omega * omega - gamma * gamma, 0.0));
  ClosedFormSpectrum out;
  out.e_plus = s;
  out.e_minus = -s;
  out.e_zero = 0.0;
  out.psi_plus.resize(3);
  out.psi_minus.resize(3);
  out.psi_zero.resize(3);
  out.psi_plus << -(gamma - kI * s) / (2.0 * omega), kI / kSqrt2, (gamma + kI * s) / (2.0 * omega);
  out.psi_minus << -(gamma + kI * s) / (2.0 * omega), kI / kSqrt2, (gamma - kI * s) / (2.0 * omega);
  const double norm0 = std::sqrt(omega * omega + gamma * gamma);
  out.psi_zero << -omega / kSqrt2 / norm0, kI * gamma / norm0, omega / kSqrt2 / norm0;
  return out;
}

CVector ep_state() {
  CVector v(3);
  v << -0.5, kI * (kSqrt2 / 2.0), 0.5;
  return v;
}

}  // namespace ep3
