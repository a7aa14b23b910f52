#include "ep3/pulses.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ep3 {

namespace {

void check_level(int k, int dim) {
  if (k < 0 || k >= dim) {
    throw std::out_of_range("pulse: level index " + std::to_string(k) + " outside 0.." +
                            std::to_string(dim - 1));
  }
}

}  // namespace

CMatrix pulse_generator(const PulseOp& op, int dim) {
  CMatrix t = CMatrix::Zero(dim, dim);
  if (op.two_tone) {
    check_level(2, dim);
    const double s = 1.0 / std::sqrt(2.0);
    t(1, 0) = t(0, 1) = t(1, 2) = t(2, 1) = s;
    return t;
  }
  check_level(op.i, dim);
  check_level(op.j, dim);
  if (op.i == op.j) throw std::invalid_argument("pulse: i and j must differ");
  t(op.i, op.j) = 0.5 * std::exp(kI * op.beta);
  t(op.j, op.i) = 0.5 * std::exp(-kI * op.beta);
  return t;
}

CMatrix pulse_unitary(const PulseOp& op, int dim) {
  return expm(-kI * op.alpha * pulse_generator(op, dim));
}

CVector apply_sequence(const std::vector<PulseOp>& seq, const CVector& psi) {
  CVector v = psi;
  const int dim = static_cast<int>(psi.size());
  for (const PulseOp& op : seq) v = pulse_unitary(op, dim) * v;
  return v;
}

CVector apply_sequence(const std::vector<PulseOp>& seq, int start, int dim) {
  check_level(start, dim);
  return apply_sequence(seq, basis_vector(dim, start));
}

std::vector<PulseOp> prep_aux() { return {PulseOp::rot(1, kPulseAux, kPi, 0.0)}; }

std::vector<PulseOp> prep_quench() {
  return {PulseOp::rot(1, 0, kPi / 2.0, 0.0), PulseOp::rot(1, 3, kPi, 0.0)};
}

std::vector<PulseOp> prep_uz(double phi) {
  return {PulseOp::rot(1, 3, kPi / 2.0, kPi), PulseOp::rot(1, 0, kPi / 2.0, -phi),
          PulseOp::rot(1, 2, kPi / 2.0, phi + kPi), PulseOp::rot(1, 0, kPi, -phi)};
}

std::vector<PulseOp> prep_ux(double phi) {
  return {PulseOp::rot(1, 3, kPi / 2.0, kPi), PulseOp::rot(1, 0, kPi / 2.0, 0.0),
          PulseOp::rot(1, 2, kPi / 2.0, kPi), PulseOp::rot(1, 0, kPi, 0.0),
          PulseOp::two_tone_10_12(-phi)};
}

std::vector<PulseOp> prep_u0(double phi) {
  return {PulseOp::rot(1, 3, kPi / 2.0, kPi), PulseOp::rot(1, 0, 2.0 * phi, 0.0),
          PulseOp::rot(1, 2, kPi, 0.0), PulseOp::rot(1, 0, kPi / 2.0, 0.0),
          PulseOp::rot(1, 2, kPi, 0.0)};
}

std::vector<PulseOp> prep_u1() {
  return {PulseOp::rot(1, 2, kPi / 2.0, kPi / 2.0), PulseOp::rot(1, 0, kPi, 0.0)};
}

}  // namespace ep3
