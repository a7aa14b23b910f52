#include "ep3/readout.hpp"

#include "ep3/pulses.hpp"
#include "ep3/rng.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace ep3 {

namespace {

struct Plan {
  bool map_3_to_1 = false;  ///< pi pulse R_13(pi, 0) first
  int pi = 0;               ///< pulse R_{pi,pj}(pi/2, beta)
  int pj = 0;
  double sign = 1.0;        ///< s in N1 = c + s r sin(chi - beta)
  bool conjugate = false;   ///< requested pair was transposed
};

Plan plan_for(int i, int j) {
  Plan p;
  if (i > j) {
    std::swap(i, j);
    p.conjugate = true;
  }
  if (i == j) throw std::invalid_argument("phase_scan_readout: i and j must differ");
  if (i == 1 || j == 1) {
    p.pi = i;
    p.pj = j;
    p.sign = j == 1 ? 1.0 : -1.0;
    return p;
  }
  if (j == 3 && (i == 0 || i == 2)) {
    p.map_3_to_1 = true;
    p.pi = i;
    p.pj = 1;
    p.sign = 1.0;
    return p;
  }
  throw std::invalid_argument("phase_scan_readout: pair (" + std::to_string(i) + "," +
                              std::to_string(j) + ") is not readable");
}

CMatrix mapped_state(const CMatrix& rho, const Plan& plan) {
  if (!plan.map_3_to_1) return rho;
  const CMatrix u = pulse_unitary(PulseOp::rot(1, 3, kPi, 0.0), static_cast<int>(rho.rows()));
  return u * rho * u.adjoint();
}

double population_after(const CMatrix& rho, const Plan& plan, double beta) {
  const CMatrix u =
      pulse_unitary(PulseOp::rot(plan.pi, plan.pj, kPi / 2.0, beta), static_cast<int>(rho.rows()));
  // <1| U rho U^dag |1>
  const Complex n1 = (u.row(1) * rho * u.row(1).adjoint())(0, 0);
  return n1.real();
}

void check_state(const CMatrix& rho) {
  if (rho.rows() != rho.cols() || rho.rows() < 4) {
    throw std::invalid_argument("phase_scan_readout: need a square matrix with >= 4 levels");
  }
}

}  // namespace

std::vector<double> phase_grid(int phases) {
  if (phases < 4) throw std::invalid_argument("phase_grid: need >= 4 phases");
  std::vector<double> b(static_cast<std::size_t>(phases));
  for (int k = 0; k < phases; ++k) b[static_cast<std::size_t>(k)] = kTwoPi * k / phases;
  return b;
}

double readout_population(const CMatrix& rho, int i, int j, double beta) {
  check_state(rho);
  const Plan plan = plan_for(i, j);
  return population_after(mapped_state(rho, plan), plan, beta);
}

ReadoutResult phase_scan_readout(const CMatrix& rho, int i, int j, const ReadoutOptions& opts,
                                 std::uint64_t seed) {
  check_state(rho);
  if (opts.shots < 0) throw std::invalid_argument("phase_scan_readout: shots must be >= 0");
  if (!(opts.flip_prob >= 0.0 && opts.flip_prob < 0.5)) {
    throw std::invalid_argument("phase_scan_readout: flip_prob must lie in [0, 0.5)");
  }
  const Plan plan = plan_for(i, j);
  const CMatrix state = mapped_state(rho, plan);

  ReadoutResult out;
  out.betas = phase_grid(opts.phases);
  const std::size_t nb = out.betas.size();
  out.populations.resize(nb);
  Eigen::MatrixXd design(static_cast<Eigen::Index>(nb), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(nb));
  for (std::size_t k = 0; k < nb; ++k) {
    const double beta = out.betas[k];
    const double p = population_after(state, plan, beta);
    const double p_obs = opts.flip_prob + (1.0 - 2.0 * opts.flip_prob) * p;
    double measured = p_obs;
    if (opts.shots > 0) {
      std::mt19937_64 rng = make_stream(seed, k);
      std::binomial_distribution<int> draw(opts.shots, std::clamp(p_obs, 0.0, 1.0));
      measured = static_cast<double>(draw(rng)) / opts.shots;
    }
    out.populations[k] = measured;
    const auto row = static_cast<Eigen::Index>(k);
    design(row, 0) = 1.0;
    design(row, 1) = std::sin(beta);
    design(row, 2) = std::cos(beta);
    y(row) = measured;
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(y);
  // N1 = c + a sin(beta) + b cos(beta) and s r sin(chi - beta)
  // = s r sin(chi) cos(beta) - s r cos(chi) sin(beta).
  const double a = coef(1);
  const double b = coef(2);
  Complex est = plan.sign * Complex(-a, b);
  if (plan.map_3_to_1) est *= -kI;
  if (plan.conjugate) est = std::conj(est);
  out.rho = est;
  out.r = std::abs(est);
  out.chi = std::arg(est);
  return out;
}

}  // namespace ep3
