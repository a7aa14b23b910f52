#include "ep3/dynamics.hpp"
#include "ep3/liouvillian.hpp"
#include "ep3/model.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

namespace ep3 {
namespace {

using test::kGamma;

Superoperator generator(const SystemParams& p) {
  return vectorize_lindblad(build_reduced_hamiltonian(p), build_reduced_jumps(p));
}

TEST(Liouvillian, IntrinsicTripletInSpectrum) {
  for (double r : {0.4, 0.8, 1.3, 2.0, 5.0}) {
    const LiouvillianEigens le = liouvillian_spectrum(SystemParams::symmetric(r * kGamma, kGamma));
    ASSERT_EQ(le.eigenvalues.size(), 16u);
    EXPECT_FALSE(le.condition_flag);
    const auto closed = intrinsic_eigenvalues_closed(r * kGamma, kGamma);
    for (int k = 0; k < 3; ++k) {
      EXPECT_LT(std::abs(le.eigenvalues[static_cast<std::size_t>(le.selected[k])] - closed[k]), 1e-9) << r;
    }
    EXPECT_LT(le.max_residual, 1e-10);
  }
}

TEST(Liouvillian, ClosedEigenmatricesSolveGenerator) {
  for (double r : {0.5, 1.5, 3.0}) {
    const double omega = r * kGamma;
    const Superoperator s = generator(SystemParams::symmetric(omega, kGamma));
    const auto lam = intrinsic_eigenvalues_closed(omega, kGamma);
    const auto rho = intrinsic_eigenmatrices_closed(omega, kGamma);
    for (int k = 0; k < 3; ++k) {
      const CMatrix res = apply_superoperator(s, rho[k]) - lam[k] * rho[k];
      EXPECT_LT(res.norm() / rho[k].norm(), 1e-10) << r << " " << k;
      // The intrinsic modes never touch |3>.
      EXPECT_EQ(rho[k].row(3).norm() + rho[k].col(3).norm(), 0.0);
      EXPECT_NEAR(std::abs(rho[k](0, 1) + rho[k](1, 2) - 2.0), 0.0, 1e-14);
    }
  }
}

TEST(Liouvillian, NumericEigenmatricesMatchClosedForm) {
  const double omega = 1.8 * kGamma;
  const LiouvillianEigens le = liouvillian_spectrum(SystemParams::symmetric(omega, kGamma));
  const auto rho = intrinsic_eigenmatrices_closed(omega, kGamma);
  for (int k = 0; k < 3; ++k) {
    EXPECT_GT(normalized_overlap(vec(le.eigenmatrices[k]), vec(rho[k])), 1.0 - 1e-10);
  }
}

TEST(Liouvillian, CoalescesAtEp) {
  const LiouvillianEigens le = liouvillian_spectrum(SystemParams::symmetric(kGamma, kGamma));
  EXPECT_TRUE(le.condition_flag);
  const auto lam = intrinsic_eigenvalues_closed(kGamma, kGamma);
  EXPECT_EQ(lam[0], lam[1]);
  EXPECT_EQ(lam[1], lam[2]);
  for (int k = 0; k < 3; ++k) {
    EXPECT_GE(normalized_overlap(vec(le.eigenmatrices[k]), vec(rho_ep())), 1.0 - 1e-6);
  }
  const auto closed = intrinsic_eigenmatrices_closed(kGamma, kGamma);
  EXPECT_NEAR(normalized_overlap(vec(closed[kLambdaZero]), vec(rho_ep())), 1.0, 1e-14);
}

TEST(Liouvillian, BoundaryModesAreEigenvalues) {
  const SystemParams p = SystemParams::symmetric(0.7 * kGamma, kGamma);
  const LiouvillianEigens le = liouvillian_spectrum(p);
  for (const Complex b : boundary_eigenvalues(p)) {
    double best = 1e300;
    for (const Complex e : le.eigenvalues) best = std::min(best, std::abs(e - b));
    EXPECT_LT(best, 1e-9);
  }
}

TEST(Liouvillian, SteadyStateIsKernel) {
  const SystemParams p = SystemParams::symmetric(1.2 * kGamma, kGamma);
  const DensityMatrix ss = steady_state(p);
  EXPECT_NEAR(ss.mat.trace().real(), 1.0, 1e-12);
  EXPECT_LT(apply_superoperator(generator(p), ss.mat).norm(), 1e-12);
  // Everything drains into the loss level.
  EXPECT_NEAR(ss.mat(3, 3).real(), 1.0, 1e-10);
}

TEST(Liouvillian, AntiPtCovarianceOfEvolution) {
  std::mt19937_64 rng(51);
  std::uniform_real_distribution<double> ut(0.0, 5.0 / kGamma);
  for (double r : {0.6, 1.0, 1.7}) {
    const Superoperator s = generator(SystemParams::symmetric(r * kGamma, kGamma));
    const DensityMatrix sigma0 = DensityMatrix::physical_state(DensityMatrix::pure(u1_state()).mat);
    const DensityMatrix tau0 = apt_conjugate(sigma0);
    EXPECT_LT((tau0.mat - DensityMatrix::pure(u2_state()).mat).norm(), 1e-15);
    for (int k = 0; k < 10; ++k) {
      const double t = ut(rng);
      const CMatrix lhs = propagate_lindblad(s, tau0, t).mat;
      const CMatrix rhs = apt_conjugate(propagate_lindblad(s, sigma0, t)).mat;
      EXPECT_LT((lhs - rhs).norm(), 1e-10);
    }
  }
}

TEST(Liouvillian, RequiresSymmetricParameters) {
  SystemParams p = SystemParams::symmetric(kGamma, kGamma);
  p.gamma2 = 3.0 * kGamma;
  EXPECT_THROW(liouvillian_spectrum(p), std::invalid_argument);
}

}  // namespace
}  // namespace ep3
