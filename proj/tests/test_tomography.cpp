#include "ep3/model.hpp"
#include "ep3/tomography.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

namespace ep3 {
namespace {

using test::kGamma;

TEST(TrialStates, NormalizedFamilies) {
  for (double a : {-3.0, -1.0, 0.0, 0.4, 1.2, 3.1}) {
    for (FamilyKind k : {FamilyKind::z, FamilyKind::x, FamilyKind::zero}) {
      EXPECT_NEAR(trial_state({k, a}).norm(), 1.0, 1e-14) << to_string(k) << " " << a;
    }
  }
}

TEST(TrialStates, FamiliesContainClosedFormEigenstates) {
  // Above the EP psi_pm lie in the z family, below it in the x family; psi_0
  // is always in the zero family.
  auto best_overlap = [](FamilyKind kind, const CVector& target) {
    double best = 0.0;
    for (int k = 0; k <= 20000; ++k) {
      const double a = kind == FamilyKind::zero ? kPi / 2.0 * k / 20000.0 : -kPi + kTwoPi * k / 20000.0;
      best = std::max(best, normalized_overlap(trial_state({kind, a}), target));
    }
    return best;
  };
  const ClosedFormSpectrum above = closed_form_spectrum(1.7, 1.0);
  EXPECT_GT(best_overlap(FamilyKind::z, above.psi_plus), 1.0 - 1e-8);
  EXPECT_GT(best_overlap(FamilyKind::z, above.psi_minus), 1.0 - 1e-8);
  EXPECT_GT(best_overlap(FamilyKind::zero, above.psi_zero), 1.0 - 1e-8);
  const ClosedFormSpectrum below = closed_form_spectrum(0.6, 1.0);
  EXPECT_GT(best_overlap(FamilyKind::x, below.psi_plus), 1.0 - 1e-8);
  EXPECT_GT(best_overlap(FamilyKind::x, below.psi_minus), 1.0 - 1e-8);
  EXPECT_GT(best_overlap(FamilyKind::zero, below.psi_zero), 1.0 - 1e-8);
}

TEST(DeltaRho, VanishesOnEigenstatesAndMatchesLindblad) {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-kPi, kPi);
  for (double r : {0.6, 1.0, 1.5}) {
    const SystemParams p = SystemParams::symmetric(r * kGamma, kGamma);
    const double dt = kDefaultGammaDt / kGamma;
    for (int k = 0; k < 4; ++k) {
      const TrialFamily f{k % 2 ? FamilyKind::z : FamilyKind::x, u(rng)};
      for (int j = 0; j < 3; ++j) {
        EXPECT_NEAR(delta_rho_norm(f, p, dt, j), delta_rho_norm_lindblad(f, p, dt, j), 1e-11);
      }
    }
  }
}

TEST(DeltaRho, ExactReadoutReproducesNoiseless) {
  const SystemParams p = SystemParams::symmetric(1.3 * kGamma, kGamma);
  ReadoutOptions ro;
  ro.flip_prob = 0.0;
  const TrialFamily f{FamilyKind::z, 0.7};
  const double dt = kDefaultGammaDt / kGamma;
  for (int j = 0; j < 3; ++j) {
    EXPECT_NEAR(delta_rho_norm_readout(f, p, dt, j, ro, 3), delta_rho_norm(f, p, dt, j), 1e-11);
  }
}

void expect_matches_closed_form(double r, double tol) {
  const SystemParams p = SystemParams::symmetric(r * kGamma, kGamma);
  const EigenstateEstimate est = extract_eigenstates(p, kDefaultGammaDt / kGamma);
  ASSERT_FALSE(est.partial) << est.diagnostic;
  const ClosedFormSpectrum cf = closed_form_spectrum(r * kGamma, kGamma);
  EXPECT_GT(normalized_overlap(est.psi_plus, cf.psi_plus), 1.0 - tol) << r;
  EXPECT_GT(normalized_overlap(est.psi_minus, cf.psi_minus), 1.0 - tol) << r;
  EXPECT_GT(normalized_overlap(est.psi_zero, cf.psi_zero), 1.0 - tol) << r;
  EXPECT_EQ(est.branch, r >= 1.0 ? FamilyKind::z : FamilyKind::x);
}

TEST(Extraction, RecoversEigenstatesAwayFromEp) {
  expect_matches_closed_form(1.5, 1e-4);
  expect_matches_closed_form(2.0, 1e-4);
  expect_matches_closed_form(0.5, 1e-4);
  expect_matches_closed_form(0.7, 1e-4);
}

TEST(Extraction, OverlapsApproachOneAtEp) {
  const SystemParams p = SystemParams::symmetric(kGamma, kGamma);
  const EigenstateEstimate est = extract_eigenstates(p, kDefaultGammaDt / kGamma);
  const auto ov = inner_products(est.psi_minus, est.psi_plus, est.psi_zero);
  for (double o : ov) EXPECT_GE(o, 0.995);
  // Away from the EP the pairwise overlaps stay clearly below one.
  const EigenstateEstimate far = extract_eigenstates(SystemParams::symmetric(2.0 * kGamma, kGamma),
                                                     kDefaultGammaDt / kGamma);
  const auto ov2 = inner_products(far.psi_minus, far.psi_plus, far.psi_zero);
  EXPECT_LT(std::min({ov2[0], ov2[1], ov2[2]}), 0.9);
}

TEST(Extraction, ScanZerosAreEigenResidualsSmall) {
  const SystemParams p = SystemParams::symmetric(1.5 * kGamma, kGamma);
  const ScanResult sr = scan_zeros(FamilyKind::z, p, kDefaultGammaDt / kGamma, default_component(FamilyKind::z),
                                   default_scan_grid(FamilyKind::z));
  int kept = 0;
  for (const auto& z : sr.zeros) {
    if (z.excluded) continue;
    ++kept;
    EXPECT_LT(z.residual, kResidualThreshold);
  }
  EXPECT_GE(kept, 2);
}

TEST(InnerProducts, NormalizesInputs) {
  const CVector a = basis_vector(3, 0) * 3.0;
  const auto ov = inner_products(a, a * Complex(0, 2), basis_vector(3, 1));
  EXPECT_NEAR(ov[0], 1.0, 1e-15);
  EXPECT_NEAR(ov[1], 0.0, 1e-15);
  EXPECT_NEAR(ov[2], 0.0, 1e-15);
}

}  // namespace
}  // namespace ep3
