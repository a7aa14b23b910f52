#include "ep3/dynamics.hpp"
#include "ep3/liouvillian.hpp"
#include "ep3/model.hpp"
#include "ep3/quench.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

namespace ep3 {
namespace {

TEST(Rho03, ClosedFormMatchesLindbladEvolution) {
  const double gamma = 1.0;
  for (double r : {0.3, 0.8, 1.0, 1.7, 4.0}) {
    const SystemParams p = SystemParams::symmetric(r * gamma, gamma);
    const Superoperator s = vectorize_lindblad(build_reduced_hamiltonian(p), build_reduced_jumps(p));
    const DensityMatrix rho0 = sector_initial_state(basis_vector(3, 0));
    for (double t : {0.0, 0.4, 1.5, 4.0}) {
      const Complex rho03 = propagate_lindblad(s, rho0, t).mat(0, 3);
      EXPECT_NEAR(rho03.real(), rho03_closed(r * gamma, gamma, t), 1e-12) << r << " " << t;
      EXPECT_NEAR(rho03.imag(), 0.0, 1e-12);
    }
  }
}

TEST(Rho03, SeriesAgreesWithClosedFormInAllPhases) {
  for (double r : {0.2, 0.9, 0.999, 1.001, 1.1, 3.0}) {
    for (double t : {0.1, 1.0, 3.0, 6.0}) {
      EXPECT_NEAR(rho03_series(r, 1.0, t), rho03_closed(r, 1.0, t), 1e-9) << r << " " << t;
    }
  }
}

TEST(Rho03, ContinuousAcrossEp) {
  for (double t : {0.5, 2.0, 5.0}) {
    const double at = rho03_closed(1.0, 1.0, t);
    EXPECT_NEAR(at, std::exp(-t) * std::pow(1.0 + t / 2.0, 2) / 2.0, 1e-15);
    for (double eps : {1e-4, 1e-6, 1e-8}) {
      EXPECT_NEAR(rho03_series(1.0 + eps, 1.0, t), at, 10.0 * eps) << eps;
      EXPECT_NEAR(rho03_series(1.0 - eps, 1.0, t), at, 10.0 * eps) << eps;
      const double mid = 0.5 * (rho03_series(1.0 + eps, 1.0, t) + rho03_series(1.0 - eps, 1.0, t));
      EXPECT_NEAR(mid, at, 1e-6);
    }
  }
}

TEST(LiouvillianSignal, ClosedFormMatchesDetection) {
  const double gamma = 1.0;
  for (double r : {0.5, 1.0, 2.5}) {
    const SystemParams p = SystemParams::symmetric(r * gamma, gamma);
    std::vector<double> ts;
    for (int k = 0; k <= 12; ++k) ts.push_back(0.5 * k);
    for (const auto& d : detect_ep3(p, ts)) {
      EXPECT_NEAR(d.signal, liouvillian_signal_closed(r * gamma, gamma, d.t), 1e-11) << r << " " << d.t;
    }
  }
}

TEST(QuenchFit, RecoversTheoryFactorsAndSelectsModel) {
  QuenchFitOptions opts;
  opts.bootstrap = 0;
  const auto grid = quench_grid();
  for (QuenchFamily f : {QuenchFamily::h_eff, QuenchFamily::liouvillian}) {
    for (double r : {0.5, 2.0, 5.0}) {
      const QuenchFit fit = fit_quench(quench_samples(f, r, grid), f, opts);
      EXPECT_NEAR(fit.B, expected_quench_b(f, r), 1e-3) << to_string(f) << " " << r;
      const bool osc = fit.model == QuenchModel::sin || fit.model == QuenchModel::sin2;
      EXPECT_EQ(osc, r > 1.0) << to_string(f) << " " << r << " " << to_string(fit.model);
      EXPECT_LE(fit.residual, fit.other_residual);
    }
  }
}

TEST(QuenchFit, SelectionFlipsAcrossEp) {
  QuenchFitOptions opts;
  opts.bootstrap = 0;
  const auto grid = quench_grid();
  for (QuenchFamily f : {QuenchFamily::h_eff, QuenchFamily::liouvillian}) {
    const QuenchFit below = fit_quench(quench_samples(f, 0.95, grid), f, opts);
    const QuenchFit above = fit_quench(quench_samples(f, 1.05, grid), f, opts);
    EXPECT_TRUE(below.model == QuenchModel::sinh || below.model == QuenchModel::sinh2) << to_string(below.model);
    EXPECT_TRUE(above.model == QuenchModel::sin || above.model == QuenchModel::sin2) << to_string(above.model);
  }
}

TEST(QuenchFit, ExpectedFactors) {
  EXPECT_NEAR(expected_quench_b(QuenchFamily::h_eff, 2.0), 0.5 * std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(expected_quench_b(QuenchFamily::liouvillian, 0.5), std::sqrt(0.75), 1e-15);
  EXPECT_EQ(expected_quench_b(QuenchFamily::h_eff, 1.0), 0.0);
}

TEST(QuenchFit, BootstrapIsSeededAndCoversTruth) {
  const double r = 2.0;
  const SystemParams p = SystemParams::symmetric(r, 1.0);
  ReadoutOptions ro;
  ro.shots = 1000;
  const auto samples = quench_samples_readout(p, quench_grid(), ro, 17);
  QuenchFitOptions opts;
  opts.bootstrap = 100;
  opts.seed = 3;
  const QuenchFit a = fit_quench(samples, QuenchFamily::h_eff, opts);
  const QuenchFit b = fit_quench(samples, QuenchFamily::h_eff, opts);
  EXPECT_EQ(a.B, b.B);
  EXPECT_EQ(a.ci95_B, b.ci95_B);
  EXPECT_GT(a.ci95_B, 0.0);
  EXPECT_LT(std::abs(a.B - expected_quench_b(QuenchFamily::h_eff, r)), 0.1);
}

TEST(QuenchFit, RejectsTooFewSamples) {
  std::vector<QuenchSample> few(5);
  EXPECT_THROW(fit_quench(few, QuenchFamily::h_eff), std::invalid_argument);
}

TEST(QuenchModelValue, Forms) {
  EXPECT_NEAR(quench_model_value(QuenchModel::sin2, 2.0, 1.0, 0.5, 1.0), 2.0 * std::exp(-1.0) * std::pow(std::sin(1.5), 2), 1e-15);
  EXPECT_NEAR(quench_model_value(QuenchModel::sinh, 2.0, 1.0, 0.0, 1.0), 2.0 * std::exp(-2.0) * std::sinh(1.0), 1e-15);
}

}  // namespace
}  // namespace ep3
