#include "ep3/rng.hpp"
#include "ep3/spectral_fit.hpp"
#include "ep3/spectroscopy.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

namespace ep3 {
namespace {

using test::kGamma;

AuxParams default_aux(double n0 = 0.98) {
  AuxParams a;
  a.omega_a = spectro_defaults::kOmegaA;
  a.gamma_a = spectro_defaults::kGammaA;
  a.n0 = n0;
  return a;
}

TEST(Absorption, NonHermitianPopulationMatchesDirectExponential) {
  const SystemParams p = SystemParams::symmetric(0.8 * kGamma, kGamma);
  AuxParams a = default_aux();
  for (double d : {-0.3, 0.0, 0.05, 0.4}) {
    a.delta_a = d;
    for (double t : {0.0, 50.0, 200.0}) {
      const CMatrix u = test::taylor_expm(-kI * build_heff_aux(p, a) * t);
      EXPECT_NEAR(na_nh(p, a, t), std::norm(u(3, 3)), 1e-12);
    }
  }
}

TEST(Absorption, CorrectionIsScaleAtTimeZeroAndBounded) {
  AuxParams a = default_aux(0.93);
  EXPECT_NEAR(na_tgt_from_nh(1.0, a, 0.0), 0.93, 1e-15);
  const SystemParams p = SystemParams::symmetric(1.2 * kGamma, kGamma);
  for (double d : detuning_grid()) {
    a.delta_a = d;
    const double v = na_tgt(p, a, spectro_defaults::kTEvolve);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Absorption, QuantumJumpsNegligibleForWeakProbe) {
  AuxParams a = default_aux(1.0);
  a.gamma_a = 0.0;
  for (double r : {0.4, 1.0, 1.6}) {
    const SystemParams p = SystemParams::symmetric(r * kGamma, kGamma);
    for (double d : detuning_grid(9)) {
      a.delta_a = d;
      const double nh = na_nh(p, a, 200.0);
      EXPECT_LE(std::abs(na_lindblad(p, a, 200.0) - nh) / nh, 1e-2) << r << " " << d;
    }
  }
}

TEST(Absorption, DipsSitAtEigenenergiesAboveEp) {
  // Far above the EP the outer dips of N_a sit near Re E_pm; psi_0 barely
  // overlaps |1>, so the central one is faint.
  const double omega = 5.0 * kGamma;
  const SystemParams p = SystemParams::symmetric(omega, kGamma);
  AuxParams a = default_aux(1.0);
  const double s = std::sqrt(omega * omega - kGamma * kGamma);
  auto at = [&](double d) {
    a.delta_a = d;
    return na_tgt(p, a, 200.0);
  };
  EXPECT_LT(at(s), at(0.5 * s));
  EXPECT_LT(at(-s), at(-0.5 * s));
}

TEST(SynthLine, ExactAndSeededModes) {
  const SystemParams p = SystemParams::symmetric(kGamma, kGamma);
  const AuxParams a = default_aux();
  const auto grid = detuning_grid(21);
  const SpectralLine exact = synth_line(p, a, 200.0, grid, 200, 5, 1, true);
  const auto curve = na_tgt_curve(p, a, 200.0, grid);
  EXPECT_EQ(exact.populations, curve);
  for (double e : exact.errbars) EXPECT_EQ(e, 0.0);

  const SpectralLine x = synth_line(p, a, 200.0, grid, 200, 5, 42);
  const SpectralLine y = synth_line(p, a, 200.0, grid, 200, 5, 42);
  const SpectralLine z = synth_line(p, a, 200.0, grid, 200, 5, 43);
  EXPECT_EQ(x.populations, y.populations);
  EXPECT_NE(x.populations, z.populations);
  EXPECT_NO_THROW(x.validate());
  // Means of 5 rounds of 200 shots are multiples of 1/1000.
  for (double v : x.populations) EXPECT_NEAR(v * 1000.0, std::round(v * 1000.0), 1e-9);
}

TEST(SynthLine, SerialAndOpenMpIdentical) {
  const SystemParams p = SystemParams::symmetric(0.6 * kGamma, kGamma);
  const AuxParams a = default_aux();
  const auto grid = detuning_grid();
  EXPECT_EQ(na_tgt_curve(p, a, 200.0, grid, Exec::serial), na_tgt_curve(p, a, 200.0, grid, Exec::openmp));
  const SpectralLine s = synth_line(p, a, 200.0, grid, 200, 5, 9, false, Exec::serial);
  const SpectralLine o = synth_line(p, a, 200.0, grid, 200, 5, 9, false, Exec::openmp);
  EXPECT_EQ(s.populations, o.populations);
  EXPECT_EQ(s.errbars, o.errbars);
}

TEST(SynthLine, CsvRoundTrip) {
  const SpectralLine line = synth_line(SystemParams::symmetric(kGamma, kGamma), default_aux(), 200.0,
                                       detuning_grid(11), 200, 5, 5);
  const SpectralLine back = spectral_line_from_csv(spectral_line_to_csv(line));
  ASSERT_EQ(back.detunings.size(), line.detunings.size());
  for (std::size_t k = 0; k < line.detunings.size(); ++k) {
    EXPECT_NEAR(back.detunings[k], line.detunings[k], 1e-15);
    EXPECT_EQ(back.populations[k], line.populations[k]);
    EXPECT_EQ(back.errbars[k], line.errbars[k]);
  }
  EXPECT_EQ(back.shots, 200);
  EXPECT_EQ(back.rounds, 5);
  EXPECT_EQ(back.t_evolve, 200.0);
}

TEST(SynthLine, ValidationCatchesBadLines) {
  SpectralLine l;
  l.detunings = {0.0, -1.0};
  l.populations = {0.5, 0.5};
  l.errbars = {0.0, 0.0};
  EXPECT_THROW(l.validate(), std::invalid_argument);
  l.detunings = {0.0, 1.0};
  l.populations = {0.5, 1.5};
  EXPECT_THROW(l.validate(), std::invalid_argument);
  l.populations = {0.5};
  EXPECT_THROW(l.validate(), std::invalid_argument);
}

struct FitCase {
  std::vector<double> ratios;
  std::vector<SpectralLine> lines;
  FitParams init;
};

FitCase noiseless_case() {
  FitCase c;
  c.ratios = {0.6, 1.0, 1.4};
  const AuxParams a = default_aux();
  for (double r : c.ratios) {
    c.lines.push_back(synth_line(SystemParams::symmetric(r * kGamma, kGamma), a, 200.0, detuning_grid(), 0, 0, 0, true));
    LineParams lp;
    lp.omega = 0.9 * r * kGamma;
    lp.gamma1 = 1.1 * kGamma;
    lp.gamma2 = 2.2 * kGamma;
    lp.n0 = 1.0;
    c.init.lines.push_back(lp);
  }
  return c;
}

TEST(SpectralFit, RecoversNoiselessTruth) {
  const FitCase c = noiseless_case();
  FitOptions fo;
  fo.aux = default_aux();
  fo.restarts = 2;
  const FitResult fr = fit_spectra(c.lines, c.init, fo);
  EXPECT_TRUE(fr.converged) << fr.diagnostic;
  EXPECT_LT(fr.loss, 1e-14);
  for (std::size_t i = 0; i < c.ratios.size(); ++i) {
    const LineParams& l = fr.params.lines[i];
    EXPECT_NEAR(l.omega / kGamma, c.ratios[i], 1e-4);
    EXPECT_NEAR(l.gamma1 / kGamma, 1.0, 1e-4);
    EXPECT_NEAR(l.gamma2 / kGamma, 2.0, 1e-4);
    EXPECT_NEAR(l.n0, 0.98, 1e-4);
  }
}

TEST(SpectralFit, ConstraintsHoldOnOutput) {
  // Noisy lines push the per-line gammas around; the constraints must hold
  // exactly regardless.
  FitCase c = noiseless_case();
  const AuxParams a = default_aux();
  for (std::size_t i = 0; i < c.ratios.size(); ++i) {
    c.lines[i] = synth_line(SystemParams::symmetric(c.ratios[i] * kGamma, kGamma), a, 200.0, detuning_grid(),
                            200, 5, stream_seed(77, i));
  }
  FitOptions fo;
  fo.aux = a;
  fo.restarts = 2;
  const FitResult fr = fit_spectra(c.lines, c.init, fo);
  EXPECT_NO_THROW(check_fit_constraints(fr.params));
  double g1 = 0.0;
  double g2 = 0.0;
  for (const auto& l : fr.params.lines) {
    g1 += l.gamma1;
    g2 += l.gamma2;
    EXPECT_GE(l.omega, 0.0);
    EXPECT_GT(l.n0, 0.0);
    EXPECT_LE(l.n0, 1.0);
  }
  EXPECT_NEAR(g2, 2.0 * g1, 1e-12 * g2);
  for (const auto& l : fr.params.lines) {
    EXPECT_LE(std::abs(l.gamma1 * 3.0 / g1 - 1.0), 0.05 + 1e-12);
    EXPECT_LE(std::abs(l.gamma2 * 3.0 / g2 - 1.0), 0.05 + 1e-12);
  }
  EXPECT_NEAR(spectra_loss(c.lines, fr.params, a), fr.loss, 1e-12);
}

TEST(SpectralFit, SerialAndOpenMpIdentical) {
  const FitCase c = noiseless_case();
  FitOptions fo;
  fo.aux = default_aux();
  fo.restarts = 3;
  fo.seed = 5;
  fo.exec = Exec::serial;
  const FitResult s = fit_spectra(c.lines, c.init, fo);
  fo.exec = Exec::openmp;
  const FitResult o = fit_spectra(c.lines, c.init, fo);
  EXPECT_EQ(s.loss, o.loss);
  for (std::size_t i = 0; i < s.params.lines.size(); ++i) EXPECT_EQ(s.params.lines[i].omega, o.params.lines[i].omega);
}

TEST(SpectralFit, RejectsInfeasibleInit) {
  FitCase c = noiseless_case();
  FitOptions fo;
  fo.aux = default_aux();
  FitParams bad = c.init;
  bad.lines[0].gamma2 *= 1.5;
  EXPECT_THROW(fit_spectra(c.lines, bad, fo), std::invalid_argument);
  bad = c.init;
  bad.lines[0].n0 = 1.2;
  EXPECT_THROW(fit_spectra(c.lines, bad, fo), std::invalid_argument);
  bad = c.init;
  bad.lines.pop_back();
  EXPECT_THROW(fit_spectra(c.lines, bad, fo), std::invalid_argument);
}

TEST(SpectralFit, EigenenergiesFromFit) {
  FitResult fr;
  LineParams lp;
  lp.omega = 2.0;
  lp.gamma1 = 1.0;
  lp.gamma2 = 2.0;
  fr.params.lines = {lp};
  const FittedSpectrum fs = symmetric_eigenenergies_from_fit(fr, 0);
  const FittedSpectrum fl = eigenenergies_from_fit(fr, 0);
  const double s = std::sqrt(3.0);
  EXPECT_NEAR(std::abs(fs.values[0] - Complex(-s, -1.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(fs.values[2] - Complex(s, -1.0)), 0.0, 1e-12);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(std::abs(fs.values[k] - fl.values[k]), 0.0, 1e-12);
  EXPECT_THROW(eigenenergies_from_fit(fr, 1), std::out_of_range);
}

}  // namespace
}  // namespace ep3
