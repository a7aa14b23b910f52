#include "ep3/validate.hpp"

#include "ep3/bands.hpp"
#include "ep3/csv.hpp"
#include "ep3/dynamics.hpp"
#include "ep3/liouvillian.hpp"
#include "ep3/model.hpp"
#include "ep3/pulses.hpp"
#include "ep3/quench.hpp"
#include "ep3/readout.hpp"
#include "ep3/rng.hpp"
#include "ep3/spectroscopy.hpp"
#include "ep3/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

namespace ep3 {

namespace {

constexpr double kGamma = kTwoPi * 0.040;

CheckResult at_most(std::string name, double value, double tol, std::string detail = "") {
  return {std::move(name), value <= tol, value, tol, std::move(detail)};
}

CheckResult at_least(std::string name, double value, double tol, std::string detail = "") {
  return {std::move(name), value >= tol, value, tol, std::move(detail)};
}

double max_abs_diff(std::array<Complex, 3> a, std::array<Complex, 3> b) {
  const PermutationMatch pm = match_permutation_detailed(a, b);
  double worst = 0.0;
  for (int k = 0; k < 3; ++k) worst = std::max(worst, std::abs(a[k] - b[pm.perm[k]]));
  return worst;
}

std::array<Complex, 3> heff_closed(double omega, double gamma) {
  const ClosedFormSpectrum cf = closed_form_spectrum(omega, gamma);
  return {cf.e_plus - kI * gamma, cf.e_minus - kI * gamma, cf.e_zero - kI * gamma};
}

std::array<Complex, 3> as_triplet(const std::vector<Complex>& v) { return {v[0], v[1], v[2]}; }

CMatrix random_state(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> nd;
  CMatrix a(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) a(r, c) = Complex(nd(rng), nd(rng));
  }
  CMatrix rho = a * a.adjoint();
  return rho / rho.trace().real();
}

CheckResult check_heff_spectrum() {
  double worst = 0.0;
  for (int k = 0; k < 13; ++k) {
    const double r = 0.4 + 1.2 * k / 12.0;
    const SystemParams p = SystemParams::symmetric(r * kGamma, kGamma);
    worst = std::max(worst, max_abs_diff(as_triplet(eigvals(build_heff(p))), heff_closed(r * kGamma, kGamma)));
  }
  return at_most("heff_closed_form_spectrum", worst, 1e-10, "13 points, Omega/gamma in [0.4, 1.6]");
}

CheckResult check_dissipator_identity(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 2.0);
  SystemParams p{u(rng), u(rng), u(rng), u(rng), u(rng), u(rng)};
  CMatrix sum = CMatrix::Zero(4, 4);
  for (const CMatrix& l : build_reduced_jumps(p)) sum += l.adjoint() * l;
  const CMatrix h = build_heff(p);
  const CMatrix expected =
      build_reduced_hamiltonian(p).topLeftCorner(3, 3) - 0.5 * kI * sum.topLeftCorner(3, 3);
  return at_most("heff_equals_h_minus_half_i_sum_ldagl", (h - expected).cwiseAbs().maxCoeff(), 1e-12);
}

CheckResult check_symmetries(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 2.0);
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const double omega = u(rng);
    const double gamma = u(rng);
    const CMatrix h = omega * spin1(SpinAxis::x) + kI * gamma * spin1(SpinAxis::z);
    worst = std::max(worst, (symmetry_transform(pt_symmetry(), h) - h).cwiseAbs().maxCoeff());
    worst = std::max(worst, (symmetry_transform(anti_pt_symmetry(), h) + h).cwiseAbs().maxCoeff());
  }
  return at_most("pt_and_anti_pt_symmetry", worst, 1e-12, "5 random (Omega, gamma)");
}

CheckResult check_ep_closed_form() {
  const ClosedFormSpectrum cf = closed_form_spectrum(kGamma, kGamma);
  const auto ov = inner_products(cf.psi_minus, cf.psi_plus, cf.psi_zero);
  const double worst = std::max({std::abs(1.0 - ov[0]), std::abs(1.0 - ov[1]), std::abs(1.0 - ov[2])});
  return at_most("ep_closed_form_overlaps_equal_one", worst, 1e-12);
}

CheckResult check_eig_ep_flag() {
  const CMatrix h = kGamma * spin1(SpinAxis::x) + kI * kGamma * spin1(SpinAxis::z);
  const EigenSystem es = eig(h);
  double worst = 0.0;
  for (const Complex v : es.values) worst = std::max(worst, std::abs(v));
  CheckResult c = at_most("eig_triple_zero_at_ep", worst, 1e-10);
  c.pass = c.pass && es.condition_flag;
  c.detail = es.condition_flag ? "condition_flag set" : "condition_flag missing";
  return c;
}

CheckResult check_expm_det(std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  CMatrix m(4, 4);
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) m(r, c) = Complex(nd(rng), nd(rng));
  }
  m *= 3.0 / spectral_norm(m);
  const Complex det = expm(m).determinant();
  const Complex ref = std::exp(m.trace());
  return at_most("expm_det_equals_exp_trace", std::abs(det - ref) / std::abs(ref), 1e-8);
}

CheckResult check_trace_preservation(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 2.0);
  const SystemParams p = SystemParams::symmetric(u(rng) * kGamma, kGamma);
  const Superoperator s = vectorize_lindblad(build_reduced_hamiltonian(p), build_reduced_jumps(p));
  const DensityMatrix rho0 = DensityMatrix::physical_state(random_state(rng, 4));
  double worst = 0.0;
  for (double t : {1.0, 10.0, 50.0, 200.0}) {
    worst = std::max(worst, std::abs(propagate_lindblad(s, rho0, t).mat.trace() - 1.0));
  }
  return at_most("lindblad_trace_preserved", worst, 1e-10);
}

CheckResult check_elimination() {
  const FullParams fp = FullParams::from_rates(SystemParams::symmetric(kGamma, kGamma), kTwoPi * 19.6);
  const DensityMatrix rho0 = DensityMatrix::physical_state(ket_bra(4, 1, 1));
  double worst = 0.0;
  for (double t : {10.0, 50.0, 100.0, 200.0}) {
    worst = std::max(worst, elimination_trace_distance(fp, rho0, t));
  }
  return at_most("adiabatic_elimination_trace_distance", worst, 1e-2, "t in {10, 50, 100, 200} us");
}

CheckResult check_jump_negligibility() {
  AuxParams a;
  a.omega_a = spectro_defaults::kOmegaA;
  double worst = 0.0;
  const SystemParams p = SystemParams::symmetric(kGamma, kGamma);
  for (double d : detuning_grid(11)) {
    a.delta_a = d;
    const double nh = na_nh(p, a, spectro_defaults::kTEvolve);
    const double li = na_lindblad(p, a, spectro_defaults::kTEvolve);
    worst = std::max(worst, std::abs(li - nh) / nh);
  }
  return at_most("quantum_jump_negligibility", worst, 1e-2, "Omega = gamma, 11 detunings");
}

std::vector<CheckResult> check_winding() {
  const SystemParams base = SystemParams::symmetric(kGamma, kGamma);
  const auto thetas = loop_thetas(61);
  const Complex e_b = kTwoPi * Complex(-0.016, -0.032);
  const BandSet bs = track_bands(thetas, loop_spectra(base, kTwoPi * 0.020, 0.0, 0.0, thetas));
  double sum = 0.0;
  double worst = 0.0;
  for (int b = 0; b < 3; ++b) {
    const double w = winding_number(bs, e_b, b).value;
    sum += w;
    worst = std::max(worst, std::abs(w - 1.0 / 3.0));
  }
  std::vector<CheckResult> out;
  CheckResult c = at_most("winding_ep3_loop", worst, 0.02, "m = " + std::to_string(bs.m));
  c.pass = c.pass && bs.m == 3;
  out.push_back(c);
  out.push_back(at_most("winding_sum_over_bands", std::abs(sum - 1.0), 1e-6));

  const BandSet far = track_bands(thetas, loop_spectra(base, kTwoPi * 0.020, kTwoPi * 0.06, 0.0, thetas));
  double frac = 0.0;
  for (int b = 0; b < 3; ++b) {
    const double w = winding_number(far, e_b, b).value;
    frac = std::max(frac, std::abs(w - std::round(w)));
  }
  CheckResult t = at_most("winding_non_encircling_loop", frac, 1e-9, "m = " + std::to_string(far.m));
  t.pass = t.pass && far.m == 1;
  out.push_back(t);
  return out;
}

CheckResult check_tomography_ep() {
  const SystemParams p = SystemParams::symmetric(kGamma, kGamma);
  const EigenstateEstimate est = extract_eigenstates(p, kDefaultGammaDt / kGamma);
  const auto ov = inner_products(est.psi_minus, est.psi_plus, est.psi_zero);
  return at_least("tomography_ep_overlaps", std::min({ov[0], ov[1], ov[2]}), 0.995);
}

std::vector<CheckResult> check_quench() {
  std::vector<CheckResult> out;
  QuenchFitOptions opts;
  opts.bootstrap = 0;
  const auto grid = quench_grid();
  for (QuenchFamily f : {QuenchFamily::h_eff, QuenchFamily::liouvillian}) {
    const QuenchFit fit = fit_quench(quench_samples(f, 2.0, grid), f, opts);
    const bool osc = fit.model == QuenchModel::sin || fit.model == QuenchModel::sin2;
    CheckResult c = at_most(std::string("quench_b_") + to_string(f), std::abs(fit.B - expected_quench_b(f, 2.0)),
                            1e-3, std::string("Omega/gamma = 2, model ") + to_string(fit.model));
    c.pass = c.pass && osc;
    out.push_back(c);
    const QuenchFit broken = fit_quench(quench_samples(f, 0.5, grid), f, opts);
    const bool hyp = broken.model == QuenchModel::sinh || broken.model == QuenchModel::sinh2;
    out.push_back({std::string("quench_sinh_selected_") + to_string(f), hyp, hyp ? 1.0 : 0.0, 1.0,
                   std::string("Omega/gamma = 0.5, model ") + to_string(broken.model)});
  }
  double worst = 0.0;
  for (double t : {0.5, 2.0, 5.0}) {
    worst = std::max(worst, std::abs(rho03_closed(1.5, 1.0, t) - rho03_series(1.5, 1.0, t)));
    worst = std::max(worst, std::abs(rho03_closed(0.5, 1.0, t) - rho03_series(0.5, 1.0, t)));
  }
  out.push_back(at_most("rho03_closed_matches_series", worst, 1e-9));
  return out;
}

std::vector<CheckResult> check_liouvillian(std::mt19937_64& rng) {
  std::vector<CheckResult> out;
  const double omega = 2.0 * kGamma;
  const LiouvillianEigens le = liouvillian_spectrum(SystemParams::symmetric(omega, kGamma));
  double worst = 0.0;
  for (int k = 0; k < 3; ++k) {
    worst = std::max(worst, std::abs(le.eigenvalues[static_cast<std::size_t>(le.selected[k])] -
                                     le.closed_form[k]));
  }
  out.push_back(at_most("liouvillian_triplet_eigenvalues", worst, 1e-9, "Omega = 2 gamma"));

  const SystemParams p = SystemParams::symmetric(omega, kGamma);
  const Superoperator s = vectorize_lindblad(build_reduced_hamiltonian(p), build_reduced_jumps(p));
  const auto closed = intrinsic_eigenmatrices_closed(omega, kGamma);
  double res = 0.0;
  for (int k = 0; k < 3; ++k) {
    const CMatrix r = apply_superoperator(s, closed[k]) - le.closed_form[k] * closed[k];
    res = std::max(res, r.norm() / closed[k].norm());
  }
  out.push_back(at_most("liouvillian_closed_eigenmatrix_residual", res, 1e-10));

  const LiouvillianEigens ep = liouvillian_spectrum(SystemParams::symmetric(kGamma, kGamma));
  const CVector a = vec(ep.eigenmatrices[kLambdaZero]);
  const CVector b = vec(rho_ep());
  CheckResult c = at_least("liouvillian_ep_overlap", normalized_overlap(a, b), 1.0 - 1e-6);
  c.pass = c.pass && ep.condition_flag;
  out.push_back(c);

  std::uniform_real_distribution<double> ut(0.0, 5.0 / kGamma);
  const DensityMatrix sigma0 = DensityMatrix::physical_state(DensityMatrix::pure(u1_state()).mat);
  const DensityMatrix tau0 = apt_conjugate(sigma0);
  double cov = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double t = ut(rng);
    const DensityMatrix sig = propagate_lindblad(s, sigma0, t);
    const DensityMatrix tau = propagate_lindblad(s, tau0, t);
    cov = std::max(cov, (tau.mat - apt_conjugate(sig).mat).cwiseAbs().maxCoeff());
  }
  out.push_back(at_most("anti_pt_covariance", cov, 1e-10, "10 random t"));

  double sig_err = 0.0;
  std::vector<double> ts;
  for (int k = 0; k <= 20; ++k) ts.push_back(0.25 * k / kGamma);
  for (const auto& d : detect_ep3(p, ts)) {
    sig_err = std::max(sig_err, std::abs(d.signal - liouvillian_signal_closed(omega, kGamma, d.t)));
  }
  out.push_back(at_most("detection_signal_matches_closed_form", sig_err, 1e-9));
  return out;
}

std::vector<CheckResult> check_readout(std::uint64_t seed, std::mt19937_64& rng) {
  std::vector<CheckResult> out;
  const CMatrix rho = random_state(rng, 4);
  ReadoutOptions exact;
  exact.flip_prob = 0.0;
  double worst = 0.0;
  for (auto [i, j] : {std::pair{0, 1}, std::pair{1, 2}, std::pair{0, 3}, std::pair{2, 3}}) {
    worst = std::max(worst, std::abs(phase_scan_readout(rho, i, j, exact, 0).rho - rho(i, j)));
  }
  out.push_back(at_most("readout_exact_estimator", worst, 1e-12));

  ReadoutOptions noisy;
  noisy.shots = 1000;
  const Complex est = phase_scan_readout(rho, 0, 1, noisy, stream_seed(seed, 99)).rho;
  // Sinusoid coefficients carry variance 2 p (1 - p) / (phases * shots) <= 0.5 / (12 * 1000).
  const double sigma = std::sqrt(2.0 * 0.5 / (12.0 * 1000.0));
  const double bias = 2.0 * noisy.flip_prob * std::abs(rho(0, 1));
  out.push_back(at_most("readout_shot_noise_within_6_sigma", std::abs(est - rho(0, 1)) - bias,
                        6.0 * sigma));
  return out;
}

std::vector<CheckResult> check_pulses(std::mt19937_64& rng) {
  std::vector<CheckResult> out;
  std::uniform_int_distribution<int> lvl(0, kPulseDim - 1);
  std::uniform_real_distribution<double> ang(-kTwoPi, kTwoPi);
  std::vector<PulseOp> seq;
  while (seq.size() < 50) {
    const int i = lvl(rng);
    const int j = lvl(rng);
    if (i != j) seq.push_back(PulseOp::rot(i, j, ang(rng), ang(rng)));
  }
  const CVector psi = apply_sequence(seq, 0);
  out.push_back(at_most("pulse_sequence_preserves_norm", std::abs(psi.norm() - 1.0), 1e-12, "50 pulses"));

  double worst = 0.0;
  std::uniform_real_distribution<double> phi(-kPi, kPi);
  for (int k = 0; k < 10; ++k) {
    const double f = phi(rng);
    CVector target = CVector::Zero(kPulseDim);
    target.head(3) = trial_state({FamilyKind::z, f});
    target(3) = 1.0;
    worst = std::max(worst, 1.0 - normalized_overlap(apply_sequence(prep_uz(f), 1), target));
  }
  out.push_back(at_most("uz_preparation_overlap_defect", worst, 1e-10, "10 random phi"));
  return out;
}

CheckResult check_spectroscopy_noise(std::uint64_t seed) {
  const SystemParams p = SystemParams::symmetric(kGamma, kGamma);
  AuxParams a;
  a.omega_a = spectro_defaults::kOmegaA;
  a.gamma_a = spectro_defaults::kGammaA;
  a.n0 = 0.98;
  const auto grid = detuning_grid(21);
  const SpectralLine line = synth_line(p, a, spectro_defaults::kTEvolve, grid, spectro_defaults::kShots,
                                       spectro_defaults::kRounds, stream_seed(seed, 7));
  const auto truth = na_tgt_curve(p, a, spectro_defaults::kTEvolve, grid);
  double worst = 0.0;
  const double n = spectro_defaults::kShots * spectro_defaults::kRounds;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double sd = std::sqrt(std::max(truth[k] * (1.0 - truth[k]), 1e-4) / n);
    worst = std::max(worst, std::abs(line.populations[k] - truth[k]) / sd);
  }
  return at_most("synthetic_line_within_6_sigma", worst, 6.0, "21 detunings, 200 x 5 shots");
}

}  // namespace

std::vector<CheckResult> run_validation(std::uint64_t seed, Exec exec) {
  std::vector<std::function<std::vector<CheckResult>()>> groups;
  auto one = [](CheckResult c) { return std::vector<CheckResult>{std::move(c)}; };
  groups.push_back([&] { return one(check_heff_spectrum()); });
  groups.push_back([&] {
    auto rng = make_stream(seed, 1);
    return one(check_dissipator_identity(rng));
  });
  groups.push_back([&] {
    auto rng = make_stream(seed, 2);
    return one(check_symmetries(rng));
  });
  groups.push_back([&] { return one(check_ep_closed_form()); });
  groups.push_back([&] { return one(check_eig_ep_flag()); });
  groups.push_back([&] {
    auto rng = make_stream(seed, 3);
    return one(check_expm_det(rng));
  });
  groups.push_back([&] {
    auto rng = make_stream(seed, 4);
    return one(check_trace_preservation(rng));
  });
  groups.push_back([&] { return one(check_elimination()); });
  groups.push_back([&] { return one(check_jump_negligibility()); });
  groups.push_back([&] { return check_winding(); });
  groups.push_back([&] { return one(check_tomography_ep()); });
  groups.push_back([&] { return check_quench(); });
  groups.push_back([&] {
    auto rng = make_stream(seed, 5);
    return check_liouvillian(rng);
  });
  groups.push_back([&] {
    auto rng = make_stream(seed, 6);
    return check_readout(seed, rng);
  });
  groups.push_back([&] {
    auto rng = make_stream(seed, 8);
    return check_pulses(rng);
  });
  groups.push_back([&] { return one(check_spectroscopy_noise(seed)); });

  std::vector<std::vector<CheckResult>> results(groups.size());
  parallel_for(exec, groups.size(), [&](std::size_t k) {
    try {
      results[k] = groups[k]();
    } catch (const std::exception& e) {
      results[k] = {{"group_" + std::to_string(k), false, 0.0, 0.0, std::string("threw: ") + e.what()}};
    }
  });
  std::vector<CheckResult> out;
  for (auto& r : results) out.insert(out.end(), r.begin(), r.end());
  return out;
}

std::string validation_report(const std::vector<CheckResult>& checks, std::uint64_t seed) {
  std::string out = "# validate seed=" + std::to_string(seed) + "\n";
  int failed = 0;
  for (const auto& c : checks) {
    if (!c.pass) ++failed;
    out += std::string(c.pass ? "PASS " : "FAIL ") + c.name + " value=" + fmt(c.value) +
           " tol=" + fmt(c.tolerance);
    if (!c.detail.empty()) out += " (" + c.detail + ")";
    out += "\n";
  }
  out += "# " + std::to_string(checks.size() - static_cast<std::size_t>(failed)) + "/" +
         std::to_string(checks.size()) + " passed\n";
  return out;
}

}  // namespace ep3
