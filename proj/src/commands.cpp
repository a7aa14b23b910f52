#include "ep3/commands.hpp"

#include "ep3/bands.hpp"
#include "ep3/csv.hpp"
#include "ep3/liouvillian.hpp"
#include "ep3/model.hpp"
#include "ep3/parallel.hpp"
#include "ep3/quench.hpp"
#include "ep3/rng.hpp"
#include "ep3/spectral_fit.hpp"
#include "ep3/spectroscopy.hpp"
#include "ep3/tomography.hpp"
#include "ep3/validate.hpp"

#include <cstdio>
#include <map>
#include <stdexcept>

namespace ep3 {

namespace {

double mhz(double rad_per_us) { return rad_per_us / kTwoPi; }

Exec exec_of(const ParamConfig& cfg) {
  return cfg.text("exec") == "serial" ? Exec::serial : Exec::openmp;
}

std::uint64_t seed_of(const ParamConfig& cfg) { return cfg.seed().value_or(0); }

ReadoutOptions readout_of(const ParamConfig& cfg) {
  ReadoutOptions r;
  r.shots = static_cast<int>(cfg.integer("readout_shots"));
  r.phases = static_cast<int>(cfg.integer("phases"));
  r.flip_prob = cfg.real("flip_prob");
  return r;
}

AuxParams aux_of(const ParamConfig& cfg) {
  AuxParams a;
  a.omega_a = cfg.frequency("omega_a_mhz");
  const double tau = cfg.real("tau_a_us");
  a.gamma_a = tau > 0.0 ? 1.0 / tau : 0.0;
  a.branch_f = cfg.real("branch_f");
  a.n0 = cfg.real("n0");
  return a;
}

std::string short_num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// ---- spectrum ---------------------------------------------------------------

CommandOutput cmd_spectrum(const ParamConfig& cfg) {
  const double gamma = cfg.frequency("gamma_mhz");
  const auto ratios = cfg.real_list("omega_over_gamma");
  struct Row {
    std::array<Complex, 3> num;
    std::array<Complex, 3> theory;
    bool flag;
  };
  std::vector<Row> rows(ratios.size());
  parallel_for(exec_of(cfg), ratios.size(), [&](std::size_t k) {
    const double omega = ratios[k] * gamma;
    const EigenSystem es = eig(build_heff(SystemParams::symmetric(omega, gamma)));
    const ClosedFormSpectrum cf = closed_form_spectrum(omega, gamma);
    const std::array<Complex, 3> th{cf.e_plus - kI * gamma, cf.e_minus - kI * gamma, cf.e_zero - kI * gamma};
    const std::array<Complex, 3> nv{es.values[0], es.values[1], es.values[2]};
    const auto perm = match_permutation(th, nv);
    rows[k] = {{nv[perm[0]], nv[perm[1]], nv[perm[2]]}, th, es.condition_flag};
  });
  CsvWriter w({"omega_over_gamma", "e_plus_re_mhz", "e_plus_im_mhz", "e_minus_re_mhz", "e_minus_im_mhz",
               "e_zero_re_mhz", "e_zero_im_mhz", "theory_plus_re_mhz", "theory_plus_im_mhz",
               "theory_minus_re_mhz", "theory_minus_im_mhz", "theory_zero_re_mhz",
               "theory_zero_im_mhz", "condition_flag"});
  double worst = 0.0;
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    std::vector<std::string> cells{fmt(ratios[k])};
    for (const Complex e : rows[k].num) {
      cells.push_back(fmt(mhz(e.real())));
      cells.push_back(fmt(mhz(e.imag())));
    }
    for (int b = 0; b < 3; ++b) {
      cells.push_back(fmt(mhz(rows[k].theory[b].real())));
      cells.push_back(fmt(mhz(rows[k].theory[b].imag())));
      worst = std::max(worst, std::abs(rows[k].num[b] - rows[k].theory[b]));
    }
    cells.push_back(fmt(rows[k].flag ? 1 : 0));
    w.row(cells);
  }
  CommandOutput out;
  out.files.emplace_back("spectrum.csv", w.str());
  out.summary = "spectrum: " + std::to_string(ratios.size()) +
                " points, max |numeric - closed form| = " + short_num(worst) + " rad/us\n";
  return out;
}

// ---- spectroscopy -----------------------------------------------------------

CommandOutput cmd_spectroscopy(const ParamConfig& cfg) {
  const double gamma = cfg.frequency("gamma_mhz");
  const auto ratios = cfg.real_list("omega_over_gamma");
  const AuxParams aux = aux_of(cfg);
  const double t = cfg.real("t_evolve_us");
  const auto grid = detuning_grid(static_cast<int>(cfg.integer("grid_points")), cfg.frequency("grid_span_mhz"));
  const bool exact = !cfg.shot_noise();
  const std::uint64_t seed = seed_of(cfg);
  const int shots = static_cast<int>(cfg.integer("shots"));
  const int rounds = static_cast<int>(cfg.integer("rounds"));

  std::vector<SpectralLine> lines(ratios.size());
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    lines[k] = synth_line(SystemParams::symmetric(ratios[k] * gamma, gamma), aux, t, grid, shots, rounds,
                          stream_seed(seed, k), exact, exec_of(cfg));
  }

  // Starting point: the true rates offset by -10 % (Omega) and +10 % (gamma).
  FitParams init;
  for (double r : ratios) {
    LineParams lp;
    lp.omega = 0.9 * r * gamma;
    lp.gamma1 = 1.1 * gamma;
    lp.gamma2 = 2.2 * gamma;
    lp.n0 = 1.0;
    init.lines.push_back(lp);
  }
  FitOptions fo;
  fo.aux = aux;
  fo.restarts = static_cast<int>(cfg.integer("restarts"));
  fo.seed = stream_seed(seed, 1u << 20);
  fo.exec = exec_of(cfg);
  const FitResult fr = fit_spectra(lines, init, fo);

  CommandOutput out;
  for (std::size_t k = 0; k < lines.size(); ++k) {
    out.files.emplace_back("spectroscopy_line_" + std::to_string(k) + ".csv", spectral_line_to_csv(lines[k]));
  }
  CsvWriter w({"line", "omega_over_gamma", "omega_fit_mhz", "gamma1_fit_mhz", "gamma2_fit_mhz", "n0_fit",
               "omega_over_gamma_fit", "e_plus_re_mhz", "e_plus_im_mhz", "e_minus_re_mhz", "e_minus_im_mhz",
               "e_zero_re_mhz", "e_zero_im_mhz", "condition_flag", "line_loss"});
  double mean_g1 = 0.0;
  for (const auto& l : fr.params.lines) mean_g1 += l.gamma1;
  mean_g1 /= static_cast<double>(fr.params.lines.size());
  for (std::size_t k = 0; k < lines.size(); ++k) {
    const LineParams& l = fr.params.lines[k];
    const FittedSpectrum fs = symmetric_eigenenergies_from_fit(fr, k);
    std::vector<std::string> cells{fmt(static_cast<int>(k)), fmt(ratios[k]), fmt(mhz(l.omega)), fmt(mhz(l.gamma1)),
                                   fmt(mhz(l.gamma2)), fmt(l.n0), fmt(l.omega / mean_g1)};
    for (const Complex e : fs.values) {
      cells.push_back(fmt(mhz(e.real())));
      cells.push_back(fmt(mhz(e.imag())));
    }
    cells.push_back(fmt(fs.condition_flag ? 1 : 0));
    cells.push_back(fmt(fr.line_loss[k]));
    w.row(cells);
  }
  out.files.emplace_back("spectroscopy_fit.csv", w.str());
  out.summary = "spectroscopy: " + std::to_string(lines.size()) + " lines, loss " + short_num(fr.loss) +
                (fr.converged ? ", converged" : ", not converged") + "\n";
  if (!fr.diagnostic.empty()) out.summary += "  " + fr.diagnostic + "\n";
  return out;
}

// ---- winding ----------------------------------------------------------------

CommandOutput cmd_winding(const ParamConfig& cfg) {
  const double gamma = cfg.frequency("gamma_mhz");
  const double r = cfg.real("loop_omega_over_gamma");
  const SystemParams base = SystemParams::symmetric(r * gamma, gamma);
  const auto thetas = loop_thetas(static_cast<int>(cfg.integer("points")));
  const auto spectra = loop_spectra(base, cfg.frequency("delta_r_mhz"), cfg.frequency("center0_mhz"),
                                    cfg.frequency("center1_mhz"), thetas);
  const BandSet bs = track_bands(thetas, spectra);
  const Complex e_b = Complex(cfg.frequency("e_b_re_mhz"), cfg.frequency("e_b_im_mhz"));

  CsvWriter bands({"theta_rad", "band", "re_mhz", "im_mhz"});
  for (int b = 0; b < 3; ++b) {
    for (std::size_t k = 0; k < thetas.size(); ++k) {
      const Complex e = bs.bands[b][k];
      bands.row({fmt(thetas[k]), fmt(b), fmt(mhz(e.real())), fmt(mhz(e.imag()))});
    }
  }
  CsvWriter wn({"band", "W", "numerator", "m", "seam_target"});
  std::string summary = "winding: m = " + std::to_string(bs.m) + (bs.ambiguous ? " (ambiguous step)" : "") + ",";
  double total = 0.0;
  for (int b = 0; b < 3; ++b) {
    const Rational w = winding_number(bs, e_b, b);
    total += w.value;
    wn.row({fmt(b), fmt(w.value), fmt(static_cast<long long>(w.numerator)), fmt(w.denominator),
            fmt(bs.seam_perm[b])});
    summary += " W" + std::to_string(b) + " = " + short_num(w.value);
  }
  CommandOutput out;
  out.files.emplace_back("winding_bands.csv", bands.str());
  out.files.emplace_back("winding.csv", wn.str());
  out.summary = summary + ", sum = " + short_num(total) + "\n";
  return out;
}

// ---- tomography -------------------------------------------------------------

CommandOutput cmd_tomography(const ParamConfig& cfg) {
  const double gamma = cfg.frequency("gamma_mhz");
  const auto ratios = cfg.real_list("omega_over_gamma");
  const double dt = cfg.real("gamma_dt") / gamma;
  const int points = static_cast<int>(cfg.integer("scan_points"));
  TomographyGrids grids;
  grids.z = default_scan_grid(FamilyKind::z, points);
  grids.x = default_scan_grid(FamilyKind::x, points);
  grids.zero = default_scan_grid(FamilyKind::zero, points);
  std::vector<EigenstateEstimate> est(ratios.size());
  parallel_for(exec_of(cfg), ratios.size(), [&](std::size_t k) {
    const SystemParams p = SystemParams::symmetric(ratios[k] * gamma, gamma);
    if (cfg.shot_noise()) {
      const NoiseSpec noise{readout_of(cfg), stream_seed(seed_of(cfg), k)};
      est[k] = extract_eigenstates(p, dt, grids, &noise);
    } else {
      est[k] = extract_eigenstates(p, dt, grids);
    }
  });

  CsvWriter scan({"kind", "omega_over_gamma", "angle_rad", "delta_rho_n2", "excluded"});
  CsvWriter zeros({"kind", "omega_over_gamma", "angle_rad", "residual", "excluded", "reason"});
  CsvWriter states({"omega_over_gamma", "state", "angle_rad", "c0_re", "c0_im", "c1_re", "c1_im", "c2_re",
                    "c2_im", "overlap_closed_form"});
  CsvWriter ov({"omega_over_gamma", "ov_minus_plus", "ov_plus_zero", "ov_minus_zero", "partial", "diagnostic"});
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    const EigenstateEstimate& e = est[k];
    for (const ScanResult* s : {&e.pm_scan, &e.zero_scan}) {
      for (std::size_t n = 0; n < s->angles.size(); ++n) {
        bool excluded = false;
        for (const auto& z : s->zeros) excluded |= z.on_sample && z.excluded && z.angle == s->angles[n];
        scan.row({to_string(s->kind), fmt(ratios[k]), fmt(s->angles[n]), fmt(s->values[n]), fmt(excluded ? 1 : 0)});
      }
      for (const auto& z : s->zeros) {
        zeros.row({to_string(s->kind), fmt(ratios[k]), fmt(z.angle), fmt(z.residual), fmt(z.excluded ? 1 : 0),
                   z.reason.empty() ? "-" : z.reason});
      }
    }
    const ClosedFormSpectrum cf = closed_form_spectrum(ratios[k] * gamma, gamma);
    const std::array<std::tuple<const char*, double, const CVector*, const CVector*>, 3> rows{
        std::tuple{"psi_plus", e.phi_plus, &e.psi_plus, &cf.psi_plus},
        std::tuple{"psi_minus", e.phi_minus, &e.psi_minus, &cf.psi_minus},
        std::tuple{"psi_zero", e.phi_zero, &e.psi_zero, &cf.psi_zero}};
    for (const auto& [name, phi, psi, ref] : rows) {
      std::vector<std::string> cells{fmt(ratios[k]), name, fmt(phi)};
      for (int c = 0; c < 3; ++c) {
        cells.push_back(fmt((*psi)(c).real()));
        cells.push_back(fmt((*psi)(c).imag()));
      }
      cells.push_back(fmt(normalized_overlap(*psi, *ref)));
      states.row(cells);
    }
    const auto ip = inner_products(e.psi_minus, e.psi_plus, e.psi_zero);
    std::string diag = e.diagnostic;
    for (char& c : diag) {
      if (c == ',') c = ';';
    }
    ov.row({fmt(ratios[k]), fmt(ip[0]), fmt(ip[1]), fmt(ip[2]), fmt(e.partial ? 1 : 0), diag.empty() ? "-" : diag});
  }
  CommandOutput out;
  out.files.emplace_back("tomography_scan.csv", scan.str());
  out.files.emplace_back("tomography_zeros.csv", zeros.str());
  out.files.emplace_back("tomography_states.csv", states.str());
  out.files.emplace_back("tomography_overlaps.csv", ov.str());
  out.summary = "tomography: " + std::to_string(ratios.size()) + " points\n";
  return out;
}

// ---- quench -----------------------------------------------------------------

CommandOutput cmd_quench(const ParamConfig& cfg) {
  const double gamma = cfg.frequency("gamma_mhz");
  const auto ratios = cfg.real_list("omega_over_gamma");
  const auto grid = quench_grid(static_cast<int>(cfg.integer("quench_points")), cfg.real("quench_span"));
  std::vector<QuenchFamily> families;
  const std::string fam = cfg.text("family");
  if (fam != "liouvillian") families.push_back(QuenchFamily::h_eff);
  if (fam != "h_eff") families.push_back(QuenchFamily::liouvillian);
  const std::uint64_t seed = seed_of(cfg);

  CommandOutput out;
  std::string summary = "quench:";
  for (const QuenchFamily f : families) {
    const std::uint64_t fseed = stream_seed(seed, static_cast<std::uint64_t>(f));
    std::vector<std::vector<QuenchSample>> samples(ratios.size());
    std::vector<QuenchFit> fits(ratios.size());
    parallel_for(exec_of(cfg), ratios.size(), [&](std::size_t k) {
      const SystemParams p = SystemParams::symmetric(ratios[k] * gamma, gamma);
      if (!cfg.shot_noise()) {
        samples[k] = quench_samples(f, ratios[k], grid);
      } else if (f == QuenchFamily::h_eff) {
        samples[k] = quench_samples_readout(p, grid, readout_of(cfg), stream_seed(fseed, k, 0));
      } else {
        std::vector<double> ts;
        for (double x : grid) ts.push_back(x / gamma);
        for (const auto& d : detect_ep3(p, ts, readout_of(cfg), stream_seed(fseed, k, 0))) {
          samples[k].push_back({d.t * gamma, d.signal});
        }
      }
      QuenchFitOptions qo;
      qo.bootstrap = static_cast<int>(cfg.integer("bootstrap"));
      qo.seed = stream_seed(fseed, k, 1);
      fits[k] = fit_quench(samples[k], f, qo);
    });
    CsvWriter sw({"omega_over_gamma", "gamma_t", "value"});
    CsvWriter fw({"omega_over_gamma", "model", "A", "B", "C", "residual", "ci95_B"});
    for (std::size_t k = 0; k < ratios.size(); ++k) {
      for (const auto& s : samples[k]) sw.row({fmt(ratios[k]), fmt(s.gamma_t), fmt(s.value)});
      const QuenchFit& q = fits[k];
      fw.row({fmt(ratios[k]), to_string(q.model), fmt(q.A), fmt(q.B), fmt(q.C), fmt(q.residual), fmt(q.ci95_B)});
      if (!q.converged) out.ok = false;
    }
    const std::string name = std::string("quench_") + to_string(f);
    out.files.emplace_back(name + "_samples.csv", sw.str());
    out.files.emplace_back(name + "_fit.csv", fw.str());
    summary += std::string(" ") + to_string(f) + " (" + std::to_string(ratios.size()) + " fits)";
  }
  out.summary = summary + "\n";
  return out;
}

// ---- liouvillian ------------------------------------------------------------

CommandOutput cmd_liouvillian(const ParamConfig& cfg) {
  const double gamma = cfg.frequency("gamma_mhz");
  const auto ratios = cfg.real_list("omega_over_gamma");
  const auto grid = quench_grid(static_cast<int>(cfg.integer("quench_points")), cfg.real("quench_span"));
  std::vector<LiouvillianEigens> spectra(ratios.size());
  std::vector<std::vector<DetectionSample>> signals(ratios.size());
  std::vector<double> ts;
  for (double x : grid) ts.push_back(x / gamma);
  parallel_for(exec_of(cfg), ratios.size(), [&](std::size_t k) {
    const SystemParams p = SystemParams::symmetric(ratios[k] * gamma, gamma);
    spectra[k] = liouvillian_spectrum(p);
    if (cfg.shot_noise()) {
      signals[k] = detect_ep3(p, ts, readout_of(cfg), stream_seed(seed_of(cfg), k));
    } else {
      signals[k] = detect_ep3(p, ts);
    }
  });
  CsvWriter ev({"omega_over_gamma", "index", "re_mhz", "im_mhz", "selected"});
  CsvWriter sig({"omega_over_gamma", "gamma_t", "signal", "closed_form"});
  static const char* labels[3] = {"lambda_plus", "lambda_minus", "lambda_zero"};
  for (std::size_t k = 0; k < ratios.size(); ++k) {
    const auto& le = spectra[k];
    for (std::size_t n = 0; n < le.eigenvalues.size(); ++n) {
      std::string sel = "-";
      for (int b = 0; b < 3; ++b) {
        if (le.selected[b] == static_cast<int>(n) && !le.condition_flag) sel = labels[b];
      }
      if (le.condition_flag && n == static_cast<std::size_t>(le.selected[kLambdaZero])) sel = "coalesced";
      ev.row({fmt(ratios[k]), fmt(static_cast<int>(n)), fmt(mhz(le.eigenvalues[n].real())),
              fmt(mhz(le.eigenvalues[n].imag())), sel});
    }
    for (const auto& d : signals[k]) {
      sig.row({fmt(ratios[k]), fmt(d.t * gamma), fmt(d.signal),
               fmt(liouvillian_signal_closed(ratios[k] * gamma, gamma, d.t))});
    }
  }
  CommandOutput out;
  out.files.emplace_back("liouvillian_eigenvalues.csv", ev.str());
  out.files.emplace_back("liouvillian_signal.csv", sig.str());
  out.summary = "liouvillian: " + std::to_string(ratios.size()) + " points\n";
  return out;
}

// ---- validate ---------------------------------------------------------------

CommandOutput cmd_validate(const ParamConfig& cfg) {
  const std::uint64_t seed = seed_of(cfg);
  const auto checks = run_validation(seed, exec_of(cfg));
  const std::string report = validation_report(checks, seed);
  CommandOutput out;
  out.files.emplace_back("validate_report.txt", report);
  out.summary = report;
  for (const auto& c : checks) out.ok = out.ok && c.pass;
  return out;
}

using Handler = CommandOutput (*)(const ParamConfig&);

const std::map<std::string, std::pair<Handler, const char*>>& table() {
  static const std::map<std::string, std::pair<Handler, const char*>> t = {
      {"spectrum", {cmd_spectrum, "numerical vs closed-form H_eff eigenenergies over omega_over_gamma"}},
      {"spectroscopy", {cmd_spectroscopy, "synthetic absorption lines and the constrained joint fit"}},
      {"winding", {cmd_winding, "band tracking along the detuning loop and winding numbers"}},
      {"tomography", {cmd_tomography, "eigenstate tomography scans, zeros and overlaps"}},
      {"quench", {cmd_quench, "quench signals and sin/sinh model selection"}},
      {"liouvillian", {cmd_liouvillian, "16x16 Liouvillian spectrum and the detection signal"}},
      {"validate", {cmd_validate, "invariant suite report"}},
  };
  return t;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"spectrum", "spectroscopy", "winding", "tomography",
                                                 "quench", "liouvillian", "validate"};
  return names;
}

std::string command_help(const std::string& command) {
  auto it = table().find(command);
  if (it == table().end()) throw std::invalid_argument("unknown command '" + command + "'");
  return it->second.second;
}

CommandOutput run_command(const std::string& command, const ParamConfig& cfg) {
  auto it = table().find(command);
  if (it == table().end()) throw std::invalid_argument("unknown command '" + command + "'");
  cfg.validate();
  return it->second.first(cfg);
}

std::filesystem::path write_outputs(const std::filesystem::path& dir, const std::string& command,
                                    const ParamConfig& cfg, const CommandOutput& out) {
  RunManifest m;
  m.command = command;
  m.config_hash = fnv1a(cfg.canonical());
  m.seed = cfg.seed();
  m.tool_version = kToolVersion;
  for (const auto& [name, text] : out.files) {
    write_text_file(dir / name, text);
    m.outputs.emplace_back(name, fnv1a(text));
  }
  const auto path = dir / (command + ".manifest");
  write_text_file(path, m.str());
  return path;
}

}  // namespace ep3
