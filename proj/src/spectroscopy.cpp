#include "ep3/spectroscopy.hpp"

#include "ep3/csv.hpp"
#include "ep3/dynamics.hpp"
#include "ep3/rng.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace ep3 {

void SpectralLine::validate() const {
  const std::size_t n = detunings.size();
  if (n == 0) throw std::invalid_argument("SpectralLine: empty grid");
  if (populations.size() != n || errbars.size() != n) {
    throw std::invalid_argument("SpectralLine: column sizes differ");
  }
  for (std::size_t k = 1; k < n; ++k) {
    if (!(detunings[k] > detunings[k - 1])) {
      throw std::invalid_argument("SpectralLine: detunings not strictly increasing");
    }
  }
  for (double v : populations) {
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("SpectralLine: population outside [0,1]");
  }
  if (shots < 0 || rounds < 0) throw std::invalid_argument("SpectralLine: negative counts");
}

std::vector<double> detuning_grid(int points, double span) {
  if (points < 2) throw std::invalid_argument("detuning_grid: need >= 2 points");
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    g[static_cast<std::size_t>(k)] = -span + 2.0 * span * k / (points - 1);
  }
  return g;
}

double na_nh(const SystemParams& p, const AuxParams& a, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("na_nh: t must be >= 0");
  // Fixed-size copy: this is the innermost kernel of every spectral fit.
  const Eigen::Matrix4cd h = build_heff_aux(p, a);
  const Eigen::Matrix4cd u = (Complex(0.0, -t) * h).exp();
  return std::norm(u(3, 3));
}

double na_tgt_from_nh(double nnh, const AuxParams& a, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("na_tgt: t must be >= 0");
  if (t == 0.0) return a.n0;
  const double x = std::clamp(nnh, std::numeric_limits<double>::min(), 1.0);
  if (a.gamma_a == 0.0) return a.n0 * x;
  const double survive = std::exp(-a.gamma_a * t);
  const double kappa = -std::log(x) / t;
  return a.n0 * survive * x +
         a.branch_f * a.gamma_a / (a.gamma_a + kappa) * a.n0 * (1.0 - survive * x);
}

double na_tgt(const SystemParams& p, const AuxParams& a, double t) {
  return na_tgt_from_nh(na_nh(p, a, t), a, t);
}

double na_lindblad(const SystemParams& p, const AuxParams& a, double t) {
  const AuxModel m = build_aux_lindblad_model(p, a);
  const Superoperator s = vectorize_lindblad(m.hamiltonian, m.jumps);
  const DensityMatrix rho0 = DensityMatrix::pure(basis_vector(5, level::kAux));
  return propagate_lindblad(s, rho0, t).mat(level::kAux, level::kAux).real();
}

std::vector<double> na_tgt_curve(const SystemParams& p, const AuxParams& a, double t,
                                 const std::vector<double>& grid, Exec exec) {
  std::vector<double> out(grid.size());
  parallel_for(exec, grid.size(), [&](std::size_t k) {
    AuxParams ak = a;
    ak.delta_a = grid[k];
    out[k] = na_tgt(p, ak, t);
  });
  return out;
}

SpectralLine synth_line(const SystemParams& p, const AuxParams& a, double t,
                        const std::vector<double>& grid, int shots, int rounds,
                        std::uint64_t seed, bool exact, Exec exec) {
  if (!exact && shots < 1) throw std::invalid_argument("synth_line: shots must be >= 1");
  if (!exact && rounds < 1) throw std::invalid_argument("synth_line: rounds must be >= 1");
  SpectralLine line;
  line.detunings = grid;
  line.t_evolve = t;
  line.populations = na_tgt_curve(p, a, t, grid, exec);
  line.errbars.assign(grid.size(), 0.0);
  if (exact) {
    for (double& v : line.populations) v = std::clamp(v, 0.0, 1.0);
    line.validate();
    return line;
  }
  line.shots = shots;
  line.rounds = rounds;
  parallel_for(exec, grid.size(), [&](std::size_t k) {
    std::mt19937_64 rng = make_stream(seed, k);
    std::binomial_distribution<int> draw(shots, std::clamp(line.populations[k], 0.0, 1.0));
    double sum = 0.0;
    double sum_sq = 0.0;
    for (int r = 0; r < rounds; ++r) {
      const double frac = static_cast<double>(draw(rng)) / shots;
      sum += frac;
      sum_sq += frac * frac;
    }
    const double mean = sum / rounds;
    const double var =
        rounds > 1 ? std::max(0.0, (sum_sq - rounds * mean * mean) / (rounds - 1)) : 0.0;
    line.populations[k] = std::clamp(mean, 0.0, 1.0);
    line.errbars[k] = std::sqrt(var);
  });
  line.validate();
  return line;
}

std::string spectral_line_to_csv(const SpectralLine& line) {
  line.validate();
  CsvWriter w({"delta_a_MHz", "na_mean", "na_std", "shots", "rounds", "t_us"});
  for (std::size_t k = 0; k < line.detunings.size(); ++k) {
    w.row({fmt(line.detunings[k] / kTwoPi), fmt(line.populations[k]), fmt(line.errbars[k]),
           fmt(line.shots), fmt(line.rounds), fmt(line.t_evolve)});
  }
  return w.str();
}

SpectralLine spectral_line_from_csv(const std::string& text) {
  const CsvTable t = parse_csv(text);
  const std::size_t cd = t.column("delta_a_MHz");
  const std::size_t cm = t.column("na_mean");
  const std::size_t cs = t.column("na_std");
  const std::size_t csh = t.column("shots");
  const std::size_t cr = t.column("rounds");
  const std::size_t ct = t.column("t_us");
  SpectralLine line;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    line.detunings.push_back(t.number(r, cd) * kTwoPi);
    line.populations.push_back(t.number(r, cm));
    line.errbars.push_back(t.number(r, cs));
    if (r == 0) {
      line.shots = static_cast<int>(t.number(r, csh));
      line.rounds = static_cast<int>(t.number(r, cr));
      line.t_evolve = t.number(r, ct);
    }
  }
  line.validate();
  return line;
}

}  // namespace ep3
