#include "ep3/bands.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace ep3 {

namespace {

constexpr double kTieTol = 1e-9;

int permutation_order(const std::array<int, 3>& p) {
  std::array<int, 3> cur = p;
  for (int k = 1; k <= 6; ++k) {
    if (cur[0] == 0 && cur[1] == 1 && cur[2] == 2) return k;
    std::array<int, 3> nxt{};
    for (int i = 0; i < 3; ++i) nxt[static_cast<std::size_t>(i)] = p[static_cast<std::size_t>(cur[static_cast<std::size_t>(i)])];
    cur = nxt;
  }
  return 6;
}

}  // namespace

std::vector<Complex> BandSet::stitched(int band) const {
  if (band < 0 || band > 2) throw std::out_of_range("BandSet::stitched: band index");
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(m) * thetas.size());
  int cur = band;
  for (int pass = 0; pass < m; ++pass) {
    const auto& b = bands[static_cast<std::size_t>(cur)];
    out.insert(out.end(), b.begin(), b.end());
    cur = seam_perm[static_cast<std::size_t>(cur)];
  }
  return out;
}

BandSet track_bands(const std::vector<double>& thetas, const std::vector<Triplet>& spectra) {
  if (thetas.size() != spectra.size()) {
    throw std::invalid_argument("track_bands: theta and spectra counts differ");
  }
  if (thetas.size() < 3) throw std::invalid_argument("track_bands: need >= 3 loop points");
  const double dtheta = thetas[1] - thetas[0];
  for (std::size_t k = 1; k < thetas.size(); ++k) {
    if (std::abs((thetas[k] - thetas[k - 1]) - dtheta) > 1e-9 * std::max(1.0, dtheta) ||
        !(dtheta > 0.0)) {
      throw std::invalid_argument("track_bands: theta grid must be uniform and increasing");
    }
  }
  if (std::abs(dtheta * static_cast<double>(thetas.size()) - kTwoPi) > 1e-9) {
    throw std::invalid_argument("track_bands: theta grid must cover [0, 2 pi) uniformly");
  }

  BandSet bs;
  bs.thetas = thetas;
  Triplet cur = spectra[0];
  for (int n = 0; n < 3; ++n) bs.bands[static_cast<std::size_t>(n)].push_back(cur[static_cast<std::size_t>(n)]);

  auto step = [&bs](const Triplet& prev, const Triplet& next) {
    const PermutationMatch pm = match_permutation_detailed(prev, next);
    if (pm.runner_up_cost - pm.cost <= kTieTol) bs.ambiguous = true;
    Triplet out{};
    for (std::size_t n = 0; n < 3; ++n) {
      out[n] = next[static_cast<std::size_t>(pm.perm[n])];
      bs.max_step = std::max(bs.max_step, std::abs(out[n] - prev[n]));
    }
    return std::make_pair(out, pm.perm);
  };

  for (std::size_t k = 1; k < spectra.size(); ++k) {
    cur = step(cur, spectra[k]).first;
    for (std::size_t n = 0; n < 3; ++n) bs.bands[n].push_back(cur[n]);
  }
  // Across the seam the last point continues into the first point of the
  // loop; perm[n] names the starting band that band n runs into.
  Triplet first{};
  for (std::size_t n = 0; n < 3; ++n) first[n] = bs.bands[n].front();
  bs.seam_perm = step(cur, first).second;
  bs.m = permutation_order(bs.seam_perm);
  return bs;
}

Rational winding_number(const BandSet& bs, Complex e_b, int band) {
  const std::vector<Complex> path = bs.stitched(band);
  for (const auto& b : bs.bands) {
    for (const Complex& e : b) {
      if (std::abs(e - e_b) <= 1e-9) {
        throw std::invalid_argument("winding_number: E_B lies on a band");
      }
    }
  }
  double total = 0.0;
  const std::size_t n = path.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Complex a = path[k] - e_b;
    const Complex b = path[(k + 1) % n] - e_b;
    const double d = std::arg(b / a);
    if (std::abs(d) >= kPi / 2.0) {
      throw RefineGridError("winding_number: phase step " + std::to_string(d) +
                            " rad reaches pi/2, refine grid");
    }
    total += d;
  }
  Rational r;
  r.denominator = bs.m;
  r.value = total / (kTwoPi * bs.m);
  r.numerator = std::lround(r.value * bs.m);
  return r;
}

std::vector<double> loop_thetas(int points) {
  if (points < 3) throw std::invalid_argument("loop_thetas: need >= 3 points");
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) t[static_cast<std::size_t>(k)] = kTwoPi * k / points;
  return t;
}

std::vector<Triplet> loop_spectra(const SystemParams& base, double radius, double center0,
                                  double center1, const std::vector<double>& thetas) {
  std::vector<Triplet> out;
  out.reserve(thetas.size());
  for (double th : thetas) {
    SystemParams p = base;
    p.delta0 = center0 + radius * std::cos(th);
    p.delta1 = center1 + radius * std::sin(th);
    const auto v = eigvals(build_heff(p));
    out.push_back({v[0], v[1], v[2]});
  }
  return out;
}

}  // namespace ep3
