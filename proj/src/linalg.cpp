#include "ep3/linalg.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace ep3 {

namespace {

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix is not square (" +
                                std::to_string(m.rows()) + "x" +
                                std::to_string(m.cols()) + ")");
  }
  if (m.rows() == 0) {
    throw std::invalid_argument(std::string(what) + ": empty matrix");
  }
}

// Sort key: real part quantized to `tol` so that numerically-zero real parts
// (purely imaginary spectra) compare equal and fall through to the imaginary
// part.
std::vector<Eigen::Index> sorted_order(const std::vector<Complex>& values,
                                       double tol) {
  std::vector<Eigen::Index> order(values.size());
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto key = [tol](const Complex& z) { return std::llround(z.real() / tol); };
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     const auto ka = key(values[a]);
                     const auto kb = key(values[b]);
                     if (ka != kb) return ka < kb;
                     return values[a].imag() < values[b].imag();
                   });
  return order;
}

double matrix_scale(const CMatrix& m) {
  return std::max(1.0, m.cwiseAbs().maxCoeff());
}

// A k-fold defective eigenvalue comes back from QR scattered over a radius of
// about eps^(1/k) ||M|| with nearly parallel eigenvectors. The cluster mean is
// well conditioned, so each such cluster is reported as its mean.
void merge_defective_clusters(EigenSystem& es, double scale) {
  const auto n = static_cast<Eigen::Index>(es.values.size());
  std::vector<Eigen::Index> parent(es.values.size());
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  auto find = [&](Eigen::Index a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = a + 1; b < n; ++b) {
      const double gap = std::abs(es.values[a] - es.values[b]);
      const double overlap = std::abs(es.right_vectors.col(a).dot(es.right_vectors.col(b)));
      if (gap <= 1e-4 * scale && overlap >= 1.0 - 1e-6) parent[find(b)] = find(a);
    }
  }
  std::vector<Complex> sum(es.values.size(), 0.0);
  std::vector<int> count(es.values.size(), 0);
  for (Eigen::Index a = 0; a < n; ++a) {
    sum[find(a)] += es.values[a];
    ++count[find(a)];
  }
  for (Eigen::Index a = 0; a < n; ++a) {
    const auto r = find(a);
    es.values[a] = sum[r] / static_cast<double>(count[r]);
  }
  const auto order = sorted_order(es.values, 1e-9 * scale);
  EigenSystem sorted;
  sorted.condition_flag = es.condition_flag;
  sorted.right_vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    sorted.values.push_back(es.values[order[k]]);
    sorted.right_vectors.col(k) = es.right_vectors.col(order[k]);
  }
  es = std::move(sorted);
}

}  // namespace

void require_finite(const CMatrix& m, const char* what) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(what) + ": non-finite entry");
  }
}

EigenSystem eig(const CMatrix& m) {
  require_square(m, "eig");
  if (m.rows() > 64) {
    throw std::invalid_argument("eig: dimension " + std::to_string(m.rows()) +
                                " exceeds 64");
  }
  require_finite(m, "eig");

  Eigen::ComplexEigenSolver<CMatrix> solver(m, /*computeEigenvectors=*/true);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("eig: QR iteration did not converge");
  }
  const CVector& raw_values = solver.eigenvalues();
  const CMatrix& raw_vectors = solver.eigenvectors();

  std::vector<Complex> values(raw_values.data(),
                              raw_values.data() + raw_values.size());
  const auto order = sorted_order(values, 1e-9 * matrix_scale(m));

  EigenSystem out;
  out.values.reserve(values.size());
  out.right_vectors.resize(m.rows(), m.cols());
  for (std::size_t k = 0; k < order.size(); ++k) {
    out.values.push_back(values[order[k]]);
    out.right_vectors.col(static_cast<Eigen::Index>(k)) =
        raw_vectors.col(order[k]).normalized();
  }

  Eigen::JacobiSVD<CMatrix> svd(out.right_vectors);
  const auto& sv = svd.singularValues();
  out.condition_flag = sv(sv.size() - 1) < 1e-6 * sv(0);
  if (out.condition_flag) merge_defective_clusters(out, matrix_scale(m));
  return out;
}

std::vector<Complex> eigvals(const CMatrix& m) { return eig(m).values; }

CMatrix expm(const CMatrix& m) {
  require_square(m, "expm");
  require_finite(m, "expm");
  return m.exp();
}

CVector expm_multiply(const SparseCMatrix& a, const CVector& v, double t) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("expm_multiply: matrix is not square");
  }
  if (a.cols() != v.size()) {
    throw std::invalid_argument("expm_multiply: dimension mismatch");
  }
  if (t == 0.0 || a.nonZeros() == 0) return v;

  const Eigen::Index n = a.rows();
  Complex mu{0.0, 0.0};
  for (Eigen::Index k = 0; k < n; ++k) mu += a.coeff(k, k);
  mu /= static_cast<double>(n);

  SparseCMatrix shift(n, n);
  shift.setIdentity();
  const SparseCMatrix b = a - mu * shift;

  double norm1 = 0.0;
  for (Eigen::Index col = 0; col < b.outerSize(); ++col) {
    double sum = 0.0;
    for (SparseCMatrix::InnerIterator it(b, col); it; ++it) sum += std::abs(it.value());
    norm1 = std::max(norm1, sum);
  }

  // Each substep keeps ||h B||_1 <= 4, where ~35 Taylor terms reach 2^-53.
  constexpr double kStepNorm = 4.0;
  constexpr int kMaxTerms = 80;
  const double tol = std::numeric_limits<double>::epsilon() / 2.0;
  const auto steps = static_cast<long>(
      std::max(1.0, std::ceil(norm1 * std::abs(t) / kStepNorm)));
  const double h = t / static_cast<double>(steps);
  const Complex eta = std::exp(mu * h);

  CVector f = v;
  CVector term(n);
  for (long s = 0; s < steps; ++s) {
    term = f;
    double prev_norm = term.lpNorm<Eigen::Infinity>();
    for (int k = 1; k <= kMaxTerms; ++k) {
      term = (b * term) * (h / static_cast<double>(k));
      f += term;
      const double term_norm = term.lpNorm<Eigen::Infinity>();
      if (prev_norm + term_norm <= tol * f.lpNorm<Eigen::Infinity>()) break;
      prev_norm = term_norm;
    }
    f *= eta;
  }
  return f;
}

PermutationMatch match_permutation_detailed(std::span<const Complex, 3> prev,
                                            std::span<const Complex, 3> next) {
  std::array<int, 3> perm{0, 1, 2};
  PermutationMatch best;
  best.cost = std::numeric_limits<double>::infinity();
  best.runner_up_cost = std::numeric_limits<double>::infinity();
  // std::next_permutation walks lexicographic order, so a strict '<' keeps
  // the lexicographically smallest minimizer.
  do {
    double cost = 0.0;
    for (int k = 0; k < 3; ++k) cost += std::abs(prev[k] - next[perm[k]]);
    if (cost < best.cost) {
      best.runner_up_cost = best.cost;
      best.cost = cost;
      best.perm = perm;
    } else if (cost < best.runner_up_cost) {
      best.runner_up_cost = cost;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::array<int, 3> match_permutation(std::span<const Complex, 3> prev,
                                     std::span<const Complex, 3> next) {
  return match_permutation_detailed(prev, next).perm;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CVector vec(const CMatrix& m) {
  return Eigen::Map<const CVector>(m.data(), m.size());
}

CMatrix unvec(const CVector& v, Eigen::Index n) {
  if (v.size() != n * n) {
    throw std::invalid_argument("unvec: length is not n^2");
  }
  return Eigen::Map<const CMatrix>(v.data(), n, n);
}

double spectral_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
  const CMatrix d = a - b;
  const CMatrix herm = 0.5 * (d + d.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

double normalized_overlap(const CVector& a, const CVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) {
    throw std::invalid_argument("normalized_overlap: zero vector");
  }
  return std::abs(a.dot(b)) / (na * nb);
}

CVector basis_vector(Eigen::Index dim, Eigen::Index k) {
  CVector e = CVector::Zero(dim);
  e(k) = 1.0;
  return e;
}

CMatrix ket_bra(Eigen::Index dim, Eigen::Index i, Eigen::Index j) {
  CMatrix m = CMatrix::Zero(dim, dim);
  m(i, j) = 1.0;
  return m;
}

SparseCMatrix to_sparse(const CMatrix& m, double drop_tol) {
  std::vector<Eigen::Triplet<Complex>> entries;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (std::abs(m(i, j)) > drop_tol) entries.emplace_back(i, j, m(i, j));
    }
  }
  SparseCMatrix s(m.rows(), m.cols());
  s.setFromTriplets(entries.begin(), entries.end());
  return s;
}

}  // namespace ep3
