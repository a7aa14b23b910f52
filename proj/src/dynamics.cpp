#include "ep3/dynamics.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>

namespace ep3 {

namespace {

void require_same_dim(const CMatrix& m, Eigen::Index n, const char* what) {
  if (m.rows() != n || m.cols() != n) {
    throw std::invalid_argument(std::string(what) + ": dimension mismatch");
  }
}

double hermitian_defect(const CMatrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

DensityMatrix finish(const DensityMatrix& rho0, CMatrix out) {
  DensityMatrix r;
  r.physical = rho0.physical;
  if (rho0.physical) {
    r.hermiticity_defect = hermitian_defect(out);
    out = 0.5 * (out + out.adjoint()).eval();
  }
  r.mat = std::move(out);
  return r;
}

}  // namespace

DensityMatrix DensityMatrix::raw(CMatrix m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("DensityMatrix: not square");
  require_finite(m, "DensityMatrix");
  DensityMatrix r;
  r.mat = std::move(m);
  return r;
}

DensityMatrix DensityMatrix::physical_state(CMatrix m) {
  DensityMatrix r = raw(std::move(m));
  if (r.mat.size() == 0) throw std::invalid_argument("DensityMatrix: empty");
  const double defect = hermitian_defect(r.mat);
  if (defect > kHermitianTol) {
    throw std::invalid_argument("DensityMatrix: not Hermitian (defect " +
                                std::to_string(defect) + ")");
  }
  const CMatrix herm = 0.5 * (r.mat + r.mat.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -kHermitianTol) {
    throw std::invalid_argument("DensityMatrix: negative eigenvalue");
  }
  r.mat = herm;
  r.physical = true;
  return r;
}

DensityMatrix DensityMatrix::pure(const CVector& psi) {
  DensityMatrix r;
  r.mat = psi * psi.adjoint();
  r.physical = true;
  return r;
}

Superoperator vectorize_lindblad(const CMatrix& h, const std::vector<CMatrix>& jumps) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw std::invalid_argument("vectorize_lindblad: H is not square");
  }
  const Eigen::Index n = h.rows();
  const CMatrix id = CMatrix::Identity(n, n);
  Superoperator s;
  s.dim = n;
  s.mat = -kI * (kron(id, h) - kron(h.transpose(), id));
  for (const CMatrix& l : jumps) {
    require_same_dim(l, n, "vectorize_lindblad");
    const CMatrix ldl = l.adjoint() * l;
    s.mat += kron(l.conjugate(), l) - 0.5 * kron(id, ldl) - 0.5 * kron(ldl.transpose(), id);
  }
  return s;
}

CMatrix apply_superoperator(const Superoperator& s, const CMatrix& rho) {
  require_same_dim(rho, s.dim, "apply_superoperator");
  return unvec(s.mat * vec(rho), s.dim);
}

DensityMatrix propagate_lindblad(const Superoperator& s, const DensityMatrix& rho0, double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("propagate_lindblad: t must be >= 0");
  require_same_dim(rho0.mat, s.dim, "propagate_lindblad");
  if (t == 0.0) return rho0;
  CVector out;
  if (s.mat.rows() <= kDenseExpmLimit) {
    out = expm(s.mat * t) * vec(rho0.mat);
  } else {
    out = expm_multiply(to_sparse(s.mat), vec(rho0.mat), t);
  }
  return finish(rho0, unvec(out, s.dim));
}

LindbladPropagator::LindbladPropagator(const Superoperator& s, double t)
    : dim_(s.dim), t_(t), dense_(s.mat.rows() <= kDenseExpmLimit) {
  if (!(t >= 0.0)) throw std::invalid_argument("LindbladPropagator: t must be >= 0");
  if (dense_) {
    propagator_ = expm(s.mat * t);
  } else {
    generator_ = to_sparse(s.mat);
  }
}

DensityMatrix LindbladPropagator::apply(const DensityMatrix& rho) const {
  require_same_dim(rho.mat, dim_, "LindbladPropagator::apply");
  const CVector out = dense_ ? CVector(propagator_ * vec(rho.mat))
                             : expm_multiply(generator_, vec(rho.mat), t_);
  return finish(rho, unvec(out, dim_));
}

CVector propagate_nh(const CMatrix& h, const CVector& v0, double t) {
  if (h.rows() != h.cols() || h.cols() != v0.size()) {
    throw std::invalid_argument("propagate_nh: dimension mismatch");
  }
  if (t == 0.0) return v0;
  return expm(-kI * t * h) * v0;
}

CVector offdiag_sector(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw std::invalid_argument("offdiag_sector: expects a 4-level state");
  CVector v(3);
  v << rho.mat(0, 3), rho.mat(1, 3), rho.mat(2, 3);
  return v;
}

DensityMatrix sector_initial_state(const CVector& psi3) {
  if (psi3.size() != 3) throw std::invalid_argument("sector_initial_state: expects 3 components");
  CVector full = CVector::Zero(4);
  full.head(3) = psi3;
  full(3) = 1.0;
  DensityMatrix r = DensityMatrix::pure(full);
  r.mat *= 0.5;
  return r;
}

double elimination_trace_distance(const FullParams& fp, const DensityMatrix& rho0, double t) {
  if (rho0.dim() != 4) throw std::invalid_argument("elimination_trace_distance: 4x4 state required");
  const FullModel full = build_full_model(fp);
  const SystemParams p = fp.reduced();
  CMatrix r6 = CMatrix::Zero(6, 6);
  r6.topLeftCorner(4, 4) = rho0.mat;
  const DensityMatrix a =
      propagate_lindblad(vectorize_lindblad(full.hamiltonian, full.jumps), DensityMatrix::raw(r6), t);
  const DensityMatrix b = propagate_lindblad(
      vectorize_lindblad(build_reduced_hamiltonian(p), build_reduced_jumps(p)), rho0, t);
  return trace_distance(a.mat.topLeftCorner(4, 4), b.mat);
}

}  // namespace ep3
