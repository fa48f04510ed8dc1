#pragma once

// Seeded generators and independent oracles.  Oracles here deliberately avoid
// the library's constructions (no quotient embeddings, no B/K machinery).

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "formkit/core.hpp"

namespace formkit::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal() { return normal_(rng_); }
  bool coin() { return integer(0, 1) == 1; }

  CMatrix complex_matrix(Eigen::Index rows, Eigen::Index cols) {
    CMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
      for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = Complex(normal(), normal());
    return m;
  }

  CMatrix hermitian(Eigen::Index n) {
    const CMatrix a = complex_matrix(n, n);
    return (a + a.adjoint()) / 2.0;
  }

  /// R^H R with R of size rank × n, so the rank is exact.
  CMatrix psd(Eigen::Index n, Eigen::Index rank) {
    if (rank == 0) return CMatrix::Zero(n, n);
    const CMatrix r = complex_matrix(rank, n);
    const CMatrix m = r.adjoint() * r;
    return (m + m.adjoint()) / 2.0;
  }

  /// Unitary from the QR of a Gaussian matrix.
  CMatrix unitary(Eigen::Index n) {
    Eigen::HouseholderQR<CMatrix> qr(complex_matrix(n, n));
    return qr.householderQ() * CMatrix::Identity(n, n);
  }

  /// Ω = R^H W R with ‖W‖₂ ≤ 1 and Ψ = R^H R; membership Ψ ∈ M(Ω) then holds
  /// by Cauchy–Schwarz in the coordinates of R.
  std::pair<CMatrix, CMatrix> form_with_majorant(Eigen::Index n, Eigen::Index rank) {
    return form_with_majorant_from(complex_matrix(rank, n));
  }

  /// Same, with the rows of R confined to the span of `basis` (columns), so
  /// that N(Ψ) ⊇ basis^⊥.
  std::pair<CMatrix, CMatrix> form_with_majorant_in(const CMatrix& basis, Eigen::Index rank) {
    return form_with_majorant_from(complex_matrix(rank, basis.cols()) * basis.adjoint());
  }

  /// Orthonormal basis of the range of a Hermitian matrix.
  static CMatrix range_basis(const CMatrix& m, double rel = 1e-10) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(m);
    const double top = es.eigenvalues().cwiseAbs().maxCoeff();
    Eigen::Index nulls = 0;
    while (nulls < m.rows() && es.eigenvalues()(nulls) <= rel * top) ++nulls;
    if (top == 0) nulls = m.rows();
    return es.eigenvectors().rightCols(m.rows() - nulls);
  }

 private:
  std::pair<CMatrix, CMatrix> form_with_majorant_from(const CMatrix& r) {
    const Eigen::Index rank = r.rows();
    if (rank == 0) return {CMatrix::Zero(r.cols(), r.cols()), CMatrix::Zero(r.cols(), r.cols())};
    CMatrix w = complex_matrix(rank, rank);
    const double s = w.jacobiSvd().singularValues()(0);
    w *= uniform(0.1, 0.95) / s;
    const CMatrix psi = r.adjoint() * r;
    return {r.adjoint() * w * r, (psi + psi.adjoint()) / 2.0};
  }

  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline double rel_err(const CMatrix& a, const CMatrix& b) {
  const double nb = b.norm();
  return nb == 0 ? a.norm() : (a - b).norm() / nb;
}

inline double min_eig(const CMatrix& m) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es((m + m.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Moore–Penrose inverse via complete orthogonal decomposition.
inline CMatrix mp_inverse(const CMatrix& m, double rel = 1e-10) {
  if (m.size() == 0) return m.adjoint();
  Eigen::CompleteOrthogonalDecomposition<CMatrix> cod(m);
  const double scale = m.cwiseAbs().maxCoeff();
  cod.setThreshold(scale > 0 ? rel : 1.0);
  return cod.pseudoInverse();
}

/// lim_n Ψ:(nΘ) in closed form: split ℂⁿ = ran Θ ⊕ N(Θ) and take the
/// generalized Schur complement of the N(Θ) block of Ψ, placed on ran Θ.
inline CMatrix absolutely_continuous_part(const CMatrix& psi, const CMatrix& theta,
                                          double rel = 1e-10) {
  const Eigen::Index n = psi.rows();
  Eigen::SelfAdjointEigenSolver<CMatrix> es((theta + theta.adjoint()) / 2.0);
  const double top = es.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::Index nulls = 0;
  while (nulls < n && es.eigenvalues()(nulls) <= rel * top) ++nulls;
  if (top == 0) nulls = n;
  const CMatrix kn = es.eigenvectors().leftCols(nulls);
  const CMatrix kr = es.eigenvectors().rightCols(n - nulls);
  const CMatrix a = kr.adjoint() * psi * kr;
  const CMatrix b = kr.adjoint() * psi * kn;
  const CMatrix d = kn.adjoint() * psi * kn;
  const CMatrix schur = a - b * mp_inverse(d) * b.adjoint();
  return kr * schur * kr.adjoint();
}

/// A(A+B)⁺B straight from the definition.
inline CMatrix naive_parallel_sum(const CMatrix& a, const CMatrix& b) {
  return a * mp_inverse(CMatrix(a + b)) * b;
}

/// Largest |Ω(e_j, e_i) − value(i, j)| over the basis grid, relative to max|Ω(e_j, e_i)|.
template <typename F>
double basis_grid_residual(const CMatrix& omega, F&& value) {
  double worst = 0, scale = 0;
  for (Eigen::Index i = 0; i < omega.rows(); ++i)
    for (Eigen::Index j = 0; j < omega.cols(); ++j) {
      worst = std::max(worst, std::abs(omega(i, j) - value(i, j)));
      scale = std::max(scale, std::abs(omega(i, j)));
    }
  return scale == 0 ? worst : worst / scale;
}

}  // namespace formkit::testing
