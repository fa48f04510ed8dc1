#pragma once

// Dense spectral primitives.  Everything here is a free function over
// Eigen::MatrixBase so expressions can be passed without materializing them;
// the scalar type follows the argument (real or complex).

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "formkit/core.hpp"

namespace formkit {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RealOf = typename Eigen::NumTraits<Scalar>::Real;

/// Spectral decomposition M = V diag(values) V^H of a Hermitian matrix,
/// eigenvalues ascending.
template <typename Scalar>
struct HermEig {
  Eigen::Matrix<RealOf<Scalar>, Eigen::Dynamic, 1> values;
  DenseMatrix<Scalar> vectors;

  Eigen::Index size() const { return values.size(); }

  RealOf<Scalar> max_abs() const {
    return values.size() == 0 ? RealOf<Scalar>(0) : values.cwiseAbs().maxCoeff();
  }

  RealOf<Scalar> min_value() const {
    return values.size() == 0 ? RealOf<Scalar>(0) : values.minCoeff();
  }

  /// V f(Λ) V^H for a real function f of the eigenvalue.
  template <typename F>
  DenseMatrix<Scalar> apply(F&& f) const {
    Eigen::Matrix<RealOf<Scalar>, Eigen::Dynamic, 1> mapped(values.size());
    for (Eigen::Index k = 0; k < values.size(); ++k) mapped(k) = f(values(k));
    return vectors * mapped.asDiagonal() * vectors.adjoint();
  }

  /// Eigenvector columns whose eigenvalue is at most `rel * max_abs()`.
  DenseMatrix<Scalar> null_basis(RealOf<Scalar> rel) const {
    return vectors.leftCols(null_basis_size(rel));
  }

  Eigen::Index null_count(RealOf<Scalar> rel) const { return null_basis_size(rel); }

 private:
  Eigen::Index null_basis_size(RealOf<Scalar> rel) const {
    const RealOf<Scalar> cut = rel * max_abs();
    Eigen::Index count = 0;
    while (count < values.size() && values(count) <= cut) ++count;
    return count;
  }
};

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  return m.allFinite();
}

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (!m.allFinite()) throw Error(ErrorCode::NonFinite, std::string(what) + " has NaN/Inf entries");
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (m.rows() != m.cols())
    throw Error(ErrorCode::DimensionMismatch,
                std::string(what) + " must be square, got " + std::to_string(m.rows()) + "x" +
                    std::to_string(m.cols()));
}

/// (M + M^H)/2.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> hermitian_part(const Eigen::MatrixBase<Derived>& m) {
  return (m + m.adjoint()) / RealOf<typename Derived::Scalar>(2);
}

/// ‖A − B‖_F / ‖B‖_F, falling back to the absolute residual when B = 0.
template <typename DA, typename DB>
double relative_residual(const Eigen::MatrixBase<DA>& a, const Eigen::MatrixBase<DB>& b) {
  const double diff = (a - b).norm();
  const double scale = b.norm();
  return scale > 0 ? diff / scale : diff;
}

template <typename Derived>
double spectral_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<DenseMatrix<typename Derived::Scalar>> svd(m);
  return svd.singularValues()(0);
}

template <typename Derived>
HermEig<typename Derived::Scalar> hermitian_eig(const Eigen::MatrixBase<Derived>& m,
                                                double symmetry_tol = 1e-10) {
  using Scalar = typename Derived::Scalar;
  require_square(m, "hermitian_eig input");
  require_finite(m, "hermitian_eig input");
  HermEig<Scalar> out;
  if (m.rows() == 0) return out;
  const DenseMatrix<Scalar> mat = m;
  const double asym = (mat - mat.adjoint()).norm();
  if (asym > symmetry_tol * mat.norm())
    throw Error(ErrorCode::NotHermitian,
                "‖M − M^H‖_F = " + std::to_string(asym) + " exceeds " +
                    std::to_string(symmetry_tol) + "·‖M‖_F");
  Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> solver(hermitian_part(mat));
  out.values = solver.eigenvalues();
  out.vectors = solver.eigenvectors();
  return out;
}

/// Validates positive semidefiniteness of an eigendecomposition: the most
/// negative eigenvalue may not fall below −rel·λmax.
template <typename Scalar>
void require_psd(const HermEig<Scalar>& eig, double rel, const char* what) {
  const double floor = -rel * std::max(0.0, static_cast<double>(eig.max_abs()));
  if (eig.size() > 0 && eig.min_value() < floor)
    throw Error(ErrorCode::NotPSD, std::string(what) + " has eigenvalue " +
                                       std::to_string(eig.min_value()) + " below tolerance " +
                                       std::to_string(floor));
}

template <typename Scalar>
DenseMatrix<Scalar> psd_sqrt(const HermEig<Scalar>& eig, double rel = 1e-10) {
  require_psd(eig, rel, "psd_sqrt input");
  using R = RealOf<Scalar>;
  return eig.apply([](R t) { return t > 0 ? std::sqrt(t) : R(0); });
}

template <typename Derived>
DenseMatrix<typename Derived::Scalar> psd_sqrt(const Eigen::MatrixBase<Derived>& m,
                                               double rel = 1e-10) {
  return psd_sqrt(hermitian_eig(m), rel);
}

/// Moore–Penrose pseudoinverse; singular values at most rel·σmax are dropped.
template <typename Derived>
DenseMatrix<typename Derived::Scalar> pinv(const Eigen::MatrixBase<Derived>& m,
                                           double rel = 1e-10) {
  using Scalar = typename Derived::Scalar;
  require_finite(m, "pinv input");
  DenseMatrix<Scalar> out = DenseMatrix<Scalar>::Zero(m.cols(), m.rows());
  if (m.size() == 0) return out;
  Eigen::JacobiSVD<DenseMatrix<Scalar>> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cut = rel * s(0);
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) <= cut || s(k) == 0) break;
    out.noalias() += svd.matrixV().col(k) * (RealOf<Scalar>(1) / s(k)) *
                     svd.matrixU().col(k).adjoint();
  }
  return out;
}

/// Orthogonal projector onto the eigenspace of eigenvalues ≤ rel·σmax.
template <typename Scalar>
DenseMatrix<Scalar> kernel_projector(const HermEig<Scalar>& eig, double rel = 1e-10) {
  require_psd(eig, rel, "kernel_projector input");
  const auto basis = eig.null_basis(rel);
  return basis * basis.adjoint();
}

template <typename Derived>
DenseMatrix<typename Derived::Scalar> kernel_projector(const Eigen::MatrixBase<Derived>& m,
                                                       double rel = 1e-10) {
  return kernel_projector(hermitian_eig(m), rel);
}

/// Smallest eigenvalue of the Hermitian part; used for Loewner-order checks
/// (A ⪯ B ⟺ min_eigenvalue(B − A) ≥ 0).
template <typename Derived>
double min_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<DenseMatrix<typename Derived::Scalar>> solver(
      hermitian_part(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

template <typename Derived>
double max_eigenvalue(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<DenseMatrix<typename Derived::Scalar>> solver(
      hermitian_part(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(solver.eigenvalues().size() - 1);
}

}  // namespace formkit
