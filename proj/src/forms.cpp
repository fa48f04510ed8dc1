#include "formkit/forms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace formkit {

Form::Form(CMatrix m) : m_(std::move(m)) {
  require_square(m_, "form matrix");
  require_finite(m_, "form matrix");
}

bool Form::is_symmetric(double rel) const {
  return (m_ - m_.adjoint()).norm() <= rel * m_.norm();
}

Form operator+(const Form& a, const Form& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "form sum");
  return Form(a.matrix() + b.matrix());
}

Form operator-(const Form& a, const Form& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "form difference");
  return Form(a.matrix() - b.matrix());
}

Form operator*(Complex s, const Form& a) { return Form(s * a.matrix()); }

PositiveForm::PositiveForm(CMatrix m, double rel) : form_(std::move(m)) {
  eig_ = hermitian_eig(form_.matrix(), rel);
  require_psd(eig_, rel, "positive form");
}

PositiveForm operator+(const PositiveForm& a, const PositiveForm& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "positive form sum");
  return PositiveForm(a.matrix() + b.matrix());
}

PositiveForm operator*(double s, const PositiveForm& a) {
  if (s < 0) throw Error(ErrorCode::NotPSD, "negative multiple of a positive form");
  return PositiveForm(s * a.matrix());
}

Form adjoint(const Form& omega) { return Form(omega.matrix().adjoint()); }

ReImParts re_im_split(const Form& omega) {
  const CMatrix& m = omega.matrix();
  const CMatrix mh = m.adjoint();
  return {Form((m + mh) / 2.0), Form((m - mh) / Complex(0.0, 2.0))};
}

CMatrix kernel(const PositiveForm& psi, double rel) { return psi.eig().null_basis(rel); }

QuotientEmbedding quotient_embedding(const PositiveForm& psi, double rel) {
  const auto& eig = psi.eig();
  const Eigen::Index n = psi.dim();
  const Eigen::Index nulls = eig.null_count(rel);
  const Eigen::Index r = n - nulls;
  QuotientEmbedding out;
  out.J.resize(r, n);
  out.pinv.resize(n, r);
  // Largest eigenvalue first so that the leading coordinate of H_Ψ carries
  // the dominant direction.
  for (Eigen::Index k = 0; k < r; ++k) {
    const Eigen::Index src = n - 1 - k;
    const double d = std::sqrt(eig.values(src));
    out.J.row(k) = d * eig.vectors.col(src).adjoint();
    out.pinv.col(k) = eig.vectors.col(src) / d;
  }
  return out;
}

double kernel_leak(const CMatrix& basis, const CMatrix& form_matrix) {
  if (basis.cols() == 0) return 0.0;
  return std::max(0.0, max_eigenvalue(basis.adjoint() * form_matrix * basis));
}

std::optional<double> dominates(const PositiveForm& theta, const PositiveForm& psi, double rel) {
  if (theta.dim() != psi.dim()) throw Error(ErrorCode::DimensionMismatch, "dominates");
  const CMatrix null_psi = kernel(psi, rel);
  if (kernel_leak(null_psi, theta.matrix()) > rel * theta.norm()) return std::nullopt;
  const QuotientEmbedding jpsi = quotient_embedding(psi, rel);
  if (jpsi.rank() == 0) return 0.0;
  return std::max(0.0, max_eigenvalue(jpsi.pinv.adjoint() * theta.matrix() * jpsi.pinv));
}

CMatrix domination_operator(const PositiveForm& theta, const PositiveForm& psi, double gamma,
                            double rel) {
  return domination_operator(theta, psi, quotient_embedding(psi, rel), gamma, rel);
}

CMatrix domination_operator(const PositiveForm& theta, const PositiveForm& psi,
                            const QuotientEmbedding& jpsi, double gamma, double rel) {
  const auto best = dominates(theta, psi, rel);
  if (!best) throw Error(ErrorCode::DominationFails, "N(Ψ) is not contained in N(Θ)");
  if (*best > gamma * (1 + 1e-9) + 1e-12 * theta.norm())
    throw Error(ErrorCode::DominationFails, "least domination constant " + std::to_string(*best) +
                                                " exceeds γ = " + std::to_string(gamma));
  const QuotientEmbedding jtheta = quotient_embedding(theta, rel);
  const CMatrix c_o = jtheta.J * jpsi.pinv;
  return c_o.adjoint() * c_o;
}

}  // namespace formkit
