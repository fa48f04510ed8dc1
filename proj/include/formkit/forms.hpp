#pragma once

// Sesquilinear forms on ℂⁿ.  A form is stored through its representing
// matrix with the convention Ω(ξ, η) = η^H M ξ, i.e. linear in the first
// slot and M(i, j) = Ω(e_j, e_i).  With this convention the matrix of
// Ω_T(ξ, η) = ⟨Tξ, η⟩ is T itself.

#include <optional>
#include <utility>

#include "formkit/core.hpp"
#include "formkit/numerics.hpp"

namespace formkit {

class Form {
 public:
  Form() = default;
  explicit Form(CMatrix m);

  static Form zero(Eigen::Index n) { return Form(CMatrix::Zero(n, n)); }
  /// The inner product ι of ℂⁿ.
  static Form identity(Eigen::Index n) { return Form(CMatrix::Identity(n, n)); }

  Eigen::Index dim() const { return m_.rows(); }
  const CMatrix& matrix() const { return m_; }

  Complex operator()(const CVector& xi, const CVector& eta) const { return eta.dot(m_ * xi); }

  /// Ω(ξ, η) = conj Ω(η, ξ) up to `rel`·‖M‖_F.
  bool is_symmetric(double rel = 1e-10) const;

 private:
  CMatrix m_;
};

Form operator+(const Form& a, const Form& b);
Form operator-(const Form& a, const Form& b);
Form operator*(Complex s, const Form& a);

/// A form with Hermitian positive semidefinite matrix, with its spectral
/// decomposition cached.
class PositiveForm {
 public:
  PositiveForm() = default;
  explicit PositiveForm(CMatrix m, double rel = 1e-10);

  static PositiveForm zero(Eigen::Index n) { return PositiveForm(CMatrix::Zero(n, n)); }
  static PositiveForm identity(Eigen::Index n) { return PositiveForm(CMatrix::Identity(n, n)); }

  Eigen::Index dim() const { return form_.dim(); }
  const Form& form() const { return form_; }
  const CMatrix& matrix() const { return form_.matrix(); }
  const HermEig<Complex>& eig() const { return eig_; }

  double operator()(const CVector& xi) const { return form_(xi, xi).real(); }
  Complex operator()(const CVector& xi, const CVector& eta) const { return form_(xi, eta); }

  /// Largest eigenvalue.
  double norm() const { return eig_.max_abs(); }

 private:
  Form form_;
  HermEig<Complex> eig_;
};

PositiveForm operator+(const PositiveForm& a, const PositiveForm& b);
PositiveForm operator*(double s, const PositiveForm& a);

/// Realization of the canonical map j_Ψ : ℂⁿ → H_Ψ = ℂⁿ / N(Ψ).
///
/// J = D^{1/2} V^H is built from the eigenpairs of M_Ψ above the rank
/// cutoff, so J^H J = M_Ψ and ⟨Jξ, Jη⟩ = Ψ(ξ, η).  `pinv` is the exact
/// right inverse V D^{-1/2}; J · pinv = I_r.
struct QuotientEmbedding {
  CMatrix J;
  CMatrix pinv;

  Eigen::Index rank() const { return J.rows(); }
  Eigen::Index source_dim() const { return J.cols(); }
};

Form adjoint(const Form& omega);

struct ReImParts {
  Form re;
  Form im;
};

/// Ω = ReΩ + i ImΩ with both parts symmetric.
ReImParts re_im_split(const Form& omega);

/// Orthonormal basis (as columns) of N(Ψ).
CMatrix kernel(const PositiveForm& psi, double rel = 1e-10);

QuotientEmbedding quotient_embedding(const PositiveForm& psi, double rel = 1e-10);

/// Largest eigenvalue of K^H M K for an orthonormal basis K; zero when K is
/// empty.  This is how kernel inclusions N(·) ⊆ N(form) are measured.
double kernel_leak(const CMatrix& basis, const CMatrix& form_matrix);

/// Least γ ≥ 0 with Θ ≤ γΨ, or nothing when N(Ψ) ⊄ N(Θ).
std::optional<double> dominates(const PositiveForm& theta, const PositiveForm& psi,
                                double rel = 1e-10);

/// The operator C on H_Ψ with Θ(ξ, η) = ⟨C j_Ψ ξ, j_Ψ η⟩ and 0 ⪯ C ⪯ γI.
/// Throws DominationFails if Ψ does not dominate Θ with constant γ.
CMatrix domination_operator(const PositiveForm& theta, const PositiveForm& psi, double gamma,
                            double rel = 1e-10);

/// Same as above against an already computed embedding of Ψ.
CMatrix domination_operator(const PositiveForm& theta, const PositiveForm& psi,
                            const QuotientEmbedding& jpsi, double gamma, double rel = 1e-10);

}  // namespace formkit
