#pragma once

// Solvability of forms relative to a Hilbert norm ‖ξ‖²_Ω = ξ^H G ξ.
//
// The Gelfand triplet E_Ω ↪ ℂⁿ ↪ E_Ω^× is realized concretely: a functional
// Λ is a vector acting by η ↦ η^H Λ with dual norm ‖G^{-1/2} Λ‖, and the map
// X_Υ : ξ ↦ (Ω + Υ)(ξ, ·) is the matrix A = M_Ω + M_Υ.  Every form is its own
// q-closed extension here, so no completion step exists.

#include <optional>
#include <string>
#include <vector>

#include "formkit/forms.hpp"
#include "formkit/numerical_range.hpp"

namespace formkit {

/// Gram matrix of a Hilbert norm on ℂⁿ.
class NormGram {
 public:
  /// Requires G Hermitian positive definite.
  explicit NormGram(CMatrix g, double rel = 1e-10);

  /// ‖ξ‖² = ‖ξ‖² + Ψ(ξ, ξ).
  static NormGram from_majorant(const PositiveForm& psi);
  static NormGram identity(Eigen::Index n) { return NormGram(CMatrix::Identity(n, n)); }

  const CMatrix& matrix() const { return g_; }
  Eigen::Index dim() const { return g_.rows(); }
  /// G^{-1/2}, used to normalize both the primal and the dual side.
  const CMatrix& inv_sqrt() const { return inv_sqrt_; }
  double norm(const CVector& xi) const { return std::sqrt(std::max(0.0, xi.dot(g_ * xi).real())); }

 private:
  CMatrix g_;
  CMatrix inv_sqrt_;
};

struct CompatibilityResult {
  bool compatible;
  /// min eigenvalue of G − M_Θ.
  double slack;
  static constexpr const char* note =
      "the completeness condition holds automatically since G is positive definite";
  explicit operator bool() const { return compatible; }
};

/// Θ(ξ,ξ) ≤ ‖ξ‖² for all ξ, i.e. M_Θ ⪯ G.
CompatibilityResult validate_compatible_norm(const NormGram& g, const PositiveForm& theta,
                                             double rel = 1e-10);

enum class HullLocation { Outside, BoundaryInconclusive, Inside };

std::string_view to_string(HullLocation loc);

/// Polygonal approximation of the numerical range: the outer polygon is the
/// intersection of the supporting half-planes, the inner polygon joins the
/// boundary points that attain them.
class NumericalRangeHull {
 public:
  NumericalRangeHull(std::vector<SupportSample> samples, double scale);

  const std::vector<SupportSample>& samples() const { return samples_; }
  /// max(‖M‖₂, smallest normal), the unit for hull tolerances.
  double scale() const { return scale_; }

  /// Lower bound on dist(λ, W): max_θ (Re(e^{−iθ}λ) − h(θ)), clamped at 0.
  double distance(Complex lambda) const;
  /// Distance from λ to the inner polygon's boundary when λ lies inside it,
  /// 0 otherwise.
  double interior_depth(Complex lambda) const;
  HullLocation locate(Complex lambda, double band = 1e-4) const;
  bool contains(Complex lambda, double slack) const { return distance(lambda) <= slack; }

  double area() const;
  double radius() const;
  std::vector<Complex> extreme_points() const;

 private:
  std::vector<SupportSample> samples_;
  double scale_;
};

NumericalRangeHull numerical_range_hull(const Form& omega, int grid = 720);

struct SolvabilityReport {
  Form upsilon;
  CMatrix A;
  double c1 = 0;  ///< inf-sup constant, σmin(G^{-1/2} A G^{-1/2})
  double c2 = 0;  ///< continuity constant, σmax(G^{-1/2} A G^{-1/2})
  double c1_adjoint = 0;
  double c2_adjoint = 0;
  bool solvable = false;
  /// Independent reading of the same question: LU rank of A.
  bool lu_invertible = false;
  /// And a third: N(Ω + Υ) = {0} from the SVD of A in the Euclidean norm.
  bool trivial_kernel = false;
  std::optional<Complex> lambda;
  std::optional<double> resolvent_norm;
  CMatrix T;
};

/// Builds X_Υ and its inf-sup constants.  Throws IncompatibleNorm unless
/// M_ι = I ⪯ G.
SolvabilityReport solvability_with(const Form& omega, const NormGram& g, const Form& upsilon,
                                   double rel = 1e-10);

/// Υ = −λι, with the resolvent data filled in.
SolvabilityReport solvability_with_scalar(const Form& omega, const NormGram& g, Complex lambda,
                                          double rel = 1e-10);

struct RepresentedOperator {
  CMatrix T;
  std::optional<Complex> lambda;
  std::optional<double> resolvent_norm;
};

/// T = M_Ω; when `lambda` is given, also certifies λ ∈ ρ(T).  Throws
/// NotSolvable if X_Υ is not invertible.
RepresentedOperator represent_operator(const Form& omega, const NormGram& g,
                                       const Form& upsilon, std::optional<Complex> lambda = {},
                                       double rel = 1e-10);

struct ScalarSolvability {
  bool solvable;
  double distance;
  HullLocation location;
  double c1;
  std::optional<double> resolvent_norm;
  static constexpr const char* note =
      "the norm condition linking ‖·‖_Ω to |Ω(ξ,ξ)| is automatic in finite dimension";
};

/// λ outside the numerical range forces −λι ∈ 𝔓(Ω); a violation of that
/// implication throws TheoremViolation.
ScalarSolvability scalar_solvability(const Form& omega, const NormGram& g, Complex lambda,
                                     int grid = 720, double rel = 1e-10);

ScalarSolvability scalar_solvability(const Form& omega, const NormGram& g,
                                     const NumericalRangeHull& hull, Complex lambda,
                                     double rel = 1e-10);

}  // namespace formkit
