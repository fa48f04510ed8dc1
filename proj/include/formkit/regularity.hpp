#pragma once

// Majorants, absolute continuity and the Radon–Nikodym-type representation
//
//   Ω(ξ, η) = ⟨H Y j_Θ ξ, H j_Θ η⟩_Θ
//
// built constructively from a Θ-absolutely continuous majorant Ψ ∈ M(Ω).
// All Hilbert spaces H_Θ, H_Φ are the finite quotients realized by
// QuotientEmbedding; operators on them are plain matrices.

#include <optional>
#include <string>
#include <vector>

#include "formkit/forms.hpp"

namespace formkit {

/// Outcome of the test Ψ ∈ M(Ω), i.e. |Ω(ξ,η)| ≤ Ψ(ξ,ξ)^{1/2} Ψ(η,η)^{1/2}.
struct ClassMResult {
  bool member = false;
  /// 1 − ‖W‖₂ where W is the operator induced by Ω on H_Ψ.
  double margin = 0;
  double induced_norm = 0;
  /// Largest ‖M_Ω k‖ or ‖M_Ω^H k‖ over the kernel basis of Ψ, minus the
  /// Cauchy–Schwarz allowance of that kernel vector (≤ 0 when fine).
  double kernel_excess = 0;
};

ClassMResult in_class_M(const Form& omega, const PositiveForm& psi, double rel = 1e-10);

/// |Ω(ξ,ξ)| ≤ Ψ(ξ,ξ) upgraded to membership of ε_Ω·Ψ in M(Ω).
struct EpsilonBound {
  double epsilon;
  /// max |Ω(ξ,ξ)| over the unit sphere of H_Ψ.
  double quadratic_radius;
  ClassMResult membership;
};

EpsilonBound epsilon_bound_check(const Form& omega, const PositiveForm& psi, double rel = 1e-10);

struct ContinuityVerdict {
  bool holds = false;
  /// Largest Ψ(k,k) over an orthonormal basis k of N(Θ).
  double kernel_leak = 0;
  /// At finite dimension the closability half of the definition always holds;
  /// only the kernel inclusion is decided.
  static constexpr const char* note = "closability of j_Θ ξ ↦ j_Ψ ξ is automatic in finite dimension";

  explicit operator bool() const { return holds; }
};

/// Ψ is Θ-absolutely continuous iff N(Θ) ⊆ N(Ψ).
ContinuityVerdict is_absolutely_continuous(const PositiveForm& psi, const PositiveForm& theta,
                                           double rel = 1e-10);

/// Γ_T(ξ,η) = ⟨ξ,η⟩ + ⟨Hξ,η⟩ + ⟨HU^*ξ,U^*η⟩ from the polar decomposition T = UH.
PositiveForm canonical_majorant(const CMatrix& t, double rel = 1e-10);

/// Witness bundle of the representation theorem.  Operators act on
/// H_Θ (dimension r_Θ) or H_Φ (dimension r_Φ), Φ = Θ + Ψ.
struct RNRepresentation {
  Form omega;
  PositiveForm theta;
  PositiveForm psi;
  QuotientEmbedding j_theta{};
  QuotientEmbedding j_phi{};

  CMatrix C{};  ///< Θ = ⟨C j_Φ·, j_Φ·⟩, r_Φ × r_Φ
  CMatrix B{};  ///< C^{1/2}
  RVector b_spectrum{};  ///< eigenvalues t_k of B, descending
  CMatrix b_vectors{};   ///< matching eigenvectors
  double b_cutoff = 0; ///< t ≤ b_cutoff counts as ker B
  CMatrix U{};  ///< isometry H_Θ → H_Φ, U j_Θ ξ = B j_Φ ξ
  CMatrix S{};  ///< Σ_{t_k > cutoff} t_k^{-1} (1 − t_k²)^{1/2} P_k
  CMatrix K{};  ///< U^H S U
  CMatrix H{};  ///< (I + K²)^{1/2}
  CMatrix Y_phi{};  ///< Ω = ⟨Y_Φ j_Φ·, j_Φ·⟩
  CMatrix u{};      ///< H_Φ → H_Θ, j_Φ ξ ↦ j_Θ ξ
  CMatrix Y{};      ///< u Y_Φ J_Φ J_Θ⁺
  CMatrix P{};      ///< projector onto ker B
  PositiveForm gamma = PositiveForm::zero(0);  ///< ⟨H j_Θ·, H j_Θ·⟩ + ⟨HY j_Θ·, HY j_Θ·⟩
};

/// Runs the construction for any Ψ ∈ M(Ω) without requiring absolute
/// continuity.  The Lebesgue decomposition starts from this.
RNRepresentation partial_representation(const Form& omega, const PositiveForm& theta,
                                        const PositiveForm& psi, double rel = 1e-10);

/// Throws NotInClassM or NotAbsolutelyContinuous when the hypotheses fail.
RNRepresentation radon_nikodym(const Form& omega, const PositiveForm& theta,
                               const PositiveForm& psi, double rel = 1e-10);

/// Relative residuals of every identity the representation must satisfy.
struct RNResiduals {
  double fundamental = 0;  ///< Ω vs ⟨HY j_Θ·, H j_Θ·⟩
  double k2 = 0;           ///< Ψ vs ⟨K j_Θ·, K j_Θ·⟩
  double second_kato = 0;  ///< u^H H² u vs I
  double isometry = 0;     ///< U^H U vs I
  double c_identity = 0;   ///< Θ vs ⟨C j_Φ·, j_Φ·⟩
  double b_min = 0;        ///< smallest eigenvalue of B
  double b_max = 0;        ///< largest eigenvalue of B
  double gamma_min = 0;    ///< smallest eigenvalue of Γ
};

RNResiduals verify(const RNRepresentation& rep);

/// Bounded S on H_Θ with Ω(ξ,η) = ⟨S H j_Θ ξ, H j_Θ η⟩, fixed to 0 on (ran H)^⊥.
struct KatoS {
  CMatrix S;
  double residual;
  double norm;
};

KatoS kato_S(const RNRepresentation& rep, double rel = 1e-10);

/// Ψ_n(ξ,η) = ⟨K_n j_Θ ξ, K_n j_Θ η⟩ with S_n truncated to t ≥ 1/n.
PositiveForm dominated_sequence(const PositiveForm& psi, const PositiveForm& theta, int n,
                                double rel = 1e-10);

/// Smallest n at which the almost-dominated sequence reaches its limit:
/// ⌈1/t_min⌉ for the smallest nonzero eigenvalue t_min of B.
int stabilization_index(const PositiveForm& psi, const PositiveForm& theta, double rel = 1e-10);

struct SectorialityCertificate {
  double delta;
  double gamma;
  /// Smallest eigenvalue over ReM − δM_Θ and γ(ReM − δM_Θ) ± ImM.
  double margin;
  /// Ω − δΘ has (1 + γ)(ReΩ − δΘ) as a majorant in M(Ω − δΘ).
  bool class_m_certified;
};

/// Verifies ReΩ ≥ δΘ and |ImΩ| ≤ γ(ReΩ − δΘ) as matrix inequalities.
/// Throws NotSectorial naming the violated inequality.
SectorialityCertificate sectorial_parameters(const Form& omega, const PositiveForm& theta,
                                             double delta, double gamma, double rel = 1e-10);

struct SectorGrid {
  std::vector<double> deltas;
  std::vector<double> gammas;
};

/// 32 vertices from min-eig(ReM) − 1 up to the largest admissible vertex on
/// H_Θ, and slopes 2^0 … 2^20.
SectorGrid sector_grid(const Form& omega, const PositiveForm& theta, double rel = 1e-10);

/// First certificate found on the grid, scanning vertices from the top.
/// Empty means no grid point certifies; it is not a proof of non-sectoriality.
std::optional<SectorialityCertificate> search_sectorial_parameters(const Form& omega,
                                                                   const PositiveForm& theta,
                                                                   double rel = 1e-10);

/// Θ-regularity of a sectorial form: ReΩ − δΘ is Θ-absolutely continuous.
bool sectorial_regularity(const Form& omega, const PositiveForm& theta,
                          const SectorialityCertificate& cert, double rel = 1e-10);

/// Checks that (H, Y) is an honest regularity witness for Ω: the
/// representation reproduces Ω, the form Γ built from (H, Y) majorizes Ω,
/// and Γ is Θ-absolutely continuous.
struct RegularityCertificate {
  bool regular;
  double representation_residual;
  ClassMResult membership;
  ContinuityVerdict continuity;
};

RegularityCertificate certify_regular(const Form& omega, const PositiveForm& theta,
                                      const QuotientEmbedding& j_theta, const CMatrix& h,
                                      const CMatrix& y, const Tolerances& tol = {});

}  // namespace formkit
