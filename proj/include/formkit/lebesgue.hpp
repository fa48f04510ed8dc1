#pragma once

// Lebesgue-type decomposition Ω = Ω_r + Ω_s relative to a positive form Θ,
// computed from any majorant Ψ ∈ M(Ω), and the positive special case
// Ψ = Ψ_a + Ψ_s.  The split depends on Ψ and is not unique.

#include "formkit/regularity.hpp"

namespace formkit {

struct LebesgueSplit {
  Form omega_r;
  Form omega_s;
  CMatrix P;  ///< projector onto ker B in H_Φ
  CMatrix Z;  ///< u Y_Φ (I − P) J_Φ J_Θ⁺, the regular part's Y
  RNRepresentation rep;
};

/// Throws NotInClassM unless Ψ ∈ M(Ω).
LebesgueSplit lebesgue_decompose(const Form& omega, const PositiveForm& theta,
                                 const PositiveForm& psi, double rel = 1e-10);

struct SplitCheck {
  double additivity;  ///< ‖M_r + M_s − M_Ω‖_F / ‖M_Ω‖_F
  RegularityCertificate regular;
  /// Largest witness residual over the standard basis, relative as in
  /// singularity_witness.
  double witness_theta;
  double witness_omega;
};

SplitCheck check_split(const LebesgueSplit& split, const Tolerances& tol = {});

struct PositiveSplit {
  PositiveForm psi_a;
  PositiveForm psi_s;
};

PositiveSplit positive_lebesgue(const PositiveForm& psi, const PositiveForm& theta,
                                double rel = 1e-10);

/// A(A + B)⁺B.
PositiveForm parallel_sum(const PositiveForm& a, const PositiveForm& b, double rel = 1e-10);

/// A:(nB), computed in the coordinates of A + B so that n up to 2⁴⁰ keeps
/// full relative accuracy.
PositiveForm scaled_parallel_sum(const PositiveForm& a, const PositiveForm& b, double n,
                                 double rel = 1e-10);

struct ParallelSumLimit {
  PositiveForm limit;
  double n;           ///< last multiplier used
  double last_delta;  ///< Frobenius change at the last doubling
  bool converged;     ///< stopped on the change criterion, not the cap
};

/// lim Ψ:(nΘ) by doubling n from 1 up to 2⁴⁰, stopping once the Frobenius
/// change drops below 1e−12.  The sequence is nondecreasing; a decrease
/// beyond rounding throws NoConvergence.
ParallelSumLimit parallel_sum_limit(const PositiveForm& psi, const PositiveForm& theta,
                                    double rel = 1e-10);

/// Ψ and Θ are mutually singular iff lim Ψ:(nΘ) = 0 (threshold 1e−9·‖Ψ‖).
bool is_mutually_singular(const PositiveForm& psi, const PositiveForm& theta,
                          double rel = 1e-10);

/// ξ′ with J_Φ ξ′ = P J_Φ ξ: Θ(ξ′, ξ′) = 0 and Ω_s(ξ′ − ξ, ξ′ − ξ) = 0.  Throws
/// WitnessResidualTooLarge if either residual exceeds 1e−8 (relative).
CVector singularity_witness(const Form& omega_s, const PositiveForm& theta,
                            const LebesgueSplit& split, const CVector& xi);

/// Φ′ ⪯ Ψ_a for a Θ-absolutely continuous Φ′ ⪯ Ψ.  Throws PreconditionFails
/// when Φ′ is not such a minorant.
bool maximality_check(const PositiveForm& phi, const PositiveForm& psi,
                      const PositiveForm& theta, double rel = 1e-10);

}  // namespace formkit
