#pragma once

// Finite truncations of the three example families and dimension-growth
// diagnostics.  Diagnostics describe truncations; none of them certifies a
// property of the infinite family.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "formkit/forms.hpp"

namespace formkit {

/// Closed-form witnesses a family knows about itself.
struct Witnesses {
  std::optional<CMatrix> H;
  std::optional<CMatrix> Y;
  std::optional<CMatrix> T;
  std::optional<RVector> k;    ///< density |ω|/θ on supp θ
  std::optional<RVector> phi;  ///< phase arg ω
};

struct Instance {
  Form omega;
  PositiveForm theta;
  PositiveForm psi;
  std::optional<CMatrix> norm_gram;
  std::string provenance;
  Witnesses witnesses;

  Eigen::Index n() const { return omega.dim(); }
};

using Sequence = std::function<Complex(int)>;

/// Ω = diag(λ_1..λ_N), Θ = ι, Ψ = diag(|λ_n|), H = diag(√|λ_n|),
/// Y = diag(e^{i arg λ_n}) with arg 0 := 0, T = diag(λ_n).
Instance diag_family(const Sequence& lambda, int N, const std::string& label = "lambda");

/// Point masses: Θ = diag(θ), Ω = diag(ω), Ψ = diag(|ω|).  k and φ are filled
/// when supp ω ⊆ supp θ.
Instance measure_family(const RVector& theta, const CVector& omega);

/// Ω(ξ,η) = ⟨Sξ, Tη⟩, Ψ = ⟨H·, H·⟩ with H = (I + S^H S + T^H T)^{1/2}.
Instance operator_pair_family(const CMatrix& s, const CMatrix& t);

/// Parses a sequence expression in n: numbers, n, i, pi, + − * / ^, unary
/// minus, parentheses and exp, sqrt, abs, cos, sin, log.  Throws ParseError.
Sequence parse_sequence(const std::string& expr);

struct DiagnosticsRow {
  int N;
  double min_re;  ///< smallest eigenvalue of ReM
  bool sectorial_certified;
  std::optional<double> sector_delta;
  std::optional<double> sector_gamma;
  double hull_area;
  double hull_radius;
  double probe_distance;
  std::optional<double> resolvent_norm;
  double condition;  ///< c₂/c₁ of G^{-1/2}(M − λI)G^{-1/2}, G = I + M_Ψ
};

using Family = std::function<Instance(int)>;

/// One row per N; N must be ascending.
std::vector<DiagnosticsRow> convergence_report(const Family& family, const std::vector<int>& Ns,
                                               Complex probe = {-100.0, 0.0}, int grid = 720);

std::string format_report(const std::vector<DiagnosticsRow>& rows, Complex probe);

}  // namespace formkit
