#pragma once

// JSON instance files.  Complex entries are [re, im]; absent theta is the
// identity, absent psi is the canonical majorant of M_Ω.  A "family" block
// replaces the explicit matrices.

#include <optional>
#include <string>

#include "formkit/trunclab.hpp"

namespace formkit {

/// Parameters of a "diag" family block, kept so that `lab` can regenerate the
/// family at other sizes.
struct DiagFamilySpec {
  std::string lambda;
  int N;
};

struct InstanceFile {
  Instance instance;
  std::optional<DiagFamilySpec> diag_family;
};

/// Throws ParseError naming the line or field, ValidationError naming the
/// violated invariant.
InstanceFile parse_instance_text(const std::string& text, const std::string& origin,
                                 double rel = 1e-10);
InstanceFile parse_instance(const std::string& path, double rel = 1e-10);

/// n×n complex matrix from JSON text.
CMatrix parse_matrix_text(const std::string& text, Eigen::Index n, const std::string& field);

/// Explicit matrices with 17 significant digits, so parse(emit(x)) == x
/// bit for bit.
std::string emit_instance(const Instance& inst);

Family make_diag_family(const DiagFamilySpec& spec);

}  // namespace formkit
