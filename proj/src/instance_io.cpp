#include "formkit/instance_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "formkit/regularity.hpp"

namespace formkit {
namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(const std::string& origin, const std::string& what) {
  throw Error(ErrorCode::ParseError, origin + ": " + what);
}

double number(const json& v, const std::string& origin, const std::string& field) {
  if (!v.is_number()) parse_fail(origin, "field '" + field + "' must be a number");
  return v.get<double>();
}

Complex complex_entry(const json& v, const std::string& origin, const std::string& field) {
  if (v.is_number()) return number(v, origin, field);
  if (!v.is_array() || v.size() != 2)
    parse_fail(origin, "field '" + field + "' must be [re, im]");
  return {number(v[0], origin, field), number(v[1], origin, field)};
}

CMatrix complex_matrix(const json& v, Eigen::Index n, const std::string& origin,
                       const std::string& field) {
  if (!v.is_array() || static_cast<Eigen::Index>(v.size()) != n)
    throw Error(ErrorCode::ValidationError,
                origin + ": field '" + field + "' must have exactly " + std::to_string(n) + " rows");
  CMatrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const json& row = v[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw Error(ErrorCode::ValidationError, origin + ": field '" + field + "' row " +
                                                  std::to_string(i) + " must have exactly " +
                                                  std::to_string(n) + " entries");
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = complex_entry(row[j], origin,
                              field + "[" + std::to_string(i) + "][" + std::to_string(j) + "]");
  }
  if (!all_finite(m)) throw Error(ErrorCode::NonFinite, origin + ": field '" + field + "'");
  return m;
}

CMatrix square_matrix(const json& v, const std::string& origin, const std::string& field) {
  if (!v.is_array()) parse_fail(origin, "field '" + field + "' must be a matrix");
  return complex_matrix(v, static_cast<Eigen::Index>(v.size()), origin, field);
}

PositiveForm positive(const CMatrix& m, double rel, const std::string& origin,
                      const std::string& field) {
  try {
    return PositiveForm(m, rel);
  } catch (const Error& e) {
    throw Error(ErrorCode::ValidationError, origin + ": field '" + field + "': " + e.what());
  }
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line number.
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const long line = 1 + std::count(text.begin(), text.begin() + upto, '\n');
    parse_fail(origin, "line " + std::to_string(line) + ": " + e.what());
  }
}

Instance family_instance(const json& fam, const std::string& origin,
                         std::optional<DiagFamilySpec>& diag) {
  if (!fam.is_object() || !fam.contains("name") || !fam["name"].is_string())
    parse_fail(origin, "field 'family' needs a string 'name'");
  const std::string name = fam["name"];
  if (name == "diag") {
    if (!fam.contains("lambda") || !fam["lambda"].is_string())
      parse_fail(origin, "field 'family.lambda' must be a string");
    if (!fam.contains("N") || !fam["N"].is_number_integer())
      parse_fail(origin, "field 'family.N' must be an integer");
    diag = DiagFamilySpec{fam["lambda"], fam["N"]};
    if (diag->N < 1) throw Error(ErrorCode::ValidationError, origin + ": family.N must be ≥ 1");
    return make_diag_family(*diag)(diag->N);
  }
  if (name == "measure") {
    if (!fam.contains("theta") || !fam["theta"].is_array() || !fam.contains("omega") ||
        !fam["omega"].is_array())
      parse_fail(origin, "measure family needs arrays 'theta' and 'omega'");
    const auto& th = fam["theta"];
    const auto& om = fam["omega"];
    if (th.size() != om.size())
      throw Error(ErrorCode::ValidationError, origin + ": measure weights differ in length");
    RVector theta(th.size());
    CVector omega(om.size());
    for (std::size_t x = 0; x < th.size(); ++x) {
      theta(x) = number(th[x], origin, "family.theta");
      omega(x) = complex_entry(om[x], origin, "family.omega");
    }
    try {
      return measure_family(theta, omega);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ValidationError || e.code() == ErrorCode::PreconditionFails)
        throw Error(ErrorCode::ValidationError, origin + ": " + e.what());
      throw;
    }
  }
  if (name == "operator_pair") {
    if (!fam.contains("S") || !fam.contains("T"))
      parse_fail(origin, "operator_pair family needs matrices 'S' and 'T'");
    const CMatrix s = square_matrix(fam["S"], origin, "family.S");
    const CMatrix t = complex_matrix(fam["T"], s.rows(), origin, "family.T");
    return operator_pair_family(s, t);
  }
  throw Error(ErrorCode::ValidationError, origin + ": unknown family '" + name + "'");
}

void write_number(std::ostream& out, double v) {
  // "-0" would come back as the integer 0.
  if (v == 0 && std::signbit(v)) {
    out << "-0.0";
    return;
  }
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

void write_matrix(std::ostream& out, const CMatrix& m) {
  out << "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << (i ? ",\n    [" : "\n    [");
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out << (j ? ", [" : "[");
      write_number(out, m(i, j).real());
      out << ", ";
      write_number(out, m(i, j).imag());
      out << "]";
    }
    out << "]";
  }
  out << "\n  ]";
}

std::string escape(const std::string& s) { return json(s).dump(); }

}  // namespace

CMatrix parse_matrix_text(const std::string& text, Eigen::Index n, const std::string& field) {
  return complex_matrix(parse_json(text, field), n, field, field);
}

InstanceFile parse_instance_text(const std::string& text, const std::string& origin, double rel) {
  const json doc = parse_json(text, origin);
  if (!doc.is_object()) parse_fail(origin, "top level must be an object");
  InstanceFile out{{Form::zero(0), PositiveForm::zero(0), PositiveForm::zero(0), {}, {}, {}}, {}};

  if (doc.contains("family")) {
    out.instance = family_instance(doc["family"], origin, out.diag_family);
  } else {
    if (!doc.contains("n") || !doc["n"].is_number_integer())
      parse_fail(origin, "field 'n' must be an integer");
    const long n = doc["n"];
    if (n < 1) throw Error(ErrorCode::ValidationError, origin + ": field 'n' must be ≥ 1");
    if (!doc.contains("omega")) parse_fail(origin, "missing field 'omega'");
    Form omega(complex_matrix(doc["omega"], n, origin, "omega"));
    PositiveForm theta = doc.contains("theta")
                             ? positive(complex_matrix(doc["theta"], n, origin, "theta"), rel,
                                        origin, "theta")
                             : PositiveForm::identity(n);
    PositiveForm psi = doc.contains("psi")
                           ? positive(complex_matrix(doc["psi"], n, origin, "psi"), rel, origin,
                                      "psi")
                           : canonical_majorant(omega.matrix(), rel);
    out.instance = Instance{omega, theta, psi, std::nullopt, "explicit", {}};
    if (doc.contains("provenance") && doc["provenance"].is_string())
      out.instance.provenance = doc["provenance"];
  }
  if (doc.contains("norm_gram"))
    out.instance.norm_gram =
        complex_matrix(doc["norm_gram"], out.instance.n(), origin, "norm_gram");
  return out;
}

InstanceFile parse_instance(const std::string& path, double rel) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, path + ": cannot open file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance_text(buf.str(), path, rel);
}

std::string emit_instance(const Instance& inst) {
  std::ostringstream out;
  out << "{\n  \"n\": " << inst.n() << ",\n  \"provenance\": " << escape(inst.provenance)
      << ",\n  \"omega\": ";
  write_matrix(out, inst.omega.matrix());
  out << ",\n  \"theta\": ";
  write_matrix(out, inst.theta.matrix());
  out << ",\n  \"psi\": ";
  write_matrix(out, inst.psi.matrix());
  if (inst.norm_gram) {
    out << ",\n  \"norm_gram\": ";
    write_matrix(out, *inst.norm_gram);
  }
  out << "\n}\n";
  return out.str();
}

Family make_diag_family(const DiagFamilySpec& spec) {
  const Sequence seq = parse_sequence(spec.lambda);
  return [seq, label = spec.lambda](int N) { return diag_family(seq, N, label); };
}

}  // namespace formkit
