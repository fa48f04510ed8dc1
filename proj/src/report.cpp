#include "formkit/report.hpp"

#include <cstdio>
#include <sstream>

#include "formkit/lebesgue.hpp"
#include "formkit/regularity.hpp"
#include "formkit/solvable.hpp"

namespace formkit {
namespace {

using nlohmann::json;

json cplx(Complex z) { return json::array({z.real(), z.imag()}); }

json matrix(const CMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(cplx(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json real_vector(const RVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

Report header(const std::string& cmd, const InstanceFile& file, const CommandOptions& opts) {
  Report r;
  r["command"] = cmd;
  r["instance"] = {{"n", file.instance.n()}, {"provenance", file.instance.provenance}};
  r["tolerances"] = {{"rank", opts.tol.rank}, {"residual", opts.tol.residual}};
  return r;
}

json class_m(const ClassMResult& m) {
  return {{"member", m.member},
          {"margin", m.margin},
          {"induced_norm", m.induced_norm},
          {"kernel_excess", m.kernel_excess}};
}

json continuity(const ContinuityVerdict& v) {
  return {{"holds", v.holds}, {"kernel_leak", v.kernel_leak}, {"note", ContinuityVerdict::note}};
}

json rn_residuals(const RNResiduals& r) {
  return {{"fundamental", r.fundamental}, {"k2", r.k2},
          {"second_kato", r.second_kato}, {"isometry", r.isometry},
          {"c_identity", r.c_identity},   {"b_min", r.b_min},
          {"b_max", r.b_max},             {"gamma_min", r.gamma_min}};
}

Report inspect(const InstanceFile& file, const CommandOptions& opts) {
  const Instance& inst = file.instance;
  const double rel = opts.tol.rank;
  Report r = header("inspect", file, opts);
  const ReImParts parts = re_im_split(inst.omega);
  r["omega"] = {{"hermitian", inst.omega.is_symmetric(rel)},
                {"norm", spectral_norm(inst.omega.matrix())},
                {"re_norm", spectral_norm(parts.re.matrix())},
                {"im_norm", spectral_norm(parts.im.matrix())},
                {"min_re_eigenvalue", min_eigenvalue(parts.re.matrix())}};
  r["theta"] = {{"rank", quotient_embedding(inst.theta, rel).rank()},
                {"norm", inst.theta.norm()},
                {"kernel_dim", inst.theta.eig().null_count(rel)}};
  r["psi"] = {{"rank", quotient_embedding(inst.psi, rel).rank()},
              {"norm", inst.psi.norm()},
              {"kernel_dim", inst.psi.eig().null_count(rel)}};
  r["theta_dominated_by_psi"] = optional_number(dominates(inst.theta, inst.psi, rel));
  r["psi_in_class_M"] = class_m(in_class_M(inst.omega, inst.psi, rel));
  r["psi_absolutely_continuous"] = continuity(is_absolutely_continuous(inst.psi, inst.theta, rel));
  return r;
}

Report membership(const InstanceFile& file, const CommandOptions& opts) {
  const Instance& inst = file.instance;
  Report r = header("membership", file, opts);
  r["class_M"] = class_m(in_class_M(inst.omega, inst.psi, opts.tol.rank));
  try {
    const EpsilonBound eb = epsilon_bound_check(inst.omega, inst.psi, opts.tol.rank);
    r["quadratic_bound"] = {{"holds", true},
                            {"epsilon", eb.epsilon},
                            {"quadratic_radius", eb.quadratic_radius},
                            {"scaled_membership", class_m(eb.membership)}};
  } catch (const Error& e) {
    if (e.code() != ErrorCode::QuadraticBoundFails) throw;
    r["quadratic_bound"] = {{"holds", false}, {"reason", e.what()}};
  }
  return r;
}

Report regularity(const InstanceFile& file, const CommandOptions& opts) {
  const Instance& inst = file.instance;
  const double rel = opts.tol.rank;
  Report r = header("regularity", file, opts);
  const ContinuityVerdict ac = is_absolutely_continuous(inst.psi, inst.theta, rel);
  r["psi_absolutely_continuous"] = continuity(ac);
  const RNRepresentation rep = radon_nikodym(inst.omega, inst.theta, inst.psi, rel);
  const RegularityCertificate cert =
      certify_regular(inst.omega, inst.theta, rep.j_theta, rep.H, rep.Y, opts.tol);
  r["certificate"] = {{"regular", cert.regular},
                      {"representation_residual", cert.representation_residual},
                      {"gamma_in_class_M", class_m(cert.membership)},
                      {"gamma_absolutely_continuous", continuity(cert.continuity)}};
  r["residuals"] = rn_residuals(verify(rep));
  if (const auto sc = search_sectorial_parameters(inst.omega, inst.theta, rel)) {
    r["sectorial"] = {{"certified", true},
                      {"delta", sc->delta},
                      {"gamma", sc->gamma},
                      {"margin", sc->margin},
                      {"class_m_certified", sc->class_m_certified},
                      {"regular", sectorial_regularity(inst.omega, inst.theta, *sc, rel)}};
  } else {
    r["sectorial"] = {{"certified", false},
                      {"note", "no grid point certifies; this is not a proof of non-sectoriality"}};
  }
  return r;
}

Report represent(const InstanceFile& file, const CommandOptions& opts) {
  const Instance& inst = file.instance;
  const double rel = opts.tol.rank;
  Report r = header("represent", file, opts);
  const RNRepresentation rep = radon_nikodym(inst.omega, inst.theta, inst.psi, rel);
  const KatoS ks = kato_S(rep, rel);
  r["H"] = matrix(rep.H);
  r["Y"] = matrix(rep.Y);
  r["S"] = matrix(ks.S);
  r["J_theta"] = matrix(rep.j_theta.J);
  r["b_spectrum"] = real_vector(rep.b_spectrum);
  r["residuals"] = rn_residuals(verify(rep));
  r["kato_S"] = {{"residual", ks.residual}, {"norm", ks.norm}};
  r["stabilization_index"] = stabilization_index(inst.psi, inst.theta, rel);
  return r;
}

Report decompose(const InstanceFile& file, const CommandOptions& opts) {
  const Instance& inst = file.instance;
  const double rel = opts.tol.rank;
  Report r = header("decompose", file, opts);
  const LebesgueSplit split = lebesgue_decompose(inst.omega, inst.theta, inst.psi, rel);
  const SplitCheck check = check_split(split, opts.tol);
  r["omega_r"] = matrix(split.omega_r.matrix());
  r["omega_s"] = matrix(split.omega_s.matrix());
  r["P"] = matrix(split.P);
  r["additivity_residual"] = check.additivity;
  r["regular_part"] = {{"regular", check.regular.regular},
                       {"representation_residual", check.regular.representation_residual},
                       {"gamma_in_class_M", class_m(check.regular.membership)},
                       {"gamma_absolutely_continuous", continuity(check.regular.continuity)}};
  r["witness_residuals"] = {{"theta", check.witness_theta}, {"omega_s", check.witness_omega}};
  const PositiveSplit ps = positive_lebesgue(inst.psi, inst.theta, rel);
  r["psi_split"] = {{"psi_a", matrix(ps.psi_a.matrix())}, {"psi_s", matrix(ps.psi_s.matrix())}};
  return r;
}

Report numrange(const InstanceFile& file, const CommandOptions& opts) {
  const Instance& inst = file.instance;
  Report r = header("numrange", file, opts);
  const NumericalRangeHull hull = numerical_range_hull(inst.omega, opts.grid);
  r["grid"] = opts.grid;
  r["scale"] = hull.scale();
  r["area"] = hull.area();
  r["radius"] = hull.radius();
  json eig = json::array();
  Eigen::ComplexEigenSolver<CMatrix> solver(inst.omega.matrix());
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    const Complex z = solver.eigenvalues()(k);
    eig.push_back({{"value", cplx(z)},
                   {"hull_distance", hull.distance(z)},
                   {"location", std::string(to_string(hull.locate(z)))}});
  }
  r["eigenvalues"] = eig;
  json samples = json::array();
  for (const auto& s : hull.samples())
    samples.push_back(
        {{"angle", s.angle}, {"support", s.value}, {"extreme_point", cplx(s.extreme_point)}});
  r["samples"] = samples;
  return r;
}

Report solvable(const InstanceFile& file, const CommandOptions& opts) {
  const Instance& inst = file.instance;
  const double rel = opts.tol.rank;
  Report r = header("solvable", file, opts);
  const NormGram g = inst.norm_gram ? NormGram(*inst.norm_gram, rel)
                                    : NormGram::from_majorant(inst.psi);
  r["norm"] = inst.norm_gram ? "norm_gram" : "I + psi";
  const CompatibilityResult compat = validate_compatible_norm(g, inst.theta, rel);
  r["theta_compatible"] = {{"compatible", compat.compatible},
                           {"slack", compat.slack},
                           {"note", CompatibilityResult::note}};
  if (opts.lambda.has_value() == opts.upsilon.has_value())
    throw Error(ErrorCode::ParseError, "solvable needs exactly one of --lambda or --upsilon");

  if (opts.lambda) {
    const Complex lambda = *opts.lambda;
    const NumericalRangeHull hull = numerical_range_hull(inst.omega, opts.grid);
    const ScalarSolvability s = scalar_solvability(inst.omega, g, hull, lambda, rel);
    const SolvabilityReport rep = solvability_with_scalar(inst.omega, g, lambda, rel);
    r["lambda"] = cplx(lambda);
    r["solvable"] = s.solvable;
    r["hull_distance"] = s.distance;
    r["location"] = std::string(to_string(s.location));
    r["resolvent_norm"] = optional_number(s.resolvent_norm);
    r["c1"] = rep.c1;
    r["c2"] = rep.c2;
    r["c1_adjoint"] = rep.c1_adjoint;
    r["lu_invertible"] = rep.lu_invertible;
    r["trivial_kernel"] = rep.trivial_kernel;
    r["note"] = ScalarSolvability::note;
    return r;
  }
  const Form upsilon(parse_matrix_text(*opts.upsilon, inst.n(), "upsilon"));
  const SolvabilityReport rep = solvability_with(inst.omega, g, upsilon, rel);
  r["solvable"] = rep.solvable;
  r["c1"] = rep.c1;
  r["c2"] = rep.c2;
  r["c1_adjoint"] = rep.c1_adjoint;
  r["c2_adjoint"] = rep.c2_adjoint;
  r["lu_invertible"] = rep.lu_invertible;
  r["trivial_kernel"] = rep.trivial_kernel;
  if (rep.solvable) r["T"] = matrix(represent_operator(inst.omega, g, upsilon, {}, rel).T);
  return r;
}

Report lab(const InstanceFile& file, const CommandOptions& opts) {
  if (!file.diag_family)
    throw Error(ErrorCode::ValidationError, "lab needs an instance with a \"diag\" family block");
  Report r = header("lab", file, opts);
  const auto rows = convergence_report(make_diag_family(*file.diag_family), opts.Ns, opts.probe,
                                       opts.grid);
  r["family"] = {{"name", "diag"}, {"lambda", file.diag_family->lambda}};
  r["probe"] = cplx(opts.probe);
  json table = json::array();
  for (const auto& row : rows)
    table.push_back({{"N", row.N},
                     {"min_re", row.min_re},
                     {"sectorial", row.sectorial_certified ? "certified" : "refused"},
                     {"delta", optional_number(row.sector_delta)},
                     {"gamma", optional_number(row.sector_gamma)},
                     {"hull_area", row.hull_area},
                     {"hull_radius", row.hull_radius},
                     {"probe_distance", row.probe_distance},
                     {"resolvent_norm", optional_number(row.resolvent_norm)},
                     {"condition", row.condition}});
  r["rows"] = table;
  r["note"] = "diagnostics of truncations; they certify nothing about the infinite family";
  return r;
}

bool is_complex(const json& v) {
  return v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number();
}

bool is_complex_matrix(const json& v) {
  if (!v.is_array() || v.empty()) return false;
  for (const auto& row : v) {
    if (!row.is_array() || row.empty()) return false;
    for (const auto& e : row)
      if (!is_complex(e)) return false;
  }
  return true;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string complex_text(const json& v) {
  const double re = v[0].get<double>();
  const double im = v[1].get<double>();
  return num(re) + (std::signbit(im) ? " - " : " + ") + num(std::abs(im)) + "i";
}

std::string scalar_text(const json& v) {
  if (v.is_null()) return "-";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number()) return num(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  if (is_complex(v)) return complex_text(v);
  return v.dump();
}

void render(std::ostream& out, const std::string& key, const json& v, int depth) {
  const std::string pad(2 * depth, ' ');
  if (v.is_object()) {
    out << pad << key << ":\n";
    for (const auto& [k, item] : v.items()) render(out, k, item, depth + 1);
  } else if (is_complex_matrix(v)) {
    out << pad << key << ":\n";
    for (const auto& row : v) {
      out << pad << "  [";
      for (std::size_t j = 0; j < row.size(); ++j)
        out << (j ? ", " : "") << complex_text(row[j]);
      out << "]\n";
    }
  } else if (v.is_array() && !is_complex(v)) {
    out << pad << key << ":";
    bool flat = true;
    for (const auto& e : v)
      if (e.is_object() || (e.is_array() && !is_complex(e))) flat = false;
    if (flat) {
      for (std::size_t j = 0; j < v.size(); ++j) out << (j ? ", " : " ") << scalar_text(v[j]);
      out << "\n";
    } else {
      out << "\n";
      for (std::size_t j = 0; j < v.size(); ++j) render(out, "- " + std::to_string(j), v[j], depth + 1);
    }
  } else {
    out << pad << key << ": " << scalar_text(v) << "\n";
  }
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"inspect",   "membership", "regularity", "represent",
                                              "decompose", "numrange",   "solvable",   "lab"};
  return names;
}

Report run_command(const std::string& cmd, const InstanceFile& file, const CommandOptions& opts) {
  if (cmd == "inspect") return inspect(file, opts);
  if (cmd == "membership") return membership(file, opts);
  if (cmd == "regularity") return regularity(file, opts);
  if (cmd == "represent") return represent(file, opts);
  if (cmd == "decompose") return decompose(file, opts);
  if (cmd == "numrange") return numrange(file, opts);
  if (cmd == "solvable") return solvable(file, opts);
  if (cmd == "lab") return lab(file, opts);
  throw Error(ErrorCode::ParseError, "unknown command '" + cmd + "'");
}

std::string render_text(const Report& report) {
  std::ostringstream out;
  for (const auto& [k, v] : report.items()) render(out, k, v, 0);
  return out.str();
}

Complex parse_complex_flag(const std::string& text, const std::string& flag) {
  std::istringstream in(text);
  double re = 0, im = 0;
  char comma = 0;
  if (!(in >> re)) throw Error(ErrorCode::ParseError, flag + ": expected re,im");
  if (in >> comma) {
    if (comma != ',' || !(in >> im)) throw Error(ErrorCode::ParseError, flag + ": expected re,im");
  }
  in >> std::ws;
  if (!in.eof()) throw Error(ErrorCode::ParseError, flag + ": trailing characters");
  return {re, im};
}

std::vector<int> parse_int_list(const std::string& text, const std::string& flag) {
  std::vector<int> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size() || v < 1) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, flag + ": bad entry '" + item + "'");
    }
  }
  if (out.empty()) throw Error(ErrorCode::ParseError, flag + ": empty list");
  return out;
}

}  // namespace formkit
