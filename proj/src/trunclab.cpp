#include "formkit/trunclab.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "formkit/regularity.hpp"
#include "formkit/solvable.hpp"

namespace formkit {
namespace {

void require_member(const Instance& inst) {
  const ClassMResult m = in_class_M(inst.omega, inst.psi);
  if (!m.member)
    throw Error(ErrorCode::TheoremViolation,
                inst.provenance + ": suggested majorant fails, induced norm " +
                    std::to_string(m.induced_norm));
}

double phase(Complex z) { return z == Complex(0) ? 0.0 : std::arg(z); }

// Exact for integer exponents, which covers (−1)^n and friends.
Complex power(Complex base, Complex exponent) {
  const double e = exponent.real();
  if (exponent.imag() == 0 && e == std::floor(e) && std::abs(e) <= 1 << 20) {
    if (base.imag() == 0) return std::pow(base.real(), e);
    long k = static_cast<long>(std::abs(e));
    Complex acc = 1, b = base;
    while (k > 0) {
      if (k & 1) acc *= b;
      b *= b;
      k >>= 1;
    }
    return e < 0 ? 1.0 / acc : acc;
  }
  return std::pow(base, exponent);
}

// Recursive descent over
//   expr := term (('+'|'-') term)*
//   term := unary (('*'|'/') unary)*
//   unary := '-' unary | power
//   power := atom ('^' unary)?
//   atom := number | name | name '(' expr ')' | '(' expr ')'
class SequenceParser {
 public:
  explicit SequenceParser(std::string text) : s_(std::move(text)) {}

  Sequence parse() {
    Sequence out = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::ParseError,
                "sequence \"" + s_ + "\" at column " + std::to_string(pos_ + 1) + ": " + why);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Sequence expr() {
    Sequence lhs = term();
    for (;;) {
      if (eat('+')) {
        lhs = [a = lhs, b = term()](int n) { return a(n) + b(n); };
      } else if (eat('-')) {
        lhs = [a = lhs, b = term()](int n) { return a(n) - b(n); };
      } else {
        return lhs;
      }
    }
  }

  Sequence term() {
    Sequence lhs = unary();
    for (;;) {
      if (eat('*')) {
        lhs = [a = lhs, b = unary()](int n) { return a(n) * b(n); };
      } else if (eat('/')) {
        lhs = [a = lhs, b = unary()](int n) { return a(n) / b(n); };
      } else {
        return lhs;
      }
    }
  }

  Sequence unary() {
    if (eat('-')) return [a = unary()](int n) { return -a(n); };
    if (eat('+')) return unary();
    return power_term();
  }

  Sequence power_term() {
    Sequence base = atom();
    if (eat('^')) return [a = base, b = unary()](int n) { return power(a(n), b(n)); };
    return base;
  }

  Sequence atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    if (eat('(')) {
      Sequence inner = expr();
      if (!eat(')')) fail("expected ')'");
      return inner;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t used = 0;
      double value = 0;
      try {
        value = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      return [value](int) { return Complex(value); };
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string name = s_.substr(start, pos_ - start);
      if (name == "n") return [](int n) { return Complex(n); };
      if (name == "i") return [](int) { return Complex(0, 1); };
      if (name == "pi") return [](int) { return Complex(std::numbers::pi); };
      Complex (*fn)(Complex) = nullptr;
      if (name == "exp") fn = [](Complex z) { return std::exp(z); };
      else if (name == "sqrt") fn = [](Complex z) { return std::sqrt(z); };
      else if (name == "abs") fn = [](Complex z) { return Complex(std::abs(z)); };
      else if (name == "cos") fn = [](Complex z) { return std::cos(z); };
      else if (name == "sin") fn = [](Complex z) { return std::sin(z); };
      else if (name == "log") fn = [](Complex z) { return std::log(z); };
      else fail("unknown name '" + name + "'");
      if (!eat('(')) fail("expected '(' after " + name);
      Sequence arg = expr();
      if (!eat(')')) fail("expected ')'");
      return [fn, arg](int n) { return fn(arg(n)); };
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string s_;
  std::size_t pos_ = 0;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

Instance diag_family(const Sequence& lambda, int N, const std::string& label) {
  if (N < 1) throw Error(ErrorCode::PreconditionFails, "diag_family needs N ≥ 1");
  CVector values(N);
  for (int n = 1; n <= N; ++n) {
    values(n - 1) = lambda(n);
    if (!std::isfinite(values(n - 1).real()) || !std::isfinite(values(n - 1).imag()))
      throw Error(ErrorCode::NonFinite, "sequence value at n = " + std::to_string(n));
  }
  RVector modulus = values.cwiseAbs();
  CVector root(N), unit(N);
  for (int k = 0; k < N; ++k) {
    root(k) = std::sqrt(modulus(k));
    unit(k) = std::polar(1.0, phase(values(k)));
  }
  Instance inst{Form(values.asDiagonal()), PositiveForm::identity(N),
                PositiveForm(CMatrix(modulus.cast<Complex>().asDiagonal())), std::nullopt,
                "diag(" + label + ", N=" + std::to_string(N) + ")", {}};
  inst.witnesses.H = CMatrix(root.asDiagonal());
  inst.witnesses.Y = CMatrix(unit.asDiagonal());
  inst.witnesses.T = CMatrix(values.asDiagonal());
  require_member(inst);
  return inst;
}

Instance measure_family(const RVector& theta, const CVector& omega) {
  const Eigen::Index m = theta.size();
  if (m < 1) throw Error(ErrorCode::PreconditionFails, "measure_family needs m ≥ 1");
  if (omega.size() != m) throw Error(ErrorCode::DimensionMismatch, "measure weights");
  for (Eigen::Index x = 0; x < m; ++x)
    if (!(theta(x) >= 0)) throw Error(ErrorCode::ValidationError, "θ weights must be nonnegative");
  const RVector modulus = omega.cwiseAbs();
  Instance inst{Form(omega.asDiagonal()), PositiveForm(CMatrix(theta.cast<Complex>().asDiagonal())),
                PositiveForm(CMatrix(modulus.cast<Complex>().asDiagonal())), std::nullopt,
                "measure(m=" + std::to_string(m) + ")", {}};
  bool dominated = true;
  for (Eigen::Index x = 0; x < m; ++x)
    if (theta(x) == 0 && modulus(x) != 0) dominated = false;
  if (dominated) {
    RVector k = RVector::Zero(m), phi = RVector::Zero(m);
    for (Eigen::Index x = 0; x < m; ++x) {
      if (theta(x) > 0) k(x) = modulus(x) / theta(x);
      phi(x) = phase(omega(x));
    }
    inst.witnesses.k = k;
    inst.witnesses.phi = phi;
    // On H_Θ = ℓ²(θ) the witnesses act as multiplication by √k and e^{iφ}.
    CVector root(m), unit(m);
    for (Eigen::Index x = 0; x < m; ++x) {
      root(x) = std::sqrt(k(x));
      unit(x) = std::polar(1.0, phi(x));
    }
    inst.witnesses.H = CMatrix(root.asDiagonal());
    inst.witnesses.Y = CMatrix(unit.asDiagonal());
  }
  require_member(inst);
  return inst;
}

Instance operator_pair_family(const CMatrix& s, const CMatrix& t) {
  require_square(s, "S");
  require_square(t, "T");
  if (s.rows() != t.rows()) throw Error(ErrorCode::DimensionMismatch, "operator pair");
  require_finite(s, "S");
  require_finite(t, "T");
  const Eigen::Index n = s.rows();
  const CMatrix gram = CMatrix::Identity(n, n) + s.adjoint() * s + t.adjoint() * t;
  const CMatrix h = psd_sqrt(hermitian_part(gram));
  Instance inst{Form(t.adjoint() * s), PositiveForm::identity(n),
                PositiveForm(hermitian_part(CMatrix(h * h))), std::nullopt,
                "operator_pair(n=" + std::to_string(n) + ")", {}};
  inst.witnesses.H = h;
  require_member(inst);
  return inst;
}

Sequence parse_sequence(const std::string& expr) { return SequenceParser(expr).parse(); }

std::vector<DiagnosticsRow> convergence_report(const Family& family, const std::vector<int>& Ns,
                                               Complex probe, int grid) {
  for (std::size_t k = 1; k < Ns.size(); ++k)
    if (Ns[k] <= Ns[k - 1]) throw Error(ErrorCode::PreconditionFails, "N list must ascend");
  std::vector<DiagnosticsRow> rows;
  for (const int N : Ns) {
    const Instance inst = family(N);
    DiagnosticsRow row{};
    row.N = N;
    const ReImParts parts = re_im_split(inst.omega);
    row.min_re = min_eigenvalue(parts.re.matrix());
    const auto cert = search_sectorial_parameters(inst.omega, inst.theta);
    row.sectorial_certified = cert.has_value();
    if (cert) {
      row.sector_delta = cert->delta;
      row.sector_gamma = cert->gamma;
    }
    const NumericalRangeHull hull = numerical_range_hull(inst.omega, grid);
    row.hull_area = hull.area();
    row.hull_radius = hull.radius();
    row.probe_distance = hull.distance(probe);
    const SolvabilityReport rep =
        solvability_with_scalar(inst.omega, NormGram::from_majorant(inst.psi), probe);
    row.resolvent_norm = rep.resolvent_norm;
    row.condition = rep.c1 > 0 ? rep.c2 / rep.c1 : std::numeric_limits<double>::infinity();
    rows.push_back(row);
  }
  return rows;
}

std::string format_report(const std::vector<DiagnosticsRow>& rows, Complex probe) {
  std::ostringstream out;
  out << "probe λ = " << fmt(probe.real()) << (probe.imag() < 0 ? " - " : " + ")
      << fmt(std::abs(probe.imag())) << "i\n";
  out << "N\tmin_re\tsectorial\tdelta\tgamma\thull_area\thull_radius\tdist\tresolvent\tcond\n";
  for (const auto& r : rows) {
    out << r.N << '\t' << fmt(r.min_re) << '\t' << (r.sectorial_certified ? "certified" : "refused")
        << '\t' << (r.sector_delta ? fmt(*r.sector_delta) : "-") << '\t'
        << (r.sector_gamma ? fmt(*r.sector_gamma) : "-") << '\t' << fmt(r.hull_area) << '\t'
        << fmt(r.hull_radius) << '\t' << fmt(r.probe_distance) << '\t'
        << (r.resolvent_norm ? fmt(*r.resolvent_norm) : "-") << '\t' << fmt(r.condition) << '\n';
  }
  return out.str();
}

}  // namespace formkit
