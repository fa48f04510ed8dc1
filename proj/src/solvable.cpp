#include "formkit/solvable.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace formkit {
namespace {

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

}  // namespace

NormGram::NormGram(CMatrix g, double rel) : g_(std::move(g)) {
  require_square(g_, "norm Gram matrix");
  const auto eig = hermitian_eig(g_, rel);
  if (eig.size() > 0 && eig.min_value() <= rel * eig.max_abs())
    throw Error(ErrorCode::ValidationError,
                "norm Gram matrix is not positive definite, min eigenvalue " +
                    std::to_string(eig.min_value()));
  inv_sqrt_ = eig.apply([](double t) { return 1.0 / std::sqrt(t); });
}

NormGram NormGram::from_majorant(const PositiveForm& psi) {
  return NormGram(CMatrix::Identity(psi.dim(), psi.dim()) + psi.matrix());
}

CompatibilityResult validate_compatible_norm(const NormGram& g, const PositiveForm& theta,
                                             double rel) {
  if (g.dim() != theta.dim()) throw Error(ErrorCode::DimensionMismatch, "norm compatibility");
  const double slack = min_eigenvalue(CMatrix(g.matrix() - theta.matrix()));
  const double scale = std::max(spectral_norm(g.matrix()), theta.norm());
  return {slack >= -rel * scale, slack};
}

std::string_view to_string(HullLocation loc) {
  switch (loc) {
    case HullLocation::Outside: return "outside";
    case HullLocation::BoundaryInconclusive: return "boundary-inconclusive";
    case HullLocation::Inside: return "inside";
  }
  return "unknown";
}

NumericalRangeHull::NumericalRangeHull(std::vector<SupportSample> samples, double scale)
    : samples_(std::move(samples)), scale_(scale) {}

double NumericalRangeHull::distance(Complex lambda) const {
  double best = 0;
  for (const auto& s : samples_) {
    const double proj = (std::polar(1.0, -s.angle) * lambda).real();
    best = std::max(best, proj - s.value);
  }
  return best;
}

double NumericalRangeHull::interior_depth(Complex lambda) const {
  const std::size_t n = samples_.size();
  double depth = std::numeric_limits<double>::infinity();
  int edges = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const Complex p = samples_[k].extreme_point;
    const Complex q = samples_[(k + 1) % n].extreme_point;
    const double len = std::abs(q - p);
    if (len <= 1e-14 * scale_) continue;
    ++edges;
    depth = std::min(depth, cross(q - p, lambda - p) / len);
  }
  if (edges < 3 || depth <= 0) return 0.0;
  return depth;
}

HullLocation NumericalRangeHull::locate(Complex lambda, double band) const {
  if (distance(lambda) > band * scale_) return HullLocation::Outside;
  if (interior_depth(lambda) > band * scale_) return HullLocation::Inside;
  return HullLocation::BoundaryInconclusive;
}

double NumericalRangeHull::area() const {
  double twice = 0;
  const std::size_t n = samples_.size();
  for (std::size_t k = 0; k < n; ++k)
    twice += cross(samples_[k].extreme_point, samples_[(k + 1) % n].extreme_point);
  return std::abs(twice) / 2;
}

double NumericalRangeHull::radius() const {
  double best = 0;
  for (const auto& s : samples_) best = std::max(best, s.value);
  return best;
}

std::vector<Complex> NumericalRangeHull::extreme_points() const {
  std::vector<Complex> out;
  out.reserve(samples_.size());
  for (const auto& s : samples_) out.push_back(s.extreme_point);
  return out;
}

NumericalRangeHull numerical_range_hull(const Form& omega, int grid) {
  if (grid < 16) throw Error(ErrorCode::PreconditionFails, "hull grid needs at least 16 angles");
  std::vector<SupportSample> samples;
  samples.reserve(grid);
  for (int k = 0; k < grid; ++k)
    samples.push_back(support_sample(omega.matrix(), 2 * std::numbers::pi * k / grid));
  const double norm = spectral_norm(omega.matrix());
  return NumericalRangeHull(std::move(samples), norm > 0 ? norm : 1.0);
}

SolvabilityReport solvability_with(const Form& omega, const NormGram& g, const Form& upsilon,
                                   double rel) {
  const Eigen::Index n = omega.dim();
  if (g.dim() != n || upsilon.dim() != n)
    throw Error(ErrorCode::DimensionMismatch, "solvability_with");
  const auto compat = validate_compatible_norm(g, PositiveForm::identity(n), rel);
  if (!compat)
    throw Error(ErrorCode::IncompatibleNorm,
                "‖·‖_Ω does not dominate the Hilbert norm, slack " + std::to_string(compat.slack));
  SolvabilityReport r;
  r.upsilon = upsilon;
  r.A = omega.matrix() + upsilon.matrix();
  r.T = omega.matrix();

  const CMatrix normalized = g.inv_sqrt() * r.A * g.inv_sqrt();
  Eigen::JacobiSVD<CMatrix> primal(normalized);
  r.c2 = primal.singularValues()(0);
  r.c1 = primal.singularValues()(n - 1);
  Eigen::JacobiSVD<CMatrix> dual(CMatrix(normalized.adjoint()));
  r.c2_adjoint = dual.singularValues()(0);
  r.c1_adjoint = dual.singularValues()(n - 1);
  r.solvable = r.c2 > 0 && r.c1 > rel * r.c2;

  Eigen::FullPivLU<CMatrix> lu(r.A);
  lu.setThreshold(rel);
  r.lu_invertible = lu.isInvertible();
  Eigen::JacobiSVD<CMatrix> plain(r.A);
  const auto& s = plain.singularValues();
  r.trivial_kernel = s(0) > 0 && s(n - 1) > rel * s(0);
  return r;
}

SolvabilityReport solvability_with_scalar(const Form& omega, const NormGram& g, Complex lambda,
                                          double rel) {
  const Eigen::Index n = omega.dim();
  SolvabilityReport r = solvability_with(omega, g, Form(-lambda * CMatrix::Identity(n, n)), rel);
  r.lambda = lambda;
  if (r.solvable) {
    Eigen::JacobiSVD<CMatrix> svd(r.A);
    r.resolvent_norm = 1.0 / svd.singularValues()(n - 1);
  }
  return r;
}

RepresentedOperator represent_operator(const Form& omega, const NormGram& g,
                                       const Form& upsilon, std::optional<Complex> lambda,
                                       double rel) {
  const SolvabilityReport report = solvability_with(omega, g, upsilon, rel);
  if (!report.solvable)
    throw Error(ErrorCode::NotSolvable,
                "X_Υ is not invertible, inf-sup constant " + std::to_string(report.c1));
  RepresentedOperator out{omega.matrix(), lambda, std::nullopt};
  if (lambda) {
    const Eigen::Index n = omega.dim();
    const CMatrix scalar = -*lambda * CMatrix::Identity(n, n);
    if ((upsilon.matrix() - scalar).norm() > 1e-12 * std::max(1.0, scalar.norm()))
      throw Error(ErrorCode::PreconditionFails, "Υ is not −λι for the given λ");
    Eigen::JacobiSVD<CMatrix> svd(CMatrix(out.T - *lambda * CMatrix::Identity(n, n)));
    const auto& s = svd.singularValues();
    if (!(s(n - 1) > rel * s(0)))
      throw Error(ErrorCode::TheoremViolation, "solvable with Υ = −λι but T − λ is singular");
    out.resolvent_norm = 1.0 / s(n - 1);
  }
  return out;
}

ScalarSolvability scalar_solvability(const Form& omega, const NormGram& g, Complex lambda,
                                     int grid, double rel) {
  return scalar_solvability(omega, g, numerical_range_hull(omega, grid), lambda, rel);
}

ScalarSolvability scalar_solvability(const Form& omega, const NormGram& g,
                                     const NumericalRangeHull& hull, Complex lambda, double rel) {
  const SolvabilityReport report = solvability_with_scalar(omega, g, lambda, rel);
  ScalarSolvability out{report.solvable, hull.distance(lambda), hull.locate(lambda), report.c1,
                        report.resolvent_norm};
  if (out.location == HullLocation::Outside && !out.solvable)
    throw Error(ErrorCode::TheoremViolation,
                "λ lies outside the numerical range but −λι is not in 𝔓(Ω)");
  return out;
}

}  // namespace formkit
