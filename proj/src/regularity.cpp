#include "formkit/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "formkit/numerical_range.hpp"

namespace formkit {
namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b)
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": dimensions " +
                                                  std::to_string(a) + " and " + std::to_string(b));
}

// Largest amount by which ‖M k‖ or ‖M^H k‖ exceeds the Cauchy–Schwarz
// allowance (Ψ(k,k)·‖Ψ‖)^{1/2} over the kernel basis of Ψ.
double kernel_excess(const CMatrix& m, const PositiveForm& psi, double rel) {
  const auto& eig = psi.eig();
  const Eigen::Index nulls = eig.null_count(rel);
  const double floor = 1e-12 * m.norm();
  double worst = -floor;
  for (Eigen::Index i = 0; i < nulls; ++i) {
    const auto k = eig.vectors.col(i);
    const double allowance = std::sqrt(std::max(0.0, eig.values(i)) * psi.norm()) * (1 + 1e-9);
    const double leak = std::max((m * k).norm(), (m.adjoint() * k).norm());
    worst = std::max(worst, leak - allowance - floor);
  }
  return worst;
}

// PSD part of a Hermitian matrix that is PSD up to rounding.
PositiveForm clamp_psd(const CMatrix& m) {
  const auto eig = hermitian_eig(m);
  return PositiveForm(eig.apply([](double t) { return std::max(t, 0.0); }));
}

CMatrix hermitian(const CMatrix& m) { return hermitian_part(m); }

// t⁻¹(1 − t²)^{1/2}.  Rounding in t ≈ 1 would otherwise surface as √ε noise,
// so 1 − t² below 1e−12 counts as saturated; the dropped part of Ψ is at most
// that fraction.
double s_weight_of(double t) {
  const double gap = 1.0 - t * t;
  return gap <= 1e-12 ? 0.0 : std::sqrt(gap) / t;
}

}  // namespace

ClassMResult in_class_M(const Form& omega, const PositiveForm& psi, double rel) {
  require_same_dim(omega.dim(), psi.dim(), "in_class_M");
  ClassMResult out;
  out.kernel_excess = kernel_excess(omega.matrix(), psi, rel);
  const QuotientEmbedding j = quotient_embedding(psi, rel);
  out.induced_norm = spectral_norm(j.pinv.adjoint() * omega.matrix() * j.pinv);
  out.margin = 1.0 - out.induced_norm;
  out.member = out.kernel_excess <= 0 && out.induced_norm <= 1.0 + 1e-9;
  return out;
}

EpsilonBound epsilon_bound_check(const Form& omega, const PositiveForm& psi, double rel) {
  require_same_dim(omega.dim(), psi.dim(), "epsilon_bound_check");
  if (kernel_excess(omega.matrix(), psi, rel) > 0)
    throw Error(ErrorCode::QuadraticBoundFails, "Ω does not vanish on N(Ψ)");
  const QuotientEmbedding j = quotient_embedding(psi, rel);
  const CMatrix w = j.pinv.adjoint() * omega.matrix() * j.pinv;
  EpsilonBound out;
  out.quadratic_radius = w.size() == 0 ? 0.0 : numerical_radius(w);
  if (out.quadratic_radius > 1.0 + 1e-9)
    throw Error(ErrorCode::QuadraticBoundFails,
                "max |Ω(ξ,ξ)|/Ψ(ξ,ξ) = " + std::to_string(out.quadratic_radius));
  out.epsilon = omega.is_symmetric(rel) ? 1.0 : 2.0;
  out.membership = in_class_M(omega, out.epsilon * psi, rel);
  if (!out.membership.member)
    throw Error(ErrorCode::TheoremViolation, "ε_Ω·Ψ failed the majorant test");
  return out;
}

ContinuityVerdict is_absolutely_continuous(const PositiveForm& psi, const PositiveForm& theta,
                                           double rel) {
  require_same_dim(psi.dim(), theta.dim(), "is_absolutely_continuous");
  ContinuityVerdict out;
  out.kernel_leak = kernel_leak(kernel(theta, rel), psi.matrix());
  out.holds = out.kernel_leak <= rel * psi.norm();
  return out;
}

PositiveForm canonical_majorant(const CMatrix& t, double rel) {
  require_square(t, "canonical_majorant operator");
  const Eigen::Index n = t.rows();
  const CMatrix h = psd_sqrt(CMatrix(t.adjoint() * t), rel);
  const CMatrix u = t * pinv(h, rel);
  return PositiveForm(hermitian(CMatrix::Identity(n, n) + h + u * h * u.adjoint()), rel);
}

RNRepresentation partial_representation(const Form& omega, const PositiveForm& theta,
                                        const PositiveForm& psi, double rel) {
  require_same_dim(omega.dim(), theta.dim(), "representation");
  require_same_dim(omega.dim(), psi.dim(), "representation");
  RNRepresentation rep{omega, theta, psi};
  const PositiveForm phi = theta + psi;
  rep.j_theta = quotient_embedding(theta, rel);
  rep.j_phi = quotient_embedding(phi, rel);
  const auto& jt = rep.j_theta;
  const auto& jp = rep.j_phi;
  const Eigen::Index rt = jt.rank();
  const Eigen::Index rp = jp.rank();

  // C = C_o^H C_o with C_o = J_Θ J_Φ⁺.  B = C^{1/2} is read off the SVD of
  // C_o so that ker B is resolved at the scale of B, not of B².
  rep.u = jt.J * jp.pinv;
  rep.C = rep.u.adjoint() * rep.u;
  rep.b_spectrum = RVector::Zero(rp);
  rep.b_vectors = CMatrix::Identity(rp, rp);
  if (rt > 0 && rp > 0) {
    Eigen::JacobiSVD<CMatrix> svd(rep.u, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    for (Eigen::Index k = 0; k < s.size(); ++k) rep.b_spectrum(k) = std::min(s(k), 1.0);
    rep.b_vectors = svd.matrixV();
  }
  const auto& t = rep.b_spectrum;
  const auto& v = rep.b_vectors;
  rep.b_cutoff = rp > 0 ? rel * t.maxCoeff() : 0.0;
  rep.B = v * t.asDiagonal() * v.adjoint();

  RVector s_weight = RVector::Zero(rp);
  RVector p_weight = RVector::Zero(rp);
  for (Eigen::Index k = 0; k < rp; ++k) {
    if (t(k) > rep.b_cutoff)
      s_weight(k) = s_weight_of(t(k));
    else
      p_weight(k) = 1.0;
  }
  rep.S = v * s_weight.asDiagonal() * v.adjoint();
  rep.P = v * p_weight.asDiagonal() * v.adjoint();

  rep.U = rep.B * jp.J * jt.pinv;
  rep.K = hermitian(rep.U.adjoint() * rep.S * rep.U);
  rep.H = psd_sqrt(CMatrix(CMatrix::Identity(rt, rt) + rep.K * rep.K), rel);

  rep.Y_phi = jp.pinv.adjoint() * omega.matrix() * jp.pinv;
  rep.Y = rep.u * rep.Y_phi * jp.J * jt.pinv;

  const CMatrix h2 = rep.H * rep.H;
  rep.gamma = clamp_psd(hermitian(jt.J.adjoint() * (h2 + rep.Y.adjoint() * h2 * rep.Y) * jt.J));
  return rep;
}

RNRepresentation radon_nikodym(const Form& omega, const PositiveForm& theta,
                               const PositiveForm& psi, double rel) {
  const ClassMResult m = in_class_M(omega, psi, rel);
  if (!m.member)
    throw Error(ErrorCode::NotInClassM, "majorant test failed, induced norm " +
                                            std::to_string(m.induced_norm));
  const ContinuityVerdict ac = is_absolutely_continuous(psi, theta, rel);
  if (!ac)
    throw Error(ErrorCode::NotAbsolutelyContinuous,
                "Ψ does not vanish on N(Θ), leak " + std::to_string(ac.kernel_leak));
  return partial_representation(omega, theta, psi, rel);
}

RNResiduals verify(const RNRepresentation& rep) {
  RNResiduals out;
  const CMatrix& jt = rep.j_theta.J;
  const CMatrix& jp = rep.j_phi.J;
  const CMatrix h2 = rep.H * rep.H;
  out.fundamental = relative_residual(jt.adjoint() * h2 * rep.Y * jt, rep.omega.matrix());
  out.k2 = relative_residual(jt.adjoint() * rep.K * rep.K * jt, rep.psi.matrix());
  const Eigen::Index rp = rep.j_phi.rank();
  const Eigen::Index rt = rep.j_theta.rank();
  out.second_kato = relative_residual(rep.u.adjoint() * h2 * rep.u, CMatrix::Identity(rp, rp));
  out.isometry = relative_residual(rep.U.adjoint() * rep.U, CMatrix::Identity(rt, rt));
  out.c_identity = relative_residual(jp.adjoint() * rep.C * jp, rep.theta.matrix());
  out.b_min = rp > 0 ? rep.b_spectrum.minCoeff() : 0.0;
  out.b_max = rp > 0 ? rep.b_spectrum.maxCoeff() : 0.0;
  out.gamma_min = min_eigenvalue(rep.gamma.matrix());
  return out;
}

KatoS kato_S(const RNRepresentation& rep, double rel) {
  KatoS out;
  out.S = rep.H * rep.Y * pinv(rep.H, rel);
  const CMatrix& jt = rep.j_theta.J;
  out.residual = relative_residual(jt.adjoint() * rep.H * out.S * rep.H * jt, rep.omega.matrix());
  out.norm = spectral_norm(out.S);
  return out;
}

PositiveForm dominated_sequence(const PositiveForm& psi, const PositiveForm& theta, int n,
                                double rel) {
  if (n < 1) throw Error(ErrorCode::PreconditionFails, "sequence index must be positive");
  if (!is_absolutely_continuous(psi, theta, rel))
    throw Error(ErrorCode::NotAbsolutelyContinuous, "Ψ does not vanish on N(Θ)");
  const RNRepresentation rep = partial_representation(Form::zero(psi.dim()), theta, psi, rel);
  const auto& t = rep.b_spectrum;
  RVector weight = RVector::Zero(t.size());
  const double floor = 1.0 / n;
  for (Eigen::Index k = 0; k < t.size(); ++k)
    if (t(k) > rep.b_cutoff && t(k) >= floor)
      weight(k) = s_weight_of(t(k));
  const CMatrix s_n = rep.b_vectors * weight.asDiagonal() * rep.b_vectors.adjoint();
  const CMatrix k_n = rep.U.adjoint() * s_n * rep.U;
  const CMatrix& jt = rep.j_theta.J;
  return clamp_psd(hermitian(jt.adjoint() * k_n * k_n * jt));
}

int stabilization_index(const PositiveForm& psi, const PositiveForm& theta, double rel) {
  const RNRepresentation rep = partial_representation(Form::zero(psi.dim()), theta, psi, rel);
  double t_min = 1.0;
  for (Eigen::Index k = 0; k < rep.b_spectrum.size(); ++k)
    if (rep.b_spectrum(k) > rep.b_cutoff) t_min = std::min(t_min, rep.b_spectrum(k));
  int n = static_cast<int>(std::ceil(1.0 / t_min));
  while (n > 1 && 1.0 / (n - 1) <= t_min) --n;
  while (1.0 / n > t_min) ++n;
  return n;
}

namespace {

struct SectorData {
  CMatrix re;
  CMatrix im;
  double re_norm;
  double im_norm;
};

SectorData sector_data(const Form& omega) {
  const ReImParts parts = re_im_split(omega);
  return {parts.re.matrix(), parts.im.matrix(), spectral_norm(parts.re.matrix()),
          spectral_norm(parts.im.matrix())};
}

// Eigenvalue rounding of γ(ReM − δM_Θ) ± ImM is O(ε·γ·scale), while a genuine
// violation near a kernel shrinks like 1/γ; a floor tied to the rank cutoff
// would swallow it at γ ≈ 2^20.
double sector_floor(const SectorData& d, const PositiveForm& theta, double delta, double gamma,
                    double rel) {
  const double scale = d.re_norm + std::abs(delta) * theta.norm() + d.im_norm;
  const double eps = std::min(rel, 1e3 * std::numeric_limits<double>::epsilon());
  return -eps * scale * std::max(1.0, gamma) - 1e-300;
}

}  // namespace

SectorialityCertificate sectorial_parameters(const Form& omega, const PositiveForm& theta,
                                             double delta, double gamma, double rel) {
  require_same_dim(omega.dim(), theta.dim(), "sectorial_parameters");
  if (gamma < 0) throw Error(ErrorCode::PreconditionFails, "sector slope must be nonnegative");
  const SectorData d = sector_data(omega);
  const CMatrix r = d.re - delta * theta.matrix();
  const double floor = sector_floor(d, theta, delta, gamma, rel);
  const double e1 = min_eigenvalue(r);
  if (e1 < floor)
    throw Error(ErrorCode::NotSectorial,
                "ReΩ ≥ δΘ fails: min eigenvalue " + std::to_string(e1) + " at δ = " +
                    std::to_string(delta));
  const double e2 = min_eigenvalue(CMatrix(gamma * r - d.im));
  const double e3 = min_eigenvalue(CMatrix(gamma * r + d.im));
  if (std::min(e2, e3) < floor)
    throw Error(ErrorCode::NotSectorial,
                "|ImΩ| ≤ γ(ReΩ − δΘ) fails: min eigenvalue " + std::to_string(std::min(e2, e3)) +
                    " at δ = " + std::to_string(delta) + ", γ = " + std::to_string(gamma));
  SectorialityCertificate cert{delta, gamma, std::min({e1, e2, e3}), false};
  const PositiveForm majorant = clamp_psd(hermitian((1.0 + gamma) * r));
  cert.class_m_certified =
      in_class_M(omega - Form(delta * theta.matrix()), majorant, rel).member;
  return cert;
}

SectorGrid sector_grid(const Form& omega, const PositiveForm& theta, double rel) {
  const SectorData d = sector_data(omega);
  const double re_min = min_eigenvalue(d.re);
  const QuotientEmbedding jt = quotient_embedding(theta, rel);
  const double hi = jt.rank() > 0 ? min_eigenvalue(jt.pinv.adjoint() * d.re * jt.pinv) : re_min;
  const double lo = std::min(re_min, hi) - 1.0;
  SectorGrid grid;
  constexpr int kDeltas = 32;
  for (int i = 0; i < kDeltas; ++i) grid.deltas.push_back(lo + (hi - lo) * i / (kDeltas - 1));
  for (int k = 0; k <= 20; ++k) grid.gammas.push_back(std::ldexp(1.0, k));
  return grid;
}

std::optional<SectorialityCertificate> search_sectorial_parameters(const Form& omega,
                                                                   const PositiveForm& theta,
                                                                   double rel) {
  const SectorGrid grid = sector_grid(omega, theta, rel);
  const SectorData d = sector_data(omega);
  for (auto it = grid.deltas.rbegin(); it != grid.deltas.rend(); ++it) {
    const double delta = *it;
    const CMatrix r = d.re - delta * theta.matrix();
    if (min_eigenvalue(r) < sector_floor(d, theta, delta, 1.0, rel)) continue;
    for (const double gamma : grid.gammas) {
      const double floor = sector_floor(d, theta, delta, gamma, rel);
      if (min_eigenvalue(CMatrix(gamma * r - d.im)) < floor) continue;
      if (min_eigenvalue(CMatrix(gamma * r + d.im)) < floor) continue;
      return sectorial_parameters(omega, theta, delta, gamma, rel);
    }
  }
  return std::nullopt;
}

bool sectorial_regularity(const Form& omega, const PositiveForm& theta,
                          const SectorialityCertificate& cert, double rel) {
  const ReImParts parts = re_im_split(omega);
  const PositiveForm r = clamp_psd(hermitian(parts.re.matrix() - cert.delta * theta.matrix()));
  return is_absolutely_continuous(r, theta, rel).holds;
}

RegularityCertificate certify_regular(const Form& omega, const PositiveForm& theta,
                                      const QuotientEmbedding& j_theta, const CMatrix& h,
                                      const CMatrix& y, const Tolerances& tol) {
  const CMatrix& jt = j_theta.J;
  const CMatrix h2 = h * h;
  RegularityCertificate out;
  out.representation_residual = relative_residual(jt.adjoint() * h2 * y * jt, omega.matrix());
  const PositiveForm gamma = clamp_psd(hermitian(jt.adjoint() * (h2 + y.adjoint() * h2 * y) * jt));
  out.membership = in_class_M(omega, gamma, tol.rank);
  out.continuity = is_absolutely_continuous(gamma, theta, tol.rank);
  out.regular = out.representation_residual <= tol.residual && out.membership.member &&
                out.continuity.holds;
  return out;
}

}  // namespace formkit
