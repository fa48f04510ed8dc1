#include "formkit/lebesgue.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace formkit {
namespace {

PositiveForm clamp_psd(const CMatrix& m) {
  const auto eig = hermitian_eig(hermitian_part(m));
  return PositiveForm(eig.apply([](double t) { return std::max(t, 0.0); }));
}

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b)
    throw Error(ErrorCode::DimensionMismatch, std::string(what) + ": dimensions " +
                                                  std::to_string(a) + " and " + std::to_string(b));
}

struct WitnessResidual {
  CVector xi_prime;
  double theta;
  double omega;
};

WitnessResidual witness(const Form& omega_s, const PositiveForm& theta, const LebesgueSplit& split,
                        const CVector& xi) {
  const auto& jp = split.rep.j_phi;
  WitnessResidual out;
  out.xi_prime = jp.pinv * (split.P * (jp.J * xi));
  const double xi2 = xi.squaredNorm();
  const double t_norm = theta.norm();
  const double o_norm = spectral_norm(omega_s.matrix());
  const double theta_value = std::abs(theta(out.xi_prime));
  const double omega_value = std::abs(omega_s(out.xi_prime - xi, out.xi_prime - xi));
  // Residuals relative to ‖·‖·‖ξ‖²; an exactly zero form only tolerates exact zero.
  out.theta = theta_value == 0 ? 0.0 : theta_value / (t_norm * xi2);
  out.omega = omega_value == 0 ? 0.0 : omega_value / (o_norm * xi2);
  return out;
}

}  // namespace

LebesgueSplit lebesgue_decompose(const Form& omega, const PositiveForm& theta,
                                 const PositiveForm& psi, double rel) {
  const ClassMResult m = in_class_M(omega, psi, rel);
  if (!m.member)
    throw Error(ErrorCode::NotInClassM,
                "majorant test failed, induced norm " + std::to_string(m.induced_norm));
  LebesgueSplit split{omega, omega, CMatrix(), CMatrix(),
                      partial_representation(omega, theta, psi, rel)};
  const RNRepresentation& rep = split.rep;
  const CMatrix& jt = rep.j_theta.J;
  const CMatrix& jp = rep.j_phi.J;
  const Eigen::Index rp = rep.j_phi.rank();
  split.P = rep.P;
  const CMatrix not_p = CMatrix::Identity(rp, rp) - rep.P;
  split.Z = rep.u * rep.Y_phi * not_p * jp * rep.j_theta.pinv;

  const CMatrix h2 = rep.H * rep.H;
  split.omega_r = Form(jt.adjoint() * h2 * split.Z * jt);
  split.omega_s = Form(jt.adjoint() * h2 * rep.u * rep.Y_phi * rep.P * jp +
                       jp.adjoint() * rep.P * rep.Y_phi * jp);
  return split;
}

SplitCheck check_split(const LebesgueSplit& split, const Tolerances& tol) {
  const RNRepresentation& rep = split.rep;
  SplitCheck out;
  out.additivity = relative_residual(split.omega_r.matrix() + split.omega_s.matrix(),
                                     rep.omega.matrix());
  out.regular = certify_regular(split.omega_r, rep.theta, rep.j_theta, rep.H, split.Z, tol);
  out.witness_theta = 0;
  out.witness_omega = 0;
  const Eigen::Index n = rep.omega.dim();
  for (Eigen::Index i = 0; i < n; ++i) {
    const WitnessResidual w =
        witness(split.omega_s, rep.theta, split, CVector::Unit(n, i));
    out.witness_theta = std::max(out.witness_theta, w.theta);
    out.witness_omega = std::max(out.witness_omega, w.omega);
  }
  return out;
}

PositiveSplit positive_lebesgue(const PositiveForm& psi, const PositiveForm& theta, double rel) {
  require_same_dim(psi.dim(), theta.dim(), "positive_lebesgue");
  const RNRepresentation rep = partial_representation(Form::zero(psi.dim()), theta, psi, rel);
  const CMatrix& jt = rep.j_theta.J;
  const CMatrix& jp = rep.j_phi.J;
  return {clamp_psd(jt.adjoint() * rep.K * rep.K * jt), clamp_psd(jp.adjoint() * rep.P * jp)};
}

PositiveForm scaled_parallel_sum(const PositiveForm& a, const PositiveForm& b, double n,
                                 double rel) {
  require_same_dim(a.dim(), b.dim(), "parallel_sum");
  if (!(n > 0)) throw Error(ErrorCode::PreconditionFails, "parallel sum multiplier must be positive");
  // Whitened by A + B, A and B become I − c and c for one commuting c with
  // spectrum in [0, 1]; A:(nB) is then the scalar map below on each
  // eigenvalue, which never forms the badly scaled A + nB.  c = t² is read
  // off the singular values t of J_B J_{A+B}⁺ so that rounding lands on t, not
  // on c: as n grows f sends any c > 0 to 1 − c, and an O(ε) error in c would
  // surface as an O(1) error in the limit.
  const QuotientEmbedding j = quotient_embedding(a + b, rel);
  const Eigen::Index n_dim = a.dim();
  if (j.rank() == 0) return PositiveForm::zero(n_dim);
  const QuotientEmbedding jb = quotient_embedding(b, rel);
  RVector t = RVector::Zero(j.rank());
  CMatrix v = CMatrix::Identity(j.rank(), j.rank());
  if (jb.rank() > 0) {
    Eigen::JacobiSVD<CMatrix> svd(jb.J * j.pinv, Eigen::ComputeFullV);
    t.head(svd.singularValues().size()) = svd.singularValues();
    v = svd.matrixV();
  }
  // Same cutoffs as the B-spectrum of the representation: t ≤ rel·t_max is
  // ker B, 1 − t² ≤ 1e−12 is saturated.
  const double cutoff = rel * t.maxCoeff();
  RVector f(t.size());
  for (Eigen::Index k = 0; k < t.size(); ++k) {
    const double c = std::min(t(k) * t(k), 1.0);
    if (t(k) <= cutoff || 1 - c <= 1e-12)
      f(k) = 0;
    else
      f(k) = n * c * (1 - c) / (1 - c + n * c);
  }
  const CMatrix w = j.J.adjoint() * v;
  return clamp_psd(w * f.cast<Complex>().asDiagonal() * w.adjoint());
}

PositiveForm parallel_sum(const PositiveForm& a, const PositiveForm& b, double rel) {
  return scaled_parallel_sum(a, b, 1.0, rel);
}

ParallelSumLimit parallel_sum_limit(const PositiveForm& psi, const PositiveForm& theta,
                                    double rel) {
  require_same_dim(psi.dim(), theta.dim(), "parallel_sum_limit");
  constexpr double kCap = 1099511627776.0;  // 2^40
  const double slack = 1e-9 * std::max(psi.norm(), 1e-300);
  double n = 1;
  PositiveForm current = scaled_parallel_sum(psi, theta, 1.0, rel);
  double delta = 0;
  while (n < kCap) {
    n *= 2;
    PositiveForm next = scaled_parallel_sum(psi, theta, n, rel);
    const CMatrix step = next.matrix() - current.matrix();
    delta = step.norm();
    if (min_eigenvalue(step) < -slack)
      throw Error(ErrorCode::NoConvergence,
                  "Ψ:(nΘ) decreased between n = " + std::to_string(n / 2) + " and n = " +
                      std::to_string(n));
    current = std::move(next);
    if (delta < 1e-12) return {current, n, delta, true};
  }
  return {current, n, delta, false};
}

bool is_mutually_singular(const PositiveForm& psi, const PositiveForm& theta, double rel) {
  const ParallelSumLimit lim = parallel_sum_limit(psi, theta, rel);
  return lim.limit.matrix().norm() <= 1e-9 * psi.norm();
}

CVector singularity_witness(const Form& omega_s, const PositiveForm& theta,
                            const LebesgueSplit& split, const CVector& xi) {
  require_same_dim(omega_s.dim(), theta.dim(), "singularity_witness");
  require_same_dim(omega_s.dim(), xi.size(), "singularity_witness");
  const WitnessResidual w = witness(omega_s, theta, split, xi);
  if (w.theta > 1e-8 || w.omega > 1e-8)
    throw Error(ErrorCode::WitnessResidualTooLarge,
                "Θ(ξ′,ξ′) residual " + std::to_string(w.theta) + ", Ω_s(ξ′−ξ) residual " +
                    std::to_string(w.omega));
  return w.xi_prime;
}

bool maximality_check(const PositiveForm& phi, const PositiveForm& psi,
                      const PositiveForm& theta, double rel) {
  require_same_dim(phi.dim(), psi.dim(), "maximality_check");
  if (!is_absolutely_continuous(phi, theta, rel))
    throw Error(ErrorCode::PreconditionFails, "Φ′ is not Θ-absolutely continuous");
  const double gap = min_eigenvalue(CMatrix(psi.matrix() - phi.matrix()));
  if (gap < -1e-10)
    throw Error(ErrorCode::PreconditionFails,
                "Φ′ ⪯ Ψ fails: min eigenvalue " + std::to_string(gap));
  const PositiveSplit split = positive_lebesgue(psi, theta, rel);
  return min_eigenvalue(CMatrix(split.psi_a.matrix() - phi.matrix())) >=
         -1e-9 * std::max(psi.norm(), 1.0);
}

}  // namespace formkit
