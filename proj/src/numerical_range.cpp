#include "formkit/numerical_range.hpp"

#include <cmath>
#include <numbers>

#include "formkit/numerics.hpp"

namespace formkit {

SupportSample support_sample(const CMatrix& m, double angle) {
  const Complex rot = std::polar(1.0, -angle);
  const CMatrix rotated = rot * m;
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(hermitian_part(rotated));
  const Eigen::Index top = solver.eigenvalues().size() - 1;
  const CVector x = solver.eigenvectors().col(top);
  return {angle, solver.eigenvalues()(top), x.dot(m * x)};
}

double numerical_radius(const CMatrix& m, int grid) {
  if (m.size() == 0) return 0.0;
  const double step = 2 * std::numbers::pi / grid;
  int best = 0;
  double best_value = -1;
  for (int k = 0; k < grid; ++k) {
    const double v = support_sample(m, k * step).value;
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  // Golden-section refinement on the bracket around the best grid angle.
  const double inv_phi = (std::sqrt(5.0) - 1) / 2;
  double a = (best - 1) * step;
  double b = (best + 1) * step;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = support_sample(m, c).value;
  double fd = support_sample(m, d).value;
  for (int it = 0; it < 60; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = support_sample(m, c).value;
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = support_sample(m, d).value;
    }
  }
  return std::max({best_value, fc, fd});
}

}  // namespace formkit
