#pragma once

#include <vector>

#include "formkit/core.hpp"

namespace formkit {

/// Support function of the numerical range W(M) = {ξ^H M ξ : ‖ξ‖ = 1}:
/// h(θ) = λmax(Re(e^{−iθ} M)), with the boundary point attaining it.
struct SupportSample {
  double angle;
  double value;
  Complex extreme_point;
};

SupportSample support_sample(const CMatrix& m, double angle);

/// Numerical radius max_θ h(θ), located on an angle grid of size `m` and
/// refined by golden-section search around the best grid angle.
double numerical_radius(const CMatrix& m, int grid = 720);

}  // namespace formkit
