#pragma once

#include <Eigen/Core>

#include "zorich/point.hpp"

namespace zorich {

/// The fixed cube-to-hemisphere parametrization h : [-rho, rho]^{d-1} -> U.
///
/// With u = x / rho and theta = (pi/2) ||u||_inf,
///   h(x) = (sin(theta) u / |u|, cos(theta)),   h(0) = (0, ..., 0, 1).
/// For d = 2 and rho = pi/2 this is exactly x -> (sin x, cos x).
struct HemisphereParam {
  int d = 2;
  double rho = 1.0;

  /// Throws InvalidArgument unless 2 <= d <= kMaxDim and rho > 0.
  void validate() const;
};

Point hemisphere_map(const HemisphereParam& p, const Point& x);

/// Inverse of hemisphere_map on the closed upper hemisphere.
Point hemisphere_inverse(const HemisphereParam& p, const Point& w, double unit_tol = 1e-9);

/// Gap between the largest and second-largest |x_j|; +inf in one dimension.
/// Zero exactly on the ridge where the max-norm is attained twice.
double ridge_gap(const Point& x) noexcept;

/// Central finite-difference Jacobian of hemisphere_map, d x (d-1).
/// Caller keeps x at least `step` away from the ridge and from the boundary.
Eigen::MatrixXd hemisphere_jacobian(const HemisphereParam& p, const Point& x, double step);

struct SingularBounds {
  double least = 0.0;     // i0: min over samples of the least singular value
  double greatest = 0.0;  // s0: max over samples of the greatest singular value
  int samples_per_axis = 0;
  long long samples_used = 0;
};

/// Sampled essential bounds for the singular values of Dh over the cube.
///
/// Nodes are cell centres of a regular grid; nodes within one cell of the
/// ridge set or of the cube boundary are skipped. The extremal nodes are then
/// polished by a pattern search that may approach the excluded set down to a
/// few finite-difference steps, so the bounds converge under refinement.
SingularBounds sample_dh_singular_bounds(const HemisphereParam& p, int samples_per_axis);

}  // namespace zorich
