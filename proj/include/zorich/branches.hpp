#pragma once

#include <Eigen/Core>

#include "zorich/lattice_index.hpp"
#include "zorich/zorich_map.hpp"

namespace zorich {

/// The beam T(r) = P(r) x (M, inf) over an even-lattice cell.
struct Tract {
  LatticeIndex r;
  double rho = 1.0;
  double M = 0.0;

  /// Membership with the open inequalities relaxed by `tol`.
  bool contains(const Point& x, double tol = 0.0) const noexcept;
};

/// D_r y: flips the sign of y_j for every odd r_j (last coordinate untouched).
/// For r in S this is a rotation fixing the x_d-axis.
Point parity_reflection(const LatticeIndex& r, const Point& y);

/// The inverse branch Lambda^r : H_{>= M} -> T(r) of f_a, in closed form.
///
/// Satisfies f_a(Lambda^r(y)) = y and the translation law
///   Lambda^r(y) = Lambda^0(D_r y) + (2 rho r, 0),
/// which reduces to a pure translation when every r_j is even.
Point inverse_branch(const ZorichMap& zm, double a, const LatticeIndex& r, const Point& y);

/// Lambda = Lambda^0.
Point inverse_branch(const ZorichMap& zm, double a, const Point& y);

struct BranchBoundCheck {
  double lhs = 0.0;              // |Lambda(x) - Lambda(y)|
  double rhs_contraction = 0.0;  // alpha |x - y|
  double rhs_lipschitz = 0.0;    // c4 pi |x - y| / min(|x + a|, |y + a|)
};

BranchBoundCheck branch_bound_check(const ZorichMap& zm, double a, const Point& x, const Point& y);

struct Envelope {
  double lower = 0.0;  // c3 / |x + a|
  double upper = 0.0;  // c4 / |x + a|
};

/// The band that the singular values of DLambda(x) must lie in.
Envelope branch_derivative_envelope(const ZorichMap& zm, double a, const Point& x);

/// Central finite-difference Jacobian of Lambda^0 at y.
Eigen::MatrixXd branch_jacobian(const ZorichMap& zm, double a, const Point& y, double step = 1e-6);

}  // namespace zorich
