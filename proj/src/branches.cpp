#include "zorich/branches.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace zorich {
namespace {

void check_branch_domain(const ZorichMap& zm, double a, const Point& y) {
  if (y.dim() != zm.dim()) throw Error(ErrorKind::InvalidArgument, "inverse_branch: dimension mismatch");
  const DerivedConstants& c = zm.constants();
  if (a < c.min_a()) throw Error(ErrorKind::FixedPointCondition, "fixed-point condition a >= e^M - m violated");
  if (y.last() < c.M) throw Error(ErrorKind::BelowM, "inverse_branch: y_d below M");
}

}  // namespace

bool Tract::contains(const Point& x, double tol) const noexcept {
  const int n = r.dim();
  if (x.dim() != n + 1) return false;
  for (int j = 0; j < n; ++j)
    if (!(std::abs(x[j] - 2.0 * rho * static_cast<double>(r[j])) < rho + tol)) return false;
  return x.last() > M - tol;
}

Point parity_reflection(const LatticeIndex& r, const Point& y) {
  Point out = y;
  for (int j = 0; j < r.dim(); ++j)
    if (r[j] & 1) out[j] = -out[j];
  return out;
}

Point inverse_branch(const ZorichMap& zm, double a, const LatticeIndex& r, const Point& y) {
  check_branch_domain(zm, a, y);
  if (r.dim() != zm.dim() - 1) throw Error(ErrorKind::InvalidArgument, "inverse_branch: index dimension");
  if (!r.in_even_lattice()) throw Error(ErrorKind::OddParity, "inverse_branch: r not in S");

  Point shifted = y;
  shifted.last() += a;
  const double radius = shifted.norm();
  Point w = shifted;
  w *= 1.0 / radius;

  // Undo the fold of evaluate_F: on cell r the local coordinate is reflected
  // in every axis with odd r_j.
  const Point t = hemisphere_inverse(zm.param(), w);
  Point x(zm.dim());
  for (int j = 0; j < zm.dim() - 1; ++j) {
    const double u = (r[j] & 1) ? -t[j] : t[j];
    x[j] = u + 2.0 * zm.rho() * static_cast<double>(r[j]);
  }
  x.last() = std::log(radius);
  return x;
}

Point inverse_branch(const ZorichMap& zm, double a, const Point& y) {
  return inverse_branch(zm, a, LatticeIndex(zm.dim() - 1), y);
}

BranchBoundCheck branch_bound_check(const ZorichMap& zm, double a, const Point& x, const Point& y) {
  const Point lx = inverse_branch(zm, a, x);
  const Point ly = inverse_branch(zm, a, y);
  const Point abar = axis_point(zm.dim(), a);
  const double gap = distance(x, y);
  BranchBoundCheck out;
  out.lhs = distance(lx, ly);
  out.rhs_contraction = zm.constants().alpha * gap;
  out.rhs_lipschitz =
      zm.constants().c4 * std::numbers::pi * gap / std::min((x + abar).norm(), (y + abar).norm());
  return out;
}

Envelope branch_derivative_envelope(const ZorichMap& zm, double a, const Point& x) {
  check_branch_domain(zm, a, x);
  const double radius = (x + axis_point(zm.dim(), a)).norm();
  return {zm.constants().c3 / radius, zm.constants().c4 / radius};
}

Eigen::MatrixXd branch_jacobian(const ZorichMap& zm, double a, const Point& y, double step) {
  const int d = zm.dim();
  Eigen::MatrixXd jac(d, d);
  for (int j = 0; j < d; ++j) {
    Point plus = y, minus = y;
    plus[j] += step;
    minus[j] -= step;
    const Point lp = inverse_branch(zm, a, plus);
    const Point lm = inverse_branch(zm, a, minus);
    for (int i = 0; i < d; ++i) jac(i, j) = (lp[i] - lm[i]) / (2.0 * step);
  }
  return jac;
}

}  // namespace zorich
