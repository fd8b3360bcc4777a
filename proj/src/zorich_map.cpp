#include "zorich/zorich_map.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <string>

namespace zorich {
namespace {

constexpr double kFdStep = 1e-6;

}  // namespace

double DerivedConstants::min_a() const noexcept { return std::exp(M) - m; }

DerivedConstants unit_constants(double alpha_target) {
  if (!(alpha_target > 0.0 && alpha_target < 1.0))
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  DerivedConstants c;
  c.alpha = alpha_target;
  c.m = std::log(alpha_target);
  c.M = std::max(0.0, std::log(1.0 / alpha_target));
  c.unit = true;
  return c;
}

DerivedConstants derive_constants(const HemisphereParam& p, double alpha_target, int samples_per_axis) {
  if (!(alpha_target > 0.0 && alpha_target < 1.0))
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in (0, 1)");
  const SingularBounds sb = sample_dh_singular_bounds(p, samples_per_axis);
  if (!(sb.least > 0.0)) throw Error(ErrorKind::DegenerateSampling, "least singular value not positive");

  // DF(x', 0) = [Dh(x') | h(x')] and h is orthogonal to the columns of Dh
  // (|h| = 1), so the singular values of DF on H_{=0} are those of Dh plus 1.
  DerivedConstants c;
  c.alpha = alpha_target;
  c.c1 = std::min(sb.least, 1.0);
  c.c2 = std::max(sb.greatest, 1.0);
  c.c3 = 1.0 / c.c2;
  c.c4 = 1.0 / c.c1;
  c.m = std::log(alpha_target / c.c2);
  c.M = std::max(0.0, std::log(1.0 / (alpha_target * c.c1)));
  c.samples_per_axis = samples_per_axis;
  return c;
}

ZorichMap::ZorichMap(HemisphereParam param, DerivedConstants constants)
    : param_(param), constants_(constants) {
  param_.validate();
}

ZorichMap ZorichMap::calibrated(HemisphereParam param, double alpha_target, int samples_per_axis) {
  param.validate();
  return ZorichMap(param, derive_constants(param, alpha_target, samples_per_axis));
}

bool HalfSpace::contains(const Point& x) const noexcept {
  const double v = x.last();
  switch (sense) {
    case Sense::Greater: return v > threshold;
    case Sense::GreaterEq: return v >= threshold;
    case Sense::Less: return v < threshold;
    case Sense::LessEq: return v <= threshold;
    case Sense::Equal: return v == threshold;
  }
  return false;
}

Cell cell_of(double rho, const Point& x_head) {
  Cell cell{LatticeIndex(x_head.dim()), Point(x_head.dim())};
  const double period = 2.0 * rho;
  for (int j = 0; j < x_head.dim(); ++j) {
    // ceil(s - 1/2) rounds to nearest with ties going down.
    const double r = std::ceil(x_head[j] / period - 0.5);
    cell.r[j] = static_cast<std::int64_t>(r);
    cell.u[j] = x_head[j] - period * r;
  }
  return cell;
}

Point evaluate_F(const ZorichMap& zm, const Point& x) {
  const int d = zm.dim();
  if (x.dim() != d) throw Error(ErrorKind::InvalidArgument, "evaluate_F: dimension mismatch");
  const Cell cell = cell_of(zm.rho(), x.head());
  Point folded = cell.u;
  for (int j = 0; j < d - 1; ++j)
    if (cell.r[j] & 1) folded[j] = -folded[j];
  for (int j = 0; j < d - 1; ++j) folded[j] = std::clamp(folded[j], -zm.rho(), zm.rho());

  Point w = hemisphere_map(zm.param(), folded);
  if (cell.r.parity() != 0) w.last() = -w.last();
  w *= std::exp(x.last());
  return w;
}

Point evaluate_f_a(const ZorichMap& zm, double a, const Point& x) {
  Point y = evaluate_F(zm, x);
  y.last() -= a;
  return y;
}

bool near_non_smooth(const ZorichMap& zm, const Point& x, double margin) {
  const Cell cell = cell_of(zm.rho(), x.head());
  if (zm.rho() - cell.u.max_norm() < margin) return true;
  return ridge_gap(cell.u) < margin;
}

Eigen::MatrixXd jacobian_F(const ZorichMap& zm, const Point& x) {
  const int d = zm.dim();
  const double step_head = kFdStep * zm.rho();
  if (near_non_smooth(zm, x, 2.0 * step_head))
    throw Error(ErrorKind::NonSmoothPoint, "jacobian_F: point on a fold hyperplane or ridge");

  Eigen::MatrixXd jac(d, d);
  for (int j = 0; j < d; ++j) {
    const double step = j < d - 1 ? step_head : kFdStep;
    Point plus = x, minus = x;
    plus[j] += step;
    minus[j] -= step;
    const Point fp = evaluate_F(zm, plus);
    const Point fm = evaluate_F(zm, minus);
    for (int i = 0; i < d; ++i) jac(i, j) = (fp[i] - fm[i]) / (2.0 * step);
  }
  return jac;
}

Point fixed_point(const ZorichMap& zm, double a) {
  const DerivedConstants& c = zm.constants();
  if (a < c.min_a())
    throw Error(ErrorKind::FixedPointCondition,
                "fixed-point condition violated: a = " + std::to_string(a) + " < e^M - m = " + std::to_string(c.min_a()));

  Point x = axis_point(zm.dim(), -a);
  for (int iter = 0; iter < 10000; ++iter) {
    const Point next = evaluate_f_a(zm, a, x);
    const double step = distance(next, x);
    x = next;
    if (step < 1e-12 * std::max(1.0, x.norm())) {
      const double residual = distance(evaluate_f_a(zm, a, x), x);
      if (residual >= 1e-11 * std::max(1.0, x.norm()))
        throw Error(ErrorKind::NoConvergence, "fixed_point: residual too large");
      return x;
    }
  }
  throw Error(ErrorKind::NoConvergence, "fixed_point: no convergence in 1e4 iterations");
}

}  // namespace zorich
