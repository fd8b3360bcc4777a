#include "zorich/expmap.hpp"

#include <cmath>
#include <numbers>

namespace zorich {

ComplexPoint ComplexPoint::from_point(const Point& p) {
  if (p.dim() != 2) throw Error(ErrorKind::InvalidArgument, "complex points live in R^2");
  return {p[0], p[1]};
}

ComplexPoint exp_lambda(double lambda, const ComplexPoint& z) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::Domain, "lambda must be positive");
  const double r = lambda * std::exp(z.re);
  const ComplexPoint w{r * std::cos(z.im), r * std::sin(z.im)};
  if (!std::isfinite(w.re) || !std::isfinite(w.im)) throw Error(ErrorKind::Overflow, "lambda e^z overflows");
  return w;
}

ZorichMap canonical_planar_map() { return ZorichMap({2, std::numbers::pi / 2}, unit_constants()); }

ComplexPoint conjugacy_L(double a, const ComplexPoint& z) { return {-z.im, z.re - a}; }

ComplexPoint conjugacy_L_inverse(double a, const ComplexPoint& w) { return {w.im + a, -w.re}; }

double conjugacy_defect(const ZorichMap& zm, double a, const ComplexPoint& z) {
  if (zm.dim() != 2 || zm.rho() != std::numbers::pi / 2)
    throw Error(ErrorKind::InvalidArgument, "the conjugacy needs d = 2 and rho = pi/2");
  if (!(a > 0.0)) throw Error(ErrorKind::Domain, "a must be positive");
  const Point lhs = evaluate_f_a(zm, a, z.to_point());
  const ComplexPoint rhs = conjugacy_L(a, exp_lambda(std::exp(-a), conjugacy_L_inverse(a, z)));
  return std::hypot(lhs[0] - rhs.re, lhs[1] - rhs.im);
}

double conjugacy_defect(double a, const ComplexPoint& z) {
  static const ZorichMap zm = canonical_planar_map();
  return conjugacy_defect(zm, a, z);
}

}  // namespace zorich
