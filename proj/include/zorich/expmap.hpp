#pragma once

#include "zorich/point.hpp"
#include "zorich/zorich_map.hpp"

namespace zorich {

/// z = x + iy, identified with the point (x, y) of R^2.
struct ComplexPoint {
  double re = 0.0;
  double im = 0.0;

  static ComplexPoint from_point(const Point& p);
  Point to_point() const { return Point{re, im}; }
  bool operator==(const ComplexPoint&) const = default;
};

/// E_lambda(z) = lambda e^z. Throws Overflow when the result is not finite.
ComplexPoint exp_lambda(double lambda, const ComplexPoint& z);

/// The planar map with rho = pi/2 and F(x, y) = e^y (sin x, cos x).
ZorichMap canonical_planar_map();

/// |f_a(z) - L(E_lambda(L^{-1}(z)))| with lambda = e^{-a}, L(z) = i(z - a).
double conjugacy_defect(double a, const ComplexPoint& z);

/// As above for a given map, which must be the canonical planar one.
double conjugacy_defect(const ZorichMap& zm, double a, const ComplexPoint& z);

/// L(z) = i(z - a) and its inverse.
ComplexPoint conjugacy_L(double a, const ComplexPoint& z);
ComplexPoint conjugacy_L_inverse(double a, const ComplexPoint& w);

}  // namespace zorich
