#pragma once

#include <Eigen/Core>

#include "zorich/geom.hpp"
#include "zorich/lattice_index.hpp"
#include "zorich/point.hpp"

namespace zorich {

/// Constants alpha, m, M, c1..c4 of the map F.
///
///   |DF(x)| <= alpha on H_{<= m},  l(DF(x)) >= 1/alpha on H_{>= M},
///   c1 e^{x_d} <= l(DF(x)) <= |DF(x)| <= c2 e^{x_d},  c3 = 1/c2,  c4 = 1/c1.
///
/// Calibrated values are sampled estimates, not proved bounds.
struct DerivedConstants {
  double alpha = 0.5;
  double m = 0.0;
  double M = 0.0;
  double c1 = 1.0;
  double c2 = 1.0;
  double c3 = 1.0;
  double c4 = 1.0;
  int samples_per_axis = 0;  // 0 for unit constants
  bool unit = false;

  /// e^M - m, the smallest a for which f_a has the attracting fixed point.
  double min_a() const noexcept;
};

/// All c_i := 1, with m, M derived from alpha as in the calibrated case.
DerivedConstants unit_constants(double alpha_target = 0.5);

/// Calibrates constants from the sampled singular values of Dh.
DerivedConstants derive_constants(const HemisphereParam& p, double alpha_target, int samples_per_axis);

/// A Zorich map: the parametrization plus its constants. Immutable.
class ZorichMap {
 public:
  ZorichMap(HemisphereParam param, DerivedConstants constants);

  /// Convenience: derive_constants then construct.
  static ZorichMap calibrated(HemisphereParam param, double alpha_target = 0.5, int samples_per_axis = 64);

  const HemisphereParam& param() const noexcept { return param_; }
  const DerivedConstants& constants() const noexcept { return constants_; }
  int dim() const noexcept { return param_.d; }
  double rho() const noexcept { return param_.rho; }

 private:
  HemisphereParam param_;
  DerivedConstants constants_;
};

/// Half-space H_{sense c} = {x : x_d sense c}.
struct HalfSpace {
  enum class Sense { Greater, GreaterEq, Less, LessEq, Equal };
  double threshold = 0.0;
  Sense sense = Sense::GreaterEq;

  bool contains(const Point& x) const noexcept;
};

struct Cell {
  LatticeIndex r;
  Point u;  // local coordinates in [-rho, rho]^{d-1}
};

/// r_j = round(x_j / (2 rho)) with ties toward -inf, u = x - 2 rho r.
Cell cell_of(double rho, const Point& x_head);

Point evaluate_F(const ZorichMap& zm, const Point& x);

/// f_a(x) = F(x) - (0, ..., 0, a).
Point evaluate_f_a(const ZorichMap& zm, double a, const Point& x);

/// Finite-difference Jacobian of F. Throws NonSmoothPoint within the
/// difference step of a fold hyperplane or of the ridge set.
Eigen::MatrixXd jacobian_F(const ZorichMap& zm, const Point& x);

/// True when jacobian_F(x) would reject x.
bool near_non_smooth(const ZorichMap& zm, const Point& x, double margin);

/// The attracting fixed point xi_a in H_{<= m}.
Point fixed_point(const ZorichMap& zm, double a);

}  // namespace zorich
