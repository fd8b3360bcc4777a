#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "zorich/lattice_index.hpp"

namespace zorich {

/// Visits every r in Z^{d-1} with even coordinate sum and |r| <= N, once
/// each, in lexicographic order. Nothing is materialized.
void for_each_even_lattice_point(double N, int d, const std::function<void(const LatticeIndex&)>& visit);

std::int64_t count_even_lattice_points(double N, int d);

/// All even-lattice points of one squared norm.
///
/// Since sum r_j = sum r_j^2 (mod 2), r is in S exactly when |r|^2 is even, so
/// S-membership is a property of the class.
struct NormClass {
  std::int64_t squared_norm = 0;
  std::int64_t multiplicity = 0;
};

/// Classes of {r in S : |r| <= N}, sorted by squared norm.
std::vector<NormClass> even_lattice_norm_classes(double N, int d);

struct LatticeSumQuery {
  double t = 0.0;
  double b = 1.0;
  double N = 0.0;
  int d = 2;
};

/// sum over r in S, |r| <= N of (|r|^2 + b^2)^{-t/2}. Bitwise reproducible
/// for any worker count.
double lattice_sum(const LatticeSumQuery& q);

/// Upper-bracket constant c6(t, d) = 2^{3t/2-d+1} * |S^{d-2}| * 2.
double bracket_upper_constant(double t, int d);

/// Lower-bracket constant c5(t, d) = 6^{1-d} 2^{-t/2} * |S^{d-2}| * 2^{-t/2}.
double bracket_lower_constant(double t, int d);

/// Surface measure 2 pi^{(d-1)/2} / Gamma((d-1)/2) of the unit sphere in R^{d-1}.
double sphere_measure(int d);

struct SumBracket {
  double lower = 0.0;
  double upper = 0.0;  // +inf when t = d-1 (only the logarithmic lower bound applies)
};

/// Closed-form bracket of lattice_sum. Requires N >= b >= 3 sqrt(d-1) and
/// either d-1 < t <= d or t = d-1.
SumBracket sum_bracket(const LatticeSumQuery& q);

}  // namespace zorich
