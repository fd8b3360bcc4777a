#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zorich/lattice.hpp"
#include "zorich/zorich_map.hpp"

namespace zorich {

// ---------------------------------------------------------------------------
// Upper bound: the covering criterion tau(t) < 1.

/// c7(t) = c6(t, d) (c4 pi)^t / rho^{d-1}; identically 1 for unit constants.
double tau_constant(double t, const DerivedConstants& c, int d, double rho);

/// tau(t) = c7(t) a^{d-1-t} / (t - d + 1) for d-1 < t <= d.
double tau(double t, double a, const DerivedConstants& c, int d, double rho);

struct UpperBound {
  double t_upper = 0.0;
  double residual = 0.0;  // |tau(t_upper) - 1|
  int iterations = 0;
};

/// Root of tau(t) = 1 on (d-1, d]; dim J_r(f_a) <= t_upper.
/// Throws ATooSmall when tau(d) >= 1.
UpperBound upper_bound_dimension(double a, const DerivedConstants& c, int d, double rho);

// ---------------------------------------------------------------------------
// Lower bound: the two-level IFS Lambda^s o Lambda^r and the Moran equation.

/// One |r|^2 class of the IFS. Every (r, s) pair with r in the class has the
/// same contraction floor, whatever s is.
struct FactorClass {
  std::int64_t squared_norm = 0;  // |r|^2
  std::int64_t multiplicity = 0;  // number of r in S with that norm
  double log_factor = 0.0;        // log b_{r,s}

  double factor() const noexcept;
};

struct IfsSpec {
  double a = 0.0;
  std::int64_t N = 0;
  double rho = 1.0;
  int d = 2;
  double R = 0.0;   // 8 rho N
  double L = 0.0;   // a + log R
  double M = 0.0;   // K = B(-abar, R) intersected with H_{>= M}
  double c3 = 1.0;
  std::vector<FactorClass> classes;
  std::int64_t s_count = 0;  // admissible s per r

  std::int64_t r_count() const noexcept;
  /// Number of maps, |{r}| * |{s}|.
  double map_count() const noexcept;
  /// b_{r,s} = c3^2 / (2 sqrt2 R sqrt(rho^2 |r|^2 + L^2)).
  double factor_for(std::int64_t squared_norm) const noexcept;
  /// sum over all (r, s) of b_{r,s}^t, reduced in fixed order.
  double moran_sum(double t) const;
  bool contains(const Point& x, double tol = 0.0) const noexcept;
};

/// Requires N >= a/rho, a >= e^M - m, and the size conditions that place
/// Lambda^r(K) inside K for |r| <= N.
IfsSpec build_ifs(double a, const DerivedConstants& c, int d, double rho, std::int64_t N);

struct WeightedFactor {
  double value = 0.0;   // in (0, 1)
  double weight = 1.0;  // multiplicity
};

struct MoranResult {
  double t_star = 0.0;
  double residual = 0.0;  // |sum b^t - 1|
  int iterations = 0;
};

/// Solves sum_j w_j b_j^t = 1 by bisection. Throws NoRoot when the total
/// multiplicity is at most 1.
MoranResult moran_solve(std::span<const WeightedFactor> factors);
MoranResult moran_solve(const IfsSpec& ifs);

double moran_sum(std::span<const WeightedFactor> factors, double t);

struct GammaBeta {
  double gamma = 0.0;
  double log_beta = 0.0;  // beta itself overflows for moderate a
  double beta = 0.0;      // exp(log_beta), possibly +inf
};

/// gamma(a) = (1/2) loglog a / log a - logloglog a / log a, beta = e^{1/gamma}.
GammaBeta gamma_beta(double a);

struct LowerBound {
  double t_lower = 0.0;
  double residual = 0.0;
  std::int64_t N_used = 0;
  double log_N_schedule = 0.0;  // log(a beta(a) / rho); NaN when the schedule is undefined
  bool schedule_defined = false;
  bool truncated = false;  // N_cap cut the schedule short; the bound is weaker, still valid
  std::int64_t map_classes = 0;
  double map_count = 0.0;
};

inline constexpr std::int64_t kDefaultNCap = 10000;

/// dim J_bd(f_a) >= t_lower. N defaults to min(ceil(a beta(a)/rho), N_cap).
LowerBound lower_bound_dimension(double a, const DerivedConstants& c, int d, double rho,
                                 std::optional<std::int64_t> N = std::nullopt,
                                 std::int64_t N_cap = kDefaultNCap);

/// Asymptotic upper formula d-1 + loglog a / log a.
double asymptotic_upper(double a, int d);
/// Asymptotic lower formula d-1 + gamma(a).
double asymptotic_lower(double a, int d);

// ---------------------------------------------------------------------------

struct BoundReport {
  double a = 0.0;
  int d = 2;
  double rho = 1.0;
  DerivedConstants constants;
  std::optional<UpperBound> upper;
  std::optional<LowerBound> lower;
  std::optional<GammaBeta> gamma_beta;
  std::string upper_diagnostic;  // why the upper certificate is missing, if it is
  std::string lower_diagnostic;
  double seconds_constants = 0.0;
  double seconds_upper = 0.0;
  double seconds_lower = 0.0;

  bool both_certified() const noexcept { return upper.has_value() && lower.has_value(); }
};

}  // namespace zorich
