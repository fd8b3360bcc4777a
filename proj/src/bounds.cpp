#include "zorich/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <numbers>
#include <string>

#include "zorich/parallel.hpp"

namespace zorich {
namespace {

constexpr double kResidualTol = 1e-9;
constexpr std::size_t kReduceChunks = 64;

// Bisection on a decreasing function g with g(lo) > 0 > g(hi).
template <class F>
std::pair<double, int> bisect_decreasing(F&& g, double lo, double hi) {
  int iter = 0;
  for (; iter < 400; ++iter) {
    const double mid = std::midpoint(lo, hi);
    if (mid <= lo || mid >= hi) break;
    const double v = g(mid);
    if (v == 0.0) return {mid, iter};
    (v > 0.0 ? lo : hi) = mid;
  }
  // Pick the endpoint with the smaller residual.
  return {std::abs(g(lo)) <= std::abs(g(hi)) ? lo : hi, iter};
}

}  // namespace

// --- upper ---------------------------------------------------------------

double tau_constant(double t, const DerivedConstants& c, int d, double rho) {
  if (c.unit) return 1.0;
  return bracket_upper_constant(t, d) * std::pow(c.c4 * std::numbers::pi, t) / std::pow(rho, d - 1);
}

double tau(double t, double a, const DerivedConstants& c, int d, double rho) {
  const double excess = t - (d - 1);
  if (!(excess > 0.0)) throw Error(ErrorKind::Domain, "tau needs t > d-1");
  if (!(a > 1.0)) throw Error(ErrorKind::Domain, "tau needs a > 1");
  return tau_constant(t, c, d, rho) * std::exp(-excess * std::log(a)) / excess;
}

UpperBound upper_bound_dimension(double a, const DerivedConstants& c, int d, double rho) {
  if (!(a > 1.0)) throw Error(ErrorKind::Domain, "upper bound needs a > 1");
  if (!c.unit && a / rho < 3.0 * std::sqrt(d - 1.0))
    throw Error(ErrorKind::HypothesisViolated, "lattice-sum bracket needs a/rho >= 3 sqrt(d-1)");
  const double at_d = tau(d, a, c, d, rho);
  if (!(at_d < 1.0))
    throw Error(ErrorKind::ATooSmall, "a too small: tau(d) = " + std::to_string(at_d) + " >= 1");

  auto g = [&](double t) { return tau(t, a, c, d, rho) - 1.0; };
  // Walk the lower end toward d-1 until tau exceeds 1 there.
  double lo = d - 1 + 0.5;
  while (g(lo) <= 0.0) {
    lo = (d - 1) + 0.5 * (lo - (d - 1));
    if (lo - (d - 1) < 1e-300) throw Error(ErrorKind::NoRoot, "tau has no root above d-1");
  }
  double hi = d;
  if (g(lo) <= 0.0) std::swap(lo, hi);

  const auto [t, iterations] = bisect_decreasing(g, lo, hi);
  UpperBound out{t, std::abs(g(t)), iterations};
  if (!(out.residual <= kResidualTol)) throw Error(ErrorKind::NoConvergence, "tau bisection residual too large");
  return out;
}

double asymptotic_upper(double a, int d) { return d - 1 + std::log(std::log(a)) / std::log(a); }

double asymptotic_lower(double a, int d) { return d - 1 + gamma_beta(a).gamma; }

// --- IFS -----------------------------------------------------------------

double FactorClass::factor() const noexcept { return std::exp(log_factor); }

std::int64_t IfsSpec::r_count() const noexcept {
  std::int64_t n = 0;
  for (const FactorClass& c : classes) n += c.multiplicity;
  return n;
}

double IfsSpec::map_count() const noexcept {
  return static_cast<double>(r_count()) * static_cast<double>(s_count);
}

double IfsSpec::factor_for(std::int64_t squared_norm) const noexcept {
  const double inner = std::sqrt(rho * rho * static_cast<double>(squared_norm) + L * L);
  return c3 * c3 / (2.0 * std::numbers::sqrt2 * R * inner);
}

double IfsSpec::moran_sum(double t) const {
  std::vector<CompensatedSum> partial(kReduceChunks);
  parallel_chunks(classes.size(), kReduceChunks, [&](std::size_t b, std::size_t e, std::size_t chunk) {
    for (std::size_t i = b; i < e; ++i)
      partial[chunk].add(static_cast<double>(classes[i].multiplicity) * std::exp(t * classes[i].log_factor));
  });
  CompensatedSum total;
  for (const CompensatedSum& p : partial) total.add(p.value());
  return static_cast<double>(s_count) * total.value();
}

bool IfsSpec::contains(const Point& x, double tol) const noexcept {
  Point shifted = x;
  shifted.last() += a;
  return shifted.norm() <= R + tol && x.last() >= M - tol;
}

IfsSpec build_ifs(double a, const DerivedConstants& c, int d, double rho, std::int64_t N) {
  if (d < 2 || d > kMaxDim) throw Error(ErrorKind::InvalidArgument, "dimension d must be in [2, 8]");
  if (!(rho > 0.0)) throw Error(ErrorKind::InvalidArgument, "rho must be positive");
  if (a < c.min_a()) throw Error(ErrorKind::FixedPointCondition, "fixed-point condition a >= e^M - m violated");
  if (N < 1 || static_cast<double>(N) < a / rho)
    throw Error(ErrorKind::HypothesisViolated, "build_ifs needs N >= a/rho");

  IfsSpec ifs;
  ifs.a = a;
  ifs.N = N;
  ifs.rho = rho;
  ifs.d = d;
  ifs.R = 8.0 * rho * static_cast<double>(N);
  ifs.L = a + std::log(ifs.R);
  ifs.M = c.M;
  ifs.c3 = c.c3;

  if (!(ifs.R > ifs.M + a)) throw Error(ErrorKind::HypothesisViolated, "K is empty: R <= M + a");
  // Size conditions under which A^r = H_{<= log R} cap T(r) lies in K for |r| <= N.
  if (!(ifs.L <= 2.0 * rho * static_cast<double>(N)))
    throw Error(ErrorKind::HypothesisViolated, "build_ifs needs L = a + log R <= 2 rho N");
  if (!((d - 1) * rho * rho <= 7.0 * ifs.L * ifs.L))
    throw Error(ErrorKind::HypothesisViolated, "build_ifs needs (d-1) rho^2 <= 7 L^2");
  if (!(std::log(ifs.R) > ifs.M)) throw Error(ErrorKind::HypothesisViolated, "build_ifs needs log R > M");

  const std::vector<NormClass> norms = even_lattice_norm_classes(static_cast<double>(N), d);
  ifs.classes.reserve(norms.size());
  std::int64_t count = 0;
  for (const NormClass& nc : norms) {
    const double b = ifs.factor_for(nc.squared_norm);
    if (!(b > 0.0 && b < 1.0)) throw Error(ErrorKind::HypothesisViolated, "contraction floor outside (0, 1)");
    ifs.classes.push_back({nc.squared_norm, nc.multiplicity, std::log(b)});
    count += nc.multiplicity;
  }
  ifs.s_count = count;
  return ifs;
}

// --- Moran ---------------------------------------------------------------

namespace {

MoranResult solve_moran(const std::function<double(double)>& sum, double total_weight) {
  if (!(total_weight > 1.0))
    throw Error(ErrorKind::NoRoot, "Moran equation has no root in (0, inf): total multiplicity <= 1");
  auto g = [&](double t) { return sum(t) - 1.0; };
  double lo = 0.0, hi = 1.0;
  while (g(hi) > 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw Error(ErrorKind::NoRoot, "Moran sum does not fall below 1");
  }
  const auto [t, iterations] = bisect_decreasing(g, lo, hi);
  MoranResult out{t, std::abs(g(t)), iterations};
  if (!(out.residual <= kResidualTol)) throw Error(ErrorKind::NoConvergence, "Moran bisection residual too large");
  return out;
}

}  // namespace

double moran_sum(std::span<const WeightedFactor> factors, double t) {
  CompensatedSum total;
  for (const WeightedFactor& f : factors) total.add(f.weight * std::pow(f.value, t));
  return total.value();
}

MoranResult moran_solve(std::span<const WeightedFactor> factors) {
  if (factors.empty()) throw Error(ErrorKind::InvalidArgument, "moran_solve needs a non-empty multiset");
  double total = 0.0;
  for (const WeightedFactor& f : factors) {
    if (!(f.value > 0.0 && f.value < 1.0)) throw Error(ErrorKind::InvalidArgument, "factors must lie in (0, 1)");
    if (!(f.weight > 0.0)) throw Error(ErrorKind::InvalidArgument, "weights must be positive");
    total += f.weight;
  }
  return solve_moran([&](double t) { return moran_sum(factors, t); }, total);
}

MoranResult moran_solve(const IfsSpec& ifs) {
  if (ifs.classes.empty()) throw Error(ErrorKind::InvalidArgument, "moran_solve needs a non-empty IFS");
  return solve_moran([&](double t) { return ifs.moran_sum(t); }, ifs.map_count());
}

// --- schedules -----------------------------------------------------------

GammaBeta gamma_beta(double a) {
  if (!(a > std::exp(std::numbers::e))) throw Error(ErrorKind::Domain, "gamma(a) needs a > e^e");
  if (!std::isfinite(a)) throw Error(ErrorKind::Domain, "gamma(a) needs finite a");
  const double la = std::log(a);
  const double lla = std::log(la);
  const double llla = std::log(lla);
  GammaBeta out;
  out.gamma = 0.5 * lla / la - llla / la;
  if (!(out.gamma > 0.0)) throw Error(ErrorKind::Domain, "gamma(a) <= 0");
  out.log_beta = 1.0 / out.gamma;
  out.beta = std::exp(out.log_beta);
  return out;
}

LowerBound lower_bound_dimension(double a, const DerivedConstants& c, int d, double rho,
                                 std::optional<std::int64_t> N, std::int64_t N_cap) {
  if (N_cap < 1) throw Error(ErrorKind::InvalidArgument, "N_cap must be positive");
  LowerBound out;
  out.log_N_schedule = std::numeric_limits<double>::quiet_NaN();
  if (a > std::exp(std::numbers::e)) {
    out.schedule_defined = true;
    out.log_N_schedule = std::log(a) + gamma_beta(a).log_beta - std::log(rho);
  }

  std::int64_t n_used = 0;
  if (N) {
    n_used = *N;
  } else if (out.schedule_defined && out.log_N_schedule < std::log(static_cast<double>(N_cap))) {
    n_used = static_cast<std::int64_t>(std::ceil(std::exp(out.log_N_schedule)));
  } else {
    n_used = N_cap;
    out.truncated = out.schedule_defined;
  }
  const IfsSpec ifs = build_ifs(a, c, d, rho, n_used);
  const MoranResult moran = moran_solve(ifs);
  out.t_lower = moran.t_star;
  out.residual = moran.residual;
  out.N_used = n_used;
  out.map_classes = static_cast<std::int64_t>(ifs.classes.size());
  out.map_count = ifs.map_count();
  return out;
}

}  // namespace zorich
