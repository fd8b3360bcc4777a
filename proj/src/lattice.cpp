#include "zorich/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "zorich/parallel.hpp"

namespace zorich {
namespace {

void check_dim(int d) {
  if (d < 2 || d > kMaxDim) throw Error(ErrorKind::InvalidArgument, "dimension d must be in [2, 8]");
}

std::int64_t max_squared_norm(double N) {
  if (!(N >= 0.0) || !std::isfinite(N)) throw Error(ErrorKind::InvalidArgument, "radius N must be finite and >= 0");
  // Guard against N*N landing just below an integer it equals mathematically.
  const double n2 = N * N;
  auto k = static_cast<std::int64_t>(std::floor(n2));
  if (static_cast<double>(k + 1) <= n2 * (1.0 + 1e-15)) ++k;
  return k;
}

std::int64_t isqrt(std::int64_t v) {
  if (v <= 0) return 0;
  auto s = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
  while (s * s > v) --s;
  while ((s + 1) * (s + 1) <= v) ++s;
  return s;
}

void visit_rec(LatticeIndex& r, int j, std::int64_t budget, std::int64_t sum,
               const std::function<void(const LatticeIndex&)>& visit) {
  if (j == r.dim()) {
    if ((sum & 1) == 0) visit(r);
    return;
  }
  const std::int64_t reach = isqrt(budget);
  for (std::int64_t v = -reach; v <= reach; ++v) {
    r[j] = v;
    visit_rec(r, j + 1, budget - v * v, sum + v, visit);
  }
  r[j] = 0;
}

// Non-negative prefixes (r_1..r_{n-1}) with their sign multiplicity.
struct Prefix {
  std::int64_t squared_norm;
  std::int64_t weight;
};

void collect_prefixes(int remaining, std::int64_t norm, std::int64_t weight, std::int64_t budget,
                      std::vector<Prefix>& out) {
  if (remaining == 0) {
    out.push_back({norm, weight});
    return;
  }
  const std::int64_t reach = isqrt(budget - norm);
  for (std::int64_t v = 0; v <= reach; ++v)
    collect_prefixes(remaining - 1, norm + v * v, v == 0 ? weight : 2 * weight, budget, out);
}

}  // namespace

void for_each_even_lattice_point(double N, int d, const std::function<void(const LatticeIndex&)>& visit) {
  check_dim(d);
  LatticeIndex r(d - 1);
  visit_rec(r, 0, max_squared_norm(N), 0, visit);
}

std::int64_t count_even_lattice_points(double N, int d) {
  std::int64_t count = 0;
  for (const NormClass& c : even_lattice_norm_classes(N, d)) count += c.multiplicity;
  return count;
}

std::vector<NormClass> even_lattice_norm_classes(double N, int d) {
  check_dim(d);
  const std::int64_t kmax = max_squared_norm(N);
  const int n = d - 1;

  std::vector<Prefix> prefixes;
  collect_prefixes(n - 1, 0, 1, kmax, prefixes);
  std::sort(prefixes.begin(), prefixes.end(),
            [](const Prefix& x, const Prefix& y) { return x.squared_norm < y.squared_norm; });

  constexpr std::int64_t kBlock = std::int64_t{1} << 20;
  const std::int64_t blocks = kmax / kBlock + 1;
  std::vector<std::vector<NormClass>> per_block(static_cast<std::size_t>(blocks));

  parallel_chunks(static_cast<std::size_t>(blocks), static_cast<std::size_t>(blocks),
                  [&](std::size_t b, std::size_t, std::size_t) {
    const std::int64_t lo = static_cast<std::int64_t>(b) * kBlock;
    const std::int64_t hi = std::min(kmax, lo + kBlock - 1);
    std::vector<std::int64_t> counts(static_cast<std::size_t>(hi - lo + 1), 0);
    for (const Prefix& pre : prefixes) {
      if (pre.squared_norm > hi) break;
      const std::int64_t need_lo = std::max<std::int64_t>(0, lo - pre.squared_norm);
      const std::int64_t need_hi = hi - pre.squared_norm;
      std::int64_t v = isqrt(need_lo);
      if (v * v < need_lo) ++v;
      const std::int64_t v_end = isqrt(need_hi);
      for (; v <= v_end; ++v) {
        const std::int64_t k = pre.squared_norm + v * v;
        if (k & 1) continue;
        counts[static_cast<std::size_t>(k - lo)] += v == 0 ? pre.weight : 2 * pre.weight;
      }
    }
    auto& out = per_block[b];
    for (std::int64_t k = lo + (lo & 1); k <= hi; k += 2)
      if (counts[static_cast<std::size_t>(k - lo)] != 0) out.push_back({k, counts[static_cast<std::size_t>(k - lo)]});
  });

  std::vector<NormClass> classes;
  std::size_t total = 0;
  for (const auto& v : per_block) total += v.size();
  classes.reserve(total);
  for (auto& v : per_block) classes.insert(classes.end(), v.begin(), v.end());
  return classes;
}

double lattice_sum(const LatticeSumQuery& q) {
  if (!(q.b > 0.0) || !(q.t > 0.0)) throw Error(ErrorKind::InvalidArgument, "lattice_sum needs b > 0 and t > 0");
  const std::vector<NormClass> classes = even_lattice_norm_classes(q.N, q.d);
  const double b2 = q.b * q.b;
  const double half_t = 0.5 * q.t;

  constexpr std::size_t kChunks = 64;
  std::vector<CompensatedSum> partial(kChunks);
  parallel_chunks(classes.size(), kChunks, [&](std::size_t begin, std::size_t end, std::size_t c) {
    for (std::size_t i = begin; i < end; ++i) {
      const double term = std::pow(static_cast<double>(classes[i].squared_norm) + b2, -half_t);
      partial[c].add(static_cast<double>(classes[i].multiplicity) * term);
    }
  });
  CompensatedSum total;
  for (const CompensatedSum& p : partial) total.add(p.value());
  return total.value();
}

double sphere_measure(int d) {
  const double half = 0.5 * static_cast<double>(d - 1);
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double bracket_upper_constant(double t, int d) {
  return std::pow(2.0, 1.5 * t - d + 1) * sphere_measure(d) * 2.0;
}

double bracket_lower_constant(double t, int d) {
  return std::pow(6.0, 1 - d) * std::pow(2.0, -0.5 * t) * sphere_measure(d) * std::pow(2.0, -0.5 * t);
}

SumBracket sum_bracket(const LatticeSumQuery& q) {
  check_dim(q.d);
  const double dm1 = q.d - 1;
  if (q.N < q.b || q.b < 3.0 * std::sqrt(dm1))
    throw Error(ErrorKind::HypothesisViolated, "sum_bracket needs N >= b >= 3 sqrt(d-1)");

  const double c5 = bracket_lower_constant(q.t, q.d);
  if (q.t == dm1) return {c5 * std::log(q.N / q.b), std::numeric_limits<double>::infinity()};
  if (!(q.t > dm1 && q.t <= q.d)) throw Error(ErrorKind::Domain, "sum_bracket needs d-1 < t <= d or t = d-1");

  const double excess = q.t - dm1;
  const double scale = std::pow(q.b, -excess) / excess;
  SumBracket out;
  out.lower = c5 * scale * (1.0 - std::pow(q.N / q.b, -excess));
  out.upper = bracket_upper_constant(q.t, q.d) * scale;
  return out;
}

}  // namespace zorich
