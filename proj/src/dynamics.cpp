#include "zorich/dynamics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <unordered_set>

#include "zorich/branches.hpp"
#include "zorich/parallel.hpp"

namespace zorich {

std::string_view to_string(OrbitLabel label) noexcept {
  switch (label) {
    case OrbitLabel::Attracted: return "attracted";
    case OrbitLabel::Escaping: return "escaping";
    case OrbitLabel::Bounded: return "bounded";
    case OrbitLabel::Undecided: return "undecided";
  }
  return "undecided";
}

OrbitParams OrbitParams::defaults(double a, double R) {
  OrbitParams p;
  p.escape_threshold = std::log(10.0 * (a + 1.0));
  p.radius_cap = 10.0 * (a + R);
  return p;
}

void OrbitParams::validate() const {
  if (n_max < 1) throw Error(ErrorKind::InvalidArgument, "n_max must be at least 1");
  if (window_len < 1) throw Error(ErrorKind::InvalidArgument, "window_len must be at least 1");
  if (!(attract_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "attract_tol must be positive");
  if (!(radius_cap > 0.0)) throw Error(ErrorKind::InvalidArgument, "radius_cap must be positive");
  if (!std::isfinite(escape_threshold)) throw Error(ErrorKind::InvalidArgument, "escape_threshold must be finite");
}

namespace {

bool all_finite(const Point& x) {
  return std::all_of(x.coords().begin(), x.coords().end(), [](double v) { return std::isfinite(v); });
}

}  // namespace

OrbitVerdict iterate_orbit(const ZorichMap& zm, double a, const Point& x0, const OrbitParams& params,
                           std::optional<Point> xi) {
  params.validate();
  if (x0.dim() != zm.dim()) throw Error(ErrorKind::InvalidArgument, "orbit start has the wrong dimension");
  if (!xi) xi = fixed_point(zm, a);

  OrbitVerdict v;
  Point x = x0;
  v.max_last_coordinate = x.last();
  bool inside = true;
  int streak = 0;
  for (int n = 0;; ++n) {
    v.iterations_used = n;
    v.final_point = x;
    v.max_last_coordinate = std::max(v.max_last_coordinate, x.last());
    if (distance(x, *xi) < params.attract_tol) {
      v.label = OrbitLabel::Attracted;
      return v;
    }
    streak = x.last() > params.escape_threshold ? streak + 1 : 0;
    if (streak >= params.window_len) {
      v.label = OrbitLabel::Escaping;
      return v;
    }
    Point shifted = x;
    shifted.last() += a;
    if (shifted.norm() > params.radius_cap) inside = false;
    if (n == params.n_max) break;

    x = evaluate_f_a(zm, a, x);
    if (!all_finite(x)) {
      v.iterations_used = n + 1;
      v.label = OrbitLabel::Escaping;
      v.overflow = true;
      v.max_last_coordinate = std::numeric_limits<double>::infinity();
      return v;
    }
  }
  v.label = inside ? OrbitLabel::Bounded : OrbitLabel::Undecided;
  return v;
}

Point LabelGrid::node(std::size_t flat) const {
  Point x(box.lo.dim());
  for (int k = 0; k < x.dim(); ++k) {
    const auto n = static_cast<std::size_t>(resolution[static_cast<std::size_t>(k)]);
    const auto i = flat % n;
    flat /= n;
    const double frac = static_cast<double>(i) / static_cast<double>(n - 1);
    x[k] = box.lo[k] + frac * (box.hi[k] - box.lo[k]);
  }
  return x;
}

std::size_t LabelGrid::count(OrbitLabel label) const noexcept {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), label));
}

LabelGrid classify_grid(const ZorichMap& zm, double a, const Box& box, const std::vector<int>& resolution,
                        const OrbitParams& params) {
  params.validate();
  const int d = zm.dim();
  if (box.lo.dim() != d || box.hi.dim() != d) throw Error(ErrorKind::InvalidArgument, "box has the wrong dimension");
  if (static_cast<int>(resolution.size()) != d)
    throw Error(ErrorKind::InvalidArgument, "one resolution per axis is required");
  std::size_t total = 1;
  for (int k = 0; k < d; ++k) {
    if (resolution[static_cast<std::size_t>(k)] < 2)
      throw Error(ErrorKind::InvalidArgument, "resolution must be at least 2 per axis");
    if (!(box.lo[k] < box.hi[k])) throw Error(ErrorKind::InvalidArgument, "box corners out of order");
    total *= static_cast<std::size_t>(resolution[static_cast<std::size_t>(k)]);
  }

  LabelGrid grid{box, resolution, std::vector<OrbitLabel>(total)};
  const Point xi = fixed_point(zm, a);
  const std::size_t chunks = std::min<std::size_t>(total, 256);
  parallel_chunks(total, chunks, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) grid.labels[i] = iterate_orbit(zm, a, grid.node(i), params, xi).label;
  });
  return grid;
}

// --- chaos game -------------------------------------------------------------

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Uniform on [0, n) by rejection, identical on every standard library.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
  for (;;) {
    const std::uint64_t v = rng();
    if (v < limit) return v % n;
  }
}

LatticeIndex draw_index(std::mt19937_64& rng, std::int64_t N, int dims) {
  const auto width = static_cast<std::uint64_t>(2 * N + 1);
  const auto n2 = N * N;
  for (;;) {
    LatticeIndex r(dims);
    for (int j = 0; j < dims; ++j) r[j] = static_cast<std::int64_t>(bounded(rng, width)) - N;
    if (r.squared_norm() <= n2 && r.in_even_lattice()) return r;
  }
}

}  // namespace

PointCloud chaos_game(const IfsSpec& ifs, const ZorichMap& zm, const ChaosGameParams& params) {
  if (params.n_points < 1) throw Error(ErrorKind::InvalidArgument, "n_points must be at least 1");
  if (params.burn_in < 0) throw Error(ErrorKind::InvalidArgument, "burn_in must be non-negative");
  if (params.streams < 1) throw Error(ErrorKind::InvalidArgument, "streams must be at least 1");
  if (ifs.d != zm.dim() || ifs.classes.empty()) throw Error(ErrorKind::InvalidArgument, "IFS does not match the map");

  const auto streams = static_cast<std::size_t>(params.streams);
  const Point start = axis_point(ifs.d, 0.5 * (ifs.M + ifs.R - ifs.a));
  std::vector<std::vector<Point>> parts(streams);

  parallel_chunks(streams, streams, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t s = b; s < e; ++s) {
      std::uint64_t state = params.seed ^ (0xD1B54A32D192ED03ULL * (s + 1));
      std::mt19937_64 rng(splitmix64(state));
      const std::size_t lo = s * params.n_points / streams;
      const std::size_t hi = (s + 1) * params.n_points / streams;
      std::vector<Point>& out = parts[s];
      out.reserve(hi - lo);
      Point x = start;
      for (std::size_t step = 0; out.size() < hi - lo; ++step) {
        const LatticeIndex r = draw_index(rng, ifs.N, ifs.d - 1);
        const LatticeIndex q = draw_index(rng, ifs.N, ifs.d - 1);
        x = inverse_branch(zm, ifs.a, q, inverse_branch(zm, ifs.a, r, x));
        if (step >= static_cast<std::size_t>(params.burn_in)) out.push_back(x);
      }
    }
  });

  PointCloud cloud;
  cloud.seed = params.seed;
  cloud.points.reserve(params.n_points);
  for (auto& part : parts) cloud.points.insert(cloud.points.end(), part.begin(), part.end());
  cloud.generator = "chaos-game mt19937_64 streams=" + std::to_string(params.streams) +
                    " burn_in=" + std::to_string(params.burn_in) + " N=" + std::to_string(ifs.N);
  return cloud;
}

// --- box counting -----------------------------------------------------------

std::vector<double> geometric_scales(double largest, double smallest, int count) {
  if (!(largest > 0.0 && smallest > 0.0 && largest > smallest) || count < 2)
    throw Error(ErrorKind::InvalidArgument, "geometric_scales needs largest > smallest > 0 and count >= 2");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double step = std::log(smallest / largest) / (count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = largest * std::exp(step * i);
  return out;
}

namespace {

struct BoxKey {
  std::array<std::int64_t, kMaxDim> c{};
  bool operator==(const BoxKey&) const = default;
};

struct BoxKeyHash {
  std::size_t operator()(const BoxKey& k) const noexcept {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::int64_t v : k.c) {
      h ^= static_cast<std::uint64_t>(v);
      h *= 0x100000001b3ULL;
      h ^= h >> 29;
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

BoxCountResult box_counting_dimension(const PointCloud& cloud, const std::vector<double>& scales,
                                      std::optional<Point> anchor) {
  if (cloud.points.size() < 2) throw Error(ErrorKind::InsufficientScaleRange, "insufficient scale range: fewer than 2 points");
  if (scales.size() < 2) throw Error(ErrorKind::InsufficientScaleRange, "insufficient scale range: fewer than 2 scales");
  const int dim = cloud.points.front().dim();
  for (double eps : scales)
    if (!(eps > 0.0) || !std::isfinite(eps)) throw Error(ErrorKind::InvalidArgument, "box sizes must be positive");
  const auto [smin, smax] = std::minmax_element(scales.begin(), scales.end());
  if (*smax < 2.0 * *smin) throw Error(ErrorKind::InsufficientScaleRange, "insufficient scale range: sizes span less than a factor 2");

  if (!anchor) {
    anchor = cloud.points.front();
    for (const Point& p : cloud.points)
      for (int k = 0; k < dim; ++k) (*anchor)[k] = std::min((*anchor)[k], p[k]);
  }

  BoxCountResult out;
  out.scales = scales;
  out.counts.assign(scales.size(), 0);
  parallel_chunks(scales.size(), scales.size(), [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) {
      std::unordered_set<BoxKey, BoxKeyHash> boxes;
      boxes.reserve(cloud.points.size());
      for (const Point& p : cloud.points) {
        BoxKey key;
        for (int k = 0; k < dim; ++k)
          key.c[static_cast<std::size_t>(k)] = static_cast<std::int64_t>(std::floor((p[k] - (*anchor)[k]) / scales[i]));
        boxes.insert(key);
      }
      out.counts[i] = static_cast<std::int64_t>(boxes.size());
    }
  });
  if (out.counts[static_cast<std::size_t>(smin - scales.begin())] >= static_cast<std::int64_t>(cloud.points.size()))
    throw Error(ErrorKind::InsufficientScaleRange, "insufficient scale range: finest boxes hold one point each");

  const double n = static_cast<double>(scales.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < scales.size(); ++i) {
    const double x = -std::log(scales[i]);
    const double y = std::log(static_cast<double>(out.counts[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double vx = sxx - sx * sx / n;
  const double vy = syy - sy * sy / n;
  const double cxy = sxy - sx * sy / n;
  out.estimate = cxy / vx;
  out.fit_r2 = vy > 0.0 ? cxy * cxy / (vx * vy) : 1.0;
  return out;
}

// --- exports ----------------------------------------------------------------

void write_cloud_csv(std::ostream& out, const PointCloud& cloud) {
  const int dim = cloud.points.empty() ? 0 : cloud.points.front().dim();
  for (int k = 0; k < dim; ++k) out << (k ? ",x" : "x") << (k + 1);
  out << '\n';
  char buf[32];
  for (const Point& p : cloud.points) {
    for (int k = 0; k < dim; ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", p[k]);
      if (k) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

void write_grid_csv(std::ostream& out, const LabelGrid& grid) {
  const auto row = static_cast<std::size_t>(grid.resolution.front());
  for (std::size_t i = 0; i < grid.labels.size(); ++i) {
    out << static_cast<int>(grid.labels[i]) << ((i + 1) % row == 0 ? '\n' : ',');
  }
}

}  // namespace zorich
