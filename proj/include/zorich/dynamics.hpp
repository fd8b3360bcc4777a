#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "zorich/bounds.hpp"
#include "zorich/point.hpp"
#include "zorich/zorich_map.hpp"

namespace zorich {

enum class OrbitLabel : std::uint8_t { Attracted = 0, Escaping = 1, Bounded = 2, Undecided = 3 };

std::string_view to_string(OrbitLabel label) noexcept;

struct OrbitParams {
  int n_max = 1000;
  double escape_threshold = 0.0;
  double attract_tol = 1e-8;
  int window_len = 3;
  double radius_cap = 0.0;  // ball B(-abar, radius_cap) for the bounded label

  /// escape_threshold = log(10(a+1)), radius_cap = 10(a+R).
  static OrbitParams defaults(double a, double R);
  void validate() const;
};

struct OrbitVerdict {
  OrbitLabel label = OrbitLabel::Undecided;
  int iterations_used = 0;
  Point final_point;
  double max_last_coordinate = 0.0;
  bool overflow = false;  // escaping because e^{x_d} left the double range
};

/// Iterates f_a from x0. `xi` is the attracting fixed point; computed when absent.
OrbitVerdict iterate_orbit(const ZorichMap& zm, double a, const Point& x0, const OrbitParams& params,
                           std::optional<Point> xi = std::nullopt);

struct Box {
  Point lo;
  Point hi;
};

/// Labels on the nodes of a regular grid, axis 0 varying fastest.
struct LabelGrid {
  Box box;
  std::vector<int> resolution;
  std::vector<OrbitLabel> labels;

  std::size_t node_count() const noexcept { return labels.size(); }
  Point node(std::size_t flat) const;
  std::size_t count(OrbitLabel label) const noexcept;
};

LabelGrid classify_grid(const ZorichMap& zm, double a, const Box& box, const std::vector<int>& resolution,
                        const OrbitParams& params);

struct PointCloud {
  std::vector<Point> points;
  std::uint64_t seed = 0;
  std::string generator;
};

struct ChaosGameParams {
  std::size_t n_points = 100000;
  int burn_in = 32;
  std::uint64_t seed = 0;
  int streams = 16;
};

/// Samples the limit set of {Lambda^s o Lambda^r}. Streams are independent
/// and seeded from (seed, stream index); the output is their concatenation in
/// stream order, so it does not depend on the worker count.
PointCloud chaos_game(const IfsSpec& ifs, const ZorichMap& zm, const ChaosGameParams& params);

struct BoxCountResult {
  double estimate = 0.0;
  double fit_r2 = 0.0;
  std::vector<double> scales;
  std::vector<std::int64_t> counts;
};

/// `count` sizes from `largest` down to `smallest`, equally spaced in log.
std::vector<double> geometric_scales(double largest, double smallest, int count);

/// Slope of log N(eps) against log(1/eps), boxes anchored at `anchor`
/// (the componentwise minimum of the cloud when absent).
BoxCountResult box_counting_dimension(const PointCloud& cloud, const std::vector<double>& scales,
                                      std::optional<Point> anchor = std::nullopt);

/// Header row "x1,...,xd", then one point per line.
void write_cloud_csv(std::ostream& out, const PointCloud& cloud);

/// One line per grid row along axis 0, integer labels.
void write_grid_csv(std::ostream& out, const LabelGrid& grid);

}  // namespace zorich
