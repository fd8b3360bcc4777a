#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "zorich/dynamics.hpp"
#include "zorich/expmap.hpp"
#include "zorich/parallel.hpp"

using namespace zorich;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

const ZorichMap& planar() {
  static const ZorichMap zm = ZorichMap::calibrated({2, kHalfPi});
  return zm;
}

const IfsSpec& demo_ifs() {
  static const IfsSpec ifs = build_ifs(3.0, planar().constants(), 2, kHalfPi, 64);
  return ifs;
}

PointCloud cantor_dust(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PointCloud cloud;
  Point x{0.5, 0.5};
  for (std::size_t i = 0; i < n + 50; ++i) {
    const auto k = rng() % 4;
    x = Point{x[0] / 3 + (k & 1 ? 2.0 / 3 : 0.0), x[1] / 3 + (k & 2 ? 2.0 / 3 : 0.0)};
    if (i >= 50) cloud.points.push_back(x);
  }
  return cloud;
}

// Attracted iff the E_lambda orbit of L^{-1}(z) settles at q.
bool attracted_by_exponential(double a, const Point& z, int n_max) {
  const double lambda = std::exp(-a);
  const ComplexPoint q = conjugacy_L_inverse(a, ComplexPoint::from_point(fixed_point(planar(), a)));
  ComplexPoint w = conjugacy_L_inverse(a, ComplexPoint::from_point(z));
  for (int n = 0; n <= n_max; ++n) {
    if (std::hypot(w.re - q.re, w.im - q.im) < 1e-8) return true;
    if (w.re > 700.0) return false;
    w = exp_lambda(lambda, w);
  }
  return false;
}

}  // namespace

TEST(OrbitTest, FixedPointIsAttracted) {
  const Point xi = fixed_point(planar(), 3.0);
  const OrbitVerdict v = iterate_orbit(planar(), 3.0, xi, OrbitParams::defaults(3.0, 100.0));
  EXPECT_EQ(v.label, OrbitLabel::Attracted);
  EXPECT_LE(v.iterations_used, 1);
}

TEST(OrbitTest, BlowUpEscapes) {
  const Point first = evaluate_f_a(planar(), 3.0, Point{0.0, 10.0});
  EXPECT_NEAR(first[0], 0.0, 1e-9);
  EXPECT_NEAR(first[1], std::exp(10.0) - 3.0, 1e-9);
  const OrbitVerdict v = iterate_orbit(planar(), 3.0, Point{0.0, 10.0}, OrbitParams::defaults(3.0, 100.0));
  EXPECT_EQ(v.label, OrbitLabel::Escaping);
  EXPECT_TRUE(v.overflow);
}

TEST(OrbitTest, BoundedAndUndecided) {
  OrbitParams p = OrbitParams::defaults(3.0, 100.0);
  p.n_max = 1;
  p.attract_tol = 1e-300;
  EXPECT_EQ(iterate_orbit(planar(), 3.0, Point{0.2, 0.0}, p).label, OrbitLabel::Bounded);
  p.radius_cap = 1e-3;
  EXPECT_EQ(iterate_orbit(planar(), 3.0, Point{0.2, 0.0}, p).label, OrbitLabel::Undecided);
  p.n_max = 0;
  EXPECT_THROW(iterate_orbit(planar(), 3.0, Point{0.2, 0.0}, p), Error);
}

TEST(OrbitTest, EscapeMonotonicity) {
  std::mt19937_64 rng(3);
  for (int d : {2, 3}) {
    const ZorichMap zm({d, 1.0}, unit_constants());
    for (double a : {3.0, 20.0}) {
      const double thr = OrbitParams::defaults(a, 100.0).escape_threshold;
      const double floor = std::log(2.0 * (a + thr));
      std::uniform_real_distribution<double> u(-1.0, 1.0), v(floor, floor + 4.0);
      for (int i = 0; i < 1000; ++i) {
        Point x(d);
        for (int k = 0; k < d - 1; ++k) x[k] = u(rng);
        x.last() = v(rng);
        EXPECT_GT(evaluate_f_a(zm, a, x).norm(), x.norm());
      }
    }
  }
}

TEST(GridTest, ContractionRegionAllAttracted) {
  const double m = planar().constants().m;
  const LabelGrid g = classify_grid(planar(), 3.0, {Point{-kHalfPi, m - 8.0}, Point{kHalfPi, m - 1.0}}, {21, 21},
                                    OrbitParams::defaults(3.0, 100.0));
  EXPECT_EQ(g.count(OrbitLabel::Attracted), g.node_count());
}

TEST(GridTest, ContainsFixedPointNode) {
  const Point xi = fixed_point(planar(), 3.0);
  const LabelGrid g = classify_grid(planar(), 3.0, {Point{-1.0, xi[1] - 1.0}, Point{1.0, xi[1] + 1.0}}, {3, 3},
                                    OrbitParams::defaults(3.0, 100.0));
  EXPECT_EQ(g.labels[4], OrbitLabel::Attracted);
  EXPECT_GE(g.count(OrbitLabel::Attracted), 1u);
}

TEST(GridTest, MatchesExponentialFamily) {
  OrbitParams p = OrbitParams::defaults(3.0, 8 * kHalfPi * 64);
  const LabelGrid g = classify_grid(planar(), 3.0, {Point{-kHalfPi, -5.0}, Point{kHalfPi, 5.0}}, {81, 81}, p);
  EXPECT_GT(g.count(OrbitLabel::Attracted), 0u);
  EXPECT_GT(g.node_count() - g.count(OrbitLabel::Attracted), 0u);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < g.node_count(); ++i)
    agree += (g.labels[i] == OrbitLabel::Attracted) == attracted_by_exponential(3.0, g.node(i), p.n_max);
  EXPECT_GE(static_cast<double>(agree), 0.99 * static_cast<double>(g.node_count()));
}

TEST(GridTest, IndependentOfThreadCount) {
  const Box box{Point{-3.0, -5.0}, Point{3.0, 5.0}};
  const OrbitParams p = OrbitParams::defaults(3.0, 100.0);
  set_thread_count(1);
  const LabelGrid one = classify_grid(planar(), 3.0, box, {64, 48}, p);
  set_thread_count(6);
  const LabelGrid six = classify_grid(planar(), 3.0, box, {64, 48}, p);
  set_thread_count(0);
  EXPECT_EQ(one.labels, six.labels);
}

TEST(GridTest, Preconditions) {
  const OrbitParams p = OrbitParams::defaults(3.0, 100.0);
  EXPECT_THROW(classify_grid(planar(), 3.0, {Point{-1.0, -1.0}, Point{1.0, 1.0}}, {1, 5}, p), Error);
  EXPECT_THROW(classify_grid(planar(), 3.0, {Point{1.0, -1.0}, Point{-1.0, 1.0}}, {5, 5}, p), Error);
}

TEST(ChaosGameTest, StaysInK) {
  const PointCloud cloud = chaos_game(demo_ifs(), planar(), {20000, 16, 5, 8});
  ASSERT_EQ(cloud.points.size(), 20000u);
  for (const Point& x : cloud.points) {
    Point shifted = x;
    shifted.last() += demo_ifs().a;
    EXPECT_LE(shifted.norm(), demo_ifs().R + 1e-9);
    EXPECT_GE(x.last(), demo_ifs().M - 1e-9);
  }
}

TEST(ChaosGameTest, Deterministic) {
  const ChaosGameParams params{5000, 8, 42, 16};
  set_thread_count(1);
  const PointCloud a = chaos_game(demo_ifs(), planar(), params);
  set_thread_count(4);
  const PointCloud b = chaos_game(demo_ifs(), planar(), params);
  set_thread_count(0);
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_EQ(a.points[i], b.points[i]);
  const PointCloud c = chaos_game(demo_ifs(), planar(), {5000, 8, 43, 16});
  EXPECT_NE(a.points.front(), c.points.front());
}

TEST(ChaosGameTest, CloudOrbitsShadowTheLimitSet) {
  // Forward iteration expands rounding errors by roughly R L per step, so the
  // orbit only follows K_0 for a few steps.
  const PointCloud cloud = chaos_game(demo_ifs(), planar(), {100 * 37, 16, 9, 16});
  OrbitParams p = OrbitParams::defaults(3.0, demo_ifs().R);
  p.n_max = 6;
  for (std::size_t i = 0; i < cloud.points.size(); i += 37) {
    const Point& x = cloud.points[i];
    const OrbitVerdict v = iterate_orbit(planar(), 3.0, x, p);
    EXPECT_NE(v.label, OrbitLabel::Attracted);
    const Point back = evaluate_f_a(planar(), 3.0, evaluate_f_a(planar(), 3.0, x));
    EXPECT_TRUE(demo_ifs().contains(back, 1e-6));
  }
}

TEST(BoxCountingTest, CantorDust) {
  const PointCloud dust = cantor_dust(100000, 17);
  const BoxCountResult r = box_counting_dimension(dust, geometric_scales(0.25, 0.002, 8));
  EXPECT_GE(r.estimate, 1.16);
  EXPECT_LE(r.estimate, 1.36);
  EXPECT_GT(r.fit_r2, 0.98);
}

TEST(BoxCountingTest, SinglePoint) {
  PointCloud cloud;
  cloud.points.assign(2000, Point{0.3, 0.4});
  const BoxCountResult r = box_counting_dimension(cloud, geometric_scales(1.0, 1e-3, 6));
  EXPECT_NEAR(r.estimate, 0.0, 1e-12);
}

TEST(BoxCountingTest, UniformSquare) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  PointCloud cloud;
  for (int i = 0; i < 100000; ++i) cloud.points.push_back(Point{u(rng), u(rng)});
  const BoxCountResult r = box_counting_dimension(cloud, geometric_scales(0.25, 0.01, 6), Point{0.0, 0.0});
  EXPECT_GE(r.estimate, 1.85);
  EXPECT_LE(r.estimate, 2.0);
}

TEST(BoxCountingTest, InsufficientScaleRange) {
  const PointCloud dust = cantor_dust(1000, 3);
  try {
    box_counting_dimension(dust, {0.1, 0.08});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InsufficientScaleRange);
  }
  EXPECT_THROW(box_counting_dimension(dust, geometric_scales(0.1, 1e-9, 4)), Error);
}

TEST(BoxCountingTest, ZorichCloudAboveMoranRoot) {
  const PointCloud cloud = chaos_game(demo_ifs(), planar(), {100000, 32, 0, 16});
  double diam = 0.0;
  Point lo = cloud.points.front(), hi = lo;
  for (const Point& p : cloud.points)
    for (int k = 0; k < 2; ++k) lo[k] = std::min(lo[k], p[k]), hi[k] = std::max(hi[k], p[k]);
  diam = distance(lo, hi);
  const BoxCountResult r = box_counting_dimension(cloud, geometric_scales(diam / 4, diam * 1e-3, 8));
  EXPECT_GE(r.estimate, moran_solve(demo_ifs()).t_star - 0.2);
}

TEST(ExportTest, CsvLayouts) {
  PointCloud cloud;
  cloud.points = {Point{0.1, 2.0}, Point{-3.5, 1e-20}};
  std::ostringstream c;
  write_cloud_csv(c, cloud);
  EXPECT_EQ(c.str(), "x1,x2\n0.10000000000000001,2\n-3.5,9.9999999999999995e-21\n");

  LabelGrid g{{Point{0.0, 0.0}, Point{1.0, 1.0}}, {3, 2}, {OrbitLabel::Attracted, OrbitLabel::Escaping,
                                                        OrbitLabel::Bounded, OrbitLabel::Undecided,
                                                        OrbitLabel::Attracted, OrbitLabel::Attracted}};
  std::ostringstream s;
  write_grid_csv(s, g);
  EXPECT_EQ(s.str(), "0,1,2\n3,0,0\n");
  EXPECT_DOUBLE_EQ(g.node(4)[0], 0.5);
  EXPECT_DOUBLE_EQ(g.node(4)[1], 1.0);
}
