// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion
//   acceptance --only 7   run criterion 7 alone
//
// Exit status is 0 iff every criterion that ran passed.

#include <Eigen/SVD>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "zorich/bounds.hpp"
#include "zorich/branches.hpp"
#include "zorich/cli.hpp"
#include "zorich/dynamics.hpp"
#include "zorich/expmap.hpp"
#include "zorich/lattice.hpp"
#include "zorich/parallel.hpp"

using namespace zorich;
namespace fs = std::filesystem;

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Point upper_point(std::mt19937_64& rng, int d, double a, double M, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  for (;;) {
    Point y(d);
    for (int k = 0; k < d; ++k) y[k] = u(rng);
    y.last() -= a;
    Point shifted = y;
    shifted.last() += a;
    if (y.last() >= M && shifted.norm() <= radius) return y;
  }
}

LatticeIndex even_index(std::mt19937_64& rng, int dims, std::int64_t N) {
  std::uniform_int_distribution<std::int64_t> pick(-N, N);
  for (;;) {
    LatticeIndex r(dims);
    for (int j = 0; j < dims; ++j) r[j] = pick(rng);
    if (r.squared_norm() <= N * N && r.in_even_lattice()) return r;
  }
}

double scalar_root(const std::function<double(double)>& g, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// --- 1 ----------------------------------------------------------------------

Outcome conjugacy() {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> re(-std::numbers::pi, std::numbers::pi), im(-5.0, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) worst = std::max(worst, conjugacy_defect(3.0, {re(rng), im(rng)}));
  return {worst < 1e-9, fmt("max defect %.3g over 1e4 points", worst)};
}

// --- 2 ----------------------------------------------------------------------

Outcome fixed_point_oracle() {
  double y = -3.0;
  for (int i = 0; i < 60; ++i) y -= (std::exp(y) - y - 3.0) / (std::exp(y) - 1.0);
  const Point xi = fixed_point(ZorichMap::calibrated({2, kHalfPi}), 3.0);
  const double err = std::hypot(xi[0], xi[1] - y);
  return {err < 1e-8, fmt("xi = (%.3g, %.12f), Newton root %.12f, error %.3g", xi[0], xi[1], y, err)};
}

// --- 3 ----------------------------------------------------------------------

Outcome inverse_branches() {
  std::mt19937_64 rng(3);
  double round_trip = 0.0, law = 0.0, even_law = 0.0;
  long outside = 0;
  for (int d : {2, 3}) {
    const double rho = d == 2 ? kHalfPi : 1.0;
    const double a = d == 2 ? 3.0 : 12.0;
    const ZorichMap zm = ZorichMap::calibrated({d, rho});
    const double M = zm.constants().M;
    for (int i = 0; i < 10000; ++i) {
      const Point y = upper_point(rng, d, a, M, 10.0 * a);
      const LatticeIndex r = even_index(rng, d - 1, 20);
      const Point x = inverse_branch(zm, a, r, y);
      round_trip = std::max(round_trip, distance(evaluate_f_a(zm, a, x), y));
      outside += !Tract{r, rho, M}.contains(x, 1e-12);

      Point moved = inverse_branch(zm, a, parity_reflection(r, y));
      for (int j = 0; j < d - 1; ++j) moved[j] += 2.0 * rho * static_cast<double>(r[j]);
      law = std::max(law, distance(moved, x));

      LatticeIndex even(d - 1);
      for (int j = 0; j < d - 1; ++j) even[j] = 2 * (r[j] / 2);
      Point shifted = inverse_branch(zm, a, y);
      for (int j = 0; j < d - 1; ++j) shifted[j] += 2.0 * rho * static_cast<double>(even[j]);
      even_law = std::max(even_law, distance(shifted, inverse_branch(zm, a, even, y)));
    }
  }
  const bool pass = round_trip < 1e-10 && outside == 0 && law <= 1e-14 && even_law <= 1e-14;
  return {pass, fmt("round trip %.3g, %ld outside tract, translation law %.3g (reflected form), %.3g (even r)",
                    round_trip, outside, law, even_law)};
}

// --- 4 ----------------------------------------------------------------------

Outcome derivative_envelopes() {
  std::mt19937_64 rng(4);
  double excess = -INFINITY, tight = 0.0;
  for (int d : {2, 3}) {
    const double rho = d == 2 ? kHalfPi : 1.0;
    const double a = d == 2 ? 3.0 : 12.0;
    const ZorichMap zm = ZorichMap::calibrated({d, rho});
    int tested = 0;
    while (tested < 1000) {
      const Point y = upper_point(rng, d, a, zm.constants().M, 10.0 * a);
      Point shifted = y;
      shifted.last() += a;
      if (shifted.head().norm() < 1e-3 * shifted.norm()) continue;
      if (ridge_gap(inverse_branch(zm, a, y).head()) < 1e-4) continue;
      const Envelope env = branch_derivative_envelope(zm, a, y);
      const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(branch_jacobian(zm, a, y)).singularValues();
      excess = std::max({excess, (env.lower - sv.minCoeff()) / env.lower, (sv.maxCoeff() - env.upper) / env.upper});
      if (d == 2) tight = std::max(tight, std::abs(sv.maxCoeff() - 1.0 / shifted.norm()));
      ++tested;
    }
  }
  return {excess <= 1e-4 && tight < 1e-5,
          fmt("largest relative excess over envelope %.3g, planar |DLambda| - 1/|x+a| %.3g", excess, tight)};
}

// --- 5 ----------------------------------------------------------------------

Outcome lattice_sums() {
  const double s = lattice_sum({2.0, 1.0, 2.0, 3});
  const double oracle_err = std::abs(s - 47.0 / 15.0);
  std::mt19937_64 rng(5);
  int queries = 0, failures = 0, critical = 0;
  for (; queries < 120; ++queries) {
    const int d = 2 + static_cast<int>(rng() % 2);
    const double bmin = 3.0 * std::sqrt(d - 1.0);
    const double b = std::uniform_real_distribution<double>(bmin, 3.0 * bmin)(rng);
    const double N = std::uniform_real_distribution<double>(b, 200.0)(rng);
    const bool at_pole = queries % 4 == 0;
    const double t = at_pole ? d - 1.0 : std::uniform_real_distribution<double>(d - 1.0 + 1e-6, d)(rng);
    const LatticeSumQuery q{t, b, N, d};
    const SumBracket br = sum_bracket(q);
    const double v = lattice_sum(q);
    failures += !(br.lower <= v && v <= br.upper);
    critical += at_pole;
  }
  return {oracle_err < 1e-12 && failures == 0,
          fmt("47/15 error %.3g; %d/%d bracket failures (%d at t = d-1)", oracle_err, failures, queries, critical)};
}

// --- 6 ----------------------------------------------------------------------

Outcome moran() {
  const std::vector<WeightedFactor> thirds{{1.0 / 3, 4.0}};
  const std::vector<WeightedFactor> twentieths{{0.05, 81.0}};
  const double t1 = moran_solve(thirds).t_star;
  const double t2 = moran_solve(twentieths).t_star;
  const double e1 = std::abs(t1 - std::log(4.0) / std::log(3.0));
  const double e2 = std::abs(t2 - std::log(81.0) / std::log(20.0));
  const bool cert = moran_sum(thirds, t1 - 1e-6) > 1 && moran_sum(thirds, t1 + 1e-6) < 1 &&
                    moran_sum(twentieths, t2 - 1e-6) > 1 && moran_sum(twentieths, t2 + 1e-6) < 1;
  return {e1 < 1e-9 && e2 < 1e-9 && cert,
          fmt("t = %.9f (error %.2g), %.9f (error %.2g), sign change %s", t1, e1, t2, e2, cert ? "yes" : "no")};
}

// --- 7 ----------------------------------------------------------------------

Outcome upper_unit() {
  const double a = std::exp(std::exp(2.0));
  const double t = upper_bound_dimension(a, unit_constants(), 3, 1.0).t_upper;
  const double u = scalar_root([](double x) { return std::exp(-std::exp(2.0) * x) - x; }, 0.0, 1.0);
  const double cap = 2.0 + 2.0 / std::exp(2.0);
  const double err = std::abs(t - (2.0 + u));
  return {err < 1e-6 && t <= cap, fmt("t_upper %.9f, oracle %.9f, error %.2g, cap %.6f", t, 2.0 + u, err, cap)};
}

// --- 8 ----------------------------------------------------------------------

Outcome lower_desk_check() {
  const DerivedConstants c = derive_constants({3, 1.0}, 0.5, 64);
  const int d = 3;
  const double rho = 1.0;
  const double a = 50.0;
  if (a < c.min_a()) return {false, "a below e^M - m"};

  const std::vector<std::int64_t> Ns{200, 400, 800, 1600, 3200};
  std::vector<double> t_lower, proxy, proxy_floor;
  for (std::int64_t N : Ns) {
    const IfsSpec ifs = build_ifs(a, c, d, rho, N);
    t_lower.push_back(moran_solve(ifs).t_star);
    // The t = d-1 sum is a lattice sum with b = L/rho, scaled by a bounded prefactor.
    proxy.push_back(ifs.moran_sum(d - 1));
    const double prefactor = static_cast<double>(ifs.s_count) *
                             std::pow(ifs.c3 * ifs.c3 / (2.0 * std::numbers::sqrt2 * ifs.R * rho), d - 1);
    proxy_floor.push_back(prefactor * sum_bracket({d - 1.0, ifs.L / rho, static_cast<double>(N), d}).lower);
  }

  const bool exceeds = t_lower.front() > d - 1;
  bool positive = true, monotone = true, above_floor = true, log_growth = true;
  for (std::size_t i = 0; i < Ns.size(); ++i) {
    positive = positive && t_lower[i] > 0;
    above_floor = above_floor && proxy[i] >= proxy_floor[i];
    if (i > 0) monotone = monotone && t_lower[i] >= t_lower[i - 1] && proxy[i] > proxy[i - 1];
    if (i > 1) {
      const double ratio = (proxy[i] - proxy[i - 1]) / (proxy[i - 1] - proxy[i - 2]);
      log_growth = log_growth && ratio > 0.5 && ratio < 2.0;
    }
  }
  std::string detail = fmt("t_lower(N=200) = %.6f, %s d-1; N=3200 gives %.6f", t_lower.front(),
                           exceeds ? "exceeds" : "below", t_lower.back());
  if (!exceeds)
    detail += fmt("; fallback: positive %s, monotone %s, t=d-1 sum %.4g -> %.4g with equal increments per doubling %s,"
                  " above its log floor %s",
                  positive ? "yes" : "no", monotone ? "yes" : "no", proxy.front(), proxy.back(),
                  log_growth ? "yes" : "no", above_floor ? "yes" : "no");
  return {exceeds || (positive && monotone && log_growth && above_floor), detail};
}

// --- 9 ----------------------------------------------------------------------

Outcome bracket_ordering() {
  const DerivedConstants c = derive_constants({2, kHalfPi}, 0.5, 64);
  const int d = 2;
  bool ordered = true, in_band = true;
  int grid = 0;
  std::string values;
  for (double a : {150.0, 300.0, 1000.0, 3000.0, 10000.0}) {
    const UpperBound ub = upper_bound_dimension(a, c, d, kHalfPi);
    const LowerBound lb = lower_bound_dimension(a, c, d, kHalfPi);
    ++grid;
    ordered = ordered && lb.t_lower < ub.t_upper;
    const auto inside = [&](double t) { return t > d - 1 && t <= d; };
    in_band = in_band && inside(ub.t_upper) && inside(lb.t_lower);
    values += fmt(" a=%g:[%.4f, %.4f]", a, lb.t_lower, ub.t_upper);
  }
  return {ordered && in_band, fmt("%d values of a, t_lower < t_upper %s, both in (d-1, d] %s;", grid,
                                  ordered ? "yes" : "no", in_band ? "yes" : "no") +
                                  values};
}

// --- 10 ---------------------------------------------------------------------

Outcome box_counting() {
  std::mt19937_64 rng(10);
  PointCloud dust;
  Point x{0.5, 0.5};
  for (int i = 0; i < 100050; ++i) {
    const auto k = rng() % 4;
    x = Point{x[0] / 3 + (k & 1 ? 2.0 / 3 : 0.0), x[1] / 3 + (k & 2 ? 2.0 / 3 : 0.0)};
    if (i >= 50) dust.points.push_back(x);
  }
  const double dust_est = box_counting_dimension(dust, geometric_scales(0.25, 0.002, 8)).estimate;

  const ZorichMap zm = ZorichMap::calibrated({2, kHalfPi});
  const IfsSpec ifs = build_ifs(3.0, zm.constants(), 2, kHalfPi, 64);
  const double t_star = moran_solve(ifs).t_star;
  const PointCloud cloud = chaos_game(ifs, zm, {100000, 32, 0, 16});
  Point lo = cloud.points.front(), hi = lo;
  for (const Point& p : cloud.points)
    for (int k = 0; k < 2; ++k) lo[k] = std::min(lo[k], p[k]), hi[k] = std::max(hi[k], p[k]);
  const double diam = distance(lo, hi);
  const double est = box_counting_dimension(cloud, geometric_scales(diam / 4, diam * 1e-3, 8)).estimate;
  return {dust_est >= 1.16 && dust_est <= 1.36 && est >= t_star - 0.2,
          fmt("Cantor dust %.4f (true 1.2619); Zorich cloud %.4f vs t_star %.4f", dust_est, est, t_star)};
}

// --- 11 ---------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "zorich_acceptance_determinism";
  fs::remove_all(root);
  std::ostringstream sink;
  auto run = [&](const char* cmd, int threads, const std::string& tag) {
    cli::RunConfig c;
    c.a = 3.0;
    c.points = 50000;
    c.threads = threads;
    c.out = root / tag;
    set_thread_count(threads);
    const int code = std::strcmp(cmd, "classify") == 0 ? cli::cmd_classify(c, sink, sink) : cli::cmd_attractor(c, sink, sink);
    set_thread_count(0);
    return code;
  };
  int codes = 0;
  for (const char* cmd : {"classify", "attractor"}) {
    codes += run(cmd, 1, "one_a");
    codes += run(cmd, 1, "one_b");
    codes += run(cmd, 8, "many");
  }
  int mismatches = 0, files = 0;
  for (const char* f : {"classify.csv", "classify.json", "attractor.csv", "attractor.json"}) {
    const std::string ref = slurp(root / "one_a" / f);
    mismatches += ref.empty() || ref != slurp(root / "one_b" / f) || ref != slurp(root / "many" / f);
    ++files;
  }
  fs::remove_all(root);
  return {codes == 0 && mismatches == 0,
          fmt("%d files compared across two runs and 1 vs 8 threads, %d mismatches", files, mismatches)};
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[++i]);

  const std::vector<Criterion> criteria{
      {1, "conjugacy", 1.0, conjugacy},
      {2, "fixed point", 1.0, fixed_point_oracle},
      {3, "inverse branches", 5.0, inverse_branches},
      {4, "derivative envelopes", 5.0, derivative_envelopes},
      {5, "lattice sums", 10.0, lattice_sums},
      {6, "Moran solver", 1.0, moran},
      {7, "upper-bound root", 1.0, upper_unit},
      {8, "lower-bound desk check", 120.0, lower_desk_check},
      {9, "bracket ordering", 120.0, bracket_ordering},
      {10, "box counting", 30.0, box_counting},
      {11, "determinism", 600.0, determinism},
  };

  bool all = true;
  for (const Criterion& c : criteria) {
    if (only && c.id != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    all = all && pass;
    std::printf("criterion %2d %s  %s: %s (%.2f s%s)\n", c.id, pass ? "PASS" : "FAIL", c.title, o.detail.c_str(), secs,
                in_time ? "" : ", over budget");
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
