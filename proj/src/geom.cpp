#include "zorich/geom.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "zorich/parallel.hpp"

namespace zorich {
namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// Relative slack on the cube test; absorbs the rounding of x - 2 rho r.
constexpr double kCubeSlack = 1e-12;

std::pair<double, double> singular_extremes(const Eigen::MatrixXd& jac) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac);
  const auto& s = svd.singularValues();
  return {s(s.size() - 1), s(0)};
}

}  // namespace

void HemisphereParam::validate() const {
  if (d < 2 || d > kMaxDim) throw Error(ErrorKind::InvalidArgument, "dimension d must be in [2, 8]");
  if (!(rho > 0.0) || !std::isfinite(rho))
    throw Error(ErrorKind::InvalidArgument, "rho must be positive and finite");
}

Point hemisphere_map(const HemisphereParam& p, const Point& x) {
  if (x.dim() != p.d - 1) throw Error(ErrorKind::InvalidArgument, "hemisphere_map expects d-1 coordinates");
  const double inf_norm = x.max_norm();
  if (inf_norm > p.rho * (1.0 + kCubeSlack))
    throw Error(ErrorKind::OutsideCube, "hemisphere_map: ||x||_inf exceeds rho");

  Point out(p.d);
  if (inf_norm == 0.0) {
    out.last() = 1.0;
    return out;
  }
  const double theta = kHalfPi * std::min(inf_norm / p.rho, 1.0);
  const double scale = std::sin(theta) / x.norm();
  for (int j = 0; j < p.d - 1; ++j) out[j] = scale * x[j];
  out.last() = std::cos(theta);
  return out;
}

Point hemisphere_inverse(const HemisphereParam& p, const Point& w, double unit_tol) {
  if (w.dim() != p.d) throw Error(ErrorKind::InvalidArgument, "hemisphere_inverse expects d coordinates");
  if (std::abs(w.norm() - 1.0) > unit_tol) throw Error(ErrorKind::NotUnit, "hemisphere_inverse: |w| != 1");
  if (w.last() < 0.0) throw Error(ErrorKind::BelowEquator, "hemisphere_inverse: w_d < 0");

  const Point tangent = w.head();
  const double sin_theta = tangent.norm();
  Point x(p.d - 1);
  if (sin_theta < 1e-14) return x;

  // atan2 keeps full relative accuracy near the pole where arccos(w_d) does not.
  const double theta = std::atan2(sin_theta, w.last());
  const double scale = p.rho * (theta / kHalfPi) / tangent.max_norm();
  for (int j = 0; j < p.d - 1; ++j) x[j] = scale * tangent[j];
  return x;
}

double ridge_gap(const Point& x) noexcept {
  if (x.dim() < 2) return std::numeric_limits<double>::infinity();
  double first = 0.0, second = 0.0;
  for (double c : x.coords()) {
    const double a = std::abs(c);
    if (a > first) {
      second = first;
      first = a;
    } else if (a > second) {
      second = a;
    }
  }
  return first - second;
}

Eigen::MatrixXd hemisphere_jacobian(const HemisphereParam& p, const Point& x, double step) {
  Eigen::MatrixXd jac(p.d, p.d - 1);
  for (int j = 0; j < p.d - 1; ++j) {
    Point plus = x, minus = x;
    plus[j] += step;
    minus[j] -= step;
    const Point hp = hemisphere_map(p, plus);
    const Point hm = hemisphere_map(p, minus);
    for (int i = 0; i < p.d; ++i) jac(i, j) = (hp[i] - hm[i]) / (2.0 * step);
  }
  return jac;
}

SingularBounds sample_dh_singular_bounds(const HemisphereParam& p, int samples_per_axis) {
  p.validate();
  if (samples_per_axis < 8) throw Error(ErrorKind::InvalidArgument, "samples_per_axis must be >= 8");

  const int dim = p.d - 1;
  const double cell = 2.0 * p.rho / samples_per_axis;
  const double fd_step = 1e-6 * p.rho;

  long long total = 1;
  for (int j = 0; j < dim; ++j) total *= samples_per_axis;

  auto node = [&](long long index) {
    Point x(dim);
    for (int j = 0; j < dim; ++j) {
      const long long i = index % samples_per_axis;
      index /= samples_per_axis;
      x[j] = -p.rho + (static_cast<double>(i) + 0.5) * cell;
    }
    return x;
  };
  auto admissible = [&](const Point& x, double margin) {
    return p.rho - x.max_norm() >= margin && ridge_gap(x) >= margin;
  };

  struct Partial {
    double least = std::numeric_limits<double>::infinity();
    double greatest = 0.0;
    Point argleast, arggreatest;
    long long used = 0;
    bool degenerate = false;
  };
  const std::size_t chunks = 64;
  std::vector<Partial> partials(chunks);
  parallel_chunks(static_cast<std::size_t>(total), chunks, [&](std::size_t b, std::size_t e, std::size_t c) {
    Partial& part = partials[c];
    for (std::size_t k = b; k < e; ++k) {
      const Point x = node(static_cast<long long>(k));
      if (!admissible(x, cell)) continue;
      const auto [lo, hi] = singular_extremes(hemisphere_jacobian(p, x, fd_step));
      if (!(lo > 1e-12 * hi)) part.degenerate = true;
      ++part.used;
      if (lo < part.least) {
        part.least = lo;
        part.argleast = x;
      }
      if (hi > part.greatest) {
        part.greatest = hi;
        part.arggreatest = x;
      }
    }
  });

  Partial all;
  for (const Partial& part : partials) {
    all.used += part.used;
    all.degenerate = all.degenerate || part.degenerate;
    if (part.used == 0) continue;
    if (part.least < all.least) {
      all.least = part.least;
      all.argleast = part.argleast;
    }
    if (part.greatest > all.greatest) {
      all.greatest = part.greatest;
      all.arggreatest = part.arggreatest;
    }
  }
  if (all.used == 0) throw Error(ErrorKind::DegenerateSampling, "no admissible sample nodes");
  if (all.degenerate) throw Error(ErrorKind::DegenerateSampling, "rank-deficient Jacobian of h");

  // Pattern search from the extremal nodes.
  const double polish_margin = 8.0 * fd_step;
  auto polish = [&](Point x, double value, bool minimize) {
    double step = 0.5 * cell;
    while (step > 1e-7 * p.rho) {
      bool moved = false;
      for (int j = 0; j < dim && !moved; ++j) {
        for (double sign : {-1.0, 1.0}) {
          Point y = x;
          y[j] += sign * step;
          if (!admissible(y, polish_margin)) continue;
          const auto [lo, hi] = singular_extremes(hemisphere_jacobian(p, y, fd_step));
          const double v = minimize ? lo : hi;
          if (minimize ? v < value : v > value) {
            x = y;
            value = v;
            moved = true;
            break;
          }
        }
      }
      if (!moved) step *= 0.5;
    }
    return value;
  };

  SingularBounds out;
  out.least = polish(all.argleast, all.least, true);
  out.greatest = polish(all.arggreatest, all.greatest, false);
  out.samples_per_axis = samples_per_axis;
  out.samples_used = all.used;
  if (!(out.least > 0.0)) throw Error(ErrorKind::DegenerateSampling, "least singular value not positive");
  return out;
}

}  // namespace zorich
