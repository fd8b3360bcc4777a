#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <span>

#include "zorich/error.hpp"

namespace zorich {

/// Largest ambient dimension supported by the inline point storage.
inline constexpr int kMaxDim = 8;

/// A point of R^n (n <= kMaxDim) with inline storage.
///
/// Used both for points of R^d and for the first d-1 coordinates of one.
class Point {
 public:
  Point() = default;

  explicit Point(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim)
      throw Error(ErrorKind::InvalidArgument, "point dimension out of range");
  }

  Point(std::initializer_list<double> values) : Point(static_cast<int>(values.size())) {
    std::copy(values.begin(), values.end(), coords_.begin());
  }

  explicit Point(std::span<const double> values) : Point(static_cast<int>(values.size())) {
    std::copy(values.begin(), values.end(), coords_.begin());
  }

  int dim() const noexcept { return dim_; }

  double& operator[](int i) noexcept { return coords_[static_cast<std::size_t>(i)]; }
  double operator[](int i) const noexcept { return coords_[static_cast<std::size_t>(i)]; }

  std::span<double> coords() noexcept { return {coords_.data(), static_cast<std::size_t>(dim_)}; }
  std::span<const double> coords() const noexcept {
    return {coords_.data(), static_cast<std::size_t>(dim_)};
  }

  double last() const noexcept { return coords_[static_cast<std::size_t>(dim_ - 1)]; }
  double& last() noexcept { return coords_[static_cast<std::size_t>(dim_ - 1)]; }

  /// First dim-1 coordinates.
  Point head() const {
    Point p(dim_ - 1);
    std::copy_n(coords_.begin(), dim_ - 1, p.coords_.begin());
    return p;
  }

  /// Appends one coordinate.
  Point append(double value) const {
    Point p(dim_ + 1);
    std::copy_n(coords_.begin(), dim_, p.coords_.begin());
    p.coords_[static_cast<std::size_t>(dim_)] = value;
    return p;
  }

  double norm() const noexcept {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += coords_[i] * coords_[i];
    return std::sqrt(s);
  }

  double squared_norm() const noexcept {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += coords_[i] * coords_[i];
    return s;
  }

  double max_norm() const noexcept {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s = std::max(s, std::abs(coords_[i]));
    return s;
  }

  Point& operator+=(const Point& o) noexcept {
    for (int i = 0; i < dim_; ++i) coords_[i] += o.coords_[i];
    return *this;
  }
  Point& operator-=(const Point& o) noexcept {
    for (int i = 0; i < dim_; ++i) coords_[i] -= o.coords_[i];
    return *this;
  }
  Point& operator*=(double s) noexcept {
    for (int i = 0; i < dim_; ++i) coords_[i] *= s;
    return *this;
  }

  friend Point operator+(Point a, const Point& b) noexcept { return a += b; }
  friend Point operator-(Point a, const Point& b) noexcept { return a -= b; }
  friend Point operator*(double s, Point a) noexcept { return a *= s; }

  friend bool operator==(const Point& a, const Point& b) noexcept {
    if (a.dim_ != b.dim_) return false;
    return std::equal(a.coords_.begin(), a.coords_.begin() + a.dim_, b.coords_.begin());
  }

 private:
  int dim_ = 0;
  std::array<double, kMaxDim> coords_{};
};

inline double distance(const Point& a, const Point& b) noexcept { return (a - b).norm(); }

/// The point (0, ..., 0, value) of R^dim.
inline Point axis_point(int dim, double value) {
  Point p(dim);
  p.last() = value;
  return p;
}

inline std::ostream& operator<<(std::ostream& os, const Point& p) {
  os << '(';
  for (int i = 0; i < p.dim(); ++i) os << (i ? ", " : "") << p[i];
  return os << ')';
}

}  // namespace zorich
