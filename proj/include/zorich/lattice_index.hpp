#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <span>

#include "zorich/point.hpp"

namespace zorich {

/// An integer vector r in Z^{d-1}; indexes the cells P(r) and tracts T(r).
class LatticeIndex {
 public:
  LatticeIndex() = default;
  explicit LatticeIndex(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim - 1)
      throw Error(ErrorKind::InvalidArgument, "lattice index dimension out of range");
  }
  LatticeIndex(std::initializer_list<std::int64_t> values)
      : LatticeIndex(static_cast<int>(values.size())) {
    std::copy(values.begin(), values.end(), r_.begin());
  }

  int dim() const noexcept { return dim_; }
  std::int64_t& operator[](int j) noexcept { return r_[static_cast<std::size_t>(j)]; }
  std::int64_t operator[](int j) const noexcept { return r_[static_cast<std::size_t>(j)]; }
  std::span<const std::int64_t> values() const noexcept {
    return {r_.data(), static_cast<std::size_t>(dim_)};
  }

  std::int64_t coordinate_sum() const noexcept {
    std::int64_t s = 0;
    for (int j = 0; j < dim_; ++j) s += r_[j];
    return s;
  }
  std::int64_t squared_norm() const noexcept {
    std::int64_t s = 0;
    for (int j = 0; j < dim_; ++j) s += r_[j] * r_[j];
    return s;
  }
  /// Parity of the coordinate sum; 0 for members of the even lattice S.
  int parity() const noexcept { return static_cast<int>(coordinate_sum() & 1); }
  bool in_even_lattice() const noexcept { return parity() == 0; }

  friend bool operator==(const LatticeIndex& a, const LatticeIndex& b) noexcept {
    if (a.dim_ != b.dim_) return false;
    for (int j = 0; j < a.dim_; ++j)
      if (a.r_[j] != b.r_[j]) return false;
    return true;
  }

 private:
  int dim_ = 0;
  std::array<std::int64_t, kMaxDim - 1> r_{};
};

}  // namespace zorich
