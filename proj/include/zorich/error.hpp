#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zorich {

enum class ErrorKind {
  OutsideCube,
  NotUnit,
  BelowEquator,
  DegenerateSampling,
  NonSmoothPoint,
  FixedPointCondition,  // a >= e^M - m fails
  NoConvergence,
  BelowM,
  OddParity,
  HypothesisViolated,
  ATooSmall,
  NoRoot,
  Domain,
  InsufficientScaleRange,
  Overflow,
  InvalidArgument,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Exception carrying a machine-checkable kind alongside the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace zorich
