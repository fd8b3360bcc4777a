#include "zorich/error.hpp"

namespace zorich {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::OutsideCube: return "outside fundamental cube";
    case ErrorKind::NotUnit: return "not a unit vector";
    case ErrorKind::BelowEquator: return "last coordinate negative";
    case ErrorKind::DegenerateSampling: return "degenerate sampling";
    case ErrorKind::NonSmoothPoint: return "non-smooth point";
    case ErrorKind::FixedPointCondition: return "fixed-point condition a >= e^M - m violated";
    case ErrorKind::NoConvergence: return "no convergence";
    case ErrorKind::BelowM: return "below M";
    case ErrorKind::OddParity: return "odd parity";
    case ErrorKind::HypothesisViolated: return "hypothesis violated";
    case ErrorKind::ATooSmall: return "a too small";
    case ErrorKind::NoRoot: return "no root";
    case ErrorKind::Domain: return "domain error";
    case ErrorKind::InsufficientScaleRange: return "insufficient scale range";
    case ErrorKind::Overflow: return "overflow";
    case ErrorKind::InvalidArgument: return "invalid argument";
  }
  return "unknown";
}

}  // namespace zorich
