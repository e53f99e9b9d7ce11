#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hypdual {

enum class ErrorKind {
  NonFinite,
  NotOnModel,
  NotSpacelikeSeparated,
  DomainExceeded,
  ZeroVector,
  InvalidIsometry,
  InvalidSurface,
  InvalidMetric,
  LengthOverflow,
  FlipBlocked,
  UnboundedPolyhedron,
  EmptyInterior,
  OrbitBoundTooSmall,
  StepStalled,
  FeasibilityLost,
  HomotopyBlocked,
  ParseError,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries one of the kinds above so the
// command line can map it onto an exit code and a stable name.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace hypdual
