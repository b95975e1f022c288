#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cmh {

enum class ErrorKind {
  NotSpd,
  NotSymmetric,
  DimensionMismatch,
  ModelHasNoData,
  RwmDimension,
  UnsupportedModel,
  InvalidData,
  NonFiniteObjective,
  MeanMismatch,
  ModeNotConverged,
  NanFault,
  DominanceNotVerified,
  DimensionTooLarge,
  GridTooCoarse,
  PowerIterationStalled,
  InvalidBound,
  InvalidArgument,
  NotIndependenceKernel,
  UnknownKind,
  ParseError,
  IoError,
};

std::string_view error_name(ErrorKind kind) noexcept;

// Every failure raised by the library carries a kind so callers (the CLI in
// particular) can report the error by name.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return error_name(kind_); }

 private:
  ErrorKind kind_;
};

}  // namespace cmh
