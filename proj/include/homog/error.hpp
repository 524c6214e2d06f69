#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace homog {

enum class Errc {
  InvalidArgument,
  ParseError,
  DuplicateNode,
  DanglingEdge,
  DuplicateEdge,
  NotStronglyConnected,
  SelfEdge,
  NonPositiveRate,
  EmptyGraph,
  BrokenPath,
  SolveFailed,
  NonPositiveEntry,
  Inconsistent,
  NotAPermutation,
  NotReversible,
  ConditionNotMet,
  InvalidResolution,
  ReflectionOverflow,
  DegenerateGrid,
  DriftNotCentered,
  InvariantViolated,
};

std::string_view errc_name(Errc code);

// Every library failure is reported through this type; code() names the
// failure class and what() carries the details.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail)
      : std::runtime_error(std::string(errc_name(code)) + ": " + detail), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace homog
