#pragma once

#include <stdexcept>
#include <string>

namespace strongtree {

enum class ErrorCode {
  InvalidArgument,
  EmptyFile,
  MissingLabelColumn,
  RaggedRow,
  MissingValue,
  TooFewClasses,
  TooFewRows,
  InvalidSplit,
  DepthTooSmall,
  DimensionMismatch,
  NumericalBreakdown,
  IncompatibleFormulation,
  NonIntegralAssignment,
  InfeasibleAssignment,
  EmptyClass,
  EmptyGroupCell,
  SchemaError,
  FeatureMismatch,
};

const char* to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI, the Python module) can map it without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace strongtree
