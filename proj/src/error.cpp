#include "strongtree/error.hpp"

namespace strongtree {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::MissingLabelColumn: return "MissingLabelColumn";
    case ErrorCode::RaggedRow: return "RaggedRow";
    case ErrorCode::MissingValue: return "MissingValue";
    case ErrorCode::TooFewClasses: return "TooFewClasses";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::InvalidSplit: return "InvalidSplit";
    case ErrorCode::DepthTooSmall: return "DepthTooSmall";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
    case ErrorCode::IncompatibleFormulation: return "IncompatibleFormulation";
    case ErrorCode::NonIntegralAssignment: return "NonIntegralAssignment";
    case ErrorCode::InfeasibleAssignment: return "InfeasibleAssignment";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::EmptyGroupCell: return "EmptyGroupCell";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::FeatureMismatch: return "FeatureMismatch";
  }
  return "Unknown";
}

}  // namespace strongtree
