#include "cmh/error.hpp"

namespace cmh {

std::string_view error_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::NotSpd: return "NotSpd";
    case ErrorKind::NotSymmetric: return "NotSymmetric";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::ModelHasNoData: return "ModelHasNoData";
    case ErrorKind::RwmDimension: return "RwmDimension";
    case ErrorKind::UnsupportedModel: return "UnsupportedModel";
    case ErrorKind::InvalidData: return "InvalidData";
    case ErrorKind::NonFiniteObjective: return "NonFiniteObjective";
    case ErrorKind::MeanMismatch: return "MeanMismatch";
    case ErrorKind::ModeNotConverged: return "ModeNotConverged";
    case ErrorKind::NanFault: return "NanFault";
    case ErrorKind::DominanceNotVerified: return "DominanceNotVerified";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::PowerIterationStalled: return "PowerIterationStalled";
    case ErrorKind::InvalidBound: return "InvalidBound";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NotIndependenceKernel: return "NotIndependenceKernel";
    case ErrorKind::UnknownKind: return "UnknownKind";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace cmh
