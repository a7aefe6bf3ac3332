#include "shiftaudit/error.hpp"

namespace shiftaudit {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyPartition: return "EmptyPartition";
    case ErrorCode::StratumTooSmall: return "StratumTooSmall";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::PoolExhausted: return "PoolExhausted";
    case ErrorCode::IncompatibleTask: return "IncompatibleTask";
    case ErrorCode::UnsupportedAlgorithm: return "UnsupportedAlgorithm";
    case ErrorCode::NotEnoughQueries: return "NotEnoughQueries";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::MissingGroup: return "MissingGroup";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::DegenerateGrid: return "DegenerateGrid";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::RunFailed: return "RunFailed";
  }
  return "Unknown";
}

}  // namespace shiftaudit
