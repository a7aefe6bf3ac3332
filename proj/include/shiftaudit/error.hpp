#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace shiftaudit {

enum class ErrorCode {
  InvalidArgument,
  EmptyPartition,
  StratumTooSmall,
  ParseError,
  SchemaMismatch,
  DimensionMismatch,
  PoolExhausted,
  IncompatibleTask,
  UnsupportedAlgorithm,
  NotEnoughQueries,
  SingleClass,
  MissingGroup,
  EmptySample,
  DegenerateGrid,
  ConfigError,
  RunFailed,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// CSV cell that could not be interpreted. Row is the 1-based data row (header excluded).
class ParseError : public Error {
 public:
  ParseError(std::size_t row, std::string column, const std::string& detail)
      : Error(ErrorCode::ParseError,
              "row " + std::to_string(row) + ", column '" + column + "': " + detail),
        row_(row),
        column_(std::move(column)) {}

  std::size_t row() const noexcept { return row_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::size_t row_;
  std::string column_;
};

}  // namespace shiftaudit
