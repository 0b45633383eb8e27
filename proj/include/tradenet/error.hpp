#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tradenet {

enum class Errc {
  IoError,
  MissingColumn,
  MalformedRow,
  EmptySeries,
  DuplicateDate,
  InvalidSplit,
  SeriesTooShort,
  ZeroVariance,
  WindowTooLarge,
  NumericalInstability,
  SingularRegression,
  NonConvergence,
  InvalidOrder,
  NoConvergedModel,
  InvalidConfig,
  ShapeMismatch,
  NonFiniteGradient,
  EmptyDataset,
  EmptyGrid,
  UnsupportedVersion,
  CorruptPayload,
  InsufficientHistory,
  MissingActuals,
  LengthMismatch,
  ZeroActual,
  InvalidPeriod,
  InsufficientBars,
  UnknownDate,
  NegativeBudget,
  NoTrades,
  UndefinedRatio,
  EmptyInput,
  InvalidArgument,
};

std::string_view errc_name(Errc code) noexcept;

// All library failures surface as this exception; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Carries the 1-based line number of the offending CSV row.
class MalformedRowError : public Error {
 public:
  MalformedRowError(std::size_t line, const std::string& message)
      : Error(Errc::MalformedRow, "line " + std::to_string(line) + ": " + message), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace tradenet
