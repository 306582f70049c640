#pragma once

#include <stdexcept>
#include <string>

namespace gsr {

enum class ErrorCode {
  InvalidArgument,
  KTooLarge,
  DuplicateCoordinates,
  ConvergenceFailure,
  NegativeBase,
  HorizonTooShort,
  DimensionMismatch,
  DensityTooLow,
  UnsatisfiableCoverage,
  SingularSystem,
  MaxIterationsExceeded,
  ProblemTooLarge,
  EmptyEvaluationSet,
  DegenerateRange,
  MalformedCsv,
  DuplicateReading,
  UnknownNode,
  EmptyDataset,
  EmptyColumn,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so the
// C API can translate it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace gsr
