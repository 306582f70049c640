#include "gsr/error.hpp"

namespace gsr {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::DuplicateCoordinates: return "DuplicateCoordinates";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NegativeBase: return "NegativeBase";
    case ErrorCode::HorizonTooShort: return "HorizonTooShort";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::DensityTooLow: return "DensityTooLow";
    case ErrorCode::UnsatisfiableCoverage: return "UnsatisfiableCoverage";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::MaxIterationsExceeded: return "MaxIterationsExceeded";
    case ErrorCode::ProblemTooLarge: return "ProblemTooLarge";
    case ErrorCode::EmptyEvaluationSet: return "EmptyEvaluationSet";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::MalformedCsv: return "MalformedCsv";
    case ErrorCode::DuplicateReading: return "DuplicateReading";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::EmptyColumn: return "EmptyColumn";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace gsr
