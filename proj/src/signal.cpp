#include "gsr/signal.hpp"

#include <string>

#include "gsr/error.hpp"

namespace gsr {

TimeVaryingSignal::TimeVaryingSignal(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 2 || values_.cols() < 2) {
    throw Error(ErrorCode::DimensionMismatch,
                "time-varying signal needs at least 2 nodes and 2 time steps, got " +
                    std::to_string(values_.rows()) + "x" + std::to_string(values_.cols()));
  }
  if (!values_.allFinite()) {
    throw Error(ErrorCode::InvalidArgument, "time-varying signal has non-finite entries");
  }
}

}  // namespace gsr
