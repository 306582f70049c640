#pragma once

#include <cstddef>

#include <Eigen/Core>

namespace gsr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// N x M matrix of readings. Row i is the time series of node i, column t is
/// the graph signal at time t.
class TimeVaryingSignal {
 public:
  /// Throws DimensionMismatch unless N >= 2 and M >= 2, and InvalidArgument on
  /// non-finite entries.
  explicit TimeVaryingSignal(Matrix values);

  std::size_t n_nodes() const noexcept { return static_cast<std::size_t>(values_.rows()); }
  std::size_t n_times() const noexcept { return static_cast<std::size_t>(values_.cols()); }
  const Matrix& values() const noexcept { return values_; }
  double operator()(std::size_t node, std::size_t time) const {
    return values_(static_cast<Eigen::Index>(node), static_cast<Eigen::Index>(time));
  }

 private:
  Matrix values_;
};

}  // namespace gsr
