#include "gsr/temporal.hpp"

#include <string>

#include "gsr/error.hpp"

namespace gsr {

namespace {

void require_nodes(std::size_t signal_nodes, std::size_t operator_nodes) {
  if (signal_nodes != operator_nodes) {
    throw Error(ErrorCode::DimensionMismatch,
                "signal has " + std::to_string(signal_nodes) + " nodes, operator has " +
                    std::to_string(operator_nodes));
  }
}

// tr(X^T B X) summed over columns.
double quadratic_trace(const Matrix& x, const Matrix& b) {
  return (x.transpose() * b * x).trace();
}

}  // namespace

TemporalDifferenceOperator temporal_difference_operator(std::size_t m) {
  if (m < 2) {
    throw Error(ErrorCode::HorizonTooShort,
                "temporal difference needs at least 2 time steps, got " + std::to_string(m));
  }
  const auto cols = static_cast<Eigen::Index>(m - 1);
  Matrix d = Matrix::Zero(static_cast<Eigen::Index>(m), cols);
  for (Eigen::Index t = 0; t < cols; ++t) {
    d(t, t) = -1.0;
    d(t + 1, t) = 1.0;
  }
  return {std::move(d)};
}

Matrix temporal_difference(const TimeVaryingSignal& x) {
  const Matrix& v = x.values();
  const Eigen::Index steps = v.cols() - 1;
  return v.rightCols(steps) - v.leftCols(steps);
}

Matrix temporal_gram_product(const Matrix& x) {
  const Eigen::Index m = x.cols();
  if (m < 2) throw Error(ErrorCode::HorizonTooShort, "temporal operator needs M >= 2");
  const Matrix diff = x.rightCols(m - 1) - x.leftCols(m - 1);
  // column t of (X D_h) D_h^T is diff(:, t-1) - diff(:, t), with the
  // out-of-range terms dropped at either end
  Matrix out(x.rows(), m);
  out.col(0) = -diff.col(0);
  for (Eigen::Index t = 1; t < m - 1; ++t) out.col(t) = diff.col(t - 1) - diff.col(t);
  out.col(m - 1) = diff.col(m - 2);
  return out;
}

double smoothness(const TimeVaryingSignal& x, const SensorGraph& graph) {
  require_nodes(x.n_nodes(), graph.n_nodes());
  return quadratic_trace(x.values(), graph.laplacian());
}

double sobolev_norm_tv(const TimeVaryingSignal& x, const SobolevOperator& op) {
  require_nodes(x.n_nodes(), static_cast<std::size_t>(op.matrix.rows()));
  return quadratic_trace(x.values(), op.matrix);
}

double sobolev_objective(const TimeVaryingSignal& xbar, const TimeVaryingSignal& y,
                         const SamplingMask& mask, const SobolevOperator& op, double gamma) {
  if (xbar.n_nodes() != y.n_nodes() || xbar.n_times() != y.n_times() ||
      xbar.n_nodes() != mask.n_nodes() || xbar.n_times() != mask.n_times()) {
    throw Error(ErrorCode::DimensionMismatch, "objective inputs differ in shape");
  }
  require_nodes(xbar.n_nodes(), static_cast<std::size_t>(op.matrix.rows()));
  const double data = 0.5 * (xbar.values().cwiseProduct(mask.matrix()) - y.values()).squaredNorm();
  const Matrix diff = temporal_difference(xbar);
  return data + 0.5 * gamma * quadratic_trace(diff, op.matrix);
}

double tikhonov_objective(const TimeVaryingSignal& xbar, const TimeVaryingSignal& y,
                          const SamplingMask& mask, const SensorGraph& graph, double gamma) {
  return sobolev_objective(xbar, y, mask, SobolevOperator{graph.laplacian(), 0.0, 1.0}, gamma);
}

}  // namespace gsr
