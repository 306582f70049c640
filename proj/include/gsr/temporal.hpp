#pragma once

#include <cstddef>

#include "gsr/graph.hpp"
#include "gsr/sampling.hpp"
#include "gsr/signal.hpp"

namespace gsr {

/// The M x (M-1) first-difference matrix: -1 on the diagonal, +1 below it.
struct TemporalDifferenceOperator {
  Matrix matrix;
};

TemporalDifferenceOperator temporal_difference_operator(std::size_t m);

/// X * D_h, i.e. [x_2 - x_1, ..., x_M - x_{M-1}].
Matrix temporal_difference(const TimeVaryingSignal& x);

/// X * D_h * D_h^T without forming either matrix. Works for any N x M input
/// with M >= 2.
Matrix temporal_gram_product(const Matrix& x);

/// tr(X^T L X).
double smoothness(const TimeVaryingSignal& x, const SensorGraph& graph);

/// tr(X^T (L + eps I)^beta X).
double sobolev_norm_tv(const TimeVaryingSignal& x, const SobolevOperator& op);

/// 1/2 ||J o X - Y||_F^2 + gamma/2 tr((X D_h)^T B (X D_h)) with B = op.matrix.
double sobolev_objective(const TimeVaryingSignal& xbar, const TimeVaryingSignal& y,
                         const SamplingMask& mask, const SobolevOperator& op, double gamma);

/// The temporal-difference Tikhonov objective: the same data term with L in
/// place of B.
double tikhonov_objective(const TimeVaryingSignal& xbar, const TimeVaryingSignal& y,
                          const SamplingMask& mask, const SensorGraph& graph, double gamma);

}  // namespace gsr
