#pragma once

#include <cstddef>

#include "gsr/graph.hpp"
#include "gsr/sampling.hpp"
#include "gsr/signal.hpp"

namespace gsr {

struct SobolevConfig {
  double epsilon = 0.1;
  double beta = 2.0;
  double gamma = 1.0;
  double cg_tolerance = 1e-10;  // relative residual ||A(X) - Y||_F / ||Y||_F
  std::size_t max_iterations = 20000;

  /// Throws InvalidArgument when a field is out of range.
  void validate() const;
};

struct ReconstructionResult {
  TimeVaryingSignal xbar;
  std::size_t iterations = 0;
  double final_relative_residual = 0.0;
  double objective_value = 0.0;
  // false when max_iterations ran out; xbar is then the last iterate
  bool converged = true;
};

/// Throws SingularSystem when the reconstruction problem has no unique
/// minimizer: a node that is never observed, or (with a singular B, i.e.
/// eps == 0) a graph component whose node/time observation pattern does not
/// pin down every temporal offset.
void check_identifiable(const SamplingMask& mask, const SensorGraph& graph, double epsilon);

/// A(X) = J o X + gamma * B * X * D_h * D_h^T.
Matrix normal_operator(const Matrix& x, const SamplingMask& mask, const SobolevOperator& op,
                       double gamma);

/// Gradient of the Sobolev objective: A(X) - Y.
Matrix objective_gradient(const TimeVaryingSignal& xbar, const TimeVaryingSignal& y,
                          const SamplingMask& mask, const SobolevOperator& op, double gamma);

/// Minimizes the Sobolev objective by preconditioned conjugate gradient
/// on the matrix-form normal equations, starting from Y. `y` must vanish where
/// the mask is zero.
ReconstructionResult reconstruct_sobolev(const TimeVaryingSignal& y, const SamplingMask& mask,
                                         const SensorGraph& graph, const SobolevConfig& config);

/// Same solve with a precomputed operator (reused across gamma values and
/// repetitions). `config.epsilon` and `config.beta` are ignored in favor of
/// the operator's.
ReconstructionResult reconstruct_with_operator(const TimeVaryingSignal& y,
                                               const SamplingMask& mask,
                                               const SensorGraph& graph,
                                               const SobolevOperator& op,
                                               const SobolevConfig& config);

/// eps = 0, beta = 1.
ReconstructionResult reconstruct_tikhonov(const TimeVaryingSignal& y, const SamplingMask& mask,
                                          const SensorGraph& graph, double gamma,
                                          double cg_tolerance = 1e-10,
                                          std::size_t max_iterations = 20000);

/// Largest N*M accepted by dense_oracle_solve.
inline constexpr std::size_t kDenseOracleMaxUnknowns = 2000;

/// Reference solver: forms diag(vec J) + gamma (T kron B) explicitly and solves
/// it with a full-pivot LU. gamma = 0 is allowed here. Verification only.
ReconstructionResult dense_oracle_solve(const TimeVaryingSignal& y, const SamplingMask& mask,
                                        const SensorGraph& graph, const SobolevConfig& config);

}  // namespace gsr
