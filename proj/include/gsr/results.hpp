#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gsr/error.hpp"
#include "gsr/solver.hpp"

namespace gsr {

enum class Method { Sobolev, Tikhonov, KnnBaseline };

const char* to_string(Method method) noexcept;
/// Accepts "sobolev", "tikhonov" and "knn_baseline".
Method parse_method(std::string_view name);

struct RepetitionOutcome {
  std::uint64_t seed = 0;
  double rmse = 0.0;
  double mae = 0.0;
  std::size_t n_evaluated = 0;
  std::size_t iterations = 0;
};

struct FailedRepetition {
  std::uint64_t seed = 0;
  ErrorCode code = ErrorCode::InvalidArgument;
  std::string message;
};

/// Aggregate of one (method, density) cell over the Monte-Carlo repetitions.
/// Means and population standard deviations cover successful repetitions only.
struct ExperimentResult {
  std::string dataset_name;
  Method method = Method::Sobolev;
  double density = 0.0;
  double rmse_mean = 0.0;
  double rmse_std = 0.0;
  double mae_mean = 0.0;
  double mae_std = 0.0;
  std::size_t repetitions = 0;
  std::vector<RepetitionOutcome> per_rep;
  std::vector<FailedRepetition> failed_reps;

  // configuration echo
  SobolevConfig sobolev;
  std::size_t k_graph = 0;
  std::uint64_t master_seed = 0;

  bool complete() const noexcept { return failed_reps.empty() && per_rep.size() == repetitions; }
};

}  // namespace gsr
