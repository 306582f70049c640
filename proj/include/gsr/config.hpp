#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsr/harness.hpp"

namespace gsr {

/// Where an experiment's data lives, as written in a config file. Paths are
/// returned verbatim; resolving them is the caller's job.
struct DatasetSource {
  std::string positions;
  std::string readings;
  std::string name;
  double min_coverage = 0.0;
  std::optional<std::size_t> max_time_steps;
};

struct ExperimentPlan {
  DatasetSource source;
  std::vector<ExperimentConfig> runs;  // one per configured method
};

struct GridPlan {
  DatasetSource source;
  std::vector<double> densities;
  std::vector<double> eps_grid;
  std::vector<double> beta_grid;
  std::vector<double> gamma_grid;
  ExperimentConfig base;  // repetitions, master_seed, k_graph, tolerances
};

/// Parses an experiment config:
///
///   { "densities": [0.1, 0.3, 0.5, 0.7], "repetitions": 20, "master_seed": 0,
///     "method": "sobolev" | ["sobolev", "knn_baseline", ...],
///     "sobolev": {"epsilon": .., "beta": .., "gamma": ..,
///                 "cg_tolerance": .., "max_iterations": ..},
///     "k_graph": 5, "threads": 1,
///     "positions": "..", "readings": "..", "name": "..",
///     "min_coverage": 1.0, "max_time_steps": 10000 }
///
/// Every key is optional; unknown keys are rejected with InvalidArgument.
ExperimentPlan parse_experiment_plan(std::string_view json_text);

/// Grid config: the experiment keys plus "eps_grid", "beta_grid", "gamma_grid"
/// (required, nonempty) and "density" or "densities".
GridPlan parse_grid_plan(std::string_view json_text);

/// Reads only the dataset keys of either config kind.
DatasetSource parse_dataset_source(std::string_view json_text);

std::string sobolev_config_json(const SobolevConfig& config);

}  // namespace gsr
