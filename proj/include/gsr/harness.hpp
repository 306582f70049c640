#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "gsr/graph.hpp"
#include "gsr/ingest.hpp"
#include "gsr/metrics.hpp"
#include "gsr/results.hpp"
#include "gsr/sampling.hpp"
#include "gsr/solver.hpp"

namespace gsr {

struct ExperimentConfig {
  std::vector<double> densities{0.1, 0.3, 0.5, 0.7};
  std::size_t repetitions = 20;
  std::uint64_t master_seed = 0;
  Method method = Method::Sobolev;
  SobolevConfig sobolev;
  std::size_t k_graph = 5;
  std::size_t threads = 1;  // repetitions run concurrently up to this many

  void validate() const;
};

/// One masked reconstruction: mask draw, scale fit on observed entries,
/// solve in [0, 1] units, inverse scale, metrics over hidden entries.
struct RepetitionRun {
  SamplingMask mask;            // random mask (before folding in native gaps)
  SamplingMask observed;        // mask AND native mask; what the solver sees
  std::vector<Entry> eval_set;  // hidden by the mask and present in the source
  ScaleParams scale;
  TimeVaryingSignal reconstruction;  // original units
  MetricReport report;
  std::size_t iterations = 0;
  bool converged = true;
};

/// `op` is required for the Sobolev and Tikhonov methods and ignored for the
/// kNN baseline. Throws on mask, scaling or solver failure; a solve that runs
/// out of iterations is returned with converged = false.
RepetitionRun run_repetition(const Dataset& d, const SensorGraph& graph,
                             const SobolevOperator* op, Method method,
                             const SobolevConfig& config, double density, std::uint64_t seed);

/// Monte-Carlo cross-validation: repetition r of every density uses mask seed
/// master_seed + r. One result per density, in the configured order.
std::vector<ExperimentResult> run_experiment(const Dataset& d, const ExperimentConfig& cfg);

struct GridSearchReport {
  SobolevConfig best_config;
  ExperimentResult best;
  std::vector<ExperimentResult> entries;   // every evaluated config, grid order
  std::vector<std::size_t> excluded;       // indices into entries with failed reps
};

/// Exhaustive search over eps x beta x gamma with paired mask seeds. Picks the
/// lowest rmse_mean; ties go to the lexicographically smaller (gamma, eps, beta).
/// `base` supplies k_graph, method label, threads and solver tolerances.
GridSearchReport grid_search(const Dataset& d, double density,
                             const std::vector<double>& eps_grid,
                             const std::vector<double>& beta_grid,
                             const std::vector<double>& gamma_grid, std::size_t repetitions,
                             std::uint64_t master_seed, const ExperimentConfig& base = {});

/// W-weighted average of the observed graph neighbors at the same time step;
/// falls back to the column mean of observed entries. Observed entries pass
/// through.
TimeVaryingSignal knn_baseline_impute(const TimeVaryingSignal& y, const SamplingMask& mask,
                                      const SensorGraph& graph);

struct SyntheticSpec {
  std::size_t n_nodes = 50;
  std::size_t n_times = 100;
  std::size_t k = 5;
  double noise_sigma = 0.05;
  std::uint64_t seed = 7;
};

/// Random geometric network in the unit square; the signal mixes three
/// low-frequency Laplacian eigenvectors of its kNN graph under slow
/// sinusoidal envelopes, plus Gaussian noise.
Dataset make_synthetic_dataset(const SyntheticSpec& spec = {});

}  // namespace gsr
