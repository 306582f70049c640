#include "gsr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <thread>
#include <tuple>

#include "gsr/error.hpp"
#include "gsr/temporal.hpp"

namespace gsr {

namespace {

template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn&& fn) {
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) fn(i);
    });
  }
}

struct RepSlot {
  bool ok = false;
  RepetitionOutcome outcome;
  FailedRepetition failure;
};

// Runs the repetitions of one (config, density) cell and reduces them in
// repetition order.
ExperimentResult run_cell(const Dataset& d, const SensorGraph& graph, const SobolevOperator* op,
                          Method method, const SobolevConfig& config, double density,
                          std::size_t repetitions, std::uint64_t master_seed, std::size_t k_graph,
                          std::size_t threads) {
  std::vector<RepSlot> slots(repetitions);
  parallel_for(repetitions, threads, [&](std::size_t r) {
    const std::uint64_t seed = master_seed + r;
    RepSlot& slot = slots[r];
    try {
      const RepetitionRun run = run_repetition(d, graph, op, method, config, density, seed);
      if (!run.converged) {
        slot.failure = {seed, ErrorCode::MaxIterationsExceeded,
                        "conjugate gradient hit max_iterations = " +
                            std::to_string(config.max_iterations)};
        return;
      }
      slot.ok = true;
      slot.outcome = {seed, run.report.rmse, run.report.mae, run.report.n_evaluated,
                      run.iterations};
    } catch (const Error& e) {
      slot.failure = {seed, e.code(), e.what()};
    }
  });

  ExperimentResult result;
  result.dataset_name = d.name;
  result.method = method;
  result.density = density;
  result.repetitions = repetitions;
  result.sobolev = config;
  if (method == Method::Tikhonov) {
    result.sobolev.epsilon = 0.0;
    result.sobolev.beta = 1.0;
  } else if (op != nullptr) {
    result.sobolev.epsilon = op->epsilon;
    result.sobolev.beta = op->beta;
  }
  result.k_graph = k_graph;
  result.master_seed = master_seed;
  for (auto& slot : slots) {
    if (slot.ok) {
      result.per_rep.push_back(slot.outcome);
    } else {
      result.failed_reps.push_back(std::move(slot.failure));
    }
  }

  if (result.per_rep.empty()) {
    result.rmse_mean = result.rmse_std = result.mae_mean = result.mae_std = std::nan("");
    return result;
  }
  const double count = static_cast<double>(result.per_rep.size());
  double rmse_sum = 0.0, mae_sum = 0.0;
  for (const auto& rep : result.per_rep) {
    rmse_sum += rep.rmse;
    mae_sum += rep.mae;
  }
  result.rmse_mean = rmse_sum / count;
  result.mae_mean = mae_sum / count;
  double rmse_var = 0.0, mae_var = 0.0;
  for (const auto& rep : result.per_rep) {
    rmse_var += (rep.rmse - result.rmse_mean) * (rep.rmse - result.rmse_mean);
    mae_var += (rep.mae - result.mae_mean) * (rep.mae - result.mae_mean);
  }
  result.rmse_std = std::sqrt(rmse_var / count);
  result.mae_std = std::sqrt(mae_var / count);
  return result;
}

SobolevOperator operator_for(const SensorGraph& graph, Method method, const SobolevConfig& cfg) {
  if (method == Method::Tikhonov) return sobolev_operator(graph, 0.0, 1.0);
  return sobolev_operator(graph, cfg.epsilon, cfg.beta);
}

}  // namespace

const char* to_string(Method method) noexcept {
  switch (method) {
    case Method::Sobolev: return "sobolev";
    case Method::Tikhonov: return "tikhonov";
    case Method::KnnBaseline: return "knn_baseline";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  if (name == "sobolev") return Method::Sobolev;
  if (name == "tikhonov") return Method::Tikhonov;
  if (name == "knn_baseline") return Method::KnnBaseline;
  throw Error(ErrorCode::InvalidArgument, "unknown method '" + std::string(name) +
                                              "' (expected sobolev, tikhonov or knn_baseline)");
}

void ExperimentConfig::validate() const {
  if (densities.empty()) throw Error(ErrorCode::InvalidArgument, "densities must not be empty");
  for (std::size_t i = 0; i < densities.size(); ++i) {
    if (!(densities[i] > 0.0 && densities[i] <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "densities must lie in (0, 1]");
    }
    if (i > 0 && !(densities[i] > densities[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "densities must be strictly increasing");
    }
  }
  if (repetitions == 0) throw Error(ErrorCode::InvalidArgument, "repetitions must be positive");
  if (k_graph == 0) throw Error(ErrorCode::InvalidArgument, "k_graph must be positive");
  if (method != Method::KnnBaseline) {
    SobolevConfig check = sobolev;
    if (method == Method::Tikhonov) {
      check.epsilon = 0.0;
      check.beta = 1.0;
    }
    check.validate();
  }
}

RepetitionRun run_repetition(const Dataset& d, const SensorGraph& graph,
                             const SobolevOperator* op, Method method,
                             const SobolevConfig& config, double density, std::uint64_t seed) {
  const std::size_t n = d.signal.n_nodes();
  const std::size_t m = d.signal.n_times();
  if (graph.n_nodes() != n) throw Error(ErrorCode::DimensionMismatch, "graph and dataset differ");

  SamplingMask mask = random_mask(n, m, density, seed);
  SamplingMask observed = mask.intersect(d.native_mask);
  std::vector<Entry> eval_set;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < m; ++t) {
      if (!mask.observed(i, t) && d.native_mask.observed(i, t)) eval_set.push_back({i, t});
    }
  }
  if (eval_set.empty()) {
    throw Error(ErrorCode::EmptyEvaluationSet,
                "density " + std::to_string(density) + " hides no entry with ground truth");
  }

  const ScaleParams scale = fit_scale(d.signal, observed);
  const TimeVaryingSignal y = apply_mask(apply_scale(d.signal, scale), observed);

  std::size_t iterations = 0;
  bool converged = true;
  TimeVaryingSignal scaled_recon = y;
  if (method == Method::KnnBaseline) {
    scaled_recon = knn_baseline_impute(y, observed, graph);
  } else {
    if (op == nullptr) throw Error(ErrorCode::InvalidArgument, "solver method needs an operator");
    ReconstructionResult res = reconstruct_with_operator(y, observed, graph, *op, config);
    iterations = res.iterations;
    converged = res.converged;
    scaled_recon = std::move(res.xbar);
  }
  TimeVaryingSignal recon = inverse_scale(scaled_recon, scale);
  const MetricReport report = evaluate(d.signal, recon, eval_set);
  return RepetitionRun{std::move(mask), std::move(observed), std::move(eval_set), scale,
                       std::move(recon), report, iterations, converged};
}

std::vector<ExperimentResult> run_experiment(const Dataset& d, const ExperimentConfig& cfg) {
  cfg.validate();
  const SensorGraph graph = build_knn_graph(d.positions, cfg.k_graph);
  std::optional<SobolevOperator> op;
  if (cfg.method != Method::KnnBaseline) op = operator_for(graph, cfg.method, cfg.sobolev);

  std::vector<ExperimentResult> results;
  results.reserve(cfg.densities.size());
  for (double density : cfg.densities) {
    results.push_back(run_cell(d, graph, op ? &*op : nullptr, cfg.method, cfg.sobolev, density,
                               cfg.repetitions, cfg.master_seed, cfg.k_graph, cfg.threads));
  }
  return results;
}

GridSearchReport grid_search(const Dataset& d, double density,
                             const std::vector<double>& eps_grid,
                             const std::vector<double>& beta_grid,
                             const std::vector<double>& gamma_grid, std::size_t repetitions,
                             std::uint64_t master_seed, const ExperimentConfig& base) {
  if (eps_grid.empty() || beta_grid.empty() || gamma_grid.empty()) {
    throw Error(ErrorCode::InvalidArgument, "grid search needs nonempty eps, beta and gamma grids");
  }
  if (!(density > 0.0 && density <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "density must lie in (0, 1]");
  }
  if (repetitions == 0) throw Error(ErrorCode::InvalidArgument, "repetitions must be positive");
  const Method label = base.method == Method::KnnBaseline ? Method::Sobolev : base.method;
  const SensorGraph graph = build_knn_graph(d.positions, base.k_graph);

  GridSearchReport report;
  for (double eps : eps_grid) {
    for (double beta : beta_grid) {
      std::optional<SobolevOperator> op;
      std::optional<Error> op_error;
      try {
        op = sobolev_operator(graph, eps, beta);
      } catch (const Error& e) {
        op_error = e;
      }
      for (double gamma : gamma_grid) {
        SobolevConfig config = base.sobolev;
        config.epsilon = eps;
        config.beta = beta;
        config.gamma = gamma;
        ExperimentResult entry;
        if (op) {
          entry = run_cell(d, graph, &*op, label, config, density, repetitions, master_seed,
                           base.k_graph, base.threads);
          entry.sobolev = config;
        } else {
          entry.dataset_name = d.name;
          entry.method = label;
          entry.density = density;
          entry.repetitions = repetitions;
          entry.sobolev = config;
          entry.k_graph = base.k_graph;
          entry.master_seed = master_seed;
          entry.rmse_mean = entry.rmse_std = entry.mae_mean = entry.mae_std = std::nan("");
          for (std::size_t r = 0; r < repetitions; ++r) {
            entry.failed_reps.push_back({master_seed + r, op_error->code(), op_error->what()});
          }
        }
        report.entries.push_back(std::move(entry));
      }
    }
  }

  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    const auto& e = report.entries[i];
    if (!e.complete()) {
      report.excluded.push_back(i);
      continue;
    }
    if (!best) {
      best = i;
      continue;
    }
    const auto& b = report.entries[*best];
    const auto key = [](const ExperimentResult& r) {
      return std::make_tuple(r.rmse_mean, r.sobolev.gamma, r.sobolev.epsilon, r.sobolev.beta);
    };
    if (key(e) < key(b)) best = i;
  }
  if (!best) {
    const auto& first = report.entries.front().failed_reps.front();
    throw Error(first.code, "every grid configuration failed; first failure: " + first.message);
  }
  report.best = report.entries[*best];
  report.best_config = report.best.sobolev;
  return report;
}

TimeVaryingSignal knn_baseline_impute(const TimeVaryingSignal& y, const SamplingMask& mask,
                                      const SensorGraph& graph) {
  if (y.n_nodes() != mask.n_nodes() || y.n_times() != mask.n_times() ||
      y.n_nodes() != graph.n_nodes()) {
    throw Error(ErrorCode::DimensionMismatch, "observations, mask and graph differ in shape");
  }
  const Matrix& w = graph.weights();
  const Matrix& j = mask.matrix();
  const Matrix& v = y.values();
  Matrix out = v;
  for (Eigen::Index t = 0; t < v.cols(); ++t) {
    const double observed = j.col(t).sum();
    if (observed == 0.0) {
      throw Error(ErrorCode::EmptyColumn, "time step " + std::to_string(t) + " has no observations");
    }
    const double column_mean = v.col(t).cwiseProduct(j.col(t)).sum() / observed;
    const Vector numer = w * v.col(t).cwiseProduct(j.col(t));
    const Vector denom = w * j.col(t);
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      if (j(i, t) != 0.0) continue;
      out(i, t) = denom(i) > 0.0 ? numer(i) / denom(i) : column_mean;
    }
  }
  return TimeVaryingSignal(std::move(out));
}

Dataset make_synthetic_dataset(const SyntheticSpec& spec) {
  if (spec.n_nodes < 5 || spec.n_times < 2) {
    throw Error(ErrorCode::InvalidArgument, "synthetic network needs >= 5 nodes, >= 2 steps");
  }
  // Hand-rolled draws keep the dataset identical across standard libraries.
  std::mt19937_64 rng(spec.seed);
  auto unit = [](std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; };
  auto noise = [&](std::mt19937_64& g) {
    const double u1 = 1.0 - unit(g);
    const double u2 = unit(g);
    return spec.noise_sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  };

  std::vector<std::string> ids;
  std::vector<Point2> coords;
  for (std::size_t i = 0; i < spec.n_nodes; ++i) {
    char id[16];
    std::snprintf(id, sizeof id, "S%03zu", i + 1);
    ids.emplace_back(id);
    const double x = unit(rng);
    coords.push_back({x, unit(rng)});
  }
  NodePositions positions(std::move(ids), std::move(coords));
  const SensorGraph graph = build_knn_graph(positions, spec.k);
  const SpectralDecomposition spectral = spectral_decomposition(graph);

  const double m = static_cast<double>(spec.n_times);
  const double amp = std::sqrt(static_cast<double>(spec.n_nodes));
  constexpr double two_pi = 2.0 * std::numbers::pi;
  Matrix values(static_cast<Eigen::Index>(spec.n_nodes), static_cast<Eigen::Index>(spec.n_times));
  for (Eigen::Index t = 0; t < values.cols(); ++t) {
    const double s = static_cast<double>(t);
    const double a1 = 1.0 * amp * std::sin(two_pi * s / m + 0.3);
    const double a2 = 0.7 * amp * std::cos(two_pi * s / (0.7 * m));
    const double a3 = 0.5 * amp * std::sin(two_pi * s / (0.5 * m) + 1.0);
    values.col(t) = a1 * spectral.eigenvectors.col(1) + a2 * spectral.eigenvectors.col(2) +
                    a3 * spectral.eigenvectors.col(3);
  }
  for (Eigen::Index i = 0; i < values.size(); ++i) values.data()[i] += noise(rng);

  std::vector<std::int64_t> times(spec.n_times);
  for (std::size_t t = 0; t < spec.n_times; ++t) times[t] = static_cast<std::int64_t>(t);
  return Dataset{"synthetic",
                 std::move(positions),
                 std::move(times),
                 TimeVaryingSignal(values),
                 SamplingMask::full(spec.n_nodes, spec.n_times),
                 {}};
}

}  // namespace gsr
