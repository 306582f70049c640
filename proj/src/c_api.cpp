#include "gsr/gsr.h"

#include <filesystem>
#include <new>
#include <optional>
#include <string>
#include <vector>

#include "gsr/config.hpp"
#include "gsr/error.hpp"
#include "gsr/graph.hpp"
#include "gsr/harness.hpp"
#include "gsr/ingest.hpp"
#include "gsr/solver.hpp"

struct gsr_dataset {
  gsr::Dataset data;
};

struct gsr_graph {
  gsr::NodePositions positions;
  gsr::SensorGraph graph;
};

struct gsr_mask {
  gsr::SamplingMask mask;
};

struct gsr_run {
  gsr::RepetitionRun run;
};

struct gsr_results {
  std::vector<gsr::ExperimentResult> rows;
  std::vector<gsr::ExperimentResult> best;
  std::vector<std::string> best_json;
  std::string table;
};

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

thread_local std::string g_last_error;

gsr_status status_of(gsr::ErrorCode code) {
  switch (code) {
    case gsr::ErrorCode::InvalidArgument: return GSR_ERR_INVALID_ARGUMENT;
    case gsr::ErrorCode::KTooLarge: return GSR_ERR_K_TOO_LARGE;
    case gsr::ErrorCode::DuplicateCoordinates: return GSR_ERR_DUPLICATE_COORDINATES;
    case gsr::ErrorCode::ConvergenceFailure: return GSR_ERR_CONVERGENCE_FAILURE;
    case gsr::ErrorCode::NegativeBase: return GSR_ERR_NEGATIVE_BASE;
    case gsr::ErrorCode::HorizonTooShort: return GSR_ERR_HORIZON_TOO_SHORT;
    case gsr::ErrorCode::DimensionMismatch: return GSR_ERR_DIMENSION_MISMATCH;
    case gsr::ErrorCode::DensityTooLow: return GSR_ERR_DENSITY_TOO_LOW;
    case gsr::ErrorCode::UnsatisfiableCoverage: return GSR_ERR_UNSATISFIABLE_COVERAGE;
    case gsr::ErrorCode::SingularSystem: return GSR_ERR_SINGULAR_SYSTEM;
    case gsr::ErrorCode::MaxIterationsExceeded: return GSR_ERR_MAX_ITERATIONS;
    case gsr::ErrorCode::ProblemTooLarge: return GSR_ERR_PROBLEM_TOO_LARGE;
    case gsr::ErrorCode::EmptyEvaluationSet: return GSR_ERR_EMPTY_EVALUATION_SET;
    case gsr::ErrorCode::DegenerateRange: return GSR_ERR_DEGENERATE_RANGE;
    case gsr::ErrorCode::MalformedCsv: return GSR_ERR_MALFORMED_CSV;
    case gsr::ErrorCode::DuplicateReading: return GSR_ERR_DUPLICATE_READING;
    case gsr::ErrorCode::UnknownNode: return GSR_ERR_UNKNOWN_NODE;
    case gsr::ErrorCode::EmptyDataset: return GSR_ERR_EMPTY_DATASET;
    case gsr::ErrorCode::EmptyColumn: return GSR_ERR_EMPTY_COLUMN;
    case gsr::ErrorCode::IoError: return GSR_ERR_IO;
  }
  return GSR_ERR_INTERNAL;
}

gsr_status fail(gsr_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

template <typename Fn>
gsr_status guarded(Fn&& fn) noexcept {
  g_last_error.clear();
  try {
    return fn();
  } catch (const gsr::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(GSR_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(GSR_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(GSR_ERR_INTERNAL, "unknown exception");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw gsr::Error(gsr::ErrorCode::InvalidArgument, what);
}

void require_len(std::size_t len, std::size_t expected) {
  if (len != expected) {
    throw gsr::Error(gsr::ErrorCode::DimensionMismatch,
                     "buffer holds " + std::to_string(len) + " elements, expected " +
                         std::to_string(expected));
  }
}

gsr::SobolevConfig to_core(const gsr_sobolev_config& c) {
  gsr::SobolevConfig out;
  out.epsilon = c.epsilon;
  out.beta = c.beta;
  out.gamma = c.gamma;
  out.cg_tolerance = c.cg_tolerance;
  out.max_iterations = c.max_iterations;
  return out;
}

gsr::Matrix from_row_major(const double* data, std::size_t n, std::size_t m) {
  return Eigen::Map<const RowMajor>(data, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
}

gsr::SamplingMask mask_from_bytes(const uint8_t* bits, std::size_t n, std::size_t m) {
  gsr::Matrix mat(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < m; ++t) {
      const uint8_t b = bits[i * m + t];
      require(b <= 1, "mask bytes must be 0 or 1");
      mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = b;
    }
  }
  return gsr::SamplingMask::from_matrix(std::move(mat));
}

void copy_row_major(const gsr::Matrix& src, double* out) {
  Eigen::Map<RowMajor>(out, src.rows(), src.cols()) = src;
}

gsr_result_summary summarize(const gsr::ExperimentResult& r) {
  gsr_result_summary s{};
  s.method = gsr::to_string(r.method);
  s.density = r.density;
  s.rmse_mean = r.rmse_mean;
  s.rmse_std = r.rmse_std;
  s.mae_mean = r.mae_mean;
  s.mae_std = r.mae_std;
  s.epsilon = r.sobolev.epsilon;
  s.beta = r.sobolev.beta;
  s.gamma = r.sobolev.gamma;
  s.repetitions = r.repetitions;
  s.succeeded = r.per_rep.size();
  s.failed = r.failed_reps.size();
  return s;
}

template <typename Solve>
gsr_status solve_common(const gsr_graph* graph, const double* y, const uint8_t* mask,
                        std::size_t n, std::size_t m, const gsr_sobolev_config* config,
                        double* xbar, gsr_solve_info* info, Solve&& solve) {
  return guarded([&] {
    require(graph && y && mask && config && xbar, "null argument");
    const gsr::TimeVaryingSignal obs(from_row_major(y, n, m));
    const gsr::ReconstructionResult res =
        solve(obs, mask_from_bytes(mask, n, m), graph->graph, to_core(*config));
    copy_row_major(res.xbar.values(), xbar);
    if (info) {
      *info = {res.iterations, res.final_relative_residual, res.objective_value,
               res.converged ? 1 : 0};
    }
    if (!res.converged) {
      return fail(GSR_ERR_MAX_ITERATIONS, "conjugate gradient stopped after " +
                                              std::to_string(res.iterations) +
                                              " iterations without converging");
    }
    return GSR_OK;
  });
}

}  // namespace

extern "C" {

const char* gsr_status_name(gsr_status status) {
  switch (status) {
    case GSR_OK: return "Ok";
    case GSR_ERR_INTERNAL: return "Internal";
    default: break;
  }
  for (int c = 0; c <= static_cast<int>(gsr::ErrorCode::IoError); ++c) {
    const auto code = static_cast<gsr::ErrorCode>(c);
    if (status_of(code) == status) return gsr::to_string(code);
  }
  return "Unknown";
}

int gsr_status_exit_code(gsr_status status) {
  switch (status) {
    case GSR_OK: return 0;
    case GSR_ERR_CONVERGENCE_FAILURE:
    case GSR_ERR_SINGULAR_SYSTEM:
    case GSR_ERR_MAX_ITERATIONS:
    case GSR_ERR_PROBLEM_TOO_LARGE:
    case GSR_ERR_EMPTY_COLUMN:
    case GSR_ERR_IO:
    case GSR_ERR_INTERNAL:
      return 3;
    default:
      return 2;
  }
}

const char* gsr_last_error_message(void) { return g_last_error.c_str(); }

gsr_sobolev_config gsr_sobolev_config_default(void) {
  const gsr::SobolevConfig d;
  return {d.epsilon, d.beta, d.gamma, d.cg_tolerance, d.max_iterations};
}

gsr_status gsr_dataset_load(const char* positions_path, const char* readings_path,
                            const char* name, gsr_dataset** out) {
  return guarded([&] {
    require(positions_path && readings_path && out, "null argument");
    *out = new gsr_dataset{gsr::load_dataset(positions_path, readings_path, name ? name : "")};
    return GSR_OK;
  });
}

gsr_status gsr_dataset_load_from_config(const char* config_json, const char* base_dir,
                                        gsr_dataset** out) {
  return guarded([&] {
    require(config_json && out, "null argument");
    const gsr::DatasetSource src = gsr::parse_dataset_source(config_json);
    require(!src.positions.empty() && !src.readings.empty(),
            "config names no dataset ('positions' and 'readings' keys)");
    const std::filesystem::path base = base_dir ? base_dir : "";
    auto resolve = [&](const std::string& p) {
      const std::filesystem::path path(p);
      return path.is_absolute() ? path : base / path;
    };
    gsr::Dataset d = gsr::load_dataset(resolve(src.positions), resolve(src.readings), src.name);
    if (src.max_time_steps) d = gsr::truncate_time(d, *src.max_time_steps);
    if (src.min_coverage > 0.0) d = gsr::filter_consistent_nodes(d, src.min_coverage);
    *out = new gsr_dataset{std::move(d)};
    return GSR_OK;
  });
}

gsr_status gsr_dataset_synthetic(uint64_t seed, gsr_dataset** out) {
  return guarded([&] {
    require(out, "null argument");
    gsr::SyntheticSpec spec;
    spec.seed = seed;
    *out = new gsr_dataset{gsr::make_synthetic_dataset(spec)};
    return GSR_OK;
  });
}

gsr_status gsr_dataset_filter(const gsr_dataset* dataset, double min_coverage,
                              gsr_dataset** out) {
  return guarded([&] {
    require(dataset && out, "null argument");
    *out = new gsr_dataset{gsr::filter_consistent_nodes(dataset->data, min_coverage)};
    return GSR_OK;
  });
}

gsr_status gsr_dataset_truncate(const gsr_dataset* dataset, size_t max_time_steps,
                                gsr_dataset** out) {
  return guarded([&] {
    require(dataset && out, "null argument");
    *out = new gsr_dataset{gsr::truncate_time(dataset->data, max_time_steps)};
    return GSR_OK;
  });
}

gsr_status gsr_dataset_dims(const gsr_dataset* dataset, size_t* n_nodes, size_t* n_times) {
  return guarded([&] {
    require(dataset, "null dataset");
    if (n_nodes) *n_nodes = dataset->data.signal.n_nodes();
    if (n_times) *n_times = dataset->data.signal.n_times();
    return GSR_OK;
  });
}

gsr_status gsr_dataset_values(const gsr_dataset* dataset, double* values, uint8_t* present,
                              size_t len) {
  return guarded([&] {
    require(dataset, "null dataset");
    const auto& d = dataset->data;
    require_len(len, d.signal.n_nodes() * d.signal.n_times());
    if (values) copy_row_major(d.signal.values(), values);
    if (present) {
      for (std::size_t i = 0; i < d.signal.n_nodes(); ++i) {
        for (std::size_t t = 0; t < d.signal.n_times(); ++t) {
          present[i * d.signal.n_times() + t] = d.native_mask.observed(i, t) ? 1 : 0;
        }
      }
    }
    return GSR_OK;
  });
}

size_t gsr_dataset_warning_count(const gsr_dataset* dataset) {
  return dataset ? dataset->data.warnings.size() : 0;
}

const char* gsr_dataset_warning(const gsr_dataset* dataset, size_t index) {
  if (!dataset || index >= dataset->data.warnings.size()) return nullptr;
  return dataset->data.warnings[index].c_str();
}

gsr_status gsr_dataset_write(const gsr_dataset* dataset, const char* positions_path,
                             const char* readings_path) {
  return guarded([&] {
    require(dataset && positions_path && readings_path, "null argument");
    gsr::write_dataset_csv(dataset->data, positions_path, readings_path);
    return GSR_OK;
  });
}

void gsr_dataset_free(gsr_dataset* dataset) { delete dataset; }

gsr_status gsr_graph_build(const gsr_dataset* dataset, size_t k, gsr_graph** out) {
  return guarded([&] {
    require(dataset && out, "null argument");
    const auto& pos = dataset->data.positions;
    *out = new gsr_graph{pos, gsr::build_knn_graph(pos, k)};
    return GSR_OK;
  });
}

gsr_status gsr_graph_from_positions(const char* positions_path, size_t k, gsr_graph** out) {
  return guarded([&] {
    require(positions_path && out, "null argument");
    gsr::NodePositions pos = gsr::read_positions_csv(positions_path);
    gsr::SensorGraph graph = gsr::build_knn_graph(pos, k);
    *out = new gsr_graph{std::move(pos), std::move(graph)};
    return GSR_OK;
  });
}

gsr_status gsr_graph_from_coordinates(const double* xy, size_t n, size_t k, gsr_graph** out) {
  return guarded([&] {
    require(xy && out, "null argument");
    std::vector<std::string> ids;
    std::vector<gsr::Point2> coords;
    for (std::size_t i = 0; i < n; ++i) {
      ids.push_back(std::to_string(i));
      coords.push_back({xy[2 * i], xy[2 * i + 1]});
    }
    gsr::NodePositions pos(std::move(ids), std::move(coords));
    gsr::SensorGraph graph = gsr::build_knn_graph(pos, k);
    *out = new gsr_graph{std::move(pos), std::move(graph)};
    return GSR_OK;
  });
}

gsr_status gsr_graph_summary(const gsr_graph* graph, gsr_graph_info* out) {
  return guarded([&] {
    require(graph && out, "null argument");
    const auto& g = graph->graph;
    const gsr::SpectralDecomposition spec = gsr::spectral_decomposition(g);
    const auto comps = g.components();
    out->n_nodes = g.n_nodes();
    out->n_edges = g.edges().size();
    out->n_components = *std::max_element(comps.begin(), comps.end()) + 1;
    out->sigma = g.sigma();
    out->lambda_min = spec.eigenvalues(0);
    out->lambda_2 = spec.eigenvalues(1);
    out->lambda_max = spec.eigenvalues(spec.eigenvalues.size() - 1);
    return GSR_OK;
  });
}

gsr_status gsr_graph_eigenvalues(const gsr_graph* graph, double* out, size_t len) {
  return guarded([&] {
    require(graph && out, "null argument");
    require_len(len, graph->graph.n_nodes());
    const gsr::SpectralDecomposition spec = gsr::spectral_decomposition(graph->graph);
    for (std::size_t i = 0; i < len; ++i) out[i] = spec.eigenvalues(static_cast<Eigen::Index>(i));
    return GSR_OK;
  });
}

gsr_status gsr_graph_weights(const gsr_graph* graph, double* out, size_t len) {
  return guarded([&] {
    require(graph && out, "null argument");
    const std::size_t n = graph->graph.n_nodes();
    require_len(len, n * n);
    copy_row_major(graph->graph.weights(), out);
    return GSR_OK;
  });
}

gsr_status gsr_graph_write_edges(const gsr_graph* graph, const char* path) {
  return guarded([&] {
    require(graph && path, "null argument");
    gsr::write_edge_list_csv(graph->graph, graph->positions, path);
    return GSR_OK;
  });
}

void gsr_graph_free(gsr_graph* graph) { delete graph; }

gsr_status gsr_mask_random(size_t n_nodes, size_t n_times, double density, uint64_t seed,
                           gsr_mask** out) {
  return guarded([&] {
    require(out, "null argument");
    *out = new gsr_mask{gsr::random_mask(n_nodes, n_times, density, seed)};
    return GSR_OK;
  });
}

gsr_status gsr_mask_bits(const gsr_mask* mask, uint8_t* out, size_t len) {
  return guarded([&] {
    require(mask && out, "null argument");
    const auto& m = mask->mask;
    require_len(len, m.n_nodes() * m.n_times());
    for (std::size_t i = 0; i < m.n_nodes(); ++i) {
      for (std::size_t t = 0; t < m.n_times(); ++t) {
        out[i * m.n_times() + t] = m.observed(i, t) ? 1 : 0;
      }
    }
    return GSR_OK;
  });
}

gsr_status gsr_mask_write(const gsr_mask* mask, const char* path) {
  return guarded([&] {
    require(mask && path, "null argument");
    gsr::write_mask_csv(mask->mask, path);
    return GSR_OK;
  });
}

void gsr_mask_free(gsr_mask* mask) { delete mask; }

gsr_status gsr_solve(const gsr_graph* graph, const double* y, const uint8_t* mask,
                     size_t n_nodes, size_t n_times, const gsr_sobolev_config* config,
                     double* xbar, gsr_solve_info* info) {
  return solve_common(graph, y, mask, n_nodes, n_times, config, xbar, info,
                      [](const auto& obs, const auto& j, const auto& g, const auto& cfg) {
                        return gsr::reconstruct_sobolev(obs, j, g, cfg);
                      });
}

gsr_status gsr_solve_dense(const gsr_graph* graph, const double* y, const uint8_t* mask,
                           size_t n_nodes, size_t n_times, const gsr_sobolev_config* config,
                           double* xbar, gsr_solve_info* info) {
  return solve_common(graph, y, mask, n_nodes, n_times, config, xbar, info,
                      [](const auto& obs, const auto& j, const auto& g, const auto& cfg) {
                        return gsr::dense_oracle_solve(obs, j, g, cfg);
                      });
}

gsr_status gsr_run_reconstruct(const gsr_dataset* dataset, const gsr_graph* graph,
                               const char* method, const gsr_sobolev_config* config,
                               double density, uint64_t seed, gsr_run** out) {
  return guarded([&] {
    require(dataset && graph && method && config && out, "null argument");
    *out = nullptr;
    const gsr::Method m = gsr::parse_method(method);
    gsr::SobolevConfig cfg = to_core(*config);
    std::optional<gsr::SobolevOperator> op;
    if (m == gsr::Method::Tikhonov) {
      cfg.epsilon = 0.0;
      cfg.beta = 1.0;
    }
    if (m != gsr::Method::KnnBaseline) {
      cfg.validate();
      op = gsr::sobolev_operator(graph->graph, cfg.epsilon, cfg.beta);
    }
    gsr::RepetitionRun run = gsr::run_repetition(dataset->data, graph->graph, op ? &*op : nullptr,
                                                 m, cfg, density, seed);
    const bool converged = run.converged;
    *out = new gsr_run{std::move(run)};
    if (!converged) {
      return fail(GSR_ERR_MAX_ITERATIONS, "conjugate gradient hit max_iterations = " +
                                              std::to_string(cfg.max_iterations));
    }
    return GSR_OK;
  });
}

gsr_status gsr_run_get_metrics(const gsr_run* run, gsr_run_metrics* out) {
  return guarded([&] {
    require(run && out, "null argument");
    const auto& r = run->run;
    *out = {r.report.rmse,   r.report.mae,      r.report.n_evaluated, r.observed.observed_count(),
            r.iterations,    r.converged ? 1 : 0, r.scale.min_value,  r.scale.max_value};
    return GSR_OK;
  });
}

gsr_status gsr_run_values(const gsr_run* run, double* out, size_t len) {
  return guarded([&] {
    require(run && out, "null argument");
    const auto& v = run->run.reconstruction;
    require_len(len, v.n_nodes() * v.n_times());
    copy_row_major(v.values(), out);
    return GSR_OK;
  });
}

gsr_status gsr_run_write_reconstruction(const gsr_run* run, const gsr_dataset* dataset,
                                        const char* path) {
  return guarded([&] {
    require(run && dataset && path, "null argument");
    gsr::write_signal_csv(dataset->data.positions, dataset->data.time_indices,
                          run->run.reconstruction, path);
    return GSR_OK;
  });
}

gsr_status gsr_run_write_mask(const gsr_run* run, const char* path) {
  return guarded([&] {
    require(run && path, "null argument");
    gsr::write_mask_csv(run->run.observed, path);
    return GSR_OK;
  });
}

void gsr_run_free(gsr_run* run) { delete run; }

gsr_status gsr_experiment_run(const gsr_dataset* dataset, const char* config_json,
                              size_t threads, gsr_results** out) {
  return guarded([&] {
    require(dataset && config_json && out, "null argument");
    gsr::ExperimentPlan plan = gsr::parse_experiment_plan(config_json);
    auto results = std::make_unique<gsr_results>();
    for (auto& cfg : plan.runs) {
      if (threads > 0) cfg.threads = threads;
      auto rows = gsr::run_experiment(dataset->data, cfg);
      results->rows.insert(results->rows.end(), rows.begin(), rows.end());
    }
    results->table = gsr::format_results_table(results->rows);
    *out = results.release();
    return GSR_OK;
  });
}

gsr_status gsr_gridsearch_run(const gsr_dataset* dataset, const char* config_json,
                              size_t threads, gsr_results** out) {
  return guarded([&] {
    require(dataset && config_json && out, "null argument");
    gsr::GridPlan plan = gsr::parse_grid_plan(config_json);
    if (threads > 0) plan.base.threads = threads;
    auto results = std::make_unique<gsr_results>();
    for (double density : plan.densities) {
      gsr::GridSearchReport report =
          gsr::grid_search(dataset->data, density, plan.eps_grid, plan.beta_grid, plan.gamma_grid,
                           plan.base.repetitions, plan.base.master_seed, plan.base);
      results->rows.insert(results->rows.end(), report.entries.begin(), report.entries.end());
      results->best_json.push_back(gsr::sobolev_config_json(report.best_config));
      results->best.push_back(std::move(report.best));
    }
    results->table = gsr::format_results_table(results->rows);
    *out = results.release();
    return GSR_OK;
  });
}

size_t gsr_results_count(const gsr_results* results) { return results ? results->rows.size() : 0; }

gsr_status gsr_results_get(const gsr_results* results, size_t index, gsr_result_summary* out) {
  return guarded([&] {
    require(results && out, "null argument");
    require(index < results->rows.size(), "result index out of range");
    *out = summarize(results->rows[index]);
    return GSR_OK;
  });
}

size_t gsr_results_failed_reps(const gsr_results* results) {
  if (!results) return 0;
  std::size_t total = 0;
  for (const auto& r : results->rows) total += r.failed_reps.size();
  return total;
}

const char* gsr_results_table(const gsr_results* results) {
  return results ? results->table.c_str() : "";
}

gsr_status gsr_results_write(const gsr_results* results, const char* stem) {
  return guarded([&] {
    require(results && stem, "null argument");
    gsr::write_results(results->rows, stem);
    return GSR_OK;
  });
}

size_t gsr_results_best_count(const gsr_results* results) {
  return results ? results->best.size() : 0;
}

const char* gsr_results_best_config_json(const gsr_results* results, size_t index) {
  if (!results || index >= results->best_json.size()) return nullptr;
  return results->best_json[index].c_str();
}

gsr_status gsr_results_best(const gsr_results* results, size_t index, gsr_result_summary* out) {
  return guarded([&] {
    require(results && out, "null argument");
    require(index < results->best.size(), "best-config index out of range");
    *out = summarize(results->best[index]);
    return GSR_OK;
  });
}

void gsr_results_free(gsr_results* results) { delete results; }

}  // extern "C"
