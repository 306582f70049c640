// gsr: command-line front end over the C API.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gsr/gsr.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

// Thrown to unwind with a status already reported.
struct Failure {
  int exit_code;
};

void check(gsr_status status, const std::string& context) {
  if (status == GSR_OK) return;
  std::cerr << "error: " << context << ": " << gsr_status_name(status) << ": "
            << gsr_last_error_message() << "\n";
  throw Failure{gsr_status_exit_code(status)};
}

[[noreturn]] void usage_error(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  throw Failure{kExitUsage};
}

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using DatasetPtr = std::unique_ptr<gsr_dataset, Deleter<gsr_dataset, gsr_dataset_free>>;
using GraphPtr = std::unique_ptr<gsr_graph, Deleter<gsr_graph, gsr_graph_free>>;
using RunPtr = std::unique_ptr<gsr_run, Deleter<gsr_run, gsr_run_free>>;
using ResultsPtr = std::unique_ptr<gsr_results, Deleter<gsr_results, gsr_results_free>>;

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << path << "\n";
    throw Failure{kExitUsage};
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) {
    std::cerr << "error: cannot write " << path.string() << "\n";
    throw Failure{kExitRuntime};
  }
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    std::cerr << "error: cannot create " << dir << ": " << ec.message() << "\n";
    throw Failure{kExitRuntime};
  }
}

void print_warnings(const gsr_dataset* d) {
  for (size_t i = 0; i < gsr_dataset_warning_count(d); ++i) {
    std::cerr << "warning: " << gsr_dataset_warning(d, i) << "\n";
  }
}

DatasetPtr load_dataset(const std::string& positions, const std::string& readings,
                        double min_coverage, std::optional<size_t> max_steps) {
  gsr_dataset* raw = nullptr;
  check(gsr_dataset_load(positions.c_str(), readings.c_str(), nullptr, &raw), "loading dataset");
  DatasetPtr d(raw);
  print_warnings(d.get());
  if (max_steps) {
    check(gsr_dataset_truncate(d.get(), *max_steps, &raw), "truncating dataset");
    d.reset(raw);
  }
  if (min_coverage > 0.0) {
    check(gsr_dataset_filter(d.get(), min_coverage, &raw), "filtering nodes");
    d.reset(raw);
  }
  return d;
}

// Loads the dataset named by a config file, letting command-line paths
// override the config's own.
DatasetPtr load_config_dataset(const std::string& config_path, std::string& config_text,
                               const std::string& positions, const std::string& readings) {
  config_text = read_text(config_path);
  std::string source_text = config_text;
  if (!positions.empty() || !readings.empty()) {
    if (positions.empty() || readings.empty()) {
      usage_error("--positions and --readings must be given together");
    }
    json doc;
    try {
      doc = json::parse(config_text);
    } catch (const json::exception& e) {
      usage_error(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) usage_error("config must be a JSON object");
    doc["positions"] = fs::absolute(positions).string();
    doc["readings"] = fs::absolute(readings).string();
    source_text = doc.dump();
    config_text = source_text;
  }
  const std::string base = fs::absolute(config_path).parent_path().string();
  gsr_dataset* raw = nullptr;
  check(gsr_dataset_load_from_config(source_text.c_str(), base.c_str(), &raw), "loading dataset");
  DatasetPtr d(raw);
  print_warnings(d.get());
  return d;
}

struct ReconstructArgs {
  std::string positions, readings, out, method = "sobolev", mask_out;
  size_t k = 0;
  double epsilon = 0, beta = 0, gamma = 0, density = 0;
  uint64_t seed = 0;
  double cg_tolerance = gsr_sobolev_config_default().cg_tolerance;
  size_t max_iterations = gsr_sobolev_config_default().max_iterations;
  double min_coverage = 0.0;
  size_t max_time_steps = 0;
};

int cmd_reconstruct(const ReconstructArgs& a) {
  DatasetPtr d = load_dataset(a.positions, a.readings, a.min_coverage,
                              a.max_time_steps > 0 ? std::optional<size_t>(a.max_time_steps)
                                                   : std::nullopt);
  gsr_graph* graph_raw = nullptr;
  check(gsr_graph_build(d.get(), a.k, &graph_raw), "building graph");
  GraphPtr graph(graph_raw);

  const gsr_sobolev_config cfg{a.epsilon, a.beta, a.gamma, a.cg_tolerance, a.max_iterations};
  gsr_run* run_raw = nullptr;
  const gsr_status status = gsr_run_reconstruct(d.get(), graph.get(), a.method.c_str(), &cfg,
                                                a.density, a.seed, &run_raw);
  RunPtr run(run_raw);
  if (!run) check(status, "reconstructing");
  const std::string solver_message = gsr_last_error_message();

  ensure_dir(a.out);
  const fs::path out(a.out);
  check(gsr_run_write_reconstruction(run.get(), d.get(), (out / "reconstruction.csv").c_str()),
        "writing reconstruction");
  if (!a.mask_out.empty()) {
    check(gsr_run_write_mask(run.get(), a.mask_out.c_str()), "writing mask");
  }

  gsr_run_metrics m{};
  check(gsr_run_get_metrics(run.get(), &m), "reading metrics");
  size_t n = 0, t = 0;
  check(gsr_dataset_dims(d.get(), &n, &t), "reading dims");
  json doc = {{"method", a.method},
              {"density", a.density},
              {"seed", a.seed},
              {"k_graph", a.k},
              {"n_nodes", n},
              {"n_times", t},
              {"config",
               {{"epsilon", a.epsilon},
                {"beta", a.beta},
                {"gamma", a.gamma},
                {"cg_tolerance", a.cg_tolerance},
                {"max_iterations", a.max_iterations}}},
              {"rmse", m.rmse},
              {"mae", m.mae},
              {"n_evaluated", m.n_evaluated},
              {"n_observed", m.n_observed},
              {"iterations", m.iterations},
              {"converged", m.converged != 0},
              {"scale", {{"min", m.scale_min}, {"max", m.scale_max}}}};
  write_text(out / "metrics.json", doc.dump(2) + "\n");

  std::printf("rmse %.6g  mae %.6g  evaluated %zu  iterations %zu\n", m.rmse, m.mae,
              m.n_evaluated, m.iterations);
  if (status != GSR_OK) {
    std::cerr << "error: reconstructing: " << gsr_status_name(status) << ": " << solver_message
              << "\n";
    return gsr_status_exit_code(status);
  }
  return 0;
}

struct ConfigArgs {
  std::string config, positions, readings, out = ".";
  size_t threads = 0;
};

int report_failures(const gsr_results* r) {
  const size_t failed = gsr_results_failed_reps(r);
  if (failed == 0) return 0;
  std::cerr << "error: " << failed << " repetition(s) failed; see failed_reps in the JSON output\n";
  return kExitRuntime;
}

int cmd_experiment(const ConfigArgs& a) {
  std::string text;
  DatasetPtr d = load_config_dataset(a.config, text, a.positions, a.readings);
  gsr_results* raw = nullptr;
  check(gsr_experiment_run(d.get(), text.c_str(), a.threads, &raw), "running experiment");
  ResultsPtr r(raw);
  ensure_dir(a.out);
  check(gsr_results_write(r.get(), (fs::path(a.out) / "results").c_str()), "writing results");
  std::fputs(gsr_results_table(r.get()), stdout);
  return report_failures(r.get());
}

int cmd_gridsearch(const ConfigArgs& a) {
  std::string text;
  DatasetPtr d = load_config_dataset(a.config, text, a.positions, a.readings);
  gsr_results* raw = nullptr;
  check(gsr_gridsearch_run(d.get(), text.c_str(), a.threads, &raw), "running grid search");
  ResultsPtr r(raw);
  ensure_dir(a.out);
  const fs::path out(a.out);
  check(gsr_results_write(r.get(), (out / "grid_report").c_str()), "writing grid report");

  const size_t n_best = gsr_results_best_count(r.get());
  json best = json::array();
  for (size_t i = 0; i < n_best; ++i) {
    gsr_result_summary s{};
    check(gsr_results_best(r.get(), i, &s), "reading best config");
    best.push_back({{"density", s.density},
                    {"rmse_mean", s.rmse_mean},
                    {"config", json::parse(gsr_results_best_config_json(r.get(), i))}});
  }
  // A single density echoes the winning config itself.
  const json doc = n_best == 1 ? best[0]["config"] : best;
  write_text(out / "best_config.json", doc.dump(2) + "\n");

  std::fputs(gsr_results_table(r.get()), stdout);
  for (const auto& b : best) {
    std::printf("best at density %g: %s (rmse %.6g)\n", b["density"].get<double>(),
                b["config"].dump().c_str(), b["rmse_mean"].get<double>());
  }
  return report_failures(r.get());
}

int cmd_graph_info(const std::string& positions, size_t k, const std::string& edges_out) {
  gsr_graph* raw = nullptr;
  check(gsr_graph_from_positions(positions.c_str(), k, &raw), "building graph");
  GraphPtr graph(raw);
  gsr_graph_info info{};
  check(gsr_graph_summary(graph.get(), &info), "summarizing graph");
  std::printf("nodes       %zu\n", info.n_nodes);
  std::printf("edges       %zu\n", info.n_edges);
  std::printf("components  %zu\n", info.n_components);
  std::printf("sigma       %.6g\n", info.sigma);
  std::printf("lambda_min  %.6g\n", info.lambda_min);
  std::printf("lambda_2    %.6g\n", info.lambda_2);
  std::printf("lambda_max  %.6g\n", info.lambda_max);
  if (!edges_out.empty()) check(gsr_graph_write_edges(graph.get(), edges_out.c_str()), "writing edges");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reconstruct missing sensor readings with graph Sobolev regularization"};
  app.require_subcommand(1);

  ReconstructArgs rec;
  auto* reconstruct = app.add_subcommand("reconstruct", "Mask, reconstruct and score one dataset");
  reconstruct->add_option("--positions", rec.positions, "Node coordinates CSV (node_id,x,y)")->required();
  reconstruct->add_option("--readings", rec.readings, "Readings CSV (node_id,time_index,value)")->required();
  reconstruct->add_option("--k", rec.k, "Neighbors per node in the kNN graph")->required();
  reconstruct->add_option("--epsilon", rec.epsilon, "Laplacian shift")->required();
  reconstruct->add_option("--beta", rec.beta, "Sobolev exponent")->required();
  reconstruct->add_option("--gamma", rec.gamma, "Regularization weight")->required();
  reconstruct->add_option("--density", rec.density, "Fraction of entries kept per time step")
      ->required()
      ->check(CLI::Range(0.0, 1.0));
  reconstruct->add_option("--seed", rec.seed, "Mask seed")->required();
  reconstruct->add_option("--out", rec.out, "Output directory")->required();
  reconstruct->add_option("--method", rec.method, "sobolev, tikhonov or knn_baseline")
      ->check(CLI::IsMember({"sobolev", "tikhonov", "knn_baseline"}));
  reconstruct->add_option("--cg-tolerance", rec.cg_tolerance, "Relative residual target");
  reconstruct->add_option("--max-iterations", rec.max_iterations, "CG iteration cap");
  reconstruct->add_option("--min-coverage", rec.min_coverage, "Drop nodes observed less often")
      ->check(CLI::Range(0.0, 1.0));
  reconstruct->add_option("--max-time-steps", rec.max_time_steps, "Keep only the first steps");
  reconstruct->add_option("--mask-out", rec.mask_out, "Also write the sampling mask CSV");

  ConfigArgs exp_args;
  auto* experiment = app.add_subcommand("experiment", "Run the Monte-Carlo density sweep");
  ConfigArgs grid_args;
  auto* gridsearch = app.add_subcommand("gridsearch", "Tune (epsilon, beta, gamma) on a grid");
  for (auto [cmd, args] : {std::pair{experiment, &exp_args}, std::pair{gridsearch, &grid_args}}) {
    cmd->add_option("--config", args->config, "JSON config")->required()->check(CLI::ExistingFile);
    cmd->add_option("--positions", args->positions, "Override the config's positions CSV");
    cmd->add_option("--readings", args->readings, "Override the config's readings CSV");
    cmd->add_option("--out", args->out, "Output directory")->capture_default_str();
    cmd->add_option("--threads", args->threads, "Cap on parallel repetitions");
  }

  std::string gi_positions, gi_edges;
  size_t gi_k = 0;
  auto* graph_info = app.add_subcommand("graph-info", "Summarize the kNN graph of a sensor layout");
  graph_info->add_option("--positions", gi_positions, "Node coordinates CSV")->required();
  graph_info->add_option("--k", gi_k, "Neighbors per node")->required();
  graph_info->add_option("--edges-out", gi_edges, "Write the edge list CSV here");

  uint64_t syn_seed = 7;
  std::string syn_out = ".";
  auto* synthesize = app.add_subcommand("synthesize", "Write the synthetic benchmark dataset");
  synthesize->add_option("--seed", syn_seed, "Generator seed")->capture_default_str();
  synthesize->add_option("--out", syn_out, "Output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*reconstruct) return cmd_reconstruct(rec);
    if (*experiment) return cmd_experiment(exp_args);
    if (*gridsearch) return cmd_gridsearch(grid_args);
    if (*graph_info) return cmd_graph_info(gi_positions, gi_k, gi_edges);
    if (*synthesize) {
      gsr_dataset* raw = nullptr;
      check(gsr_dataset_synthetic(syn_seed, &raw), "generating dataset");
      DatasetPtr d(raw);
      ensure_dir(syn_out);
      const fs::path out(syn_out);
      check(gsr_dataset_write(d.get(), (out / "synthetic_positions.csv").c_str(),
                              (out / "synthetic_readings.csv").c_str()),
            "writing dataset");
      return 0;
    }
  } catch (const Failure& f) {
    return f.exit_code;
  }
  return 0;
}
