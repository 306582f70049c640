#include "gsr/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <unordered_map>

#include "json.hpp"

#include "csv.hpp"
#include "gsr/error.hpp"

namespace gsr {

namespace {

using nlohmann::ordered_json;

std::string malformed_at(const std::filesystem::path& path, std::size_t line,
                         const std::string& what) {
  return path.string() + ":" + std::to_string(line) + ": " + what;
}

ordered_json to_json(const ExperimentResult& r) {
  ordered_json per_rep = ordered_json::array();
  for (const auto& rep : r.per_rep) {
    per_rep.push_back({{"seed", rep.seed},
                       {"rmse", rep.rmse},
                       {"mae", rep.mae},
                       {"n_evaluated", rep.n_evaluated},
                       {"iterations", rep.iterations}});
  }
  ordered_json failed = ordered_json::array();
  for (const auto& f : r.failed_reps) {
    failed.push_back({{"seed", f.seed}, {"error", to_string(f.code)}, {"message", f.message}});
  }
  return {{"dataset", r.dataset_name},
          {"method", to_string(r.method)},
          {"density", r.density},
          {"rmse_mean", r.rmse_mean},
          {"rmse_std", r.rmse_std},
          {"mae_mean", r.mae_mean},
          {"mae_std", r.mae_std},
          {"repetitions", r.repetitions},
          {"complete", r.complete()},
          {"per_rep", std::move(per_rep)},
          {"failed_reps", std::move(failed)},
          {"config",
           {{"epsilon", r.sobolev.epsilon},
            {"beta", r.sobolev.beta},
            {"gamma", r.sobolev.gamma},
            {"cg_tolerance", r.sobolev.cg_tolerance},
            {"max_iterations", r.sobolev.max_iterations},
            {"k_graph", r.k_graph},
            {"master_seed", r.master_seed}}}};
}

}  // namespace

NodePositions read_positions_csv(const std::filesystem::path& path) {
  const csv::Table table = csv::read(path);
  csv::require_header(table, {"node_id", "x", "y"}, path);
  std::vector<std::string> ids;
  std::vector<Point2> coords;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto x = csv::parse_double(row[1]);
    const auto y = csv::parse_double(row[2]);
    if (row[0].empty()) {
      throw Error(ErrorCode::MalformedCsv, malformed_at(path, table.line_numbers[r], "empty node_id"));
    }
    if (!x || !y || !std::isfinite(*x) || !std::isfinite(*y)) {
      throw Error(ErrorCode::MalformedCsv,
                  malformed_at(path, table.line_numbers[r], "unparsable coordinate"));
    }
    ids.push_back(row[0]);
    coords.push_back({*x, *y});
  }
  if (ids.size() < 2) {
    throw Error(ErrorCode::EmptyDataset, path.string() + ": need at least 2 nodes");
  }
  return NodePositions(std::move(ids), std::move(coords));
}

Dataset load_dataset(const std::filesystem::path& positions_path,
                     const std::filesystem::path& readings_path, std::string name) {
  const NodePositions positions = read_positions_csv(positions_path);
  std::unordered_map<std::string, std::size_t> node_index;
  for (std::size_t i = 0; i < positions.size(); ++i) node_index.emplace(positions.ids()[i], i);

  const csv::Table table = csv::read(readings_path);
  csv::require_header(table, {"node_id", "time_index", "value"}, readings_path);

  struct Reading {
    std::size_t node;
    std::int64_t time;
    double value;  // NaN when the source marks it missing
  };
  std::vector<Reading> readings;
  readings.reserve(table.rows.size());
  std::vector<bool> node_seen(positions.size(), false);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    const auto it = node_index.find(row[0]);
    if (it == node_index.end()) {
      throw Error(ErrorCode::UnknownNode,
                  malformed_at(readings_path, line, "node '" + row[0] + "' not in positions"));
    }
    const auto time = csv::parse_int(row[1]);
    if (!time || *time < 0) {
      throw Error(ErrorCode::MalformedCsv,
                  malformed_at(readings_path, line, "time_index must be a nonnegative integer"));
    }
    double value = std::nan("");
    if (!row[2].empty()) {
      const auto parsed = csv::parse_double(row[2]);
      if (!parsed) {
        throw Error(ErrorCode::MalformedCsv, malformed_at(readings_path, line,
                                                          "unparsable value '" + row[2] + "'"));
      }
      value = *parsed;
    }
    node_seen[it->second] = true;
    readings.push_back({it->second, *time, value});
  }

  std::vector<std::int64_t> times;
  times.reserve(readings.size());
  for (const auto& rd : readings) times.push_back(rd.time);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  std::vector<std::size_t> kept;
  std::vector<std::string> warnings;
  std::vector<std::size_t> row_of(positions.size(), 0);
  for (std::size_t i = 0; i < positions.size(); ++i) {
    if (node_seen[i]) {
      row_of[i] = kept.size();
      kept.push_back(i);
    } else {
      warnings.push_back("node '" + positions.ids()[i] + "' has no readings; dropped");
    }
  }
  if (kept.size() < 2 || times.size() < 2) {
    throw Error(ErrorCode::EmptyDataset, readings_path.string() +
                                             ": need readings for at least 2 nodes and 2 time steps");
  }

  const auto n = static_cast<Eigen::Index>(kept.size());
  const auto m = static_cast<Eigen::Index>(times.size());
  Matrix values = Matrix::Zero(n, m);
  Matrix present = Matrix::Zero(n, m);
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> filled =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, m, false);
  for (const auto& rd : readings) {
    const auto row = static_cast<Eigen::Index>(row_of[rd.node]);
    const auto col = static_cast<Eigen::Index>(
        std::lower_bound(times.begin(), times.end(), rd.time) - times.begin());
    if (filled(row, col)) {
      throw Error(ErrorCode::DuplicateReading,
                  readings_path.string() + ": duplicate reading for node '" +
                      positions.ids()[rd.node] + "' at time " + std::to_string(rd.time));
    }
    filled(row, col) = true;
    if (std::isfinite(rd.value)) {
      values(row, col) = rd.value;
      present(row, col) = 1.0;
    }
  }

  if (name.empty()) name = readings_path.stem().string();
  return Dataset{std::move(name),
                 positions.subset(kept),
                 std::move(times),
                 TimeVaryingSignal(std::move(values)),
                 SamplingMask::from_matrix(std::move(present)),
                 std::move(warnings)};
}

Dataset filter_consistent_nodes(const Dataset& d, double min_coverage) {
  if (!(min_coverage >= 0.0 && min_coverage <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "min_coverage must lie in [0, 1]");
  }
  const Matrix& present = d.native_mask.matrix();
  const double m = static_cast<double>(present.cols());
  std::vector<std::size_t> kept;
  std::vector<std::string> warnings = d.warnings;
  for (Eigen::Index i = 0; i < present.rows(); ++i) {
    const double coverage = present.row(i).sum() / m;
    if (coverage >= min_coverage) {
      kept.push_back(static_cast<std::size_t>(i));
    } else {
      warnings.push_back("node '" + d.positions.ids()[static_cast<std::size_t>(i)] +
                         "' covers " + csv::format_significant(coverage, 4) +
                         " of the time steps; dropped");
    }
  }
  if (kept.size() < 2) {
    throw Error(ErrorCode::EmptyDataset, "fewer than 2 nodes reach coverage " +
                                             csv::format_significant(min_coverage, 4));
  }
  const auto rows = static_cast<Eigen::Index>(kept.size());
  Matrix values(rows, present.cols());
  Matrix mask(rows, present.cols());
  for (Eigen::Index r = 0; r < rows; ++r) {
    values.row(r) = d.signal.values().row(static_cast<Eigen::Index>(kept[static_cast<std::size_t>(r)]));
    mask.row(r) = present.row(static_cast<Eigen::Index>(kept[static_cast<std::size_t>(r)]));
  }
  return Dataset{d.name,
                 d.positions.subset(kept),
                 d.time_indices,
                 TimeVaryingSignal(std::move(values)),
                 SamplingMask::from_matrix(std::move(mask)),
                 std::move(warnings)};
}

Dataset truncate_time(const Dataset& d, std::size_t max_time_steps) {
  if (max_time_steps >= d.time_indices.size()) return d;
  if (max_time_steps < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 time steps");
  const auto cols = static_cast<Eigen::Index>(max_time_steps);
  std::vector<std::int64_t> times(d.time_indices.begin(),
                                  d.time_indices.begin() + static_cast<std::ptrdiff_t>(max_time_steps));
  return Dataset{d.name,
                 d.positions,
                 std::move(times),
                 TimeVaryingSignal(d.signal.values().leftCols(cols)),
                 SamplingMask::from_matrix(d.native_mask.matrix().leftCols(cols)),
                 d.warnings};
}

std::string results_csv(const std::vector<ExperimentResult>& results) {
  std::string out = "dataset,method,density,rmse_mean,rmse_std,mae_mean,mae_std,reps\n";
  for (const auto& r : results) {
    out += r.dataset_name + "," + to_string(r.method) + "," +
           csv::format_significant(r.density, 6) + "," + csv::format_significant(r.rmse_mean, 6) +
           "," + csv::format_significant(r.rmse_std, 6) + "," +
           csv::format_significant(r.mae_mean, 6) + "," + csv::format_significant(r.mae_std, 6) +
           "," + std::to_string(r.per_rep.size()) + "\n";
  }
  return out;
}

std::string results_json(const std::vector<ExperimentResult>& results) {
  ordered_json doc = {{"results", ordered_json::array()}};
  for (const auto& r : results) doc["results"].push_back(to_json(r));
  return doc.dump(2) + "\n";
}

void write_results(const std::vector<ExperimentResult>& results,
                   const std::filesystem::path& stem) {
  if (results.empty()) throw Error(ErrorCode::InvalidArgument, "no results to write");
  auto csv_path = stem;
  csv_path += ".csv";
  auto json_path = stem;
  json_path += ".json";
  csv::write_file(csv_path, results_csv(results));
  csv::write_file(json_path, results_json(results));
}

std::string format_results_table(const std::vector<ExperimentResult>& results) {
  int name_width = 7;
  for (const auto& r : results) name_width = std::max(name_width, static_cast<int>(r.dataset_name.size()));
  std::string out;
  char line[512];
  std::snprintf(line, sizeof line, "%-*s  %-12s %7s %7s %5s %7s %10s %10s %10s %10s %7s\n",
                name_width, "dataset", "method", "density", "epsilon", "beta", "gamma", "rmse_mean",
                "rmse_std", "mae_mean", "mae_std", "reps");
  out += line;
  for (const auto& r : results) {
    char eps[16] = "-", beta[16] = "-", gamma[16] = "-";
    if (r.method != Method::KnnBaseline) {
      std::snprintf(eps, sizeof eps, "%g", r.sobolev.epsilon);
      std::snprintf(beta, sizeof beta, "%g", r.sobolev.beta);
      std::snprintf(gamma, sizeof gamma, "%g", r.sobolev.gamma);
    }
    char reps[32];
    std::snprintf(reps, sizeof reps, "%zu/%zu", r.per_rep.size(), r.repetitions);
    std::snprintf(line, sizeof line,
                  "%-*s  %-12s %7.3g %7s %5s %7s %10.4f %10.4f %10.4f %10.4f %7s\n", name_width,
                  r.dataset_name.c_str(), to_string(r.method), r.density, eps, beta, gamma,
                  r.rmse_mean, r.rmse_std, r.mae_mean, r.mae_std, reps);
    out += line;
  }
  return out;
}

void write_signal_csv(const NodePositions& positions, const std::vector<std::int64_t>& time_indices,
                      const TimeVaryingSignal& values, const std::filesystem::path& path) {
  if (positions.size() != values.n_nodes() || time_indices.size() != values.n_times()) {
    throw Error(ErrorCode::DimensionMismatch, "signal does not match node or time labels");
  }
  std::string out = "node_id,time_index,value\n";
  for (std::size_t i = 0; i < values.n_nodes(); ++i) {
    for (std::size_t t = 0; t < values.n_times(); ++t) {
      out += positions.ids()[i] + "," + std::to_string(time_indices[t]) + "," +
             csv::format_exact(values(i, t)) + "\n";
    }
  }
  csv::write_file(path, out);
}

void write_dataset_csv(const Dataset& d, const std::filesystem::path& positions_path,
                       const std::filesystem::path& readings_path) {
  std::string pos = "node_id,x,y\n";
  for (std::size_t i = 0; i < d.positions.size(); ++i) {
    pos += d.positions.ids()[i] + "," + csv::format_exact(d.positions.coords()[i].x) + "," +
           csv::format_exact(d.positions.coords()[i].y) + "\n";
  }
  std::string readings = "node_id,time_index,value\n";
  for (std::size_t i = 0; i < d.signal.n_nodes(); ++i) {
    for (std::size_t t = 0; t < d.signal.n_times(); ++t) {
      if (!d.native_mask.observed(i, t)) continue;
      readings += d.positions.ids()[i] + "," + std::to_string(d.time_indices[t]) + "," +
                  csv::format_exact(d.signal(i, t)) + "\n";
    }
  }
  csv::write_file(positions_path, pos);
  csv::write_file(readings_path, readings);
}

void write_edge_list_csv(const SensorGraph& graph, const NodePositions& positions,
                         const std::filesystem::path& path) {
  if (graph.n_nodes() != positions.size()) {
    throw Error(ErrorCode::DimensionMismatch, "graph and positions differ in size");
  }
  std::string out = "src_id,dst_id,weight\n";
  for (const Edge& e : graph.edges()) {
    out += positions.ids()[e.a] + "," + positions.ids()[e.b] + "," +
           csv::format_significant(graph.weights()(static_cast<Eigen::Index>(e.a),
                                                   static_cast<Eigen::Index>(e.b)),
                                   12) +
           "\n";
  }
  csv::write_file(path, out);
}

void write_mask_csv(const SamplingMask& mask, const std::filesystem::path& path) {
  std::string out;
  out.reserve(mask.n_nodes() * mask.n_times() * 2);
  for (std::size_t i = 0; i < mask.n_nodes(); ++i) {
    for (std::size_t t = 0; t < mask.n_times(); ++t) {
      if (t) out += ',';
      out += mask.observed(i, t) ? '1' : '0';
    }
    out += '\n';
  }
  csv::write_file(path, out);
}

}  // namespace gsr
