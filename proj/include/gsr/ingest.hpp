#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gsr/graph.hpp"
#include "gsr/results.hpp"
#include "gsr/sampling.hpp"
#include "gsr/signal.hpp"

namespace gsr {

struct Dataset {
  std::string name;
  NodePositions positions;
  std::vector<std::int64_t> time_indices;  // ascending, one per column
  TimeVaryingSignal signal;                // 0 where native_mask is 0
  SamplingMask native_mask;                // 1 where the source has a reading
  std::vector<std::string> warnings;
};

/// Reads `node_id,x,y`.
NodePositions read_positions_csv(const std::filesystem::path& path);

/// Pivots a long-format `node_id,time_index,value` file into an N x M matrix.
/// Node order follows the positions file; columns are the distinct time
/// indices in ascending order. Empty or non-finite values count as missing.
Dataset load_dataset(const std::filesystem::path& positions_path,
                     const std::filesystem::path& readings_path, std::string name = {});

/// Keeps nodes whose fraction of native readings is at least `min_coverage`.
Dataset filter_consistent_nodes(const Dataset& d, double min_coverage);

/// Keeps the first `max_time_steps` columns.
Dataset truncate_time(const Dataset& d, std::size_t max_time_steps);

/// Writes `<stem>.csv` (summary table) and `<stem>.json` (per-repetition detail
/// and configuration echo). Output is byte-deterministic.
void write_results(const std::vector<ExperimentResult>& results,
                   const std::filesystem::path& stem);

/// Same content as the CSV half of write_results.
std::string results_csv(const std::vector<ExperimentResult>& results);
std::string results_json(const std::vector<ExperimentResult>& results);

/// Fixed-width table for terminals.
std::string format_results_table(const std::vector<ExperimentResult>& results);

/// `node_id,time_index,value` for every entry of `values`.
void write_signal_csv(const NodePositions& positions,
                      const std::vector<std::int64_t>& time_indices,
                      const TimeVaryingSignal& values, const std::filesystem::path& path);

/// Writes the dataset back out as positions + readings CSVs. Natively missing
/// entries are omitted.
void write_dataset_csv(const Dataset& d, const std::filesystem::path& positions_path,
                       const std::filesystem::path& readings_path);

/// `src_id,dst_id,weight`, 12 significant digits.
void write_edge_list_csv(const SensorGraph& graph, const NodePositions& positions,
                         const std::filesystem::path& path);

/// 0/1 matrix, N rows, M columns, no header.
void write_mask_csv(const SamplingMask& mask, const std::filesystem::path& path);

}  // namespace gsr
