#pragma once

#include <cstddef>
#include <span>
#include <utility>

#include "gsr/sampling.hpp"
#include "gsr/signal.hpp"

namespace gsr {

struct ScaleParams {
  double min_value = 0.0;
  double max_value = 1.0;
};

struct MetricReport {
  double rmse = 0.0;
  double mae = 0.0;
  std::size_t n_evaluated = 0;
};

double rmse(const TimeVaryingSignal& truth, const TimeVaryingSignal& recon,
            std::span<const Entry> eval_set);
double mae(const TimeVaryingSignal& truth, const TimeVaryingSignal& recon,
           std::span<const Entry> eval_set);
MetricReport evaluate(const TimeVaryingSignal& truth, const TimeVaryingSignal& recon,
                      std::span<const Entry> eval_set);

/// Global min-max map of the whole matrix onto [0, 1].
std::pair<TimeVaryingSignal, ScaleParams> minmax_scale(const TimeVaryingSignal& x);

/// Min-max parameters fitted on observed entries only.
ScaleParams fit_scale(const TimeVaryingSignal& x, const SamplingMask& mask);

TimeVaryingSignal apply_scale(const TimeVaryingSignal& x, const ScaleParams& params);
TimeVaryingSignal inverse_scale(const TimeVaryingSignal& x, const ScaleParams& params);

}  // namespace gsr
