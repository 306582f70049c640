#include "gsr/metrics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gsr/error.hpp"

namespace gsr {

namespace {

template <typename Accumulate>
double mean_over(const TimeVaryingSignal& truth, const TimeVaryingSignal& recon,
                 std::span<const Entry> eval_set, Accumulate&& term) {
  if (truth.n_nodes() != recon.n_nodes() || truth.n_times() != recon.n_times()) {
    throw Error(ErrorCode::DimensionMismatch, "truth and reconstruction differ in shape");
  }
  if (eval_set.empty()) throw Error(ErrorCode::EmptyEvaluationSet, "nothing to evaluate");
  double sum = 0.0;
  for (const Entry& e : eval_set) {
    if (e.node >= truth.n_nodes() || e.time >= truth.n_times()) {
      throw Error(ErrorCode::InvalidArgument, "evaluation index (" + std::to_string(e.node) +
                                                  ", " + std::to_string(e.time) +
                                                  ") out of range");
    }
    sum += term(truth(e.node, e.time) - recon(e.node, e.time));
  }
  return sum / static_cast<double>(eval_set.size());
}

}  // namespace

double rmse(const TimeVaryingSignal& truth, const TimeVaryingSignal& recon,
            std::span<const Entry> eval_set) {
  return std::sqrt(mean_over(truth, recon, eval_set, [](double d) { return d * d; }));
}

double mae(const TimeVaryingSignal& truth, const TimeVaryingSignal& recon,
           std::span<const Entry> eval_set) {
  return mean_over(truth, recon, eval_set, [](double d) { return std::abs(d); });
}

MetricReport evaluate(const TimeVaryingSignal& truth, const TimeVaryingSignal& recon,
                      std::span<const Entry> eval_set) {
  return {rmse(truth, recon, eval_set), mae(truth, recon, eval_set), eval_set.size()};
}

std::pair<TimeVaryingSignal, ScaleParams> minmax_scale(const TimeVaryingSignal& x) {
  const ScaleParams params{x.values().minCoeff(), x.values().maxCoeff()};
  if (!(params.max_value > params.min_value)) {
    throw Error(ErrorCode::DegenerateRange, "cannot scale a constant matrix");
  }
  return {apply_scale(x, params), params};
}

ScaleParams fit_scale(const TimeVaryingSignal& x, const SamplingMask& mask) {
  if (x.n_nodes() != mask.n_nodes() || x.n_times() != mask.n_times()) {
    throw Error(ErrorCode::DimensionMismatch, "signal and mask differ in shape");
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < x.n_nodes(); ++i) {
    for (std::size_t t = 0; t < x.n_times(); ++t) {
      if (!mask.observed(i, t)) continue;
      lo = std::min(lo, x(i, t));
      hi = std::max(hi, x(i, t));
    }
  }
  if (!(hi > lo)) {
    throw Error(ErrorCode::DegenerateRange, "observed entries span no range");
  }
  return {lo, hi};
}

TimeVaryingSignal apply_scale(const TimeVaryingSignal& x, const ScaleParams& params) {
  const double span = params.max_value - params.min_value;
  if (!(span > 0.0)) throw Error(ErrorCode::DegenerateRange, "scale range must be positive");
  return TimeVaryingSignal((x.values().array() - params.min_value) / span);
}

TimeVaryingSignal inverse_scale(const TimeVaryingSignal& x, const ScaleParams& params) {
  const double span = params.max_value - params.min_value;
  if (!(span > 0.0)) throw Error(ErrorCode::DegenerateRange, "scale range must be positive");
  return TimeVaryingSignal(x.values().array() * span + params.min_value);
}

}  // namespace gsr
