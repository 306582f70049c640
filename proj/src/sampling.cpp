#include "gsr/sampling.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "gsr/error.hpp"

namespace gsr {

namespace {

constexpr int kMaxCoverageAttempts = 1000;

// Uniform integer in [0, bound) by rejection on the raw 64-bit stream, so the
// draw sequence does not depend on the standard library's distributions.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % bound;
}

void check_shape(const TimeVaryingSignal& x, const SamplingMask& mask) {
  if (x.n_nodes() != mask.n_nodes() || x.n_times() != mask.n_times()) {
    throw Error(ErrorCode::DimensionMismatch, "signal and mask dimensions differ");
  }
}

}  // namespace

SamplingMask SamplingMask::from_matrix(Matrix bits, std::uint64_t seed) {
  if (bits.size() == 0) throw Error(ErrorCode::DimensionMismatch, "empty mask");
  if (((bits.array() != 0.0) && (bits.array() != 1.0)).any()) {
    throw Error(ErrorCode::InvalidArgument, "mask entries must be 0 or 1");
  }
  const double density = bits.sum() / static_cast<double>(bits.size());
  return SamplingMask(std::move(bits), density, seed);
}

SamplingMask SamplingMask::full(std::size_t n, std::size_t m) {
  return from_matrix(Matrix::Ones(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m)));
}

std::size_t SamplingMask::observed_count() const {
  return static_cast<std::size_t>(bits_.sum());
}

bool SamplingMask::covers_all_rows() const {
  return (bits_.rowwise().maxCoeff().array() > 0.0).all();
}

SamplingMask SamplingMask::intersect(const SamplingMask& other) const {
  if (other.bits_.rows() != bits_.rows() || other.bits_.cols() != bits_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "mask dimensions differ");
  }
  return SamplingMask(bits_.cwiseProduct(other.bits_), density_, seed_);
}

std::size_t samples_per_column(std::size_t n, double density) {
  if (!(density > 0.0 && density <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument,
                "sampling density must lie in (0, 1], got " + std::to_string(density));
  }
  return static_cast<std::size_t>(std::lround(density * static_cast<double>(n)));
}

SamplingMask random_mask(std::size_t n, std::size_t m, double density, std::uint64_t seed) {
  if (n == 0 || m == 0) throw Error(ErrorCode::DimensionMismatch, "mask needs n, m > 0");
  const std::size_t per_column = samples_per_column(n, density);
  if (per_column == 0) {
    throw Error(ErrorCode::DensityTooLow, "density " + std::to_string(density) +
                                              " samples no node of " + std::to_string(n));
  }
  if (per_column * m < n) {
    throw Error(ErrorCode::UnsatisfiableCoverage,
                std::to_string(per_column) + " samples per column over " + std::to_string(m) +
                    " steps cannot observe all " + std::to_string(n) + " nodes");
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> nodes(n);
  Matrix bits(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (int attempt = 0; attempt < kMaxCoverageAttempts; ++attempt) {
    bits.setZero();
    for (std::size_t t = 0; t < m; ++t) {
      std::iota(nodes.begin(), nodes.end(), std::size_t{0});
      // partial Fisher-Yates: the first per_column slots are the sample
      for (std::size_t s = 0; s < per_column; ++s) {
        const std::size_t pick = s + uniform_below(rng, n - s);
        std::swap(nodes[s], nodes[pick]);
        bits(static_cast<Eigen::Index>(nodes[s]), static_cast<Eigen::Index>(t)) = 1.0;
      }
    }
    if ((bits.rowwise().maxCoeff().array() > 0.0).all()) {
      return SamplingMask(std::move(bits), density, seed);
    }
  }
  throw Error(ErrorCode::UnsatisfiableCoverage,
              "no mask covering every node after " + std::to_string(kMaxCoverageAttempts) +
                  " draws");
}

TimeVaryingSignal apply_mask(const TimeVaryingSignal& x, const SamplingMask& mask) {
  check_shape(x, mask);
  return TimeVaryingSignal(x.values().cwiseProduct(mask.matrix()));
}

std::vector<Entry> complement_indices(const SamplingMask& mask) {
  std::vector<Entry> out;
  out.reserve(mask.n_nodes() * mask.n_times() - mask.observed_count());
  for (std::size_t i = 0; i < mask.n_nodes(); ++i) {
    for (std::size_t t = 0; t < mask.n_times(); ++t) {
      if (!mask.observed(i, t)) out.push_back({i, t});
    }
  }
  return out;
}

}  // namespace gsr
