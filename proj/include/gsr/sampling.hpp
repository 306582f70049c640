#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "gsr/signal.hpp"

namespace gsr {

/// A (node, time) position, zero-based.
struct Entry {
  std::size_t node = 0;
  std::size_t time = 0;

  friend bool operator==(const Entry&, const Entry&) = default;
  friend auto operator<=>(const Entry&, const Entry&) = default;
};

class SamplingMask;
SamplingMask random_mask(std::size_t n, std::size_t m, double density, std::uint64_t seed);

/// Binary N x M matrix J; J(i, t) = 1 when node i is observed at time t.
class SamplingMask {
 public:
  /// Accepts any 0/1 matrix. `density` becomes the observed fraction.
  static SamplingMask from_matrix(Matrix bits, std::uint64_t seed = 0);
  static SamplingMask full(std::size_t n, std::size_t m);

  std::size_t n_nodes() const noexcept { return static_cast<std::size_t>(bits_.rows()); }
  std::size_t n_times() const noexcept { return static_cast<std::size_t>(bits_.cols()); }
  const Matrix& matrix() const noexcept { return bits_; }
  double density() const noexcept { return density_; }
  std::uint64_t seed() const noexcept { return seed_; }

  bool observed(std::size_t node, std::size_t time) const {
    return bits_(static_cast<Eigen::Index>(node), static_cast<Eigen::Index>(time)) != 0.0;
  }
  std::size_t observed_count() const;
  bool covers_all_rows() const;

  /// Entrywise AND. Keeps this mask's density label and seed.
  SamplingMask intersect(const SamplingMask& other) const;

 private:
  friend SamplingMask random_mask(std::size_t, std::size_t, double, std::uint64_t);

  SamplingMask(Matrix bits, double density, std::uint64_t seed)
      : bits_(std::move(bits)), density_(density), seed_(seed) {}

  Matrix bits_;
  double density_;
  std::uint64_t seed_;
};

/// Per-column sample count used by random_mask: round(density * n).
std::size_t samples_per_column(std::size_t n, double density);

/// Each column gets exactly samples_per_column(n, density) observed nodes
/// drawn uniformly; redrawn (up to 1000 times) until every row is observed at
/// least once. Deterministic in (n, m, density, seed).
SamplingMask random_mask(std::size_t n, std::size_t m, double density, std::uint64_t seed);

/// Y = J o X.
TimeVaryingSignal apply_mask(const TimeVaryingSignal& x, const SamplingMask& mask);

/// Unobserved entries in (node, time) lexicographic order.
std::vector<Entry> complement_indices(const SamplingMask& mask);

}  // namespace gsr
