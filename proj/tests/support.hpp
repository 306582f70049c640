#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "gsr/graph.hpp"
#include "gsr/sampling.hpp"
#include "gsr/signal.hpp"

namespace support {

inline std::vector<std::pair<double, double>> random_points(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<double, double>> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng)};
  return pts;
}

inline gsr::NodePositions positions(const std::vector<std::pair<double, double>>& pts) {
  std::vector<std::string> ids;
  std::vector<gsr::Point2> coords;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    ids.push_back("n" + std::to_string(i));
    coords.push_back({pts[i].first, pts[i].second});
  }
  return gsr::NodePositions(std::move(ids), std::move(coords));
}

inline gsr::SensorGraph random_graph(std::size_t n, std::size_t k, std::mt19937_64& rng) {
  return gsr::build_knn_graph(positions(random_points(n, rng)), k);
}

inline gsr::Matrix random_matrix(std::size_t n, std::size_t m, std::mt19937_64& rng,
                                 double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  gsr::Matrix x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = g(rng);
  return x;
}

inline gsr::SensorGraph path_graph(std::size_t n, double weight = 1.0) {
  gsr::Matrix w = gsr::Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i + 1 < static_cast<Eigen::Index>(n); ++i) {
    w(i, i + 1) = weight;
    w(i + 1, i) = weight;
  }
  return gsr::SensorGraph::from_weights(w);
}

inline gsr::Matrix permutation(const std::vector<int>& p) {
  const auto n = static_cast<Eigen::Index>(p.size());
  gsr::Matrix m = gsr::Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) m(i, p[static_cast<std::size_t>(i)]) = 1.0;
  return m;
}

}  // namespace support
