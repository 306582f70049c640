#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gsr/signal.hpp"

namespace gsr {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Sensor coordinates with index-aligned opaque identifiers. Units are those
/// of the source data (degrees or meters); distances are planar Euclidean.
class NodePositions {
 public:
  NodePositions(std::vector<std::string> ids, std::vector<Point2> coords);

  std::size_t size() const noexcept { return ids_.size(); }
  const std::vector<std::string>& ids() const noexcept { return ids_; }
  const std::vector<Point2>& coords() const noexcept { return coords_; }

  /// Keeps the listed rows, in the given order.
  NodePositions subset(const std::vector<std::size_t>& rows) const;

 private:
  std::vector<std::string> ids_;
  std::vector<Point2> coords_;
};

struct Edge {
  std::size_t a = 0;  // a < b
  std::size_t b = 0;
};

/// Undirected weighted graph with its combinatorial Laplacian L = D - W.
class SensorGraph {
 public:
  /// Wraps an explicit weight matrix. Checks symmetry, non-negativity and a
  /// zero diagonal. `sigma` is informational here.
  static SensorGraph from_weights(Matrix weights, double sigma = 1.0);

  std::size_t n_nodes() const noexcept { return static_cast<std::size_t>(weights_.rows()); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const Matrix& weights() const noexcept { return weights_; }
  const Matrix& laplacian() const noexcept { return laplacian_; }
  double sigma() const noexcept { return sigma_; }

  /// Component label per node, labels numbered in order of first appearance.
  std::vector<std::size_t> components() const;

 private:
  SensorGraph(Matrix weights, double sigma);

  std::vector<Edge> edges_;
  Matrix weights_;
  Matrix laplacian_;
  double sigma_;
};

/// Symmetrized kNN graph with Gaussian weights exp(-d^2 / sigma^2), where sigma
/// is the mean length of the undirected edges. Ties in distance go to the
/// lower node index.
SensorGraph build_knn_graph(const NodePositions& positions, std::size_t k);

struct SpectralDecomposition {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // column k pairs with eigenvalues(k); first nonzero entry > 0
};

SpectralDecomposition spectral_decomposition(const SensorGraph& graph);

/// The matrix (L + eps I)^beta.
struct SobolevOperator {
  Matrix matrix;
  double epsilon = 0.0;
  double beta = 1.0;
};

/// Integer beta uses repeated products of L + eps I; fractional beta goes
/// through the eigendecomposition.
SobolevOperator sobolev_operator(const SensorGraph& graph, double epsilon, double beta);

/// Always takes the spectral route, whatever beta is.
SobolevOperator sobolev_operator_spectral(const SensorGraph& graph, double epsilon,
                                          double beta);

}  // namespace gsr
