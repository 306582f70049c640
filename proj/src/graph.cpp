#include "gsr/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <unordered_set>

#include <Eigen/Eigenvalues>

#include "gsr/error.hpp"

namespace gsr {

namespace {

double distance(const Point2& p, const Point2& q) { return std::hypot(p.x - q.x, p.y - q.y); }

bool is_integer(double v) { return std::isfinite(v) && v == std::floor(v); }

// Eigenvalues of a Laplacian within this of zero are treated as zero before a
// fractional power is taken.
double clamp_tolerance(const Vector& eigenvalues) {
  const double scale = eigenvalues.size() ? std::max(1.0, eigenvalues.cwiseAbs().maxCoeff()) : 1.0;
  return 1e-10 * scale;
}

}  // namespace

NodePositions::NodePositions(std::vector<std::string> ids, std::vector<Point2> coords)
    : ids_(std::move(ids)), coords_(std::move(coords)) {
  if (ids_.size() != coords_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "node ids and coordinates differ in length");
  }
  if (ids_.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "a sensor network needs at least 2 nodes");
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : ids_) {
    if (!seen.insert(id).second) {
      throw Error(ErrorCode::InvalidArgument, "duplicate node id '" + id + "'");
    }
  }
  for (const auto& p : coords_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw Error(ErrorCode::InvalidArgument, "non-finite node coordinate");
    }
  }
}

NodePositions NodePositions::subset(const std::vector<std::size_t>& rows) const {
  std::vector<std::string> ids;
  std::vector<Point2> coords;
  ids.reserve(rows.size());
  coords.reserve(rows.size());
  for (std::size_t r : rows) {
    ids.push_back(ids_.at(r));
    coords.push_back(coords_.at(r));
  }
  return NodePositions(std::move(ids), std::move(coords));
}

SensorGraph::SensorGraph(Matrix weights, double sigma)
    : weights_(std::move(weights)), sigma_(sigma) {
  const Eigen::Index n = weights_.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (weights_(i, j) > 0.0) {
        edges_.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
      }
    }
  }
  laplacian_ = -weights_;
  laplacian_.diagonal() = weights_.rowwise().sum();
}

SensorGraph SensorGraph::from_weights(Matrix weights, double sigma) {
  if (weights.rows() != weights.cols() || weights.rows() < 2) {
    throw Error(ErrorCode::DimensionMismatch, "weight matrix must be square with N >= 2");
  }
  if (!weights.allFinite() || (weights.array() < 0.0).any()) {
    throw Error(ErrorCode::InvalidArgument, "weights must be finite and non-negative");
  }
  if ((weights - weights.transpose()).cwiseAbs().maxCoeff() != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "weight matrix must be symmetric");
  }
  if (weights.diagonal().cwiseAbs().maxCoeff() != 0.0) {
    throw Error(ErrorCode::InvalidArgument, "weight matrix must have a zero diagonal");
  }
  return SensorGraph(std::move(weights), sigma);
}

std::vector<std::size_t> SensorGraph::components() const {
  const std::size_t n = n_nodes();
  constexpr std::size_t unset = static_cast<std::size_t>(-1);
  std::vector<std::size_t> label(n, unset);
  std::size_t next = 0;
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (label[s] != unset) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < n; ++v) {
        if (label[v] == unset && weights_(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(v)) > 0.0) {
          label[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  return label;
}

SensorGraph build_knn_graph(const NodePositions& positions, std::size_t k) {
  const std::size_t n = positions.size();
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  if (k >= n) {
    throw Error(ErrorCode::KTooLarge,
                "k = " + std::to_string(k) + " needs more than " + std::to_string(n) + " nodes");
  }
  const auto& pts = positions.coords();

  Matrix dist(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    dist(i, i) = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = distance(pts[i], pts[j]);
      if (d == 0.0) {
        throw Error(ErrorCode::DuplicateCoordinates, "nodes '" + positions.ids()[i] + "' and '" +
                                                         positions.ids()[j] +
                                                         "' share coordinates");
      }
      dist(i, j) = dist(j, i) = d;
    }
  }

  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> adjacent =
      Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>::Constant(n, n, false);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    order.resize(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    order.erase(order.begin() + static_cast<std::ptrdiff_t>(i));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        if (dist(i, a) != dist(i, b)) return dist(i, a) < dist(i, b);
                        return a < b;
                      });
    for (std::size_t r = 0; r < k; ++r) {
      adjacent(i, order[r]) = true;
      adjacent(order[r], i) = true;
    }
  }

  double total = 0.0;
  std::size_t edge_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (adjacent(i, j)) {
        total += dist(i, j);
        ++edge_count;
      }
    }
  }
  const double sigma = total / static_cast<double>(edge_count);

  Matrix weights = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (adjacent(i, j)) {
        const double r = dist(i, j) / sigma;
        weights(i, j) = weights(j, i) = std::exp(-r * r);
      }
    }
  }
  return SensorGraph::from_weights(std::move(weights), sigma);
}

SpectralDecomposition spectral_decomposition(const SensorGraph& graph) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(graph.laplacian());
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "Laplacian eigendecomposition did not converge");
  }
  SpectralDecomposition out{solver.eigenvalues(), solver.eigenvectors()};
  for (Eigen::Index c = 0; c < out.eigenvectors.cols(); ++c) {
    auto col = out.eigenvectors.col(c);
    for (Eigen::Index r = 0; r < col.size(); ++r) {
      if (std::abs(col(r)) > 1e-10) {
        if (col(r) < 0.0) col = -col;
        break;
      }
    }
  }
  return out;
}

SobolevOperator sobolev_operator_spectral(const SensorGraph& graph, double epsilon, double beta) {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon must be finite and >= 0");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::InvalidArgument, "beta must be finite and > 0");
  }
  const SpectralDecomposition spec = spectral_decomposition(graph);
  const double tol = clamp_tolerance(spec.eigenvalues);
  Vector powered(spec.eigenvalues.size());
  for (Eigen::Index i = 0; i < powered.size(); ++i) {
    double base = spec.eigenvalues(i) + epsilon;
    if (base < 0.0) {
      if (base < -tol && !is_integer(beta)) {
        throw Error(ErrorCode::NegativeBase,
                    "fractional power of negative eigenvalue " + std::to_string(base));
      }
      if (base >= -tol) base = 0.0;
    }
    powered(i) = std::pow(base, beta);
  }
  Matrix m = spec.eigenvectors * powered.asDiagonal() * spec.eigenvectors.transpose();
  m = 0.5 * (m + m.transpose()).eval();
  return {std::move(m), epsilon, beta};
}

SobolevOperator sobolev_operator(const SensorGraph& graph, double epsilon, double beta) {
  if (!is_integer(beta)) return sobolev_operator_spectral(graph, epsilon, beta);
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon must be finite and >= 0");
  }
  if (!(beta > 0.0)) throw Error(ErrorCode::InvalidArgument, "beta must be > 0");

  const std::size_t n = graph.n_nodes();
  Matrix shifted = graph.laplacian() + epsilon * Matrix::Identity(n, n);
  Matrix result = shifted;
  for (long p = 1; p < static_cast<long>(beta); ++p) {
    result = (result * shifted).eval();
  }
  result = 0.5 * (result + result.transpose()).eval();
  return {std::move(result), epsilon, beta};
}

}  // namespace gsr
