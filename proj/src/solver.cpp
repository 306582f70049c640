#include "gsr/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <Eigen/LU>

#include "gsr/error.hpp"
#include "gsr/temporal.hpp"

namespace gsr {

namespace {

// How often the CG loop replaces the recursive residual with Y - A(X).
constexpr std::size_t kResidualRefreshInterval = 50;

void check_inputs(const TimeVaryingSignal& y, const SamplingMask& mask, const SensorGraph& graph) {
  if (y.n_nodes() != mask.n_nodes() || y.n_times() != mask.n_times()) {
    throw Error(ErrorCode::DimensionMismatch, "observations and mask differ in shape");
  }
  if (y.n_nodes() != graph.n_nodes()) {
    throw Error(ErrorCode::DimensionMismatch,
                "observations have " + std::to_string(y.n_nodes()) + " nodes, graph has " +
                    std::to_string(graph.n_nodes()));
  }
  if ((y.values().array() * (1.0 - mask.matrix().array()) != 0.0).any()) {
    throw Error(ErrorCode::InvalidArgument, "observations must be zero where the mask is zero");
  }
}

struct DisjointSets {
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t v) {
    while (parent[v] != v) v = parent[v] = parent[parent[v]];
    return v;
  }
  void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
  std::vector<std::size_t> parent;
};

double inner(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

// Per-node block of A with the off-diagonal spatial coupling dropped:
// diag(J(i, :)) + gamma B(i, i) T, a symmetric tridiagonal M x M matrix.
// Factored once with the Thomas recurrence, then each application costs O(NM).
class TemporalPreconditioner {
 public:
  TemporalPreconditioner(const SamplingMask& mask, const SobolevOperator& op, double gamma)
      : n_(static_cast<Eigen::Index>(mask.n_nodes())),
        m_(static_cast<Eigen::Index>(mask.n_times())),
        inv_pivot_(n_, m_),
        lower_(n_, m_),
        off_(n_) {
    const Matrix& j = mask.matrix();
    for (Eigen::Index i = 0; i < n_; ++i) {
      const double coupling = gamma * op.matrix(i, i);
      off_(i) = -coupling;
      double prev_pivot = 0.0;
      for (Eigen::Index t = 0; t < m_; ++t) {
        const double t_diag = (t == 0 || t == m_ - 1) ? 1.0 : 2.0;
        const double diag = j(i, t) + coupling * t_diag;
        const double l = t == 0 ? 0.0 : off_(i) / prev_pivot;
        double pivot = diag - l * off_(i);
        if (!(pivot > 0.0)) pivot = 1.0;  // degenerate block (isolated, unobserved)
        lower_(i, t) = l;
        inv_pivot_(i, t) = 1.0 / pivot;
        prev_pivot = pivot;
      }
    }
  }

  Matrix apply(const Matrix& r) const {
    Matrix z(n_, m_);
    for (Eigen::Index i = 0; i < n_; ++i) {
      // forward substitution with unit lower factor
      z(i, 0) = r(i, 0);
      for (Eigen::Index t = 1; t < m_; ++t) z(i, t) = r(i, t) - lower_(i, t) * z(i, t - 1);
      // back substitution with D^{-1} L^T
      z(i, m_ - 1) *= inv_pivot_(i, m_ - 1);
      for (Eigen::Index t = m_ - 2; t >= 0; --t) {
        z(i, t) = z(i, t) * inv_pivot_(i, t) - lower_(i, t + 1) * z(i, t + 1);
      }
    }
    return z;
  }

 private:
  Eigen::Index n_;
  Eigen::Index m_;
  Matrix inv_pivot_;
  Matrix lower_;
  Vector off_;
};

}  // namespace

void SobolevConfig::validate() const {
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw Error(ErrorCode::InvalidArgument, "epsilon must be finite and >= 0");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::InvalidArgument, "beta must be finite and > 0");
  }
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw Error(ErrorCode::InvalidArgument, "gamma must be finite and > 0");
  }
  if (!(cg_tolerance > 0.0 && cg_tolerance <= 1e-2)) {
    throw Error(ErrorCode::InvalidArgument, "cg_tolerance must lie in (0, 1e-2]");
  }
  if (max_iterations == 0) {
    throw Error(ErrorCode::InvalidArgument, "max_iterations must be positive");
  }
}

void check_identifiable(const SamplingMask& mask, const SensorGraph& graph, double epsilon) {
  const std::size_t n = mask.n_nodes();
  const std::size_t m = mask.n_times();
  if (n != graph.n_nodes()) throw Error(ErrorCode::DimensionMismatch, "mask and graph differ");
  for (std::size_t i = 0; i < n; ++i) {
    bool seen = false;
    for (std::size_t t = 0; t < m && !seen; ++t) seen = mask.observed(i, t);
    if (!seen) {
      throw Error(ErrorCode::SingularSystem,
                  "node " + std::to_string(i) + " is never observed; its level is undetermined");
    }
  }
  if (epsilon > 0.0) return;

  // With eps = 0 the regularizer ignores X(i, t) = c_i + s_{C(i), t} within each
  // component C. Those offsets are pinned to zero only if the bipartite
  // node/time graph of observed entries is connected inside every component.
  const std::vector<std::size_t> comp = graph.components();
  const std::size_t n_comp = *std::max_element(comp.begin(), comp.end()) + 1;
  for (std::size_t c = 0; c < n_comp; ++c) {
    DisjointSets sets(n + m);
    for (std::size_t i = 0; i < n; ++i) {
      if (comp[i] != c) continue;
      for (std::size_t t = 0; t < m; ++t) {
        if (mask.observed(i, t)) sets.unite(i, n + t);
      }
    }
    const std::size_t root = sets.find(n);
    bool connected = true;
    for (std::size_t t = 1; t < m && connected; ++t) connected = sets.find(n + t) == root;
    for (std::size_t i = 0; i < n && connected; ++i) {
      if (comp[i] == c) connected = sets.find(i) == root;
    }
    if (!connected) {
      throw Error(ErrorCode::SingularSystem,
                  "with epsilon = 0 the observation pattern leaves a per-time offset of graph "
                  "component " + std::to_string(c) + " undetermined");
    }
  }
}

Matrix normal_operator(const Matrix& x, const SamplingMask& mask, const SobolevOperator& op,
                       double gamma) {
  return x.cwiseProduct(mask.matrix()) + gamma * (op.matrix * temporal_gram_product(x));
}

Matrix objective_gradient(const TimeVaryingSignal& xbar, const TimeVaryingSignal& y,
                          const SamplingMask& mask, const SobolevOperator& op, double gamma) {
  return normal_operator(xbar.values(), mask, op, gamma) - y.values();
}

ReconstructionResult reconstruct_with_operator(const TimeVaryingSignal& y,
                                               const SamplingMask& mask,
                                               const SensorGraph& graph,
                                               const SobolevOperator& op,
                                               const SobolevConfig& config) {
  config.validate();
  check_inputs(y, mask, graph);
  if (static_cast<std::size_t>(op.matrix.rows()) != graph.n_nodes()) {
    throw Error(ErrorCode::DimensionMismatch, "operator and graph differ in size");
  }
  check_identifiable(mask, graph, op.epsilon);

  const Matrix& rhs = y.values();
  const double rhs_norm = rhs.norm();
  const double gamma = config.gamma;
  const Eigen::Index n = rhs.rows();
  const Eigen::Index m = rhs.cols();

  if (rhs_norm == 0.0) {
    Matrix zero = Matrix::Zero(n, m);
    TimeVaryingSignal xbar(std::move(zero));
    const double obj = sobolev_objective(xbar, y, mask, op, gamma);
    return {std::move(xbar), 0, 0.0, obj, true};
  }

  const TemporalPreconditioner precond(mask, op, gamma);

  Matrix x = rhs;
  Matrix r = rhs - normal_operator(x, mask, op, gamma);
  double rel = r.norm() / rhs_norm;
  Matrix best = x;
  double best_rel = rel;

  Matrix z = precond.apply(r);
  Matrix p = z;
  double rz = inner(r, z);
  std::size_t iter = 0;

  while (rel > config.cg_tolerance && iter < config.max_iterations) {
    const Matrix ap = normal_operator(p, mask, op, gamma);
    const double curvature = inner(p, ap);
    if (!(curvature > 0.0)) break;  // breakdown; keep the best iterate
    const double alpha = rz / curvature;
    x += alpha * p;
    r -= alpha * ap;
    ++iter;

    rel = r.norm() / rhs_norm;
    bool restart = false;
    if (rel <= config.cg_tolerance || iter % kResidualRefreshInterval == 0) {
      const bool claimed = rel <= config.cg_tolerance;
      r = rhs - normal_operator(x, mask, op, gamma);
      rel = r.norm() / rhs_norm;
      restart = claimed && rel > config.cg_tolerance;
    }
    if (rel < best_rel) {
      best_rel = rel;
      best = x;
    }
    if (rel <= config.cg_tolerance) break;

    z = precond.apply(r);
    const double rz_next = inner(r, z);
    if (restart) {
      p = z;
    } else {
      p = z + (rz_next / rz) * p;
    }
    rz = rz_next;
  }

  const bool converged = best_rel <= config.cg_tolerance;
  TimeVaryingSignal xbar(std::move(best));
  const double obj = sobolev_objective(xbar, y, mask, op, gamma);
  return {std::move(xbar), iter, best_rel, obj, converged};
}

ReconstructionResult reconstruct_sobolev(const TimeVaryingSignal& y, const SamplingMask& mask,
                                         const SensorGraph& graph, const SobolevConfig& config) {
  config.validate();
  const SobolevOperator op = sobolev_operator(graph, config.epsilon, config.beta);
  return reconstruct_with_operator(y, mask, graph, op, config);
}

ReconstructionResult reconstruct_tikhonov(const TimeVaryingSignal& y, const SamplingMask& mask,
                                          const SensorGraph& graph, double gamma,
                                          double cg_tolerance, std::size_t max_iterations) {
  SobolevConfig config;
  config.epsilon = 0.0;
  config.beta = 1.0;
  config.gamma = gamma;
  config.cg_tolerance = cg_tolerance;
  config.max_iterations = max_iterations;
  return reconstruct_sobolev(y, mask, graph, config);
}

ReconstructionResult dense_oracle_solve(const TimeVaryingSignal& y, const SamplingMask& mask,
                                        const SensorGraph& graph, const SobolevConfig& config) {
  check_inputs(y, mask, graph);
  const std::size_t n = y.n_nodes();
  const std::size_t m = y.n_times();
  if (n * m > kDenseOracleMaxUnknowns) {
    throw Error(ErrorCode::ProblemTooLarge, "dense oracle limited to " +
                                                std::to_string(kDenseOracleMaxUnknowns) +
                                                " unknowns, got " + std::to_string(n * m));
  }
  if (!(config.gamma >= 0.0) || !std::isfinite(config.gamma)) {
    throw Error(ErrorCode::InvalidArgument, "gamma must be finite and >= 0");
  }
  const SobolevOperator op = sobolev_operator(graph, config.epsilon, config.beta);
  const Matrix& b = op.matrix;
  const Matrix dh = temporal_difference_operator(m).matrix;
  const Matrix t = dh * dh.transpose();

  const auto size = static_cast<Eigen::Index>(n * m);
  Matrix a = Matrix::Zero(size, size);
  for (std::size_t ti = 0; ti < m; ++ti) {
    for (std::size_t si = 0; si < m; ++si) {
      const double tv = t(static_cast<Eigen::Index>(ti), static_cast<Eigen::Index>(si));
      if (tv == 0.0) continue;
      a.block(static_cast<Eigen::Index>(ti * n), static_cast<Eigen::Index>(si * n),
              static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = config.gamma * tv * b;
    }
  }
  const Eigen::Map<const Vector> vec_j(mask.matrix().data(), size);
  a.diagonal() += vec_j;

  Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::SingularSystem,
                "normal equations are rank deficient (rank " + std::to_string(lu.rank()) + " of " +
                    std::to_string(size) + ")");
  }
  const Eigen::Map<const Vector> vec_y(y.values().data(), size);
  const Vector sol = lu.solve(vec_y);

  Matrix xbar = Eigen::Map<const Matrix>(sol.data(), static_cast<Eigen::Index>(n),
                                         static_cast<Eigen::Index>(m));
  const double y_norm = y.values().norm();
  const double res = (a * sol - vec_y).norm();
  TimeVaryingSignal out(std::move(xbar));
  const double obj = sobolev_objective(out, y, mask, op, config.gamma);
  return {std::move(out), 0, y_norm > 0.0 ? res / y_norm : res, obj, true};
}

}  // namespace gsr
