#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "gsr/error.hpp"
#include "gsr/graph.hpp"
#include "oracles.hpp"
#include "support.hpp"

using gsr::ErrorCode;
using gsr::Matrix;

namespace {

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const gsr::Error& e) {
    return e.code();
  }
  FAIL("expected gsr::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("two nodes with k=1 share one edge of weight 1/e") {
  const double d = 3.7;
  const auto g = gsr::build_knn_graph(support::positions({{0.0, 0.0}, {d, 0.0}}), 1);
  REQUIRE(g.edges().size() == 1);
  CHECK(g.sigma() == doctest::Approx(d).epsilon(1e-15));
  CHECK(g.weights()(0, 1) == doctest::Approx(0.36787944117144233).epsilon(1e-14));
  CHECK(g.weights()(1, 0) == g.weights()(0, 1));
}

TEST_CASE("three collinear nodes with k=1 form a path") {
  const auto g =
      gsr::build_knn_graph(support::positions({{0.0, 0.0}, {1.0, 0.0}, {2.0, 0.0}}), 1);
  REQUIRE(g.edges().size() == 2);
  CHECK(g.edges()[0].a == 0);
  CHECK(g.edges()[0].b == 1);
  CHECK(g.edges()[1].a == 1);
  CHECK(g.edges()[1].b == 2);
  CHECK(g.sigma() == doctest::Approx(1.0));
  CHECK(g.weights()(0, 1) == doctest::Approx(std::exp(-1.0)));
  CHECK(g.weights()(1, 2) == doctest::Approx(std::exp(-1.0)));
  CHECK(g.weights()(0, 2) == 0.0);
}

TEST_CASE("equidistant candidates go to the lower index") {
  // The center is at distance 1 from nodes 1, 3, 5, 7; each of those has a
  // closer partner, so only the center's own choice links it.
  const auto g = gsr::build_knn_graph(support::positions({{0.0, 0.0},
                                                          {1.0, 0.0},
                                                          {1.1, 0.0},
                                                          {0.0, 1.0},
                                                          {0.0, 1.1},
                                                          {-1.0, 0.0},
                                                          {-1.1, 0.0},
                                                          {0.0, -1.0},
                                                          {0.0, -1.1}}),
                                      1);
  CHECK(g.weights()(0, 1) > 0.0);
  CHECK(g.weights()(0, 3) == 0.0);
  CHECK(g.weights()(0, 5) == 0.0);
  CHECK(g.weights()(0, 7) == 0.0);
}

TEST_CASE("kNN graph matches an exhaustive construction") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t n = 4 + static_cast<std::size_t>(trial % 9);
    const std::size_t k = 1 + static_cast<std::size_t>(trial % 3);
    const auto pts = support::random_points(n, rng);
    double sigma = 0.0;
    const Matrix expected = oracle::knn_weights(pts, static_cast<int>(k), &sigma);
    const auto g = gsr::build_knn_graph(support::positions(pts), k);
    CHECK((g.weights() - expected).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(g.sigma() == doctest::Approx(sigma).epsilon(1e-14));
  }
}

TEST_CASE("Laplacian invariants on random graphs") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto g = support::random_graph(12, 3, rng);
    const Matrix& l = g.laplacian();
    CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    CHECK((l - l.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((l - oracle::laplacian(g.weights())).cwiseAbs().maxCoeff() < 1e-14);
    const auto spec = gsr::spectral_decomposition(g);
    CHECK(spec.eigenvalues.minCoeff() > -1e-9);
    CHECK(std::abs(spec.eigenvalues(0)) < 1e-10);
    CHECK(g.sigma() > 0.0);
  }
}

TEST_CASE("P2 spectrum is {0, 2}") {
  const auto spec = gsr::spectral_decomposition(support::path_graph(2));
  CHECK(spec.eigenvalues(0) == doctest::Approx(0.0));
  CHECK(spec.eigenvalues(1) == doctest::Approx(2.0));
  // Constant eigenvector for 0, sign fixed so the first entry is positive.
  CHECK(spec.eigenvectors(0, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(spec.eigenvectors(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(spec.eigenvectors(0, 1) > 0.0);
}

TEST_CASE("first eigenvector is constant") {
  std::mt19937_64 rng(5);
  const auto g = support::random_graph(15, 4, rng);
  const auto spec = gsr::spectral_decomposition(g);
  const auto v = spec.eigenvectors.col(0);
  CHECK((v.array() - v(0)).abs().maxCoeff() < 1e-8);
  CHECK(v(0) > 0.0);
}

TEST_CASE("two components give a double zero eigenvalue") {
  Matrix w = Matrix::Zero(4, 4);
  w(0, 1) = w(1, 0) = 1.0;
  w(2, 3) = w(3, 2) = 0.5;
  const auto g = gsr::SensorGraph::from_weights(w);
  const auto spec = gsr::spectral_decomposition(g);
  CHECK(std::abs(spec.eigenvalues(0)) < 1e-12);
  CHECK(std::abs(spec.eigenvalues(1)) < 1e-12);
  CHECK(spec.eigenvalues(2) > 0.5);
  const auto comp = g.components();
  CHECK(comp[0] == comp[1]);
  CHECK(comp[2] == comp[3]);
  CHECK(comp[0] != comp[2]);
}

TEST_CASE("Sobolev operator examples") {
  const auto p2 = support::path_graph(2);
  const auto b = gsr::sobolev_operator(p2, 1.0, 2.0).matrix;
  CHECK(b(0, 0) == doctest::Approx(5.0));
  CHECK(b(0, 1) == doctest::Approx(-4.0));
  CHECK(b(1, 0) == doctest::Approx(-4.0));
  CHECK(b(1, 1) == doctest::Approx(5.0));

  std::mt19937_64 rng(8);
  const auto g = support::random_graph(9, 3, rng);
  const Matrix shifted = g.laplacian() + 0.3 * Matrix::Identity(9, 9);
  CHECK((gsr::sobolev_operator(g, 0.3, 1.0).matrix - shifted).cwiseAbs().maxCoeff() == 0.0);

  for (double beta : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    const Matrix op = gsr::sobolev_operator(g, 0.5, beta).matrix;
    Eigen::SelfAdjointEigenSolver<Matrix> es(op);
    CHECK(es.eigenvalues().minCoeff() >= std::pow(0.5, beta) - 1e-8);
    CHECK((op - oracle::shifted_power(g.weights(), 0.5, beta)).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("integer and spectral powers agree") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const auto g = support::random_graph(10, 3, rng);
    for (double beta : {1.0, 2.0, 3.0}) {
      const Matrix a = gsr::sobolev_operator(g, 0.2, beta).matrix;
      const Matrix b = gsr::sobolev_operator_spectral(g, 0.2, beta).matrix;
      CHECK((a - b).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
}

TEST_CASE("shift makes the operator invertible while L is singular") {
  std::mt19937_64 rng(4);
  const auto g = support::random_graph(10, 3, rng);
  const auto spec = gsr::spectral_decomposition(g);
  for (double eps : {0.01, 0.1, 1.0}) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(gsr::sobolev_operator(g, eps, 1.0).matrix);
    CHECK(es.eigenvalues()(0) == doctest::Approx(spec.eigenvalues(0) + eps).epsilon(1e-9));
    CHECK(es.eigenvalues()(0) >= eps - 1e-12);
  }
  CHECK(std::abs(spec.eigenvalues(0)) < 1e-10);
}

TEST_CASE("relabeling nodes permutes W and L") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const auto pts = support::random_points(5, rng);
    std::vector<int> p(5);
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    std::vector<std::pair<double, double>> permuted(5);
    for (int i = 0; i < 5; ++i) permuted[static_cast<std::size_t>(i)] = pts[static_cast<std::size_t>(p[static_cast<std::size_t>(i)])];
    const auto g = gsr::build_knn_graph(support::positions(pts), 2);
    const auto gp = gsr::build_knn_graph(support::positions(permuted), 2);
    const Matrix pm = support::permutation(p);
    CHECK((gp.weights() - pm * g.weights() * pm.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((gp.laplacian() - pm * g.laplacian() * pm.transpose()).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("error paths") {
  const auto pos = support::positions({{0, 0}, {1, 0}, {2, 0}});
  CHECK(code_of([&] { gsr::build_knn_graph(pos, 3); }) == ErrorCode::KTooLarge);
  CHECK(code_of([&] { gsr::build_knn_graph(pos, 0); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] {
          gsr::build_knn_graph(support::positions({{0, 0}, {1, 1}, {0, 0}}), 1);
        }) == ErrorCode::DuplicateCoordinates);
  CHECK(code_of([] { gsr::NodePositions({"a", "a"}, {{0, 0}, {1, 1}}); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { gsr::NodePositions({"a", "b"}, {{0, 0}, {NAN, 1}}); }) ==
        ErrorCode::InvalidArgument);
  Matrix asym = Matrix::Zero(2, 2);
  asym(0, 1) = 1.0;
  CHECK(code_of([&] { gsr::SensorGraph::from_weights(asym); }) == ErrorCode::InvalidArgument);
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 1) = neg(1, 0) = -1.0;
  CHECK(code_of([&] { gsr::SensorGraph::from_weights(neg); }) == ErrorCode::InvalidArgument);
  CHECK(code_of([] { gsr::sobolev_operator(support::path_graph(3), -1.5, 0.5); }) ==
        ErrorCode::InvalidArgument);
  CHECK(code_of([] { gsr::sobolev_operator(support::path_graph(3), 0.1, 0.0); }) ==
        ErrorCode::InvalidArgument);
}

}  // TEST_SUITE
