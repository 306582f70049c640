#include <cmath>
#include <random>

#include "doctest.h"
#include "gsr/error.hpp"
#include "gsr/harness.hpp"
#include "gsr/ingest.hpp"
#include "support.hpp"

using gsr::ExperimentConfig;
using gsr::Matrix;
using gsr::Method;
using gsr::TimeVaryingSignal;

namespace {

gsr::Dataset small_synthetic(std::uint64_t seed = 7) {
  gsr::SyntheticSpec spec;
  spec.n_nodes = 20;
  spec.n_times = 30;
  spec.k = 4;
  spec.seed = seed;
  return gsr::make_synthetic_dataset(spec);
}

ExperimentConfig quick_config(Method method) {
  ExperimentConfig cfg;
  cfg.repetitions = 4;
  cfg.master_seed = 50;
  cfg.method = method;
  cfg.k_graph = 4;
  return cfg;
}

bool same_results(const std::vector<gsr::ExperimentResult>& a,
                  const std::vector<gsr::ExperimentResult>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].rmse_mean != b[i].rmse_mean || a[i].mae_std != b[i].mae_std) return false;
    if (a[i].per_rep.size() != b[i].per_rep.size()) return false;
    for (std::size_t r = 0; r < a[i].per_rep.size(); ++r) {
      if (a[i].per_rep[r].seed != b[i].per_rep[r].seed ||
          a[i].per_rep[r].rmse != b[i].per_rep[r].rmse ||
          a[i].per_rep[r].mae != b[i].per_rep[r].mae) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("kNN baseline examples") {
  // Star: node 0 linked to 1, 2, 3 with equal weights.
  Matrix w = Matrix::Zero(4, 4);
  for (int j = 1; j < 4; ++j) w(0, j) = w(j, 0) = 0.5;
  const auto g = gsr::SensorGraph::from_weights(w);
  Matrix j(4, 2);
  j << 0, 1, 1, 1, 1, 0, 1, 1;
  Matrix y(4, 2);
  y << 0, 9, 5, 2, 5, 0, 5, 4;
  const auto out = gsr::knn_baseline_impute(TimeVaryingSignal(y), gsr::SamplingMask::from_matrix(j), g);
  CHECK(out(0, 0) == doctest::Approx(5.0));
  // Node 2 is hidden at t=1; its only neighbor (0) is observed there.
  CHECK(out(2, 1) == doctest::Approx(9.0));
  for (int i = 0; i < 4; ++i) {
    for (int t = 0; t < 2; ++t) {
      if (j(i, t) != 0.0) CHECK(out(i, t) == y(i, t));
    }
  }

  Matrix j2 = Matrix::Ones(4, 2);
  j2(0, 1) = 0;
  j2(3, 1) = 0;
  Matrix y2 = j2.cwiseProduct(Matrix::Constant(4, 2, 1.0));
  y2(1, 1) = 2;
  y2(2, 1) = 4;
  const auto out2 =
      gsr::knn_baseline_impute(TimeVaryingSignal(y2), gsr::SamplingMask::from_matrix(j2), g);
  CHECK(out2(0, 1) == doctest::Approx(3.0));
  // Node 3's only neighbor is hidden: fall back to the column mean (2 + 4) / 2.
  CHECK(out2(3, 1) == doctest::Approx(3.0));

  Matrix j3 = Matrix::Ones(4, 2);
  j3.col(1).setZero();
  try {
    gsr::knn_baseline_impute(TimeVaryingSignal(Matrix(j3)), gsr::SamplingMask::from_matrix(j3), g);
    FAIL("expected EmptyColumn");
  } catch (const gsr::Error& e) {
    CHECK(e.code() == gsr::ErrorCode::EmptyColumn);
  }
}

TEST_CASE("synthetic dataset shape and determinism") {
  const auto a = gsr::make_synthetic_dataset();
  const auto b = gsr::make_synthetic_dataset();
  CHECK(a.signal.n_nodes() == 50);
  CHECK(a.signal.n_times() == 100);
  CHECK(a.positions.ids().front() == "S001");
  CHECK(a.positions.ids().back() == "S050");
  CHECK(a.native_mask.observed_count() == 5000);
  CHECK(a.signal.values() == b.signal.values());
  CHECK(gsr::make_synthetic_dataset({50, 100, 5, 0.05, 8}).signal.values() != a.signal.values());
}

TEST_CASE("experiment rows, seeds and aggregates") {
  const auto d = small_synthetic();
  const auto cfg = quick_config(Method::Sobolev);
  const auto rows = gsr::run_experiment(d, cfg);
  REQUIRE(rows.size() == 4);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto& r = rows[k];
    CHECK(r.density == cfg.densities[k]);
    CHECK(r.complete());
    REQUIRE(r.per_rep.size() == 4);
    double sum = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(r.per_rep[i].seed == 50 + i);
      CHECK(r.per_rep[i].rmse >= r.per_rep[i].mae);
      sum += r.per_rep[i].rmse;
    }
    const double mean = sum / 4.0;
    for (const auto& p : r.per_rep) sq += (p.rmse - mean) * (p.rmse - mean);
    CHECK(r.rmse_mean == doctest::Approx(mean).epsilon(1e-14));
    CHECK(r.rmse_std == doctest::Approx(std::sqrt(sq / 4.0)).epsilon(1e-12));
    CHECK(r.rmse_mean >= r.mae_mean);
  }
  CHECK(rows.back().rmse_mean <= rows.front().rmse_mean);
}

TEST_CASE("experiments are deterministic and thread-count independent") {
  const auto d = small_synthetic();
  for (Method m : {Method::Sobolev, Method::Tikhonov, Method::KnnBaseline}) {
    auto cfg = quick_config(m);
    const auto a = gsr::run_experiment(d, cfg);
    const auto b = gsr::run_experiment(d, cfg);
    cfg.threads = 3;
    const auto c = gsr::run_experiment(d, cfg);
    CHECK(same_results(a, b));
    CHECK(same_results(a, c));
    CHECK(gsr::results_json(a) == gsr::results_json(c));
    CHECK(std::string(gsr::to_string(a.front().method)) == gsr::to_string(m));
  }
}

TEST_CASE("a full mask leaves nothing to evaluate") {
  const auto d = small_synthetic();
  auto cfg = quick_config(Method::Sobolev);
  cfg.densities = {1.0};
  const auto rows = gsr::run_experiment(d, cfg);
  REQUIRE(rows.size() == 1);
  CHECK_FALSE(rows[0].complete());
  CHECK(rows[0].per_rep.empty());
  REQUIRE(rows[0].failed_reps.size() == 4);
  CHECK(rows[0].failed_reps[0].code == gsr::ErrorCode::EmptyEvaluationSet);
}

TEST_CASE("iteration cap is recorded as a failed repetition") {
  const auto d = small_synthetic();
  auto cfg = quick_config(Method::Sobolev);
  cfg.densities = {0.3};
  cfg.sobolev.max_iterations = 1;
  const auto rows = gsr::run_experiment(d, cfg);
  REQUIRE(rows[0].failed_reps.size() == 4);
  CHECK(rows[0].failed_reps[0].code == gsr::ErrorCode::MaxIterationsExceeded);
}

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  cfg.densities = {0.3, 0.1};
  CHECK_THROWS_AS(cfg.validate(), gsr::Error);
  cfg.densities = {0.0, 0.5};
  CHECK_THROWS_AS(cfg.validate(), gsr::Error);
  cfg.densities = {0.5};
  cfg.repetitions = 0;
  CHECK_THROWS_AS(cfg.validate(), gsr::Error);
  cfg.repetitions = 1;
  cfg.k_graph = 0;
  CHECK_THROWS_AS(cfg.validate(), gsr::Error);
}

TEST_CASE("hidden values never influence the reconstruction") {
  const auto d = small_synthetic();
  const auto graph = gsr::build_knn_graph(d.positions, 4);
  const gsr::SobolevConfig cfg;
  const auto op = gsr::sobolev_operator(graph, cfg.epsilon, cfg.beta);
  for (Method m : {Method::Sobolev, Method::KnnBaseline}) {
    const auto base = gsr::run_repetition(d, graph, &op, m, cfg, 0.3, 99);
    // Overwrite every hidden entry with a wild value.
    Matrix tagged = d.signal.values();
    for (const auto& e : base.eval_set) {
      tagged(static_cast<Eigen::Index>(e.node), static_cast<Eigen::Index>(e.time)) = 1e6;
    }
    gsr::Dataset altered = d;
    altered.signal = TimeVaryingSignal(tagged);
    const auto again = gsr::run_repetition(altered, graph, &op, m, cfg, 0.3, 99);
    CHECK(again.scale.min_value == base.scale.min_value);
    CHECK(again.scale.max_value == base.scale.max_value);
    CHECK(again.reconstruction.values() == base.reconstruction.values());
    CHECK(again.report.rmse > base.report.rmse);
  }
}

TEST_CASE("native gaps are neither observed nor evaluated") {
  auto d = small_synthetic();
  Matrix native = Matrix::Ones(20, 30);
  native(3, 4) = native(7, 10) = native(7, 11) = 0.0;
  d.native_mask = gsr::SamplingMask::from_matrix(native);
  d.signal = TimeVaryingSignal(Matrix(d.signal.values().cwiseProduct(native)));
  const auto graph = gsr::build_knn_graph(d.positions, 4);
  const gsr::SobolevConfig cfg;
  const auto op = gsr::sobolev_operator(graph, cfg.epsilon, cfg.beta);
  const auto run = gsr::run_repetition(d, graph, &op, Method::Sobolev, cfg, 0.5, 5);
  CHECK_FALSE(run.observed.observed(3, 4));
  CHECK_FALSE(run.observed.observed(7, 10));
  for (const auto& e : run.eval_set) {
    CHECK(native(static_cast<Eigen::Index>(e.node), static_cast<Eigen::Index>(e.time)) == 1.0);
    CHECK_FALSE(run.mask.observed(e.node, e.time));
  }
  std::size_t expected = 0;
  for (std::size_t i = 0; i < 20; ++i) {
    for (std::size_t t = 0; t < 30; ++t) {
      if (!run.mask.observed(i, t) && d.native_mask.observed(i, t)) ++expected;
    }
  }
  CHECK(run.eval_set.size() == expected);
}

TEST_CASE("grid search") {
  const auto d = small_synthetic();
  auto base = quick_config(Method::Sobolev);

  SUBCASE("single point echoes its config") {
    const auto rep = gsr::grid_search(d, 0.3, {0.4}, {1.5}, {0.2}, 3, 1, base);
    CHECK(rep.entries.size() == 1);
    CHECK(rep.best_config.epsilon == 0.4);
    CHECK(rep.best_config.beta == 1.5);
    CHECK(rep.best_config.gamma == 0.2);
    CHECK(rep.best_config.cg_tolerance == base.sobolev.cg_tolerance);
  }
  SUBCASE("cardinality and pairing") {
    const auto rep = gsr::grid_search(d, 0.3, {0.1, 1.0}, {1.0, 2.0}, {0.1, 1.0}, 3, 1, base);
    REQUIRE(rep.entries.size() == 8);
    for (const auto& e : rep.entries) {
      REQUIRE(e.per_rep.size() == 3);
      for (std::size_t r = 0; r < 3; ++r) CHECK(e.per_rep[r].seed == 1 + r);
    }
    for (const auto& e : rep.entries) CHECK(rep.best.rmse_mean <= e.rmse_mean);
  }
  SUBCASE("argmin over two shifts") {
    const auto rep = gsr::grid_search(d, 0.5, {0.0, 0.5}, {1.0}, {1.0}, 3, 1, base);
    REQUIRE(rep.entries.size() == 2);
    const auto& win = rep.entries[0].rmse_mean <= rep.entries[1].rmse_mean ? rep.entries[0] : rep.entries[1];
    CHECK(rep.best_config.epsilon == win.sobolev.epsilon);
    CHECK(rep.best.rmse_mean == win.rmse_mean);
  }
  SUBCASE("configs with failed repetitions are excluded") {
    auto capped = base;
    capped.sobolev.max_iterations = 50;
    // Here gamma = 1e-8 needs about 20 iterations and gamma = 10 about 80.
    const auto rep = gsr::grid_search(d, 0.3, {0.5}, {2.0}, {1e-8, 10.0}, 2, 1, capped);
    REQUIRE(rep.entries.size() == 2);
    REQUIRE(rep.excluded.size() == 1);
    CHECK(rep.excluded[0] == 1);
    CHECK(rep.best_config.gamma == 1e-8);
    CHECK(rep.best.complete());
  }
  SUBCASE("empty grid") {
    CHECK_THROWS_AS(gsr::grid_search(d, 0.3, {}, {1.0}, {1.0}, 2, 1, base), gsr::Error);
  }
}

}  // TEST_SUITE
