// Runs the gsr executable end to end.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdlib>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "tempdir.hpp"

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run(const TempDir& dir, const std::string& args) {
  const auto out = dir.path() / "stdout.txt";
  const auto err = dir.path() / "stderr.txt";
  const std::string cmd = std::string("\"") + GSR_CLI_PATH + "\" " + args + " >\"" + out.string() +
                          "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.out = TempDir::read(out);
  o.err = TempDir::read(err);
  return o;
}

std::string data(const std::string& name) { return std::string(GSR_DATA_DIR) + "/" + name; }

std::string dataset_flags() {
  return "--positions " + data("synthetic_positions.csv") + " --readings " +
         data("synthetic_readings.csv");
}

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

// A cheap experiment over the bundled data: 30 steps, 3 repetitions.
std::string small_config(const TempDir& dir, const std::string& extra) {
  const std::string text = "{\"positions\": \"" + data("synthetic_positions.csv") +
                           "\", \"readings\": \"" + data("synthetic_readings.csv") +
                           "\", \"name\": \"synthetic\", \"max_time_steps\": 30, "
                           "\"repetitions\": 3, \"master_seed\": 4" +
                           extra + "}";
  return dir.write("config.json", text).string();
}

}  // namespace

TEST_CASE("reconstruct: flag validation") {
  TempDir dir;
  const std::string base = "reconstruct " + dataset_flags() + " --k 5 --epsilon 0.1 --beta 2 ";
  auto o = run(dir, base + "--density 0.5 --seed 1 --out " + dir.path().string());
  CHECK(o.code == 2);
  CHECK(o.err.find("--gamma") != std::string::npos);

  o = run(dir, base + "--gamma 1 --density 1.1 --seed 1 --out " + dir.path().string());
  CHECK(o.code == 2);
  CHECK(o.err.find("--density") != std::string::npos);

  o = run(dir, base + "--gamma 1 --density 0.5 --seed 1 --bogus 3 --out " + dir.path().string());
  CHECK(o.code == 2);

  o = run(dir, base + "--gamma 0 --density 0.5 --seed 1 --out " + dir.path().string());
  CHECK(o.code == 2);
  CHECK(o.err.find("InvalidArgument") != std::string::npos);

  CHECK(run(dir, "--help").code == 0);
  CHECK(run(dir, "").code == 2);
}

TEST_CASE("reconstruct: success writes parseable outputs") {
  TempDir dir;
  const auto out = dir.path() / "rec";
  const auto o = run(dir, "reconstruct " + dataset_flags() +
                              " --k 5 --epsilon 0.1 --beta 2 --gamma 1 --density 0.3 --seed 2 "
                              "--max-time-steps 40 --mask-out " +
                              (dir.path() / "mask.csv").string() + " --out " + out.string());
  REQUIRE(o.code == 0);
  const std::string csv = TempDir::read(out / "reconstruction.csv");
  CHECK(csv.rfind("node_id,time_index,value\n", 0) == 0);
  CHECK(count_lines(csv) == 1 + 50 * 40);
  const auto metrics = nlohmann::json::parse(TempDir::read(out / "metrics.json"));
  CHECK(metrics["converged"] == true);
  CHECK(metrics["n_evaluated"] == 35 * 40);
  CHECK(metrics["rmse"].get<double>() >= metrics["mae"].get<double>());
  CHECK(metrics["config"]["gamma"] == 1.0);
  CHECK(!TempDir::read(dir.path() / "mask.csv").empty());
}

TEST_CASE("reconstruct: runtime and input failures") {
  TempDir dir;
  const std::string flags = " --k 5 --epsilon 0.1 --beta 2 --gamma 1 --density 0.3 --seed 2 --out " +
                            (dir.path() / "rec").string();
  auto o = run(dir, "reconstruct " + dataset_flags() + flags + " --max-iterations 2");
  CHECK(o.code == 3);
  CHECK(o.err.find("MaxIterationsExceeded") != std::string::npos);
  CHECK(nlohmann::json::parse(TempDir::read(dir.path() / "rec" / "metrics.json"))["converged"] ==
        false);

  const auto bad = dir.write("bad.csv", "node_id,time_index,value\nS001,0,oops\n");
  o = run(dir, "reconstruct --positions " + data("synthetic_positions.csv") + " --readings " +
                   bad.string() + flags);
  CHECK(o.code == 2);
  CHECK(o.err.find("MalformedCsv") != std::string::npos);
  CHECK(count_lines(o.err) == 1);

  o = run(dir, "reconstruct " + dataset_flags() + " --k 50 --epsilon 0.1 --beta 2 --gamma 1 "
               "--density 0.3 --seed 2 --out " + (dir.path() / "rec").string());
  CHECK(o.code == 2);
  CHECK(o.err.find("KTooLarge") != std::string::npos);
}

TEST_CASE("experiment: rows, labels and determinism") {
  TempDir dir;
  const auto cfg = small_config(dir, ", \"method\": [\"sobolev\", \"tikhonov\", \"knn_baseline\"]");
  const auto a = dir.path() / "a";
  const auto b = dir.path() / "b";
  auto o = run(dir, "experiment --config " + cfg + " --out " + a.string());
  REQUIRE(o.code == 0);
  CHECK(o.out.find("knn_baseline") != std::string::npos);
  REQUIRE(run(dir, "experiment --config " + cfg + " --threads 2 --out " + b.string()).code == 0);
  const std::string csv = TempDir::read(a / "results.csv");
  CHECK(count_lines(csv) == 1 + 12);
  CHECK(csv == TempDir::read(b / "results.csv"));
  CHECK(TempDir::read(a / "results.json") == TempDir::read(b / "results.json"));
  const auto doc = nlohmann::json::parse(TempDir::read(a / "results.json"));
  CHECK(doc["results"][4]["method"] == "tikhonov");
  CHECK(doc["results"][0]["per_rep"].size() == 3);
}

TEST_CASE("experiment: config errors and failed repetitions") {
  TempDir dir;
  auto o = run(dir, "experiment --config " + small_config(dir, ", \"colour\": 1") + " --out " +
                        dir.path().string());
  CHECK(o.code == 2);
  o = run(dir, "experiment --config " + (dir.path() / "missing.json").string());
  CHECK(o.code == 2);

  // An iteration cap of 1 fails every solver repetition; outputs are still written.
  const auto out = dir.path() / "capped";
  o = run(dir, "experiment --config " +
                   small_config(dir, ", \"densities\": [0.5], \"sobolev\": {\"max_iterations\": 1}") +
                   " --out " + out.string());
  CHECK(o.code == 3);
  const auto doc = nlohmann::json::parse(TempDir::read(out / "results.json"));
  CHECK(doc["results"][0]["failed_reps"].size() == 3);
  CHECK(doc["results"][0]["failed_reps"][0]["error"] == "MaxIterationsExceeded");
  CHECK(doc["results"][0]["complete"] == false);
}

TEST_CASE("experiment: command-line dataset overrides the config") {
  TempDir dir;
  const auto cfg = dir.write("plain.json", R"({"repetitions": 2, "densities": [0.5], "max_time_steps": 20})");
  const auto o = run(dir, "experiment --config " + cfg.string() + " " + dataset_flags() +
                              " --out " + dir.path().string());
  CHECK(o.code == 0);
  CHECK(count_lines(TempDir::read(dir.path() / "results.csv")) == 2);
}

TEST_CASE("gridsearch") {
  TempDir dir;
  const auto one = dir.path() / "one";
  auto o = run(dir, "gridsearch --config " +
                        small_config(dir, ", \"density\": 0.5, \"eps_grid\": [0.25], "
                                          "\"beta_grid\": [1.5], \"gamma_grid\": [0.5]") +
                        " --out " + one.string());
  REQUIRE(o.code == 0);
  const auto best = nlohmann::json::parse(TempDir::read(one / "best_config.json"));
  CHECK(best["epsilon"] == 0.25);
  CHECK(best["beta"] == 1.5);
  CHECK(best["gamma"] == 0.5);

  const auto eight = dir.path() / "eight";
  o = run(dir, "gridsearch --config " +
                   small_config(dir, ", \"density\": 0.5, \"eps_grid\": [0.1, 1], "
                                     "\"beta_grid\": [1, 2], \"gamma_grid\": [0.1, 1]") +
                   " --out " + eight.string());
  REQUIRE(o.code == 0);
  CHECK(count_lines(TempDir::read(eight / "grid_report.csv")) == 1 + 8);

  o = run(dir, "gridsearch --config " +
                   small_config(dir, ", \"density\": 0.5, \"eps_grid\": [], "
                                     "\"beta_grid\": [1], \"gamma_grid\": [1]") +
                   " --out " + dir.path().string());
  CHECK(o.code == 2);
}

TEST_CASE("graph-info and synthesize") {
  TempDir dir;
  auto o = run(dir, "graph-info --positions " + data("synthetic_positions.csv") + " --k 5 --edges-out " +
                        (dir.path() / "edges.csv").string());
  REQUIRE(o.code == 0);
  CHECK(o.out.find("nodes       50") != std::string::npos);
  CHECK(TempDir::read(dir.path() / "edges.csv").rfind("src_id,dst_id,weight\n", 0) == 0);

  // The bundled data is exactly what the generator produces.
  REQUIRE(run(dir, "synthesize --out " + dir.path().string()).code == 0);
  CHECK(TempDir::read(dir.path() / "synthetic_positions.csv") ==
        TempDir::read(data("synthetic_positions.csv")));
  CHECK(TempDir::read(dir.path() / "synthetic_readings.csv") ==
        TempDir::read(data("synthetic_readings.csv")));
}
