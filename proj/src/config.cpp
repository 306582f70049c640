#include "gsr/config.hpp"

#include <set>

#include "json.hpp"

#include "gsr/error.hpp"

namespace gsr {

namespace {

using nlohmann::json;

const std::set<std::string> kSourceKeys{"positions", "readings", "name", "min_coverage",
                                        "max_time_steps"};
const std::set<std::string> kExperimentKeys{"densities", "repetitions", "master_seed", "method",
                                            "sobolev",   "k_graph",     "threads"};
const std::set<std::string> kGridKeys{"density", "densities", "eps_grid", "beta_grid",
                                      "gamma_grid"};
const std::set<std::string> kSobolevKeys{"epsilon", "beta", "gamma", "cg_tolerance",
                                         "max_iterations"};

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); }

json parse_object(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    bad(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) bad("config must be a JSON object");
  return doc;
}

void reject_unknown(const json& obj, const std::vector<const std::set<std::string>*>& allowed,
                    const std::string& where) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const auto* keys : allowed) known = known || keys->count(item.key()) > 0;
    if (!known) bad("unknown key '" + item.key() + "' in " + where);
  }
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) bad("'" + key + "' must be a number");
  return v.get<double>();
}

std::size_t count(const json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    bad("'" + key + "' must be a nonnegative integer");
  }
  return v.get<std::size_t>();
}

std::vector<double> number_list(const json& v, const std::string& key) {
  if (!v.is_array()) bad("'" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) out.push_back(number(x, key));
  return out;
}

std::string text(const json& v, const std::string& key) {
  if (!v.is_string()) bad("'" + key + "' must be a string");
  return v.get<std::string>();
}

DatasetSource read_source(const json& doc) {
  DatasetSource src;
  if (doc.contains("positions")) src.positions = text(doc["positions"], "positions");
  if (doc.contains("readings")) src.readings = text(doc["readings"], "readings");
  if (doc.contains("name")) src.name = text(doc["name"], "name");
  if (doc.contains("min_coverage")) {
    src.min_coverage = number(doc["min_coverage"], "min_coverage");
    if (!(src.min_coverage >= 0.0 && src.min_coverage <= 1.0)) bad("'min_coverage' must lie in [0, 1]");
  }
  if (doc.contains("max_time_steps")) src.max_time_steps = count(doc["max_time_steps"], "max_time_steps");
  return src;
}

SobolevConfig read_sobolev(const json& obj) {
  if (!obj.is_object()) bad("'sobolev' must be an object");
  reject_unknown(obj, {&kSobolevKeys}, "'sobolev'");
  SobolevConfig c;
  if (obj.contains("epsilon")) c.epsilon = number(obj["epsilon"], "epsilon");
  if (obj.contains("beta")) c.beta = number(obj["beta"], "beta");
  if (obj.contains("gamma")) c.gamma = number(obj["gamma"], "gamma");
  if (obj.contains("cg_tolerance")) c.cg_tolerance = number(obj["cg_tolerance"], "cg_tolerance");
  if (obj.contains("max_iterations")) c.max_iterations = count(obj["max_iterations"], "max_iterations");
  return c;
}

// Fills the fields shared by experiment and grid configs.
ExperimentConfig read_common(const json& doc) {
  ExperimentConfig cfg;
  if (doc.contains("densities")) cfg.densities = number_list(doc["densities"], "densities");
  if (doc.contains("repetitions")) cfg.repetitions = count(doc["repetitions"], "repetitions");
  if (doc.contains("master_seed")) cfg.master_seed = count(doc["master_seed"], "master_seed");
  if (doc.contains("sobolev")) cfg.sobolev = read_sobolev(doc["sobolev"]);
  if (doc.contains("k_graph")) cfg.k_graph = count(doc["k_graph"], "k_graph");
  if (doc.contains("threads")) cfg.threads = count(doc["threads"], "threads");
  return cfg;
}

std::vector<Method> read_methods(const json& doc) {
  if (!doc.contains("method")) return {Method::Sobolev};
  const json& v = doc["method"];
  std::vector<Method> out;
  if (v.is_string()) {
    out.push_back(parse_method(v.get<std::string>()));
  } else if (v.is_array() && !v.empty()) {
    for (const auto& m : v) out.push_back(parse_method(text(m, "method")));
  } else {
    bad("'method' must be a method name or a nonempty array of names");
  }
  return out;
}

}  // namespace

ExperimentPlan parse_experiment_plan(std::string_view json_text) {
  const json doc = parse_object(json_text);
  reject_unknown(doc, {&kSourceKeys, &kExperimentKeys}, "experiment config");
  ExperimentPlan plan;
  plan.source = read_source(doc);
  const ExperimentConfig common = read_common(doc);
  for (Method m : read_methods(doc)) {
    ExperimentConfig cfg = common;
    cfg.method = m;
    cfg.validate();
    plan.runs.push_back(std::move(cfg));
  }
  return plan;
}

GridPlan parse_grid_plan(std::string_view json_text) {
  const json doc = parse_object(json_text);
  reject_unknown(doc, {&kSourceKeys, &kExperimentKeys, &kGridKeys}, "grid config");
  GridPlan plan;
  plan.source = read_source(doc);
  plan.base = read_common(doc);
  const std::vector<Method> methods = read_methods(doc);
  if (methods.size() != 1 || methods.front() == Method::KnnBaseline) {
    bad("grid search takes a single method, sobolev or tikhonov");
  }
  plan.base.method = methods.front();

  if (doc.contains("density") && doc.contains("densities")) bad("give 'density' or 'densities', not both");
  if (doc.contains("density")) {
    plan.densities = {number(doc["density"], "density")};
  } else {
    plan.densities = plan.base.densities;
  }
  plan.base.densities = plan.densities;
  for (const char* key : {"eps_grid", "beta_grid", "gamma_grid"}) {
    if (!doc.contains(key)) bad(std::string("grid config needs '") + key + "'");
  }
  plan.eps_grid = number_list(doc["eps_grid"], "eps_grid");
  plan.beta_grid = number_list(doc["beta_grid"], "beta_grid");
  plan.gamma_grid = number_list(doc["gamma_grid"], "gamma_grid");
  if (plan.eps_grid.empty() || plan.beta_grid.empty() || plan.gamma_grid.empty()) {
    bad("eps_grid, beta_grid and gamma_grid must be nonempty");
  }
  if (plan.base.method == Method::Tikhonov) {
    plan.eps_grid = {0.0};
    plan.beta_grid = {1.0};
  }
  for (double e : plan.eps_grid) {
    if (!(e >= 0.0)) bad("eps_grid values must be >= 0");
  }
  for (double b : plan.beta_grid) {
    if (!(b > 0.0)) bad("beta_grid values must be > 0");
  }
  for (double g : plan.gamma_grid) {
    if (!(g > 0.0)) bad("gamma_grid values must be > 0");
  }
  plan.base.validate();
  return plan;
}

DatasetSource parse_dataset_source(std::string_view json_text) {
  return read_source(parse_object(json_text));
}

std::string sobolev_config_json(const SobolevConfig& c) {
  nlohmann::ordered_json doc = {{"epsilon", c.epsilon},
                                {"beta", c.beta},
                                {"gamma", c.gamma},
                                {"cg_tolerance", c.cg_tolerance},
                                {"max_iterations", c.max_iterations}};
  return doc.dump(2) + "\n";
}

}  // namespace gsr
