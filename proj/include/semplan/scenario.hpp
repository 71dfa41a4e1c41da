#pragma once

#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "semplan/bench.hpp"
#include "semplan/io.hpp"

namespace semplan {

struct ScalingSpec {
  std::vector<GridSize> sizes;
  std::string formula;
  std::vector<std::string> alphabet;
  std::vector<double> uncertainty{1.0};
  int repetitions = 3;
};

/// Contents of a scenario file. The map may be inline or a path relative to
/// the scenario file.
struct ScenarioSpec {
  MapSpec map;
  std::string formula;
  PlannerConfig planner;
  unsigned sensor_range = 1;
  ReplanMode mode = ReplanMode::trigger;
  std::optional<std::size_t> step_cap;
  std::uint64_t seed = 0;
  std::size_t worlds = 200;
  std::vector<ReplanMode> strategies{ReplanMode::trigger, ReplanMode::never};
  std::vector<std::string> required;  // empty: observations occurring positively in the formula
  unsigned threads = 1;
  std::optional<ScalingSpec> scaling;
};

inline ReplanMode parse_replan_mode(const std::string& s) {
  if (s == "trigger") return ReplanMode::trigger;
  if (s == "every" || s == "every_step") return ReplanMode::every_step;
  if (s == "never") return ReplanMode::never;
  throw SchemaError("", "unknown replan mode '" + s + "' (expected trigger, every or never)");
}

/// Observations that occur un-negated somewhere in `f`, ascending.
inline std::vector<ObservationId> positive_observations(const Formula& f) {
  std::vector<ObservationId> out;
  auto walk = [&](auto&& self, const Formula& g) -> void {
    if (g.kind() == FormulaKind::Obs) out.push_back(g.observation());
    for (const auto& c : g.children()) self(self, c);
  };
  walk(walk, f);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace detail {

inline PlannerConfig parse_planner(const json& j, const std::string& ptr) {
  PlannerConfig cfg;
  if (j.contains("gamma")) {
    cfg.gamma = as_number(j["gamma"], ptr + "/gamma");
    if (!(cfg.gamma >= 0.0 && cfg.gamma < 1.0)) throw SchemaError(ptr + "/gamma", "discount must lie in [0, 1)");
  }
  if (j.contains("beta")) {
    cfg.beta = as_number(j["beta"], ptr + "/beta");
    if (!(cfg.beta > 0.0)) throw SchemaError(ptr + "/beta", "step cost must be positive");
  }
  if (j.contains("epsilon")) {
    cfg.epsilon = as_number(j["epsilon"], ptr + "/epsilon");
    if (!(cfg.epsilon > 0.0)) throw SchemaError(ptr + "/epsilon", "convergence threshold must be positive");
  }
  if (j.contains("max_sweeps")) {
    const int n = as_int(j["max_sweeps"], ptr + "/max_sweeps");
    if (n < 1) throw SchemaError(ptr + "/max_sweeps", "must be positive");
    cfg.max_sweeps = static_cast<std::size_t>(n);
  }
  try {
    cfg.validate();
  } catch (const ModelError& e) {
    throw SchemaError(ptr, e.what());
  }
  return cfg;
}

inline std::uint64_t as_seed(const json& j, const std::string& ptr) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0)) {
    throw SchemaError(ptr, "expected a non-negative integer");
  }
  return j.get<std::uint64_t>();
}

}  // namespace detail

inline ScenarioSpec parse_scenario(const json& j, const std::filesystem::path& base_dir = {}) {
  using namespace detail;
  ScenarioSpec sc;
  const json& map = member(j, "map", "");
  if (map.is_string()) {
    const std::filesystem::path path = base_dir / map.get<std::string>();
    if (!std::filesystem::exists(path)) throw SchemaError("/map", "map file " + path.string() + " does not exist");
    sc.map = parse_map(read_json_file(path));
  } else {
    try {
      sc.map = parse_map(map);
    } catch (const SchemaError& e) {
      throw SchemaError("/map" + e.pointer(), e.what());
    }
  }
  sc.formula = as_string(member(j, "formula", ""), "/formula");
  if (j.contains("planner")) sc.planner = parse_planner(j["planner"], "/planner");
  if (j.contains("run")) {
    const json& r = j["run"];
    if (r.contains("h")) {
      const int h = as_int(r["h"], "/run/h");
      if (h < 0) throw SchemaError("/run/h", "must be non-negative");
      sc.sensor_range = static_cast<unsigned>(h);
    }
    if (r.contains("replan")) {
      try {
        sc.mode = parse_replan_mode(as_string(r["replan"], "/run/replan"));
      } catch (const SchemaError& e) {
        throw SchemaError("/run/replan", e.what());
      }
    }
    if (r.contains("step_cap") && !r["step_cap"].is_null()) {
      const int cap = as_int(r["step_cap"], "/run/step_cap");
      if (cap < 1) throw SchemaError("/run/step_cap", "must be at least 1");
      sc.step_cap = static_cast<std::size_t>(cap);
    }
    if (r.contains("seed")) sc.seed = as_seed(r["seed"], "/run/seed");
  } else {
    sc.sensor_range = sc.map.sensor_range;
  }
  if (j.contains("bench")) {
    const json& b = j["bench"];
    if (b.contains("worlds")) {
      const int n = as_int(b["worlds"], "/bench/worlds");
      if (n < 1) throw SchemaError("/bench/worlds", "must be at least 1");
      sc.worlds = static_cast<std::size_t>(n);
    }
    if (b.contains("strategies")) {
      sc.strategies.clear();
      const auto names = as_names(b["strategies"], "/bench/strategies");
      for (std::size_t i = 0; i < names.size(); ++i) {
        try {
          sc.strategies.push_back(parse_replan_mode(names[i]));
        } catch (const SchemaError& e) {
          throw SchemaError(ptr_join("/bench/strategies", i), e.what());
        }
      }
    }
    if (b.contains("required")) sc.required = as_names(b["required"], "/bench/required");
    if (b.contains("threads")) {
      const int t = as_int(b["threads"], "/bench/threads");
      if (t < 1) throw SchemaError("/bench/threads", "must be at least 1");
      sc.threads = static_cast<unsigned>(t);
    }
    if (b.contains("seed")) sc.seed = as_seed(b["seed"], "/bench/seed");
  }
  if (j.contains("scaling")) {
    const json& s = j["scaling"];
    ScalingSpec spec;
    const json& sizes = as_array(member(s, "sizes", "/scaling"), "/scaling/sizes");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const Cell c = as_cell(sizes[i], ptr_join("/scaling/sizes", i));
      if (c.x < 1 || c.y < 1) throw SchemaError(ptr_join("/scaling/sizes", i), "grid dimensions must be positive");
      spec.sizes.push_back({c.x, c.y});
    }
    spec.formula = as_string(member(s, "formula", "/scaling"), "/scaling/formula");
    spec.alphabet = as_names(member(s, "alphabet", "/scaling"), "/scaling/alphabet");
    if (s.contains("uncertainty")) {
      spec.uncertainty.clear();
      const json& u = as_array(s["uncertainty"], "/scaling/uncertainty");
      for (std::size_t i = 0; i < u.size(); ++i) {
        const double f = as_number(u[i], ptr_join("/scaling/uncertainty", i));
        if (f < 0.0 || f > 1.0) throw SchemaError(ptr_join("/scaling/uncertainty", i), "must lie in [0, 1]");
        spec.uncertainty.push_back(f);
      }
    }
    if (s.contains("repetitions")) spec.repetitions = as_int(s["repetitions"], "/scaling/repetitions");
    sc.scaling = std::move(spec);
  }
  return sc;
}

inline ScenarioSpec load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_json_file(path), path.parent_path());
}

inline json bench_report_to_json(const BenchReport& r, const std::vector<ScalingRow>& scaling = {}) {
  json j;
  j["worlds"] = r.worlds;
  j["seed"] = r.seed;
  j["step_cap"] = r.step_cap;
  j["static_path_deviations"] = r.static_path_deviations;
  j["strategies"] = json::array();
  for (const auto& s : r.strategies) {
    json outcomes = json::array();
    for (Outcome o : s.outcomes) outcomes.push_back(to_string(o));
    j["strategies"].push_back({{"strategy", to_string(s.mode)},
                               {"episodes", s.episodes},
                               {"successes", s.successes},
                               {"step_cap_failures", s.step_cap_failures},
                               {"infeasible", s.infeasible},
                               {"errors", s.errors},
                               {"word_check_mismatches", s.word_check_mismatches},
                               {"trash_visits", s.trash_visits},
                               {"replans", s.replans},
                               {"sweeps", s.sweeps},
                               {"planning_seconds", s.planning_seconds},
                               {"length", {{"mean", s.length.mean}, {"median", s.length.median}, {"sd", s.length.sd}}},
                               {"accepted_lengths", s.accepted_lengths},
                               {"outcomes", outcomes}});
  }
  j["scaling"] = json::array();
  for (const auto& row : scaling) {
    j["scaling"].push_back({{"width", row.width},
                            {"height", row.height},
                            {"uncertainty", row.uncertainty},
                            {"model_states", row.model_states},
                            {"model_transitions", row.model_transitions},
                            {"dfa_states", row.dfa_states},
                            {"product_states", row.product_states},
                            {"product_edges", row.product_edges},
                            {"build_seconds", row.build_seconds},
                            {"plan_seconds", row.plan_seconds},
                            {"sweeps", row.sweeps}});
  }
  return j;
}

/// One row per strategy.
inline std::string bench_report_csv(const BenchReport& r) {
  std::ostringstream out;
  out << "strategy,episodes,successes,step_cap_failures,infeasible,errors,trash_visits,replans,mean_length,"
         "median_length,sd_length,planning_seconds\n";
  for (const auto& s : r.strategies) {
    out << to_string(s.mode) << ',' << s.episodes << ',' << s.successes << ',' << s.step_cap_failures << ','
        << s.infeasible << ',' << s.errors << ',' << s.trash_visits << ',' << s.replans << ',' << s.length.mean << ','
        << s.length.median << ',' << s.length.sd << ',' << s.planning_seconds << '\n';
  }
  return out.str();
}

}  // namespace semplan
