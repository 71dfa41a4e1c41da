// Command-line front end: compile, plan, run, bench.

#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "semplan/semplan.hpp"

namespace {

using namespace semplan;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitSchema = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitStepCap = 4;

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

void emit(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    write_text_file(path, j.dump(2) + "\n");
  }
}

PlannerConfig planner_from(double gamma, double beta, double eps, std::size_t max_sweeps) {
  PlannerConfig cfg;
  cfg.gamma = gamma;
  cfg.beta = beta;
  cfg.epsilon = eps;
  cfg.max_sweeps = max_sweeps;
  cfg.validate();
  return cfg;
}

Environment environment_for(const Scene& scene, const Formula& f, std::uint64_t seed) {
  if (scene.environment) return *scene.environment;
  std::vector<RequiredLabel> required;
  for (ObservationId o : positive_observations(f)) {
    auto candidates = candidate_states(scene.belief, o);
    if (!candidates.empty()) required.push_back({o, std::move(candidates)});
  }
  return map_generate(scene.belief, required, seed, scene.spec.sensor_range);
}

struct CompileArgs {
  std::string formula, alphabet, dot, json_out;
};

int cmd_compile(const CompileArgs& a) {
  const Alphabet ab(split_names(a.alphabet));
  const TotalDfa dfa = compile(parse(a.formula, ab), ab);
  if (!a.dot.empty()) write_text_file(a.dot, dfa_to_dot(dfa));
  emit(dfa_to_json(dfa), a.json_out);
  return kExitOk;
}

struct PlanArgs {
  std::string map, formula, out, product;
  double gamma = 0.99, beta = 1.0, eps = 0.01;
  std::size_t max_sweeps = 100000;
};

int cmd_plan(const PlanArgs& a) {
  const Scene scene = load_map(a.map);
  const PlannerConfig cfg = planner_from(a.gamma, a.beta, a.eps, a.max_sweeps);
  const TotalDfa dfa = compile(parse(a.formula, scene.model.alphabet()), scene.model.alphabet());
  const ProductAutomaton p = build_product(scene.model, scene.belief, dfa);
  const PlanResult plan = value_iteration(p, cfg);
  std::vector<ProductStateId> starts;
  for (const auto& e : scene.belief.support(scene.start)) {
    starts.push_back(p.index(scene.start, dfa.next(dfa.initial(), e.letter)));
  }
  const double min_value = min_nonterminal_value(plan.values, p, starts);
  emit(plan_to_json(plan, p, scene.model, min_value, is_satisfying(plan.values, p, cfg, starts)), a.out);
  if (!a.product.empty()) write_text_file(a.product, product_to_json(p, scene.model).dump(2) + "\n");
  return kExitOk;
}

struct RunArgs {
  std::string map, formula, replan = "trigger", trace, svg;
  std::uint64_t seed = 0;
  int h = -1;
  double gamma = 0.99, beta = 1.0, eps = 0.01;
  std::size_t step_cap = 0;
};

int cmd_run(const RunArgs& a) {
  const Scene scene = load_map(a.map);
  const PlannerConfig cfg = planner_from(a.gamma, a.beta, a.eps, 100000);
  const Formula f = parse(a.formula, scene.model.alphabet());
  const TotalDfa dfa = compile(f, scene.model.alphabet());
  const Environment env = environment_for(scene, f, a.seed);
  RunConfig rc;
  rc.mode = parse_replan_mode(a.replan);
  rc.seed = a.seed;
  if (a.h >= 0) rc.sensor_range = static_cast<unsigned>(a.h);
  rc.step_cap = a.step_cap > 0 ? a.step_cap : 4 * scene.model.state_count() * dfa.size();
  const EpisodeTrace trace = run_episode(scene.model, scene.belief, env, dfa, cfg, rc, scene.start);
  emit(trace_to_json(trace, scene.model, dfa), a.trace);
  if (!a.svg.empty()) write_text_file(a.svg, render_trace_svg(trace, scene));
  switch (trace.outcome) {
    case Outcome::accepted: return kExitOk;
    case Outcome::infeasible: return kExitInfeasible;
    case Outcome::step_cap_exceeded: return kExitStepCap;
  }
  return kExitError;
}

struct BenchArgs {
  std::string scenario, out, csv;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

int cmd_bench(const BenchArgs& a) {
  const ScenarioSpec spec = load_scenario(a.scenario);
  const Scene scene = instantiate(spec.map);
  const Alphabet& ab = scene.model.alphabet();
  const Formula f = parse(spec.formula, ab);
  const TotalDfa dfa = compile(f, ab);

  BenchScenario sc;
  sc.model = &scene.model;
  sc.belief = scene.belief;
  sc.dfa = &dfa;
  sc.start = scene.start;
  sc.worlds = spec.worlds;
  sc.seed = a.seed;
  sc.strategies = spec.strategies;
  sc.sensor_range = spec.sensor_range;
  sc.step_cap = spec.step_cap;
  sc.planner = spec.planner;
  sc.threads = a.threads > 0 ? a.threads : spec.threads;
  if (spec.required.empty()) {
    sc.required = positive_observations(f);
  } else {
    for (std::size_t i = 0; i < spec.required.size(); ++i) {
      auto o = ab.find(spec.required[i]);
      if (!o) throw SchemaError("/bench/required/" + std::to_string(i), "unknown observation '" + spec.required[i] + "'");
      sc.required.push_back(*o);
    }
  }
  const BenchReport report = run_benchmark(sc);

  std::vector<ScalingRow> scaling;
  if (spec.scaling) {
    const Alphabet sab(spec.scaling->alphabet);
    scaling = scaling_table(spec.scaling->sizes, parse(spec.scaling->formula, sab), sab, spec.scaling->uncertainty,
                            spec.planner, a.seed, spec.scaling->repetitions);
  }
  emit(bench_report_to_json(report, scaling), a.out);
  if (!a.csv.empty()) write_text_file(a.csv, bench_report_csv(report));
  return kExitOk;
}

int fail(const char* kind, const std::string& message, int code, json extra = json::object()) {
  json err = {{"kind", kind}, {"message", message}};
  err.update(extra);
  std::cerr << json{{"error", err}}.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Co-safe temporal-logic planning under uncertain semantic maps"};
  app.require_subcommand(1);

  CompileArgs ca;
  auto* compile_cmd = app.add_subcommand("compile", "compile a formula into its good-prefix DFA");
  compile_cmd->add_option("--formula", ca.formula, "formula text")->required();
  compile_cmd->add_option("--alphabet", ca.alphabet, "comma-separated observation names")->required();
  compile_cmd->add_option("--dot", ca.dot, "write Graphviz output here");
  compile_cmd->add_option("--json", ca.json_out, "write JSON here (default: stdout)");

  PlanArgs pa;
  auto* plan_cmd = app.add_subcommand("plan", "compute values and policy for a map and formula");
  plan_cmd->add_option("--map", pa.map, "map file")->required()->check(CLI::ExistingFile);
  plan_cmd->add_option("--formula", pa.formula, "formula text")->required();
  plan_cmd->add_option("--gamma", pa.gamma, "discount factor");
  plan_cmd->add_option("--beta", pa.beta, "step cost");
  plan_cmd->add_option("--eps", pa.eps, "convergence threshold");
  plan_cmd->add_option("--max-sweeps", pa.max_sweeps, "sweep cap");
  plan_cmd->add_option("--out", pa.out, "write JSON here (default: stdout)");
  plan_cmd->add_option("--product", pa.product, "also dump the product automaton");

  RunArgs ra;
  auto* run_cmd = app.add_subcommand("run", "simulate one online episode");
  run_cmd->set_help_flag("--help", "print this help message and exit");
  run_cmd->add_option("--map", ra.map, "map file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--formula", ra.formula, "formula text")->required();
  run_cmd->add_option("--seed", ra.seed, "seed for sampling a truth when the map has none");
  run_cmd->add_option("--replan", ra.replan, "trigger | every | never");
  run_cmd->add_option("--h", ra.h, "sensor range in hops (default: map value)");
  run_cmd->add_option("--gamma", ra.gamma, "discount factor");
  run_cmd->add_option("--beta", ra.beta, "step cost");
  run_cmd->add_option("--eps", ra.eps, "convergence threshold");
  run_cmd->add_option("--step-cap", ra.step_cap, "maximum number of actions (default 4|X||S|)");
  run_cmd->add_option("--trace", ra.trace, "write the trace JSON here (default: stdout)");
  run_cmd->add_option("--svg", ra.svg, "render the episode as SVG");

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("bench", "Monte Carlo benchmark over generated worlds");
  bench_cmd->add_option("--scenario", ba.scenario, "scenario file")->required()->check(CLI::ExistingFile);
  bench_cmd->add_option("--out", ba.out, "write the report JSON here (default: stdout)");
  bench_cmd->add_option("--csv", ba.csv, "write a per-strategy CSV summary");
  bench_cmd->add_option("--seed", ba.seed, "world generation seed")->required();
  bench_cmd->add_option("--threads", ba.threads, "worker threads (default: scenario value)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return fail("usage", e.what(), kExitSchema);
  }

  try {
    if (*compile_cmd) return cmd_compile(ca);
    if (*plan_cmd) return cmd_plan(pa);
    if (*run_cmd) return cmd_run(ra);
    if (*bench_cmd) return cmd_bench(ba);
  } catch (const SchemaError& e) {
    return fail("schema", e.what(), kExitSchema, {{"pointer", e.pointer()}});
  } catch (const ParseError& e) {
    return fail("formula", e.what(), kExitSchema, {{"position", e.position()}});
  } catch (const ConvergenceError& e) {
    return fail("convergence", e.what(), kExitStepCap, {{"residual", e.residual()}, {"sweeps", e.sweeps()}});
  } catch (const Error& e) {
    return fail("error", e.what(), kExitError);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), kExitError);
  }
  return kExitError;
}
