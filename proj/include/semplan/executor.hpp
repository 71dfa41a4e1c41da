#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "semplan/dfa.hpp"
#include "semplan/model.hpp"
#include "semplan/planner.hpp"
#include "semplan/product.hpp"

namespace semplan {

enum class ReplanMode { trigger, every_step, never };
enum class Outcome { accepted, step_cap_exceeded, infeasible };

inline const char* to_string(ReplanMode m) {
  switch (m) {
    case ReplanMode::trigger: return "trigger";
    case ReplanMode::every_step: return "every";
    case ReplanMode::never: return "never";
  }
  return "?";
}

inline const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::accepted: return "accepted";
    case Outcome::step_cap_exceeded: return "step_cap_exceeded";
    case Outcome::infeasible: return "infeasible";
  }
  return "?";
}

struct RunConfig {
  std::size_t step_cap = 1000;
  ReplanMode mode = ReplanMode::trigger;
  std::optional<unsigned> sensor_range;  // overrides Environment::sensor_range
  std::uint64_t seed = 0;
  bool warm_start = false;
};

// Information-matrix norms at or below this count as "no new information".
inline constexpr double kTriggerTolerance = 1e-12;

struct ReplanRecord {
  std::size_t t = 0;
  std::size_t sweeps = 0;
  double residual = 0.0;
  double information_norm = 0.0;
  std::size_t uncertain_before = 0;  // |uncertain set| before this step's sensing
  std::size_t uncertain_after = 0;   // and after it
  double seconds = 0.0;
};

struct StepInfo {
  bool replanned = false;
  double information_norm = 0.0;
  std::size_t sweeps = 0;
  double planning_seconds = 0.0;
};

/// Everything that happened during one episode.
///
/// `states` and `letters` hold x(0..n+1) and l(0..n+1); `dfa_states` is the
/// DFA run over `letters` starting at the initial state, so it has one more
/// entry. `product_states[i]` pairs x(i) with the DFA state after reading
/// l(i).
struct EpisodeTrace {
  std::vector<ActionId> actions;
  std::vector<StateId> states;
  std::vector<Letter> letters;
  std::vector<DfaStateId> dfa_states;
  std::vector<ProductStateId> product_states;
  std::vector<StepInfo> steps;
  std::vector<ReplanRecord> replans;
  std::size_t trash_visits = 0;
  Outcome outcome = Outcome::step_cap_exceeded;
  double cost = 0.0;

  std::size_t length() const noexcept { return actions.size(); }
};

/// Infinity norm of the information matrix of `observations` against the
/// belief held before they were applied. Row j contributes
/// |1 - p(x_j, truth_j)| plus the mass on every other letter.
inline double information_norm(const Belief& prior, std::span<const Observation> observations) {
  double norm = 0.0;
  for (const auto& o : observations) {
    double row = 0.0;
    bool truth_in_support = false;
    for (const auto& e : prior.support(o.state)) {
      if (e.letter == o.letter) {
        row += std::abs(1.0 - e.p);
        truth_in_support = true;
      } else {
        row += std::abs(0.0 - e.p);
      }
    }
    if (!truth_in_support) row += 1.0;
    norm = std::max(norm, row);
  }
  return norm;
}

/// Online sense / update / replan / act loop.
///
/// The label of the start state is fed to the DFA before the first action.
/// Each step senses the neighborhood, measures the information norm against
/// the prior belief, applies the observations and, when the replan mode
/// asks for it (always at t = 0), refreshes the product edges and reruns
/// value iteration. The episode ends on acceptance, when the step cap is
/// hit, or as `infeasible` when no accepting state is reachable from the
/// current product state or the run falls into the trash state.
inline EpisodeTrace run_episode(const PlDmdp& m, const Belief& initial_belief, const Environment& env,
                                const TotalDfa& dfa, const PlannerConfig& cfg, const RunConfig& rc, StateId x0) {
  if (x0 >= m.state_count()) throw ModelError("start state out of range");
  if (env.truth.size() != m.state_count()) throw ModelError("environment does not match the model");
  if (rc.step_cap == 0) throw ModelError("step cap must be at least 1");
  using clock = std::chrono::steady_clock;

  Environment sensor = env;
  if (rc.sensor_range) sensor.sensor_range = *rc.sensor_range;

  Belief belief = initial_belief;
  ProductAutomaton product = build_product(m, belief, dfa);
  std::vector<StateId> pending;

  EpisodeTrace trace;
  StateId x = x0;
  DfaStateId s = dfa.next(dfa.initial(), env.truth[x]);
  trace.states.push_back(x);
  trace.letters.push_back(env.truth[x]);
  trace.dfa_states = {dfa.initial(), s};
  trace.product_states.push_back(product.index(x, s));

  if (dfa.is_trash(s)) {
    ++trace.trash_visits;
    trace.outcome = Outcome::infeasible;
    return trace;
  }

  PlanResult plan;
  for (std::size_t t = 0; !dfa.accepting(s); ++t) {
    if (trace.actions.size() >= rc.step_cap) {
      trace.outcome = Outcome::step_cap_exceeded;
      break;
    }
    StepInfo step;
    const std::size_t uncertain_before = belief.uncertain_count();
    const auto observations = sense(sensor, x, m);
    step.information_norm = information_norm(belief, observations);
    const auto changed = update_map(belief, observations);
    pending.insert(pending.end(), changed.begin(), changed.end());

    const bool replan = t == 0 || rc.mode == ReplanMode::every_step ||
                        (rc.mode == ReplanMode::trigger && step.information_norm > kTriggerTolerance);
    const ProductStateId sp = product.index(x, s);
    if (replan) {
      const auto start = clock::now();
      std::sort(pending.begin(), pending.end());
      pending.erase(std::unique(pending.begin(), pending.end()), pending.end());
      refresh_edges(product, m, belief, dfa, pending);
      pending.clear();
      const ValueTable* warm = rc.warm_start && t > 0 ? &plan.values : nullptr;
      plan = value_iteration(product, cfg, warm);
      step.replanned = true;
      step.sweeps = plan.sweeps;
      step.planning_seconds = std::chrono::duration<double>(clock::now() - start).count();
      trace.replans.push_back(
          {t, plan.sweeps, plan.residual, step.information_norm, uncertain_before, belief.uncertain_count(),
           step.planning_seconds});
      if (!feasibility_check(product, sp)) {
        trace.steps.push_back(step);
        trace.outcome = Outcome::infeasible;
        break;
      }
    }
    trace.steps.push_back(step);

    const auto a = plan.policy.at(sp);
    if (!a) throw PolicyError("policy undefined at product state " + std::to_string(sp));
    const auto next = m.successor(x, *a);
    if (!next) throw PolicyError("policy selected an infeasible action");
    x = *next;
    s = dfa.next(s, env.truth[x]);
    trace.actions.push_back(*a);
    trace.states.push_back(x);
    trace.letters.push_back(env.truth[x]);
    trace.dfa_states.push_back(s);
    trace.product_states.push_back(product.index(x, s));
    if (dfa.is_trash(s)) {
      ++trace.trash_visits;
      trace.outcome = Outcome::infeasible;
      break;
    }
  }
  if (dfa.accepting(s)) trace.outcome = Outcome::accepted;
  trace.cost = m.cost() * static_cast<double>(trace.actions.size());
  return trace;
}

/// Replays the realized word through the DFA; independent of the flags the
/// executor recorded.
inline bool check_word(const EpisodeTrace& trace, const TotalDfa& dfa) { return accepts(dfa, trace.letters); }

}  // namespace semplan
