#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "semplan/dfa.hpp"
#include "semplan/executor.hpp"
#include "semplan/model.hpp"
#include "semplan/planner.hpp"
#include "semplan/product.hpp"

namespace semplan {

/// Observation that every generated world must contain at least once.
struct RequiredLabel {
  ObservationId observation = 0;
  std::vector<StateId> candidates;
};

/// States whose belief gives `o` positive probability.
inline std::vector<StateId> candidate_states(const Belief& b, ObservationId o) {
  std::vector<StateId> out;
  for (StateId x = 0; x < b.state_count(); ++x) {
    for (const auto& e : b.support(x)) {
      if (e.letter.contains(o)) {
        out.push_back(x);
        break;
      }
    }
  }
  return out;
}

/// Samples a ground truth from the belief, one letter per state, then makes
/// sure every required observation occurs: if one is missing, a uniformly
/// chosen candidate state gets it added to its letter.
inline Environment map_generate(const Belief& belief, std::span<const RequiredLabel> required, std::uint64_t seed,
                                unsigned sensor_range = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Environment env;
  env.sensor_range = sensor_range;
  env.truth.reserve(belief.state_count());
  for (StateId x = 0; x < belief.state_count(); ++x) {
    const double u = unit(rng);
    const auto support = belief.support(x);
    Letter pick = support.back().letter;
    double acc = 0.0;
    for (const auto& e : support) {
      acc += e.p;
      if (u < acc) {
        pick = e.letter;
        break;
      }
    }
    env.truth.push_back(pick);
  }
  for (const auto& req : required) {
    if (req.candidates.empty()) throw ModelError("required observation has no candidate states");
    const bool present = std::any_of(env.truth.begin(), env.truth.end(),
                                     [&](Letter l) { return l.contains(req.observation); });
    if (present) continue;
    std::uniform_int_distribution<std::size_t> pick(0, req.candidates.size() - 1);
    const StateId x = req.candidates[pick(rng)];
    env.truth.at(x) = env.truth.at(x).with(req.observation);
  }
  return env;
}

struct BenchScenario {
  const PlDmdp* model = nullptr;
  Belief belief;
  const TotalDfa* dfa = nullptr;
  StateId start = 0;
  std::vector<ObservationId> required;
  std::size_t worlds = 200;
  std::uint64_t seed = 1;
  std::vector<ReplanMode> strategies{ReplanMode::trigger, ReplanMode::never};
  unsigned sensor_range = 1;
  std::optional<std::size_t> step_cap;  // default 4 |X| |S|
  PlannerConfig planner;
  unsigned threads = 1;
  bool keep_traces = false;
};

struct LengthStats {
  double mean = 0.0;
  double median = 0.0;
  double sd = 0.0;  // sample standard deviation
};

inline LengthStats length_stats(std::vector<std::size_t> lengths) {
  LengthStats s;
  if (lengths.empty()) return s;
  std::sort(lengths.begin(), lengths.end());
  const double n = static_cast<double>(lengths.size());
  s.mean = std::accumulate(lengths.begin(), lengths.end(), 0.0) / n;
  const std::size_t mid = lengths.size() / 2;
  s.median = lengths.size() % 2 ? static_cast<double>(lengths[mid])
                                 : 0.5 * static_cast<double>(lengths[mid - 1] + lengths[mid]);
  if (lengths.size() > 1) {
    double ss = 0.0;
    for (auto l : lengths) ss += (static_cast<double>(l) - s.mean) * (static_cast<double>(l) - s.mean);
    s.sd = std::sqrt(ss / (n - 1.0));
  }
  return s;
}

struct StrategyStats {
  ReplanMode mode = ReplanMode::trigger;
  std::size_t episodes = 0;
  std::size_t successes = 0;          // accepted and certified by check_word
  std::size_t step_cap_failures = 0;
  std::size_t infeasible = 0;
  std::size_t errors = 0;             // exceptions thrown by an episode
  std::size_t word_check_mismatches = 0;
  std::size_t trash_visits = 0;
  std::size_t replans = 0;
  std::size_t sweeps = 0;
  double planning_seconds = 0.0;
  LengthStats length;
  std::vector<std::size_t> accepted_lengths;  // world order
  std::vector<Outcome> outcomes;              // world order
  std::vector<EpisodeTrace> traces;           // only with keep_traces
};

struct BenchReport {
  std::size_t worlds = 0;
  std::uint64_t seed = 0;
  std::size_t step_cap = 0;
  std::vector<StrategyStats> strategies;
  // Worlds where the no-replanning trajectory visits a state whose true
  // label differs from the initial belief's most probable letter.
  std::size_t static_path_deviations = 0;

  const StrategyStats* find(ReplanMode m) const {
    for (const auto& s : strategies) {
      if (s.mode == m) return &s;
    }
    return nullptr;
  }
};

/// Seed of world `i` of a batch.
inline std::uint64_t world_seed(std::uint64_t seed, std::size_t i) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(i)};
  std::uint32_t words[2];
  seq.generate(words, words + 2);
  return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
}

inline std::vector<Environment> generate_worlds(const BenchScenario& sc) {
  std::vector<RequiredLabel> required;
  for (ObservationId o : sc.required) required.push_back({o, candidate_states(sc.belief, o)});
  std::vector<Environment> worlds;
  worlds.reserve(sc.worlds);
  for (std::size_t i = 0; i < sc.worlds; ++i) {
    worlds.push_back(map_generate(sc.belief, required, world_seed(sc.seed, i), sc.sensor_range));
  }
  return worlds;
}

/// Runs every strategy on every generated world. Episode failures and
/// exceptions are counted, never propagated.
inline BenchReport run_benchmark(const BenchScenario& sc) {
  if (!sc.model || !sc.dfa) throw ModelError("benchmark scenario lacks a model or DFA");
  const auto worlds = generate_worlds(sc);
  BenchReport report;
  report.worlds = sc.worlds;
  report.seed = sc.seed;
  report.step_cap = sc.step_cap.value_or(4 * sc.model->state_count() * sc.dfa->size());

  for (ReplanMode mode : sc.strategies) {
    RunConfig rc;
    rc.mode = mode;
    rc.step_cap = report.step_cap;
    rc.sensor_range = sc.sensor_range;

    struct Slot {
      std::optional<EpisodeTrace> trace;
      bool error = false;
    };
    std::vector<Slot> slots(worlds.size());
    auto work = [&](unsigned w, unsigned workers) {
      for (std::size_t i = w; i < worlds.size(); i += workers) {
        try {
          slots[i].trace = run_episode(*sc.model, sc.belief, worlds[i], *sc.dfa, sc.planner, rc, sc.start);
        } catch (const std::exception&) {
          slots[i].error = true;
        }
      }
    };
    const unsigned workers = std::max(1U, sc.threads);
    if (workers == 1) {
      work(0, 1);
    } else {
      std::vector<std::thread> pool;
      for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w, workers);
      for (auto& t : pool) t.join();
    }

    StrategyStats st;
    st.mode = mode;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      ++st.episodes;
      if (slots[i].error) {
        ++st.errors;
        st.outcomes.push_back(Outcome::infeasible);
        continue;
      }
      const EpisodeTrace& tr = *slots[i].trace;
      st.outcomes.push_back(tr.outcome);
      st.trash_visits += tr.trash_visits;
      st.replans += tr.replans.size();
      for (const auto& r : tr.replans) {
        st.sweeps += r.sweeps;
        st.planning_seconds += r.seconds;
      }
      const bool certified = check_word(tr, *sc.dfa);
      if (certified != (tr.outcome == Outcome::accepted)) ++st.word_check_mismatches;
      if (tr.outcome == Outcome::accepted && certified) {
        ++st.successes;
        st.accepted_lengths.push_back(tr.length());
      } else if (tr.outcome == Outcome::step_cap_exceeded) {
        ++st.step_cap_failures;
      } else if (tr.outcome == Outcome::infeasible) {
        ++st.infeasible;
      }
      if (mode == ReplanMode::never) {
        const bool deviates = std::any_of(tr.states.begin(), tr.states.end(),
                                          [&](StateId x) { return worlds[i].truth[x] != sc.belief.mode(x); });
        if (deviates) ++report.static_path_deviations;
      }
      if (sc.keep_traces) st.traces.push_back(tr);
    }
    st.length = length_stats(st.accepted_lengths);
    report.strategies.push_back(std::move(st));
  }
  return report;
}

/// Belief where a `fraction` of the states (chosen by `seed`) is uncertain:
/// the empty letter has probability 0.3 and the remaining mass is spread
/// evenly over the non-empty letters. Every other state is known empty.
inline Belief uniform_uncertain_belief(std::size_t state_count, const Alphabet& alphabet, double fraction,
                                       std::uint64_t seed) {
  Belief b(state_count, alphabet);
  const std::uint32_t letters = alphabet.letter_count();
  if (letters < 2) return b;
  std::vector<StateId> order(state_count);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(state_count)));
  std::vector<LetterProb> dist{{Letter{}, 0.3}};
  for (std::uint32_t bits = 1; bits < letters; ++bits) dist.push_back({Letter(bits), 0.7 / (letters - 1)});
  for (std::size_t i = 0; i < std::min(count, state_count); ++i) b.set(order[i], dist);
  return b;
}

struct ScalingRow {
  int width = 0;
  int height = 0;
  double uncertainty = 0.0;
  std::size_t model_states = 0;
  std::size_t model_transitions = 0;
  std::size_t dfa_states = 0;
  std::size_t product_states = 0;
  std::size_t product_edges = 0;
  double build_seconds = 0.0;  // median over repetitions
  double plan_seconds = 0.0;   // median over repetitions
  std::size_t sweeps = 0;
};

struct GridSize {
  int width = 0;
  int height = 0;
};

/// Product construction and single-plan timings for each grid size and
/// uncertainty fraction.
inline std::vector<ScalingRow> scaling_table(std::span<const GridSize> sizes, const Formula& formula,
                                             const Alphabet& alphabet, std::span<const double> uncertainty,
                                             const PlannerConfig& cfg, std::uint64_t seed = 1,
                                             int repetitions = 3) {
  using clock = std::chrono::steady_clock;
  const TotalDfa dfa = compile(formula, alphabet);
  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
  };
  std::vector<ScalingRow> rows;
  for (const auto& size : sizes) {
    const PlDmdp m = grid_world(size.width, size.height, {}, alphabet);
    for (double frac : uncertainty) {
      const Belief b = uniform_uncertain_belief(m.state_count(), alphabet, frac, seed);
      ScalingRow row{size.width, size.height, frac, m.state_count(), m.transition_count(), dfa.size()};
      std::vector<double> build_t, plan_t;
      for (int r = 0; r < std::max(1, repetitions); ++r) {
        auto t0 = clock::now();
        const ProductAutomaton p = build_product(m, b, dfa);
        auto t1 = clock::now();
        const PlanResult plan = value_iteration(p, cfg);
        auto t2 = clock::now();
        build_t.push_back(std::chrono::duration<double>(t1 - t0).count());
        plan_t.push_back(std::chrono::duration<double>(t2 - t1).count());
        row.product_states = p.state_count();
        row.product_edges = p.edge_count();
        row.sweeps = plan.sweeps;
      }
      row.build_seconds = median(build_t);
      row.plan_seconds = median(plan_t);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace semplan
