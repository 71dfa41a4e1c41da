#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "semplan/alphabet.hpp"
#include "semplan/error.hpp"

namespace semplan {

using StateId = std::uint32_t;
using ActionId = std::uint32_t;

inline constexpr StateId kNoState = std::numeric_limits<StateId>::max();
inline constexpr double kProbabilityTolerance = 1e-9;

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

/// Cell <-> state bookkeeping for models built from a rectangular grid.
struct GridLayout {
  int width = 0;
  int height = 0;
  std::vector<Cell> cells;        // indexed by StateId
  std::vector<StateId> state_of;  // indexed by y * width + x; kNoState when blocked

  bool in_bounds(Cell c) const noexcept { return c.x >= 0 && c.y >= 0 && c.x < width && c.y < height; }

  std::optional<StateId> state_at(Cell c) const {
    if (!in_bounds(c)) return std::nullopt;
    const StateId s = state_of[static_cast<std::size_t>(c.y) * width + c.x];
    if (s == kNoState) return std::nullopt;
    return s;
  }

  bool blocked(Cell c) const { return in_bounds(c) && !state_at(c); }
};

/// Deterministic MDP with uniform transition cost and an observation alphabet.
/// The label belief lives in Belief; the hidden truth in Environment.
class PlDmdp {
 public:
  PlDmdp(std::vector<std::string> action_names, std::size_t state_count, std::vector<StateId> transitions,
         Alphabet alphabet, double cost = 1.0, std::optional<GridLayout> grid = std::nullopt)
      : actions_(std::move(action_names)),
        state_count_(state_count),
        transitions_(std::move(transitions)),
        alphabet_(std::move(alphabet)),
        cost_(cost),
        grid_(std::move(grid)) {
    if (state_count_ == 0) throw ModelError("model has no states");
    if (!(cost_ > 0.0)) throw ModelError("transition cost must be positive");
    if (transitions_.size() != state_count_ * actions_.size()) throw ModelError("transition table has wrong size");
    for (StateId t : transitions_) {
      if (t != kNoState && t >= state_count_) throw ModelError("transition target out of range");
    }
    if (auto stay = action("Stay")) {
      for (StateId x = 0; x < state_count_; ++x) {
        if (successor(x, *stay) != x) throw ModelError("Stay must map every state to itself");
      }
    }
    predecessors_.resize(state_count_);
    for (StateId x = 0; x < state_count_; ++x) {
      for (ActionId a = 0; a < actions_.size(); ++a) {
        if (auto y = successor(x, a)) {
          auto& pred = predecessors_[*y];
          if (pred.empty() || pred.back() != x) pred.push_back(x);
        }
      }
    }
  }

  std::size_t state_count() const noexcept { return state_count_; }
  std::size_t action_count() const noexcept { return actions_.size(); }
  const std::string& action_name(ActionId a) const { return actions_.at(a); }
  const std::vector<std::string>& action_names() const noexcept { return actions_; }

  std::optional<ActionId> action(std::string_view name) const {
    auto it = std::find(actions_.begin(), actions_.end(), name);
    if (it == actions_.end()) return std::nullopt;
    return static_cast<ActionId>(it - actions_.begin());
  }

  std::optional<StateId> successor(StateId x, ActionId a) const {
    const StateId t = transitions_[static_cast<std::size_t>(x) * actions_.size() + a];
    if (t == kNoState) return std::nullopt;
    return t;
  }

  /// Number of feasible (state, action) pairs.
  std::size_t transition_count() const noexcept {
    return static_cast<std::size_t>(std::count_if(transitions_.begin(), transitions_.end(),
                                                  [](StateId t) { return t != kNoState; }));
  }

  /// Distinct states with at least one action leading to `x`, ascending.
  std::span<const StateId> predecessors(StateId x) const { return predecessors_.at(x); }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  double cost() const noexcept { return cost_; }
  const std::optional<GridLayout>& grid() const noexcept { return grid_; }

 private:
  std::vector<std::string> actions_;
  std::size_t state_count_;
  std::vector<StateId> transitions_;
  std::vector<std::vector<StateId>> predecessors_;
  Alphabet alphabet_;
  double cost_;
  std::optional<GridLayout> grid_;
};

inline const std::vector<std::string>& grid_actions() {
  static const std::vector<std::string> names{"Up", "Right", "Down", "Left", "Stay"};
  return names;
}

/// Four-connected grid with a Stay action. Up increases y. States are
/// numbered row-major over the unblocked cells.
inline PlDmdp grid_world(int width, int height, const std::vector<Cell>& blocked = {}, Alphabet alphabet = {},
                         double cost = 1.0) {
  if (width < 1 || height < 1) throw ModelError("grid dimensions must be positive");
  GridLayout g;
  g.width = width;
  g.height = height;
  g.state_of.assign(static_cast<std::size_t>(width) * height, 0);
  for (const Cell& c : blocked) {
    if (!g.in_bounds(c)) throw ModelError("blocked cell outside the grid");
    g.state_of[static_cast<std::size_t>(c.y) * width + c.x] = kNoState;
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      auto& slot = g.state_of[static_cast<std::size_t>(y) * width + x];
      if (slot == kNoState) continue;
      slot = static_cast<StateId>(g.cells.size());
      g.cells.push_back({x, y});
    }
  }
  if (g.cells.empty()) throw ModelError("every grid cell is blocked");

  static constexpr int kDx[] = {0, 1, 0, -1, 0};
  static constexpr int kDy[] = {1, 0, -1, 0, 0};
  const auto& names = grid_actions();
  std::vector<StateId> table;
  table.reserve(g.cells.size() * names.size());
  for (const Cell& c : g.cells) {
    for (std::size_t a = 0; a < names.size(); ++a) {
      auto t = g.state_at({c.x + kDx[a], c.y + kDy[a]});
      table.push_back(t ? *t : kNoState);
    }
  }
  const std::size_t n = g.cells.size();
  return PlDmdp(names, n, std::move(table), std::move(alphabet), cost, std::move(g));
}

/// States reachable from `x` in at most `hops` transitions, ascending.
inline std::vector<StateId> neighborhood(const PlDmdp& m, StateId x, unsigned hops) {
  std::vector<int> depth(m.state_count(), -1);
  std::deque<StateId> queue{x};
  depth[x] = 0;
  while (!queue.empty()) {
    const StateId u = queue.front();
    queue.pop_front();
    if (static_cast<unsigned>(depth[u]) == hops) continue;
    for (ActionId a = 0; a < m.action_count(); ++a) {
      if (auto v = m.successor(u, a); v && depth[*v] < 0) {
        depth[*v] = depth[u] + 1;
        queue.push_back(*v);
      }
    }
  }
  std::vector<StateId> out;
  for (StateId s = 0; s < depth.size(); ++s) {
    if (depth[s] >= 0) out.push_back(s);
  }
  return out;
}

struct LetterProb {
  Letter letter;
  double p = 0.0;
  bool operator==(const LetterProb&) const = default;
};

struct Observation {
  StateId state = 0;
  Letter letter;
  bool operator==(const Observation&) const = default;
};

/// Per-state label distribution p_L, stored sparsely over its support.
///
/// A state is *revealed* once its true label has been sensed; the remaining
/// states form the uncertain set. `version()` increases whenever any
/// distribution changes.
class Belief {
 public:
  Belief() = default;

  /// Every state starts with the empty letter at probability 1.
  Belief(std::size_t state_count, Alphabet alphabet)
      : alphabet_(std::move(alphabet)),
        support_(state_count, std::vector<LetterProb>{{Letter{}, 1.0}}),
        revealed_(state_count, false) {}

  std::size_t state_count() const noexcept { return support_.size(); }
  const Alphabet& alphabet() const noexcept { return alphabet_; }

  /// Replaces the distribution of `x`. Duplicate letters are merged and zero
  /// entries dropped; the result must sum to 1 within 1e-9.
  void set(StateId x, std::vector<LetterProb> entries) {
    check_state(x);
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.letter < b.letter; });
    std::vector<LetterProb> merged;
    double total = 0.0;
    for (const auto& e : entries) {
      if (!alphabet_.valid(e.letter)) throw ModelError("state " + std::to_string(x) + ": letter outside 2^O");
      if (!(e.p >= 0.0) || e.p > 1.0 + kProbabilityTolerance) {
        throw ModelError("state " + std::to_string(x) + ": probability outside [0,1]");
      }
      total += e.p;
      if (e.p == 0.0) continue;
      if (!merged.empty() && merged.back().letter == e.letter) {
        merged.back().p += e.p;
      } else {
        merged.push_back(e);
      }
    }
    if (std::abs(total - 1.0) > kProbabilityTolerance) {
      throw ModelError("state " + std::to_string(x) + ": probabilities sum to " + std::to_string(total));
    }
    if (merged != support_[x]) {
      support_[x] = std::move(merged);
      ++version_;
    }
  }

  std::span<const LetterProb> support(StateId x) const { return support_.at(x); }

  double probability(StateId x, Letter l) const {
    for (const auto& e : support_.at(x)) {
      if (e.letter == l) return e.p;
    }
    return 0.0;
  }

  /// Most probable letter; ties go to the larger bitmask.
  Letter mode(StateId x) const {
    const auto& s = support_.at(x);
    auto best = s.front();
    for (const auto& e : s) {
      if (e.p >= best.p) best = e;
    }
    return best.letter;
  }

  /// Pins `x` to `truth`. Returns true iff the distribution changed.
  bool reveal(StateId x, Letter truth) {
    check_state(x);
    if (!alphabet_.valid(truth)) throw ModelError("state " + std::to_string(x) + ": observed letter outside 2^O");
    revealed_[x] = true;
    const std::vector<LetterProb> pinned{{truth, 1.0}};
    if (support_[x] == pinned) return false;
    support_[x] = pinned;
    ++version_;
    return true;
  }

  bool revealed(StateId x) const { return revealed_.at(x); }

  std::size_t uncertain_count() const noexcept {
    return static_cast<std::size_t>(std::count(revealed_.begin(), revealed_.end(), false));
  }

  std::vector<StateId> uncertain_states() const {
    std::vector<StateId> out;
    for (StateId x = 0; x < revealed_.size(); ++x) {
      if (!revealed_[x]) out.push_back(x);
    }
    return out;
  }

  std::uint64_t version() const noexcept { return version_; }

 private:
  void check_state(StateId x) const {
    if (x >= support_.size()) throw ModelError("state " + std::to_string(x) + " out of range");
  }

  Alphabet alphabet_;
  std::vector<std::vector<LetterProb>> support_;
  std::vector<bool> revealed_;
  std::uint64_t version_ = 0;
};

/// Ground-truth labeling, visible to the planner only through sense().
struct Environment {
  std::vector<Letter> truth;
  unsigned sensor_range = 1;
};

inline std::vector<Observation> sense(const Environment& env, StateId x, const PlDmdp& m) {
  if (x >= m.state_count() || env.truth.size() != m.state_count()) {
    throw ModelError("sense: state or environment does not match the model");
  }
  std::vector<Observation> out;
  for (StateId y : neighborhood(m, x, env.sensor_range)) out.push_back({y, env.truth[y]});
  return out;
}

/// Applies the sensed labels to the belief. Returns the states whose
/// distribution actually changed, ascending.
inline std::vector<StateId> update_map(Belief& belief, std::span<const Observation> observations) {
  std::vector<StateId> changed;
  for (const auto& o : observations) {
    if (belief.reveal(o.state, o.letter)) changed.push_back(o.state);
  }
  std::sort(changed.begin(), changed.end());
  changed.erase(std::unique(changed.begin(), changed.end()), changed.end());
  return changed;
}

}  // namespace semplan
