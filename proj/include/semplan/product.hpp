#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <span>
#include <vector>

#include "semplan/dfa.hpp"
#include "semplan/error.hpp"
#include "semplan/model.hpp"

namespace semplan {

using ProductStateId = std::uint32_t;

struct Successor {
  ProductStateId state = 0;
  double p = 0.0;
  bool operator==(const Successor&) const = default;
};

/// Product of a PL-DMDP and a total DFA.
///
/// State (x, s) has index x * |S| + s. For every (state, action) pair the
/// successors are stored with strictly positive probability, sorted by
/// state, with letters leading to the same DFA successor merged. An empty
/// successor list means the action is infeasible.
///
/// The generic constructor allows products that do not come from a model
/// (used for planner tests); those have `dfa_state_count() == 1`.
class ProductAutomaton {
 public:
  ProductAutomaton() = default;

  ProductAutomaton(std::size_t physical_count, std::size_t dfa_state_count, std::size_t action_count,
                   std::vector<bool> accepting, std::vector<bool> trash, std::vector<std::vector<Successor>> edges,
                   std::uint64_t belief_version = 0)
      : physical_count_(physical_count),
        dfa_state_count_(dfa_state_count),
        action_count_(action_count),
        accepting_(std::move(accepting)),
        trash_(std::move(trash)),
        edges_(std::move(edges)),
        belief_version_(belief_version) {
    const std::size_t n = physical_count_ * dfa_state_count_;
    if (accepting_.size() != n || trash_.size() != n || edges_.size() != n * action_count_) {
      throw ModelError("product automaton parts have inconsistent sizes");
    }
    for (const auto& list : edges_) {
      for (const auto& e : list) {
        if (e.state >= n || !(e.p > 0.0)) throw ModelError("product edge out of range or without mass");
      }
    }
  }

  std::size_t state_count() const noexcept { return accepting_.size(); }
  std::size_t action_count() const noexcept { return action_count_; }
  std::size_t physical_count() const noexcept { return physical_count_; }
  std::size_t dfa_state_count() const noexcept { return dfa_state_count_; }

  ProductStateId index(StateId x, DfaStateId s) const noexcept {
    return static_cast<ProductStateId>(x * dfa_state_count_ + s);
  }
  StateId physical(ProductStateId sp) const noexcept { return static_cast<StateId>(sp / dfa_state_count_); }
  DfaStateId dfa_state(ProductStateId sp) const noexcept { return static_cast<DfaStateId>(sp % dfa_state_count_); }

  bool accepting(ProductStateId sp) const { return accepting_[sp]; }
  bool trash(ProductStateId sp) const { return trash_[sp]; }
  bool terminal(ProductStateId sp) const { return accepting_[sp] || trash_[sp]; }

  std::span<const Successor> successors(ProductStateId sp, ActionId a) const {
    return edges_[static_cast<std::size_t>(sp) * action_count_ + a];
  }
  bool feasible(ProductStateId sp, ActionId a) const { return !successors(sp, a).empty(); }

  /// Number of stored (state, action, successor) triples.
  std::size_t edge_count() const noexcept {
    std::size_t n = 0;
    for (const auto& list : edges_) n += list.size();
    return n;
  }

  std::uint64_t belief_version() const noexcept { return belief_version_; }

  bool operator==(const ProductAutomaton&) const = default;

 private:
  friend ProductAutomaton build_product(const PlDmdp&, const Belief&, const TotalDfa&);
  friend void refresh_edges(ProductAutomaton&, const PlDmdp&, const Belief&, const TotalDfa&,
                            std::span<const StateId>);

  std::vector<Successor>& slot(ProductStateId sp, ActionId a) {
    return edges_[static_cast<std::size_t>(sp) * action_count_ + a];
  }

  std::size_t physical_count_ = 0;
  std::size_t dfa_state_count_ = 1;
  std::size_t action_count_ = 0;
  std::vector<bool> accepting_;
  std::vector<bool> trash_;
  std::vector<std::vector<Successor>> edges_;
  std::uint64_t belief_version_ = 0;
};

namespace detail {

// Successors of (., s) when moving into physical state `dest`: the belief
// mass of `dest` grouped by the DFA successor each letter induces.
inline void fill_successors(std::vector<Successor>& out, const ProductAutomaton& p, const Belief& b,
                            const TotalDfa& dfa, DfaStateId s, StateId dest) {
  out.clear();
  for (const auto& lp : b.support(dest)) {
    if (!(lp.p > 0.0)) continue;
    const ProductStateId target = p.index(dest, dfa.next(s, lp.letter));
    auto it = std::find_if(out.begin(), out.end(), [&](const Successor& e) { return e.state == target; });
    if (it == out.end()) {
      out.push_back({target, lp.p});
    } else {
      it->p += lp.p;
    }
  }
  std::sort(out.begin(), out.end(), [](const Successor& a, const Successor& b) { return a.state < b.state; });
}

}  // namespace detail

/// Builds the full product for the current belief.
inline ProductAutomaton build_product(const PlDmdp& m, const Belief& b, const TotalDfa& dfa) {
  if (b.state_count() != m.state_count()) throw ModelError("belief does not match the model");
  if (!(dfa.alphabet() == m.alphabet())) throw ModelError("DFA and model use different alphabets");
  const std::size_t n = m.state_count() * dfa.size();
  std::vector<bool> accepting(n), trash(n);
  for (StateId x = 0; x < m.state_count(); ++x) {
    for (DfaStateId s = 0; s < dfa.size(); ++s) {
      accepting[x * dfa.size() + s] = dfa.accepting(s);
      trash[x * dfa.size() + s] = dfa.is_trash(s);
    }
  }
  ProductAutomaton p(m.state_count(), dfa.size(), m.action_count(), std::move(accepting), std::move(trash),
                     std::vector<std::vector<Successor>>(n * m.action_count()), b.version());
  for (StateId x = 0; x < m.state_count(); ++x) {
    for (ActionId a = 0; a < m.action_count(); ++a) {
      const auto dest = m.successor(x, a);
      if (!dest) continue;
      for (DfaStateId s = 0; s < dfa.size(); ++s) {
        detail::fill_successors(p.slot(p.index(x, s), a), p, b, dfa, s, *dest);
      }
    }
  }
  return p;
}

/// Recomputes the edges entering the physical states in `changed`. The
/// result equals build_product() on the same belief.
inline void refresh_edges(ProductAutomaton& p, const PlDmdp& m, const Belief& b, const TotalDfa& dfa,
                          std::span<const StateId> changed) {
  for (StateId dest : changed) {
    if (dest >= m.state_count()) throw ModelError("refresh_edges: state out of range");
    for (StateId x : m.predecessors(dest)) {
      for (ActionId a = 0; a < m.action_count(); ++a) {
        if (m.successor(x, a) != dest) continue;
        for (DfaStateId s = 0; s < dfa.size(); ++s) {
          detail::fill_successors(p.slot(p.index(x, s), a), p, b, dfa, s, dest);
        }
      }
    }
  }
  p.belief_version_ = b.version();
}

/// True iff an accepting state is reachable from `from` along
/// positive-probability edges without passing through a trash state.
inline bool feasibility_check(const ProductAutomaton& p, ProductStateId from) {
  if (p.accepting(from)) return true;
  if (p.trash(from)) return false;
  std::vector<bool> seen(p.state_count(), false);
  std::deque<ProductStateId> queue{from};
  seen[from] = true;
  while (!queue.empty()) {
    const ProductStateId u = queue.front();
    queue.pop_front();
    for (ActionId a = 0; a < p.action_count(); ++a) {
      for (const auto& e : p.successors(u, a)) {
        if (seen[e.state] || p.trash(e.state)) continue;
        if (p.accepting(e.state)) return true;
        seen[e.state] = true;
        queue.push_back(e.state);
      }
    }
  }
  return false;
}

/// Non-terminal states reachable from `from` (inclusive) along
/// positive-probability edges; expansion stops at terminal states.
inline std::vector<ProductStateId> reachable_nonterminal(const ProductAutomaton& p,
                                                         std::span<const ProductStateId> from) {
  std::vector<bool> seen(p.state_count(), false);
  std::deque<ProductStateId> queue;
  for (ProductStateId s : from) {
    if (!seen[s] && !p.terminal(s)) {
      seen[s] = true;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const ProductStateId u = queue.front();
    queue.pop_front();
    for (ActionId a = 0; a < p.action_count(); ++a) {
      for (const auto& e : p.successors(u, a)) {
        if (seen[e.state] || p.terminal(e.state)) continue;
        seen[e.state] = true;
        queue.push_back(e.state);
      }
    }
  }
  std::vector<ProductStateId> out;
  for (ProductStateId s = 0; s < seen.size(); ++s) {
    if (seen[s]) out.push_back(s);
  }
  return out;
}

}  // namespace semplan
