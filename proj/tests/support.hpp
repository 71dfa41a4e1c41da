#pragma once

// Test-only helpers: a raw formula generator that bypasses the library's
// canonicalization, a printer for it, and an independent finite-word
// evaluator used as the acceptance oracle.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "semplan/alphabet.hpp"
#include "semplan/planner.hpp"

namespace semplan::testing {

enum class Raw { True, Obs, NegObs, And, Or, Until, Eventually };

struct RawFormula {
  Raw kind = Raw::True;
  ObservationId obs = 0;
  std::vector<RawFormula> kids;
};

inline RawFormula random_raw(std::mt19937_64& rng, std::size_t observations, int depth) {
  std::uniform_int_distribution<int> pick_obs(0, static_cast<int>(observations) - 1);
  std::uniform_int_distribution<int> leaf(0, 9);
  RawFormula f;
  if (depth == 0 || leaf(rng) < 3) {
    const int r = leaf(rng);
    f.kind = r == 0 ? Raw::True : (r < 6 ? Raw::Obs : Raw::NegObs);
    f.obs = static_cast<ObservationId>(pick_obs(rng));
    return f;
  }
  std::uniform_int_distribution<int> op(0, 3);
  switch (op(rng)) {
    case 0: f.kind = Raw::And; break;
    case 1: f.kind = Raw::Or; break;
    case 2: f.kind = Raw::Until; break;
    default: f.kind = Raw::Eventually; break;
  }
  const int arity = f.kind == Raw::Eventually ? 1 : 2;
  for (int i = 0; i < arity; ++i) f.kids.push_back(random_raw(rng, observations, depth - 1));
  return f;
}

inline int raw_depth(const RawFormula& f) {
  int d = 0;
  for (const auto& k : f.kids) d = std::max(d, raw_depth(k));
  return f.kids.empty() ? 0 : d + 1;
}

// Fully parenthesized, so the parser's precedence rules are not exercised here.
inline std::string raw_text(const RawFormula& f, const std::vector<std::string>& names) {
  switch (f.kind) {
    case Raw::True: return "true";
    case Raw::Obs: return names[f.obs];
    case Raw::NegObs: return "!" + names[f.obs];
    case Raw::And: return "(" + raw_text(f.kids[0], names) + " & " + raw_text(f.kids[1], names) + ")";
    case Raw::Or: return "(" + raw_text(f.kids[0], names) + " | " + raw_text(f.kids[1], names) + ")";
    case Raw::Until: return "(" + raw_text(f.kids[0], names) + " U " + raw_text(f.kids[1], names) + ")";
    case Raw::Eventually: return "(F " + raw_text(f.kids[0], names) + ")";
  }
  return {};
}

// Evaluates a formula on every suffix of a finite word at once. Bit i of a
// mask is set iff the formula holds on w[i:], where position n is the empty
// suffix (on which no observation, positive or negated, can be witnessed).
// A word is a good prefix iff bit 0 is set for the root.
class PrefixOracle {
 public:
  explicit PrefixOracle(const RawFormula& f) { flatten(f); }

  bool good_prefix(const std::vector<Letter>& word) const {
    const std::size_t n = word.size();
    const std::uint32_t all = (1U << (n + 1)) - 1;
    std::vector<std::uint32_t> mask(nodes_.size());
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
      const Node& node = nodes_[k];
      std::uint32_t m = 0;
      switch (node.kind) {
        case Raw::True: m = all; break;
        case Raw::Obs:
        case Raw::NegObs:
          for (std::size_t i = 0; i < n; ++i) {
            const bool holds = word[i].contains(node.obs);
            if (holds == (node.kind == Raw::Obs)) m |= 1U << i;
          }
          break;
        case Raw::And: m = mask[node.a] & mask[node.b]; break;
        case Raw::Or: m = mask[node.a] | mask[node.b]; break;
        case Raw::Until: {
          // exists k >= i with rhs at k and lhs on [i, k)
          bool later = false;
          for (std::size_t i = n + 1; i-- > 0;) {
            const bool rhs = (mask[node.b] >> i) & 1U;
            const bool lhs = (mask[node.a] >> i) & 1U;
            later = rhs || (lhs && later);
            if (later) m |= 1U << i;
          }
          break;
        }
        case Raw::Eventually: {
          bool later = false;
          for (std::size_t i = n + 1; i-- > 0;) {
            later = later || ((mask[node.a] >> i) & 1U);
            if (later) m |= 1U << i;
          }
          break;
        }
      }
      mask[k] = m;
    }
    return mask.back() & 1U;
  }

 private:
  struct Node {
    Raw kind;
    ObservationId obs;
    std::size_t a, b;
  };
  std::vector<Node> nodes_;

  std::size_t flatten(const RawFormula& f) {
    std::size_t a = 0, b = 0;
    if (!f.kids.empty()) a = flatten(f.kids[0]);
    if (f.kids.size() > 1) b = flatten(f.kids[1]);
    nodes_.push_back({f.kind, f.obs, a, b});
    return nodes_.size() - 1;
  }
};

// Calls fn(word) for every word of length 0..max_len over 2^O.
template <class Fn>
void for_each_word(std::uint32_t letter_count, std::size_t max_len, Fn&& fn) {
  std::vector<Letter> word;
  auto rec = [&](auto&& self) -> void {
    fn(static_cast<const std::vector<Letter>&>(word));
    if (word.size() == max_len) return;
    for (std::uint32_t l = 0; l < letter_count; ++l) {
      word.push_back(Letter(l));
      self(self);
      word.pop_back();
    }
  };
  rec(rec);
}

struct RandomProductShape {
  std::size_t min_nonterminal = 1;
  std::size_t max_nonterminal = 12;
  std::size_t max_actions = 3;
  double min_probability = 0.0;  // lower bound on every stored edge mass
};

// Generic product (one DFA state per node) with random branching. States
// 0..k-1 are non-terminal; the remaining one to three are accepting or trash.
inline ProductAutomaton random_product(std::mt19937_64& rng, const RandomProductShape& shape) {
  std::uniform_int_distribution<std::size_t> pick_n(shape.min_nonterminal, shape.max_nonterminal);
  std::uniform_int_distribution<std::size_t> pick_a(1, shape.max_actions);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t k = pick_n(rng);
  const std::size_t actions = pick_a(rng);
  const std::size_t accepting_count = 1 + rng() % 2;
  const std::size_t trash_count = rng() % 2;
  const std::size_t n = k + accepting_count + trash_count;
  std::vector<bool> accepting(n, false), trash(n, false);
  for (std::size_t i = k; i < k + accepting_count; ++i) accepting[i] = true;
  for (std::size_t i = k + accepting_count; i < n; ++i) trash[i] = true;

  const std::size_t max_fanout = shape.min_probability > 0.0
                                     ? std::min<std::size_t>(3, static_cast<std::size_t>(1.0 / shape.min_probability))
                                     : 3;
  std::vector<std::vector<Successor>> edges(n * actions);
  for (std::size_t s = 0; s < k; ++s) {
    for (std::size_t a = 0; a < actions; ++a) {
      if (a > 0 && rng() % 5 == 0) continue;  // infeasible action
      const std::size_t fanout = 1 + rng() % max_fanout;
      std::vector<double> w(fanout);
      double total = 0.0;
      for (auto& x : w) total += (x = unit(rng) + 0.05);
      auto& out = edges[s * actions + a];
      double left = 1.0;
      for (std::size_t i = 0; i < fanout; ++i) {
        double p = shape.min_probability + (1.0 - fanout * shape.min_probability) * w[i] / total;
        if (i + 1 == fanout) p = left;
        left -= p;
        const auto to = static_cast<ProductStateId>(rng() % n);
        auto it = std::find_if(out.begin(), out.end(), [&](const Successor& e) { return e.state == to; });
        if (it == out.end()) {
          out.push_back({to, p});
        } else {
          it->p += p;
        }
      }
      std::sort(out.begin(), out.end(), [](const Successor& x, const Successor& y) { return x.state < y.state; });
    }
  }
  return ProductAutomaton(n, 1, actions, accepting, trash, std::move(edges));
}

// Calls fn(policy) for every deterministic policy over the feasible actions
// of the non-terminal states (dead ends keep kNoAction).
template <class Fn>
void for_each_policy(const ProductAutomaton& p, Fn&& fn) {
  std::vector<ProductStateId> free_states;
  std::vector<std::vector<ActionId>> choices;
  Policy pi;
  pi.action.assign(p.state_count(), kNoAction);
  for (ProductStateId s = 0; s < p.state_count(); ++s) {
    if (p.terminal(s)) continue;
    std::vector<ActionId> c;
    for (ActionId a = 0; a < p.action_count(); ++a) {
      if (p.feasible(s, a)) c.push_back(a);
    }
    if (c.empty()) continue;
    free_states.push_back(s);
    choices.push_back(std::move(c));
  }
  std::vector<std::size_t> digit(free_states.size(), 0);
  while (true) {
    for (std::size_t i = 0; i < free_states.size(); ++i) pi.action[free_states[i]] = choices[i][digit[i]];
    fn(static_cast<const Policy&>(pi));
    std::size_t i = 0;
    while (i < digit.size() && ++digit[i] == choices[i].size()) digit[i++] = 0;
    if (i == digit.size()) return;
  }
}

// States from which an accepting state is reachable when following `pi`.
inline std::vector<bool> reaches_accepting_under(const ProductAutomaton& p, const Policy& pi) {
  std::vector<bool> good(p.state_count(), false);
  for (ProductStateId s = 0; s < p.state_count(); ++s) good[s] = p.accepting(s);
  bool grew = true;
  while (grew) {
    grew = false;
    for (ProductStateId s = 0; s < p.state_count(); ++s) {
      if (good[s] || p.terminal(s)) continue;
      const auto a = pi.at(s);
      if (!a) continue;
      for (const auto& e : p.successors(s, *a)) {
        if (good[e.state]) {
          good[s] = true;
          grew = true;
          break;
        }
      }
    }
  }
  return good;
}

}  // namespace semplan::testing
