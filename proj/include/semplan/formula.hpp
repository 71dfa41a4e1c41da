#pragma once

#include <algorithm>
#include <compare>
#include <iterator>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "semplan/alphabet.hpp"

namespace semplan {

// Declaration order defines the canonical order between node kinds.
enum class FormulaKind : std::uint8_t {
  False,
  True,
  Obs,
  NegObs,
  And,
  Or,
  Until,
  Eventually,
};

/// Immutable co-safe LTL formula (no Next, negation only on observations).
///
/// Every formula is kept in canonical form by the factory functions:
/// boolean structure is a flattened, sorted, deduplicated disjunctive normal
/// form with constants absorbed, so that structural equality coincides with
/// the equality the DFA construction relies on. Nodes are shared, copies are
/// cheap.
class Formula {
 public:
  static Formula top() { return leaf(FormulaKind::True, 0); }
  static Formula bottom() { return leaf(FormulaKind::False, 0); }
  static Formula obs(ObservationId o) { return leaf(FormulaKind::Obs, o); }
  static Formula neg_obs(ObservationId o) { return leaf(FormulaKind::NegObs, o); }

  static Formula conj(std::vector<Formula> parts) { return junction(FormulaKind::And, std::move(parts)); }
  static Formula disj(std::vector<Formula> parts) { return junction(FormulaKind::Or, std::move(parts)); }
  static Formula conj(Formula a, Formula b) { return conj(std::vector<Formula>{std::move(a), std::move(b)}); }
  static Formula disj(Formula a, Formula b) { return disj(std::vector<Formula>{std::move(a), std::move(b)}); }

  static Formula until(Formula lhs, Formula rhs) {
    if (rhs.is_true() || rhs.is_false()) return rhs;
    if (lhs.is_false()) return rhs;
    if (lhs.is_true()) return eventually(std::move(rhs));
    return Formula(std::make_shared<Node>(FormulaKind::Until, 0, std::vector<Formula>{std::move(lhs), std::move(rhs)}));
  }

  static Formula eventually(Formula sub) {
    if (sub.is_true() || sub.is_false() || sub.kind() == FormulaKind::Eventually) return sub;
    return Formula(std::make_shared<Node>(FormulaKind::Eventually, 0, std::vector<Formula>{std::move(sub)}));
  }

  FormulaKind kind() const noexcept { return node_->kind; }
  bool is_true() const noexcept { return kind() == FormulaKind::True; }
  bool is_false() const noexcept { return kind() == FormulaKind::False; }

  /// Observation index of an Obs/NegObs leaf.
  ObservationId observation() const noexcept { return node_->obs; }

  std::span<const Formula> children() const noexcept { return node_->children; }
  const Formula& lhs() const { return node_->children.at(0); }
  const Formula& rhs() const { return node_->children.at(1); }
  const Formula& sub() const { return node_->children.at(0); }

  /// Number of AST nodes.
  std::size_t size() const noexcept {
    std::size_t n = 1;
    for (const auto& c : children()) n += c.size();
    return n;
  }

  /// Largest observation index mentioned, or -1 when none.
  int max_observation() const noexcept {
    int m = (kind() == FormulaKind::Obs || kind() == FormulaKind::NegObs) ? static_cast<int>(observation()) : -1;
    for (const auto& c : children()) m = std::max(m, c.max_observation());
    return m;
  }

  friend std::strong_ordering operator<=>(const Formula& a, const Formula& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = a.kind() <=> b.kind(); c != 0) return c;
    if (auto c = a.observation() <=> b.observation(); c != 0) return c;
    const auto ac = a.children();
    const auto bc = b.children();
    return std::lexicographical_compare_three_way(ac.begin(), ac.end(), bc.begin(), bc.end());
  }

  friend bool operator==(const Formula& a, const Formula& b) { return (a <=> b) == 0; }

 private:
  struct Node {
    Node(FormulaKind k, ObservationId o, std::vector<Formula> c) : kind(k), obs(o), children(std::move(c)) {}
    FormulaKind kind;
    ObservationId obs;
    std::vector<Formula> children;
  };

  explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static Formula leaf(FormulaKind k, ObservationId o) {
    return Formula(std::make_shared<Node>(k, o, std::vector<Formula>{}));
  }

  // Boolean structure is kept in disjunctive normal form over "atoms"
  // (observation literals, Until and Eventually nodes): an Or of Ands of
  // atoms, with clauses sorted and deduplicated, clauses holding a literal
  // and its negation dropped, and clauses subsumed by a smaller clause
  // removed. Progression only ever produces boolean combinations of the
  // temporal subformulas of the original formula, so this keeps the set of
  // reachable progressions finite.
  using Clause = std::vector<Formula>;

  static std::vector<Clause> clauses_of(const Formula& f) {
    switch (f.kind()) {
      case FormulaKind::False: return {};
      case FormulaKind::True: return {Clause{}};
      case FormulaKind::And: return {Clause(f.children().begin(), f.children().end())};
      case FormulaKind::Or: {
        std::vector<Clause> out;
        for (const auto& c : f.children()) {
          auto sub = clauses_of(c);
          out.insert(out.end(), sub.begin(), sub.end());
        }
        return out;
      }
      default: return {Clause{f}};
    }
  }

  static Clause merge(const Clause& a, const Clause& b) {
    Clause out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
  }

  static bool contradictory(const Clause& c) {
    for (const auto& f : c) {
      if (f.kind() != FormulaKind::Obs) continue;
      const Formula neg = neg_obs(f.observation());
      if (std::binary_search(c.begin(), c.end(), neg)) return true;
    }
    return false;
  }

  static Formula from_clauses(std::vector<Clause> clauses) {
    std::erase_if(clauses, contradictory);
    std::sort(clauses.begin(), clauses.end(), [](const Clause& a, const Clause& b) {
      return a.size() != b.size() ? a.size() < b.size() : a < b;
    });
    clauses.erase(std::unique(clauses.begin(), clauses.end()), clauses.end());
    std::vector<Clause> kept;
    for (auto& c : clauses) {
      const bool subsumed = std::any_of(kept.begin(), kept.end(), [&](const Clause& k) {
        return std::includes(c.begin(), c.end(), k.begin(), k.end());
      });
      if (!subsumed) kept.push_back(std::move(c));
    }
    if (kept.empty()) return bottom();
    std::vector<Formula> disjuncts;
    for (auto& c : kept) {
      if (c.empty()) return top();
      disjuncts.push_back(c.size() == 1 ? c.front()
                                         : Formula(std::make_shared<Node>(FormulaKind::And, 0, std::move(c))));
    }
    if (disjuncts.size() == 1) return disjuncts.front();
    std::sort(disjuncts.begin(), disjuncts.end());
    return Formula(std::make_shared<Node>(FormulaKind::Or, 0, std::move(disjuncts)));
  }

  static Formula junction(FormulaKind k, std::vector<Formula> parts) {
    std::vector<Clause> acc;
    if (k == FormulaKind::And) {
      acc.push_back({});
      for (const auto& p : parts) {
        if (p.is_true()) continue;
        const auto rhs = clauses_of(p);
        std::vector<Clause> next;
        next.reserve(acc.size() * rhs.size());
        for (const auto& a : acc) {
          for (const auto& b : rhs) next.push_back(merge(a, b));
        }
        acc = std::move(next);
        if (acc.empty()) return bottom();
      }
    } else {
      for (const auto& p : parts) {
        if (p.is_true()) return top();
        auto sub = clauses_of(p);
        acc.insert(acc.end(), sub.begin(), sub.end());
      }
    }
    return from_clauses(std::move(acc));
  }

  std::shared_ptr<const Node> node_;
};

/// Formula progression through one letter: `l·w` is a good prefix of `f` iff
/// `w` is a good prefix of `progress(f, l)`.
inline Formula progress(const Formula& f, Letter l) {
  switch (f.kind()) {
    case FormulaKind::True:
    case FormulaKind::False:
      return f;
    case FormulaKind::Obs:
      return l.contains(f.observation()) ? Formula::top() : Formula::bottom();
    case FormulaKind::NegObs:
      return l.contains(f.observation()) ? Formula::bottom() : Formula::top();
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> parts;
      parts.reserve(f.children().size());
      for (const auto& c : f.children()) parts.push_back(progress(c, l));
      return f.kind() == FormulaKind::And ? Formula::conj(std::move(parts)) : Formula::disj(std::move(parts));
    }
    case FormulaKind::Until:
      return Formula::disj(progress(f.rhs(), l), Formula::conj(progress(f.lhs(), l), f));
    case FormulaKind::Eventually:
      return Formula::disj(progress(f.sub(), l), f);
  }
  return f;
}

namespace detail {

inline int precedence(FormulaKind k) {
  switch (k) {
    case FormulaKind::Or: return 1;
    case FormulaKind::And: return 2;
    case FormulaKind::Until: return 3;
    default: return 4;
  }
}

inline void print(std::string& out, const Formula& f, const Alphabet& ab, int min_prec) {
  const bool paren = precedence(f.kind()) < min_prec;
  if (paren) out += '(';
  auto obs_name = [&](ObservationId o) {
    return o < ab.size() ? ab.name(o) : "o" + std::to_string(o);
  };
  switch (f.kind()) {
    case FormulaKind::True: out += "true"; break;
    case FormulaKind::False: out += "false"; break;
    case FormulaKind::Obs: out += obs_name(f.observation()); break;
    case FormulaKind::NegObs: out += "!" + obs_name(f.observation()); break;
    case FormulaKind::And:
    case FormulaKind::Or: {
      const char* sep = f.kind() == FormulaKind::And ? " & " : " | ";
      const int p = precedence(f.kind());
      bool first = true;
      for (const auto& c : f.children()) {
        if (!first) out += sep;
        // Same-kind children never occur after flattening; demand strictly
        // higher precedence so nested junctions stay visible.
        print(out, c, ab, p + 1);
        first = false;
      }
      break;
    }
    case FormulaKind::Until:
      print(out, f.lhs(), ab, 4);
      out += " U ";
      print(out, f.rhs(), ab, 3);
      break;
    case FormulaKind::Eventually:
      out += "F ";
      print(out, f.sub(), ab, 4);
      break;
  }
  if (paren) out += ')';
}

}  // namespace detail

/// Minimal-parenthesis rendering that parses back to the same formula
/// (except `false`, which has no surface syntax).
inline std::string to_string(const Formula& f, const Alphabet& alphabet) {
  std::string out;
  detail::print(out, f, alphabet, 0);
  return out;
}

}  // namespace semplan
