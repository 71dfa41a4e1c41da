#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "semplan/error.hpp"
#include "semplan/formula.hpp"

namespace semplan {

using DfaStateId = std::uint32_t;

/// Total DFA over 2^O whose language is the set of good prefixes of a formula.
///
/// States are numbered in breadth-first discovery order from the initial
/// state, exploring letters in increasing bitmask order. Each state carries
/// the canonical formula it stands for: the `true` state is the unique
/// accepting state and the `false` state, when reachable, is the absorbing
/// trash state.
class TotalDfa {
 public:
  TotalDfa(Alphabet alphabet, std::vector<Formula> labels, std::vector<DfaStateId> transitions)
      : alphabet_(std::move(alphabet)), labels_(std::move(labels)), transitions_(std::move(transitions)) {
    accepting_.resize(labels_.size());
    for (DfaStateId s = 0; s < labels_.size(); ++s) {
      accepting_[s] = labels_[s].is_true();
      if (labels_[s].is_false()) trash_ = s;
    }
  }

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  std::size_t size() const noexcept { return labels_.size(); }
  std::uint32_t letter_count() const noexcept { return alphabet_.letter_count(); }
  DfaStateId initial() const noexcept { return 0; }

  DfaStateId next(DfaStateId s, Letter l) const { return transitions_[s * letter_count() + l.bits()]; }

  bool accepting(DfaStateId s) const { return accepting_[s]; }
  std::optional<DfaStateId> trash() const noexcept { return trash_; }
  bool is_trash(DfaStateId s) const noexcept { return trash_ && *trash_ == s; }

  const Formula& label(DfaStateId s) const { return labels_.at(s); }

  /// Run from the initial state; returns s(0) .. s(n).
  std::vector<DfaStateId> run(std::span<const Letter> word) const {
    std::vector<DfaStateId> states{initial()};
    states.reserve(word.size() + 1);
    for (Letter l : word) states.push_back(next(states.back(), l));
    return states;
  }

  bool operator==(const TotalDfa& o) const {
    return alphabet_ == o.alphabet_ && labels_ == o.labels_ && transitions_ == o.transitions_;
  }

 private:
  Alphabet alphabet_;
  std::vector<Formula> labels_;
  std::vector<DfaStateId> transitions_;
  std::vector<bool> accepting_;
  std::optional<DfaStateId> trash_;
};

struct CompileOptions {
  std::size_t max_states = 4096;
};

/// Builds the good-prefix DFA of `f` by exhaustive progression.
inline TotalDfa compile(const Formula& f, const Alphabet& alphabet, CompileOptions options = {}) {
  if (f.max_observation() >= static_cast<int>(alphabet.size())) {
    throw ModelError("formula mentions observation index " + std::to_string(f.max_observation()) +
                     " outside an alphabet of size " + std::to_string(alphabet.size()));
  }
  const std::uint32_t letters = alphabet.letter_count();
  std::vector<Formula> labels{f};
  std::map<Formula, DfaStateId> index{{f, 0}};
  std::vector<DfaStateId> transitions;

  for (DfaStateId s = 0; s < labels.size(); ++s) {
    const Formula current = labels[s];
    for (std::uint32_t bits = 0; bits < letters; ++bits) {
      Formula succ = progress(current, Letter(bits));
      auto [it, inserted] = index.try_emplace(succ, static_cast<DfaStateId>(labels.size()));
      if (inserted) {
        if (labels.size() >= options.max_states) {
          throw StateLimitError("DFA construction exceeded " + std::to_string(options.max_states) + " states");
        }
        labels.push_back(std::move(succ));
      }
      transitions.push_back(it->second);
    }
  }
  return TotalDfa(alphabet, std::move(labels), std::move(transitions));
}

/// True iff the run over `word` reaches an accepting state. Acceptance is
/// absorbing, so this equals "the last state is accepting".
inline bool accepts(const TotalDfa& dfa, std::span<const Letter> word) {
  DfaStateId s = dfa.initial();
  if (dfa.accepting(s)) return true;
  for (Letter l : word) {
    if (!dfa.alphabet().valid(l)) throw ModelError("letter outside 2^O");
    s = dfa.next(s, l);
    if (dfa.accepting(s)) return true;
  }
  return false;
}

}  // namespace semplan
