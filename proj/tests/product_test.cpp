#include <gtest/gtest.h>

#include <map>
#include <random>

#include "semplan/parser.hpp"
#include "semplan/product.hpp"

using namespace semplan;

namespace {

StateId at(const PlDmdp& m, int x, int y) { return *m.grid()->state_at({x, y}); }

Letter L(std::initializer_list<ObservationId> obs) {
  Letter l;
  for (auto o : obs) l = l.with(o);
  return l;
}

Belief random_belief(const PlDmdp& m, std::mt19937_64& rng) {
  Belief b(m.state_count(), m.alphabet());
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::uint32_t letters = m.alphabet().letter_count();
  for (StateId x = 0; x < m.state_count(); ++x) {
    if (rng() % 3 == 0) continue;
    std::vector<LetterProb> d;
    double total = 0.0;
    for (std::uint32_t l = 0; l < letters; ++l) {
      if (rng() % 2 == 0) continue;
      d.push_back({Letter(l), u(rng) + 0.01});
      total += d.back().p;
    }
    if (d.empty()) continue;
    for (auto& e : d) e.p /= total;
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < d.size(); ++i) s += d[i].p;
    d.back().p = 1.0 - s;
    b.set(x, d);
  }
  return b;
}

}  // namespace

TEST(Product, NestedSequenceOnTenByTen) {
  const Alphabet ab({"A", "B", "C"});
  const PlDmdp m = grid_world(10, 10, {}, ab);
  const TotalDfa dfa = compile(parse("F (A & F (B & F C))", ab), ab);
  const ProductAutomaton p = build_product(m, Belief(m.state_count(), ab), dfa);
  EXPECT_EQ(p.state_count(), 400U);
  EXPECT_EQ(p.state_count(), m.state_count() * dfa.size());
}

TEST(Product, TwoByTwoEdgesGroupLetterMass) {
  const Alphabet ab({"r1", "r2"});
  const PlDmdp m = grid_world(2, 2, {}, ab);
  Belief b(m.state_count(), ab);
  b.set(at(m, 1, 0), {{L({}), 0.5}, {L({0}), 0.2}, {L({1}), 0.3}});
  // s0 --{r1}--> accept, --{r2}--> trash, --{}--> s0
  const TotalDfa dfa = compile(parse("!r2 U r1", ab), ab);
  const ProductAutomaton p = build_product(m, b, dfa);
  const DfaStateId s0 = dfa.initial();
  const auto succ = p.successors(p.index(at(m, 0, 0), s0), *m.action("Right"));
  ASSERT_EQ(succ.size(), 3U);
  std::map<DfaStateId, double> by_dfa;
  for (const auto& e : succ) {
    EXPECT_EQ(p.physical(e.state), at(m, 1, 0));
    by_dfa[p.dfa_state(e.state)] += e.p;
  }
  EXPECT_DOUBLE_EQ(by_dfa[dfa.next(s0, L({0}))], 0.2);
  EXPECT_DOUBLE_EQ(by_dfa[dfa.next(s0, L({1}))], 0.3);
  EXPECT_DOUBLE_EQ(by_dfa[s0], 0.5);
  EXPECT_TRUE(dfa.accepting(dfa.next(s0, L({0}))));
  EXPECT_TRUE(dfa.is_trash(dfa.next(s0, L({1}))));
}

TEST(Product, MergesLettersWithSameSuccessor) {
  const Alphabet ab({"r1", "r2"});
  const PlDmdp m = grid_world(2, 1, {}, ab);
  Belief b(m.state_count(), ab);
  b.set(1, {{L({0}), 0.25}, {L({0, 1}), 0.25}, {L({}), 0.5}});
  const TotalDfa dfa = compile(parse("F r1", ab), ab);
  const ProductAutomaton p = build_product(m, b, dfa);
  const auto succ = p.successors(p.index(0, dfa.initial()), *m.action("Right"));
  ASSERT_EQ(succ.size(), 2U);
  double to_accept = 0.0;
  for (const auto& e : succ) {
    if (p.accepting(e.state)) to_accept += e.p;
  }
  EXPECT_DOUBLE_EQ(to_accept, 0.5);
}

TEST(Product, RevealedBeliefGivesSingleSuccessors) {
  const Alphabet ab({"A", "B"});
  const PlDmdp m = grid_world(3, 3, {}, ab);
  Belief b(m.state_count(), ab);
  b.set(4, {{L({0}), 1.0}});
  b.set(8, {{L({1}), 1.0}});
  const TotalDfa dfa = compile(parse("!B U A", ab), ab);
  const ProductAutomaton p = build_product(m, b, dfa);
  for (ProductStateId s = 0; s < p.state_count(); ++s) {
    for (ActionId a = 0; a < p.action_count(); ++a) {
      const auto succ = p.successors(s, a);
      EXPECT_EQ(succ.size(), m.successor(p.physical(s), a) ? 1U : 0U);
      for (const auto& e : succ) EXPECT_EQ(e.p, 1.0);
    }
  }
}

// Compares the stored edges against a direct enumeration of the transition
// relation and its probabilities.
TEST(Product, EdgesMatchEnumeration) {
  std::mt19937_64 rng(21);
  const Alphabet ab({"A", "B"});
  for (const char* task : {"!B U A", "F A & F B", "F (A & F B) | !A U B"}) {
    const PlDmdp m = grid_world(3, 3, {{1, 1}}, ab);
    const Belief b = random_belief(m, rng);
    const TotalDfa dfa = compile(parse(task, ab), ab);
    const ProductAutomaton p = build_product(m, b, dfa);
    std::size_t edges = 0;
    for (StateId x = 0; x < m.state_count(); ++x) {
      for (DfaStateId s = 0; s < dfa.size(); ++s) {
        for (ActionId a = 0; a < m.action_count(); ++a) {
          std::map<ProductStateId, double> expected;
          if (auto y = m.successor(x, a)) {
            for (std::uint32_t l = 0; l < ab.letter_count(); ++l) {
              const double pl = b.probability(*y, Letter(l));
              if (pl > 0.0) expected[p.index(*y, dfa.next(s, Letter(l)))] += pl;
            }
          }
          const auto got = p.successors(p.index(x, s), a);
          ASSERT_EQ(got.size(), expected.size());
          double total = 0.0;
          for (const auto& e : got) {
            ASSERT_TRUE(expected.count(e.state));
            EXPECT_NEAR(e.p, expected[e.state], 1e-12);
            total += e.p;
          }
          if (!got.empty()) {
            EXPECT_NEAR(total, 1.0, 1e-9);
          }
          edges += got.size();
          if (dfa.is_trash(s)) {
            for (const auto& e : got) EXPECT_TRUE(p.trash(e.state));
          }
        }
      }
    }
    EXPECT_EQ(edges, p.edge_count());
  }
}

TEST(Refresh, NoChangeIsIdentity) {
  const Alphabet ab({"A"});
  const PlDmdp m = grid_world(3, 3, {}, ab);
  std::mt19937_64 rng(1);
  const Belief b = random_belief(m, rng);
  const TotalDfa dfa = compile(parse("F A", ab), ab);
  ProductAutomaton p = build_product(m, b, dfa);
  const ProductAutomaton before = p;
  refresh_edges(p, m, b, dfa, {});
  EXPECT_EQ(p, before);
}

TEST(Refresh, RevealCollapsesIncomingEdges) {
  const Alphabet ab({"A", "B"});
  const PlDmdp m = grid_world(3, 3, {}, ab);
  Belief b(m.state_count(), ab);
  const StateId target = at(m, 1, 1);
  b.set(target, {{L({0}), 0.4}, {L({1}), 0.4}, {L({}), 0.2}});
  const TotalDfa dfa = compile(parse("!B U A", ab), ab);
  ProductAutomaton p = build_product(m, b, dfa);
  const std::vector<Observation> obs{{target, L({0})}};
  const auto changed = update_map(b, obs);
  refresh_edges(p, m, b, dfa, changed);
  for (StateId x : m.predecessors(target)) {
    for (ActionId a = 0; a < m.action_count(); ++a) {
      if (m.successor(x, a) != target) continue;
      for (DfaStateId s = 0; s < dfa.size(); ++s) {
        const auto succ = p.successors(p.index(x, s), a);
        ASSERT_EQ(succ.size(), 1U);
        EXPECT_EQ(succ[0].state, p.index(target, dfa.next(s, L({0}))));
        EXPECT_EQ(succ[0].p, 1.0);
      }
    }
  }
  EXPECT_EQ(p, build_product(m, b, dfa));
}

TEST(Refresh, RandomRevealSequencesMatchRebuild) {
  std::mt19937_64 rng(77);
  const Alphabet ab({"A", "B", "C"});
  const TotalDfa dfa = compile(parse("F (A & F (B & F C))", ab), ab);
  for (int round = 0; round < 50; ++round) {
    const PlDmdp m = grid_world(4, 4, {}, ab);
    Belief b = random_belief(m, rng);
    Environment env{std::vector<Letter>(m.state_count()), 1};
    for (auto& l : env.truth) l = Letter(static_cast<std::uint32_t>(rng() % 8));
    ProductAutomaton p = build_product(m, b, dfa);
    for (int step = 0; step < 6; ++step) {
      const auto changed = update_map(b, sense(env, static_cast<StateId>(rng() % m.state_count()), m));
      refresh_edges(p, m, b, dfa, changed);
      ASSERT_EQ(p, build_product(m, b, dfa));
    }
  }
}

TEST(Feasibility, Cases) {
  const Alphabet ab({"A", "D"});
  const PlDmdp m = grid_world(3, 3, {}, ab);
  const TotalDfa dfa = compile(parse("!D U A", ab), ab);
  Belief b(m.state_count(), ab);
  b.set(at(m, 2, 2), {{L({0}), 0.1}, {L({}), 0.9}});
  const ProductAutomaton p = build_product(m, b, dfa);
  EXPECT_TRUE(feasibility_check(p, p.index(at(m, 0, 0), dfa.initial())));
  const DfaStateId acc = dfa.next(dfa.initial(), L({0}));
  EXPECT_TRUE(feasibility_check(p, p.index(at(m, 0, 0), acc)));

  // every letter anywhere violates the task immediately
  Belief walls(m.state_count(), ab);
  for (StateId x = 0; x < m.state_count(); ++x) walls.set(x, {{L({1}), 1.0}});
  const ProductAutomaton q = build_product(m, walls, dfa);
  EXPECT_FALSE(feasibility_check(q, q.index(at(m, 0, 0), dfa.initial())));

  // A reachable only through a D cell
  const PlDmdp line = grid_world(3, 1, {}, ab);
  Belief fenced(line.state_count(), ab);
  fenced.set(1, {{L({1}), 1.0}});
  fenced.set(2, {{L({0}), 1.0}});
  const ProductAutomaton r = build_product(line, fenced, dfa);
  EXPECT_FALSE(feasibility_check(r, r.index(0, dfa.initial())));
}

TEST(Feasibility, CandidateBeliefWithPositiveMassEverywhereNeeded) {
  const Alphabet ab({"A", "B", "C"});
  const PlDmdp m = grid_world(5, 5, {}, ab);
  Belief b(m.state_count(), ab);
  b.set(at(m, 4, 0), {{L({0}), 0.3}, {L({}), 0.7}});
  b.set(at(m, 0, 4), {{L({1}), 0.5}, {L({}), 0.5}});
  b.set(at(m, 4, 4), {{L({2}), 0.2}, {L({}), 0.8}});
  const TotalDfa dfa = compile(parse("F (A & F (B & F C))", ab), ab);
  const ProductAutomaton p = build_product(m, b, dfa);
  EXPECT_TRUE(feasibility_check(p, p.index(at(m, 2, 2), dfa.initial())));
  b.set(at(m, 4, 4), {{L({}), 1.0}});
  const ProductAutomaton q = build_product(m, b, dfa);
  EXPECT_FALSE(feasibility_check(q, q.index(at(m, 2, 2), dfa.initial())));
}
