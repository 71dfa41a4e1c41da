#include <gtest/gtest.h>

#include <random>
#include <set>

#include "semplan/model.hpp"

using namespace semplan;

namespace {

StateId at(const PlDmdp& m, int x, int y) { return *m.grid()->state_at({x, y}); }

std::size_t feasible_actions(const PlDmdp& m, StateId x) {
  std::size_t n = 0;
  for (ActionId a = 0; a < m.action_count(); ++a) n += m.successor(x, a).has_value();
  return n;
}

const Alphabet kAB({"A", "B"});
const Letter kA = Letter().with(0);
const Letter kB = Letter().with(1);

}  // namespace

TEST(GridWorld, FiveByFive) {
  const PlDmdp m = grid_world(5, 5);
  EXPECT_EQ(m.state_count(), 25U);
  for (auto [x, y] : {std::pair{0, 0}, {4, 0}, {0, 4}, {4, 4}}) EXPECT_EQ(feasible_actions(m, at(m, x, y)), 3U);
  EXPECT_EQ(feasible_actions(m, at(m, 2, 0)), 4U);
  EXPECT_EQ(feasible_actions(m, at(m, 2, 2)), 5U);
}

TEST(GridWorld, ActionSemantics) {
  const PlDmdp m = grid_world(2, 2);
  EXPECT_EQ(m.successor(at(m, 0, 0), *m.action("Right")), at(m, 1, 0));
  EXPECT_EQ(m.successor(at(m, 0, 0), *m.action("Up")), at(m, 0, 1));
  EXPECT_FALSE(m.successor(at(m, 0, 0), *m.action("Left")));
  EXPECT_FALSE(m.successor(at(m, 0, 0), *m.action("Down")));
  EXPECT_EQ(m.successor(at(m, 1, 1), *m.action("Stay")), at(m, 1, 1));
}

TEST(GridWorld, TransitionCounts) {
  // hand count: 4 Stay + 8 cardinal
  EXPECT_EQ(grid_world(2, 2).transition_count(), 12U);
  // 100 Stay + 4 * 10 * 9 cardinal
  EXPECT_EQ(grid_world(10, 10).transition_count(), 460U);
  EXPECT_EQ(grid_world(10, 10).state_count(), 100U);
}

TEST(GridWorld, Blocked) {
  const PlDmdp m = grid_world(3, 1, {{1, 0}});
  EXPECT_EQ(m.state_count(), 2U);
  EXPECT_FALSE(m.successor(at(m, 0, 0), *m.action("Right")));
  EXPECT_TRUE(m.grid()->blocked({1, 0}));
  EXPECT_THROW(grid_world(1, 1, {{0, 0}}), ModelError);
  EXPECT_THROW(grid_world(0, 3), ModelError);
}

TEST(Model, Validation) {
  EXPECT_THROW(PlDmdp({"Stay"}, 2, {0, 0}, kAB), ModelError);     // Stay not a self-loop
  EXPECT_THROW(PlDmdp({"Go"}, 2, {1, 5}, kAB), ModelError);       // target out of range
  EXPECT_THROW(PlDmdp({"Go"}, 2, {1, 0}, kAB, 0.0), ModelError);  // zero cost
  const PlDmdp ok({"Go"}, 2, {1, kNoState}, kAB);
  EXPECT_EQ(ok.transition_count(), 1U);
  ASSERT_EQ(ok.predecessors(1).size(), 1U);
  EXPECT_TRUE(ok.predecessors(0).empty());
}

TEST(Neighborhood, Balls) {
  const PlDmdp m = grid_world(5, 5);
  EXPECT_EQ(neighborhood(m, at(m, 2, 2), 0), std::vector<StateId>{at(m, 2, 2)});
  const auto corner = neighborhood(m, at(m, 0, 0), 1);
  EXPECT_EQ(std::set<StateId>(corner.begin(), corner.end()),
            (std::set<StateId>{at(m, 0, 0), at(m, 1, 0), at(m, 0, 1)}));
  EXPECT_EQ(neighborhood(m, at(m, 3, 1), 10).size(), 25U);
  EXPECT_EQ(neighborhood(m, at(m, 2, 2), 2).size(), 13U);
}

TEST(Sense, NeighborhoodWithTruth) {
  const PlDmdp m = grid_world(5, 5, {}, kAB);
  Environment env{std::vector<Letter>(25), 1};
  env.truth[at(m, 2, 3)] = kA;
  const auto obs = sense(env, at(m, 2, 2), m);
  EXPECT_EQ(obs.size(), 5U);
  std::size_t with_a = 0;
  for (const auto& o : obs) with_a += o.letter == kA ? (o.state == at(m, 2, 3) ? 1 : 100) : 0;
  EXPECT_EQ(with_a, 1U);
  EXPECT_EQ(sense(env, at(m, 2, 2), m), obs);
  env.sensor_range = 0;
  EXPECT_EQ(sense(env, at(m, 2, 2), m).size(), 1U);
}

TEST(Belief, DefaultsAndNormalization) {
  Belief b(3, kAB);
  EXPECT_EQ(b.probability(0, Letter{}), 1.0);
  EXPECT_EQ(b.uncertain_count(), 3U);
  b.set(1, {{kA, 0.7}, {Letter{}, 0.3}});
  EXPECT_DOUBLE_EQ(b.probability(1, kA), 0.7);
  EXPECT_EQ(b.probability(1, kB), 0.0);
  EXPECT_THROW(b.set(1, {{kA, 0.7}, {Letter{}, 0.2}}), ModelError);
  EXPECT_THROW(b.set(1, {{Letter(4), 1.0}}), ModelError);
  b.set(2, {{kA, 0.5}, {kA, 0.5}, {kB, 0.0}});
  ASSERT_EQ(b.support(2).size(), 1U);
  EXPECT_DOUBLE_EQ(b.probability(2, kA), 1.0);
}

TEST(Belief, ModeTieGoesToLargerLetter) {
  Belief b(1, kAB);
  b.set(0, {{kA, 0.5}, {kB, 0.5}});
  EXPECT_EQ(b.mode(0), kB);
  b.set(0, {{kA, 0.6}, {kB, 0.4}});
  EXPECT_EQ(b.mode(0), kA);
}

TEST(UpdateMap, Examples) {
  Belief b(2, kAB);
  b.set(0, {{kA, 0.7}, {Letter{}, 0.3}});
  const auto v0 = b.version();

  const std::vector<Observation> none;
  EXPECT_TRUE(update_map(b, none).empty());
  EXPECT_EQ(b.version(), v0);

  const std::vector<Observation> saw_a{{0, kA}};
  EXPECT_EQ(update_map(b, saw_a), std::vector<StateId>{0});
  EXPECT_EQ(b.probability(0, kA), 1.0);
  EXPECT_TRUE(b.revealed(0));

  // zero-prior truth overwrites the belief
  const std::vector<Observation> wrong{{0, Letter{}}};
  EXPECT_EQ(update_map(b, wrong), std::vector<StateId>{0});
  EXPECT_EQ(b.probability(0, Letter{}), 1.0);
  EXPECT_EQ(b.probability(0, kA), 0.0);

  // already pinned: revealed but unchanged
  const std::vector<Observation> same{{1, Letter{}}};
  EXPECT_TRUE(update_map(b, same).empty());
  EXPECT_TRUE(b.revealed(1));
  EXPECT_EQ(b.uncertain_count(), 0U);

  const std::vector<Observation> bad{{1, Letter(8)}};
  EXPECT_THROW(update_map(b, bad), ModelError);
}

TEST(UpdateMap, RandomSequencesKeepInvariants) {
  std::mt19937_64 rng(9);
  const PlDmdp m = grid_world(4, 4, {}, kAB);
  for (int round = 0; round < 50; ++round) {
    Belief b(m.state_count(), kAB);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (StateId x = 0; x < m.state_count(); ++x) {
      const double p = u(rng), q = u(rng) * (1.0 - p);
      b.set(x, {{Letter{}, 1.0 - p - q}, {kA, p}, {kB, q}});
    }
    Environment env{std::vector<Letter>(m.state_count()), 1};
    for (auto& l : env.truth) l = Letter(static_cast<std::uint32_t>(rng() % 4));
    std::size_t uncertain = b.uncertain_count();
    for (int step = 0; step < 8; ++step) {
      const auto x = static_cast<StateId>(rng() % m.state_count());
      update_map(b, sense(env, x, m));
      EXPECT_LE(b.uncertain_count(), uncertain);
      uncertain = b.uncertain_count();
      for (StateId y = 0; y < m.state_count(); ++y) {
        double total = 0.0;
        for (const auto& e : b.support(y)) total += e.p;
        EXPECT_NEAR(total, 1.0, 1e-9);
        if (b.revealed(y)) {
          ASSERT_EQ(b.support(y).size(), 1U);
          EXPECT_EQ(b.support(y)[0].letter, env.truth[y]);
        }
      }
    }
  }
}
