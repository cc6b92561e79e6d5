#include <doctest.h>

#include <random>

#include "clmdp/lexicographic.hpp"
#include "oracles.hpp"

using namespace clmdp;

TEST_CASE("single objective reduces to plain value iteration") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        TabularMdp mdp = oracles::random_mdp(rng, 10, 3, trial % 2 == 0);
        RewardVectorTable rewards;
        rewards.per_objective.push_back(oracles::random_reward(rng, mdp));
        ActionMask full = ActionMask::full(10, 3);
        LviResult lex = lvi(mdp, rewards, {{0}}, full);
        auto vi = value_iteration(mdp, rewards.objective(0), full);
        CHECK(lex.policy == vi.policy);
        for (int s = 0; s < 10; ++s)
            CHECK(lex.values[0][s] == doctest::Approx(vi.value[s]).epsilon(1e-6));
    }
}

TEST_CASE("unique top-objective optimum makes objective two irrelevant") {
    // Chain where action 0 is strictly better for objective one everywhere;
    // objective two strongly prefers action 1.
    TabularMdp mdp;
    mdp.num_states = 3;
    mdp.num_actions = 2;
    mdp.goal_state = 2;
    mdp.start_states = {0};
    mdp.discount = 0.9;
    mdp.transitions = {{{{1, 1.0}}, {{0, 1.0}}},
                       {{{2, 1.0}}, {{1, 1.0}}},
                       {{{2, 1.0}}, {{2, 1.0}}}};
    RewardVectorTable rewards;
    RewardTable r1(3, 2);
    r1.at(0, 0) = 1.0;
    r1.at(1, 0) = 1.0; // action 1 gets nothing anywhere
    RewardTable r2(3, 2);
    r2.at(0, 1) = 100.0;
    r2.at(1, 1) = 100.0;
    rewards.per_objective = {r1, r2};

    ActionMask full = ActionMask::full(3, 2);
    LviResult lex = lvi(mdp, rewards, {{0, 1}}, full);
    auto vi = value_iteration(mdp, r1, full);
    CHECK(lex.policy == vi.policy);
    CHECK(lex.policy[0] == 0);
    CHECK(lex.policy[1] == 0);
}

TEST_CASE("two equal paths: the secondary objective picks the safe one") {
    // 2x2 gridworld collapsed to 4 states: start 0, goal 3, via marked
    // cell 1 or clean cell 2. Both paths have equal length.
    TabularMdp mdp;
    mdp.num_states = 4;
    mdp.num_actions = 2;
    mdp.goal_state = 3;
    mdp.start_states = {0};
    mdp.discount = 0.9;
    mdp.transitions = {{{{1, 1.0}}, {{2, 1.0}}},
                       {{{3, 1.0}}, {{3, 1.0}}},
                       {{{3, 1.0}}, {{3, 1.0}}},
                       {{{3, 1.0}}, {{3, 1.0}}}};
    RewardVectorTable rewards;
    RewardTable reach(4, 2);
    for (int a = 0; a < 2; ++a) {
        reach.at(0, a) = -1.0;
        reach.at(1, a) = 9.0; // -1 step + 10 goal entry
        reach.at(2, a) = 9.0;
    }
    RewardTable avoid(4, 2); // penalty for being at the marked cell 1
    avoid.at(1, 0) = -5.0;
    avoid.at(1, 1) = -5.0;
    rewards.per_objective = {reach, avoid};

    ObjectiveOrdering ordering{{0, 1}};
    LviResult lex = lvi(mdp, rewards, ordering, ActionMask::full(4, 2));
    CHECK(lex.policy[0] == 1); // route through the clean cell

    // Cross-check against brute-force enumeration of deterministic policies.
    auto best = oracles::best_policy_vector_by_enumeration(mdp, rewards,
                                                           ordering, 0);
    auto got = oracles::policy_value_vector(mdp, lex.policy, rewards,
                                            ordering, 0);
    CHECK(oracles::lex_compare(got, best, 1e-6) >= 0);
}

TEST_CASE("LVI policy value vector is lexicographically maximal (random)") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<int> pick_n(1, 3);
    for (int trial = 0; trial < 40; ++trial) {
        int num_states = 4 + trial % 3;
        int num_actions = 2 + trial % 2;
        TabularMdp mdp = oracles::random_mdp(rng, num_states, num_actions, true);
        int n = pick_n(rng);
        RewardVectorTable rewards;
        for (int i = 0; i < n; ++i)
            rewards.per_objective.push_back(oracles::random_reward(rng, mdp));
        std::vector<int> order(n);
        for (int i = 0; i < n; ++i) order[i] = i;
        std::shuffle(order.begin(), order.end(), rng);
        ObjectiveOrdering ordering{order};

        LviResult lex =
            lvi(mdp, rewards, ordering, ActionMask::full(num_states, num_actions));
        auto got = oracles::policy_value_vector(
            mdp, lex.policy, rewards, ordering, mdp.start_states[0]);
        auto best = oracles::best_policy_vector_by_enumeration(
            mdp, rewards, ordering, mdp.start_states[0]);
        CHECK(oracles::lex_compare(got, best, 1e-6) >= 0);
    }
}

TEST_CASE("masks never grow across objective passes") {
    std::mt19937_64 rng(29);
    TabularMdp mdp = oracles::random_mdp(rng, 8, 3, false);
    RewardVectorTable rewards;
    for (int i = 0; i < 3; ++i)
        rewards.per_objective.push_back(oracles::random_reward(rng, mdp));
    ActionMask start = ActionMask::full(8, 3);
    LviResult lex = lvi(mdp, rewards, {{0, 1, 2}}, start);
    for (int s = 0; s < 8; ++s) {
        CHECK(!lex.final_mask.allowed[s].empty());
        CHECK(lex.final_mask.allowed[s].size() <= start.allowed[s].size());
    }
}

TEST_CASE("singleton masks force the returned action") {
    std::mt19937_64 rng(37);
    TabularMdp mdp = oracles::random_mdp(rng, 8, 3, false);
    RewardVectorTable rewards;
    for (int i = 0; i < 2; ++i)
        rewards.per_objective.push_back(oracles::random_reward(rng, mdp));
    ActionMask mask = ActionMask::full(8, 3);
    mask.fix(2, 1);
    mask.fix(5, 2);
    LviResult lex = lvi(mdp, rewards, {{1, 0}}, mask);
    CHECK(lex.policy[2] == 1);
    CHECK(lex.policy[5] == 2);
}

TEST_CASE("top-priority value is preserved within slack plus tolerance") {
    std::mt19937_64 rng(43);
    for (double slack : {0.0, 0.05}) {
        TabularMdp mdp = oracles::random_mdp(rng, 10, 3, false);
        RewardVectorTable rewards;
        for (int i = 0; i < 2; ++i)
            rewards.per_objective.push_back(oracles::random_reward(rng, mdp));
        ActionMask full = ActionMask::full(10, 3);
        LviResult lex = lvi(mdp, rewards, {{0, 1}}, full, slack);
        auto top = value_iteration(mdp, rewards.objective(0), full);
        ValueFunction achieved =
            policy_evaluation(mdp, lex.policy, rewards.objective(0));
        // One pass of slack can compound along trajectories; the per-state
        // Q gap is slack-bounded, so compare against slack/(1-gamma).
        double bound = (slack + 1e-5) / (1.0 - mdp.discount);
        for (int s = 0; s < 10; ++s)
            CHECK(achieved[s] >= top.value[s] - bound - 1e-5);
    }
}
