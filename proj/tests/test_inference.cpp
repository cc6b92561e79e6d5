#include <doctest.h>

#include <random>

#include "clmdp/inference.hpp"
#include "oracles.hpp"

using namespace clmdp;

namespace {

// Chain where every action advances one step; context c's ordering puts
// objective c+1 first, and that objective pays +1 only for action c. The
// single-context policies are therefore pairwise distinct, so the expert's
// action alone identifies the context at every visited state.
Clmdp discriminating_chain(int length, int num_contexts,
                           const std::vector<int>& z_true) {
    const int m = num_contexts;
    Clmdp model;
    TabularMdp& mdp = model.base;
    mdp.num_states = length;
    mdp.num_actions = m;
    mdp.goal_state = length - 1;
    mdp.start_states = {0};
    mdp.discount = 0.95;
    mdp.transitions.assign(length, std::vector<std::vector<Successor>>(m));
    for (int s = 0; s < length; ++s)
        for (int a = 0; a < m; ++a)
            mdp.transitions[s][a] = {{std::min(s + 1, length - 1), 1.0}};
    for (int a = 0; a < m; ++a) mdp.transitions[length - 1][a] = {{length - 1, 1.0}};

    model.num_objectives = m + 1;
    RewardVectorTable rv;
    RewardTable reach(length, m, -1.0);
    for (int a = 0; a < m; ++a) reach.at(length - 1, a) = 0.0;
    rv.per_objective.push_back(reach);
    for (int c = 0; c < m; ++c) {
        RewardTable marker(length, m);
        for (int s = 0; s < length - 1; ++s) marker.at(s, c) = 1.0;
        rv.per_objective.push_back(marker);
    }
    model.reward_vectors = {rv};

    for (int c = 0; c < m; ++c) {
        ObjectiveOrdering ord;
        ord.order.push_back(c + 1);
        for (int i = 0; i <= m; ++i)
            if (i != c + 1) ord.order.push_back(i);
        model.orderings.push_back(ord);
        model.contexts.push_back({"c" + std::to_string(c), c, 0});
    }
    model.meta_ordering.resize(m);
    for (int c = 0; c < m; ++c) model.meta_ordering[c] = c;
    model.z = z_true;
    return model;
}

} // namespace

TEST_CASE("simulate_expert produces goal-terminated trajectories") {
    std::vector<int> z = {0, 1, 2, 0, 1, 0};
    Clmdp model = discriminating_chain(6, 3, z);
    REQUIRE(validate_clmdp(model).empty());
    TrajectoryDataset data = simulate_expert(model, 7, 100, 42);
    CHECK(data.trajectories.size() == 7);
    auto [policy, diag] = solve(model);
    REQUIRE(diag.resolved);
    for (const auto& traj : data.trajectories) {
        REQUIRE(!traj.empty());
        CHECK(traj.back().state == model.base.goal_state);
        for (const TrajectoryStep& step : traj)
            CHECK(step.action == policy.actions[step.state]);
        // Non-terminal steps carry the true context's reward vector.
        for (size_t k = 0; k + 1 < traj.size(); ++k) {
            const TrajectoryStep& step = traj[k];
            const RewardVectorTable& rv = model.rewards_of(z[step.state]);
            for (int i = 0; i < model.num_objectives; ++i)
                CHECK(step.observed_rewards[i] ==
                      rv.objective(i)(step.state, step.action));
        }
    }
}

TEST_CASE("simulate_expert is deterministic for a fixed seed") {
    std::mt19937_64 rng(7);
    Clmdp model = oracles::random_clmdp(rng, 15, 3, 3, 3);
    TrajectoryDataset a = simulate_expert(model, 5, 500, 99);
    TrajectoryDataset b = simulate_expert(model, 5, 500, 99);
    REQUIRE(a.trajectories.size() == b.trajectories.size());
    for (size_t t = 0; t < a.trajectories.size(); ++t) {
        REQUIRE(a.trajectories[t].size() == b.trajectories[t].size());
        for (size_t k = 0; k < a.trajectories[t].size(); ++k) {
            CHECK(a.trajectories[t][k].state == b.trajectories[t][k].state);
            CHECK(a.trajectories[t][k].action == b.trajectories[t][k].action);
        }
    }
}

TEST_CASE("action evidence recovers z exactly on the discriminating chain") {
    std::vector<int> z = {2, 0, 1, 2, 1, 0, 2, 0}; // z at the goal = Omega-top
    z.back() = 0;
    Clmdp model = discriminating_chain(8, 3, z);
    TrajectoryDataset data = simulate_expert(model, 1, 100, 5);
    InferenceResult inferred = infer_z(model, data);
    CHECK(inferred.z == z);
    CHECK(z_accuracy(z, inferred.z, 3).overall == 1.0);
    // Visited states put all posterior mass on the true context.
    for (int s = 0; s + 1 < 8; ++s)
        CHECK(inferred.posterior.probs[s][z[s]] == doctest::Approx(1.0));
}

TEST_CASE("infer_z never reads the model's own mapping") {
    std::vector<int> z = {1, 0, 2, 1, 0, 2, 1, 0};
    z.back() = 0;
    Clmdp model = discriminating_chain(8, 3, z);
    TrajectoryDataset data = simulate_expert(model, 2, 100, 11);
    Clmdp scrambled = model;
    for (int s = 0; s < 8; ++s) scrambled.z[s] = (z[s] + 1) % 3;
    CHECK(infer_z(model, data).z == infer_z(scrambled, data).z);
}

TEST_CASE("reward evidence separates contexts whose policies agree") {
    // Single-action chain 0 -> 1 -> goal: the expert action carries no
    // information, so only the observed reward vector can identify z.
    Clmdp model;
    TabularMdp& mdp = model.base;
    mdp.num_states = 3;
    mdp.num_actions = 1;
    mdp.goal_state = 2;
    mdp.start_states = {0};
    mdp.discount = 0.9;
    mdp.transitions = {{{{1, 1.0}}}, {{{2, 1.0}}}, {{{2, 1.0}}}};
    model.num_objectives = 2;
    RewardVectorTable rv0, rv1;
    RewardTable base(3, 1, -1.0);
    base.at(2, 0) = 0.0;
    RewardTable flat(3, 1);
    rv0.per_objective = {base, flat};
    RewardTable steep = base;
    steep.at(0, 0) = -2.0;
    steep.at(1, 0) = -2.0;
    rv1.per_objective = {steep, flat};
    model.reward_vectors = {rv0, rv1};
    model.orderings = {{{0, 1}}, {{1, 0}}};
    model.contexts = {{"mild", 0, 0}, {"steep", 1, 1}};
    model.meta_ordering = {0, 1};
    model.z = {1, 0, 0};
    REQUIRE(validate_clmdp(model).empty());

    TrajectoryDataset data = simulate_expert(model, 1, 50, 3);
    InferenceResult inferred = infer_z(model, data);
    CHECK(inferred.z[0] == 1);
    CHECK(inferred.z[1] == 0);
    CHECK(inferred.z[2] == 0); // goal never discriminates: Omega-top fallback
}

TEST_CASE("states absent from the data fall back to the Omega-top context") {
    std::vector<int> z = {1, 2, 1, 2, 1, 0};
    Clmdp model = discriminating_chain(6, 3, z);
    model.meta_ordering = {2, 0, 1};
    z[5] = 2;
    model.z = z;
    TrajectoryDataset empty;
    InferenceResult inferred = infer_z(model, empty);
    for (int s = 0; s < 6; ++s) {
        CHECK(inferred.z[s] == 2);
        for (int c = 0; c < 3; ++c)
            CHECK(inferred.posterior.probs[s][c] == doctest::Approx(1.0 / 3));
    }
}

TEST_CASE("contradictory observations mark zero evidence") {
    std::vector<int> z = {0, 1, 0, 0};
    Clmdp model = discriminating_chain(4, 2, z);
    TrajectoryDataset data;
    // Action 0 at state 0 is context 0's policy, but the recorded rewards
    // match no context's table.
    data.trajectories = {{{0, 0, {99.0, 99.0, 99.0}}}};
    InferenceResult inferred = infer_z(model, data);
    CHECK(inferred.posterior.zero_evidence[0] == 1);
    CHECK(inferred.z[0] == model.meta_ordering.front());
}

TEST_CASE("z_accuracy counts agreement and fills the confusion matrix") {
    ZAccuracy acc = z_accuracy({0, 1, 1, 2}, {0, 1, 2, 2}, 3);
    CHECK(acc.overall == doctest::Approx(0.75));
    CHECK(acc.confusion[1][1] == 1);
    CHECK(acc.confusion[1][2] == 1);
    CHECK(acc.confusion[0][0] == 1);
    CHECK(acc.confusion[2][2] == 1);
}
