#include <doctest.h>

#include "clmdp/domains.hpp"
#include "oracles.hpp"

using namespace clmdp;

namespace {

GridSpec tiny_spec() {
    GridSpec spec;
    spec.width = 4;
    spec.height = 4;
    spec.goal_cell = 15;
    spec.item_cell = 5;
    spec.start_cells = {0};
    spec.primary_feature_cells = {6, 10};
    spec.secondary_feature_cells = {9};
    spec.slip_probability = 0.1;
    return spec;
}

} // namespace

TEST_CASE("tiny salp layout builds a valid CLMDP") {
    DomainInstance inst = make_salp(tiny_spec());
    CHECK(validate_clmdp(inst.model).empty());
    // 16 cells, no obstacles, two carrying layers.
    CHECK(inst.model.base.num_states == 32);
    CHECK(inst.model.base.num_actions == 5);
    CHECK(inst.model.num_objectives == 3);
    CHECK(inst.model.num_contexts() == 3);
}

TEST_CASE("grid moves clamp at the border and interact picks up the item") {
    GridSpec spec = tiny_spec();
    spec.slip_probability = 0.0;
    DomainInstance inst = make_salp(spec);
    const TabularMdp& mdp = inst.model.base;
    // Cell 0 without the item is state 0; north (action 0) and west (3)
    // bump the border and stay put.
    CHECK(mdp.next(0, 0) == std::vector<Successor>{{0, 1.0}});
    CHECK(mdp.next(0, 3) == std::vector<Successor>{{0, 1.0}});
    // East from cell 0 reaches cell 1 (state 2 in the two-layer encoding).
    CHECK(mdp.next(0, 2) == std::vector<Successor>{{2, 1.0}});
    // Interact away from the item is a no-op; at the item it sets carrying.
    CHECK(mdp.next(0, 4) == std::vector<Successor>{{0, 1.0}});
    int at_item = 5 * 2; // cell 5, not carrying
    CHECK(mdp.next(at_item, 4) == std::vector<Successor>{{at_item + 1, 1.0}});
}

TEST_CASE("slip probability splits the move outcome") {
    DomainInstance inst = make_salp(tiny_spec());
    auto row = inst.model.base.next(0, 2);
    REQUIRE(row.size() == 2);
    CHECK(row[0].prob == doctest::Approx(0.9));
    CHECK(row[1].state == 0);
    CHECK(row[1].prob == doctest::Approx(0.1));
}

TEST_CASE("obstacles are removed from the state space and block movement") {
    GridSpec spec = tiny_spec();
    spec.obstacle_cells = {1};
    spec.slip_probability = 0.0;
    DomainInstance inst = make_salp(spec);
    CHECK(inst.model.base.num_states == 30);
    // East from cell 0 now bumps into the obstacle.
    CHECK(inst.model.base.next(0, 2) == std::vector<Successor>{{0, 1.0}});
}

TEST_CASE("salp rewards gate the coral penalty on carrying") {
    DomainInstance inst = make_salp(tiny_spec());
    const RewardTable& o2 = inst.model.reward_vectors[0].per_objective[1];
    int coral_carrying = 6 * 2 + 1;
    int coral_empty = 6 * 2;
    CHECK(o2(coral_carrying, 0) == -10.0);
    CHECK(o2(coral_empty, 0) == 0.0);
    const RewardTable& o3 = inst.model.reward_vectors[0].per_objective[2];
    CHECK(o3(9 * 2, 0) == -10.0);
    CHECK(o3(9 * 2 + 1, 0) == -10.0);
}

TEST_CASE("taxi autonomy objective penalizes off-road and pays goal entry") {
    GridSpec spec = tiny_spec();
    spec.slip_probability = 0.0;
    DomainInstance inst = make_taxi(spec);
    const RewardTable& o2 = inst.model.reward_vectors[0].per_objective[1];
    int on_road = 6 * 2 + 1; // cell 6 is a road
    int off_road = 0 * 2 + 1;
    CHECK(o2(on_road, 4) == 0.0);
    CHECK(o2(off_road, 4) == -10.0);
    // Cell 14 east of the goal, carrying: stepping onto the goal pays the
    // off-road penalty plus the full autonomy goal bonus.
    int beside_goal = 14 * 2 + 1;
    CHECK(o2(beside_goal, 2) == -10.0 + 100.0);
}

TEST_CASE("z maps feature states to their context, ties to higher priority") {
    DomainInstance inst = make_salp(tiny_spec());
    const std::vector<int>& z = inst.model.z;
    CHECK(z[0 * 2] == 0);          // plain cell -> task context
    CHECK(z[6 * 2 + 1] == 1);      // coral while carrying
    CHECK(z[6 * 2] == 0);          // coral without the sample is harmless
    CHECK(z[9 * 2] == 2);          // eddy regardless of carrying

    GridSpec both = tiny_spec();
    both.secondary_feature_cells = {6, 9}; // cell 6 is coral and eddy
    DomainInstance overlap = make_salp(both);
    // meta_ordering = {1, 0, 2}: the coral context outranks the eddy one.
    CHECK(overlap.model.z[6 * 2 + 1] == 1);
    CHECK(overlap.z_candidates[6 * 2 + 1] == std::vector<int>{1, 2});
    CHECK(overlap.model.z[6 * 2] == 2); // only the eddy condition holds
}

TEST_CASE("goal state is absorbing with zero rewards in every vector") {
    DomainInstance inst = make_warehouse(tiny_spec());
    int g = inst.model.base.goal_state;
    for (int a = 0; a < 5; ++a) {
        CHECK(inst.model.base.next(g, a) == std::vector<Successor>{{g, 1.0}});
        for (const RewardVectorTable& rv : inst.model.reward_vectors)
            for (int i = 0; i < 3; ++i) CHECK(rv.objective(i)(g, a) == 0.0);
    }
}

TEST_CASE("context reward vectors double the context's top objective") {
    DomainInstance inst = make_warehouse(tiny_spec());
    const Clmdp& m = inst.model;
    // Recover the unscaled base tables by halving context 0's own top.
    std::vector<RewardTable> base = m.reward_vectors[0].per_objective;
    for (double& v : base[m.ordering_of(0).order[0]].values) v /= 2.0;
    for (int c = 0; c < 3; ++c) {
        int top = m.ordering_of(c).order[0];
        for (int i = 0; i < 3; ++i) {
            double scale = (i == top) ? 2.0 : 1.0;
            const auto& got = m.reward_vectors[c].per_objective[i].values;
            for (size_t k = 0; k < got.size(); ++k)
                CHECK(got[k] == scale * base[i].values[k]);
        }
    }
}

TEST_CASE("infeasible layouts are rejected") {
    GridSpec walled = tiny_spec();
    // Wall off the goal corner completely.
    walled.obstacle_cells = {11, 14};
    CHECK_THROWS_AS(make_salp(walled), std::runtime_error);

    GridSpec bad = tiny_spec();
    bad.goal_cell = 99;
    CHECK_THROWS_AS(make_salp(bad), std::invalid_argument);
}

TEST_CASE("random instances are deterministic in the seed and feasible") {
    for (Domain d : {Domain::Salp, Domain::Taxi, Domain::Warehouse}) {
        DomainInstance a = random_instance(d, 12);
        DomainInstance b = random_instance(d, 12);
        CHECK(a.grid.goal_cell == b.grid.goal_cell);
        CHECK(a.grid.primary_feature_cells == b.grid.primary_feature_cells);
        CHECK(a.model.z == b.model.z);
        CHECK(validate_clmdp(a.model).empty());
        DomainInstance c = random_instance(d, 13);
        // Different seeds must produce different layouts.
        CHECK((c.grid.goal_cell != a.grid.goal_cell ||
               c.grid.primary_feature_cells != a.grid.primary_feature_cells));
    }
}

TEST_CASE("fixture instances solve to conflict-free policies") {
    for (Domain d : {Domain::Salp, Domain::Taxi, Domain::Warehouse}) {
        for (unsigned long long seed : fixture_seeds(d)) {
            DomainInstance inst = random_instance(d, seed);
            auto [policy, diag] = solve(inst.model);
            CHECK(diag.resolved);
            CHECK(!conflict_checker(policy.actions, inst.model.base)
                       .has_conflict);
        }
    }
}

TEST_CASE("domain names round-trip") {
    for (Domain d : {Domain::Salp, Domain::Taxi, Domain::Warehouse})
        CHECK(domain_from_name(domain_name(d)) == d);
    CHECK_THROWS_AS(domain_from_name("bogus"), std::invalid_argument);
}
