// Comparison techniques B1-B4 and B6. Each returns a total GlobalPolicy
// over the same CLMDP so the harness evaluates every technique uniformly.

#pragma once

#include <string>
#include <vector>

#include "clmdp/solver.hpp"

namespace clmdp {

enum class TechniqueId { B1, B2, B3, B4, B5, B6, O1, O2 };

inline const char* technique_name(TechniqueId t) {
    switch (t) {
    case TechniqueId::B1: return "B1";
    case TechniqueId::B2: return "B2";
    case TechniqueId::B3: return "B3";
    case TechniqueId::B4: return "B4";
    case TechniqueId::B5: return "B5";
    case TechniqueId::B6: return "B6";
    case TechniqueId::O1: return "O1";
    default: return "O2";
    }
}

inline TechniqueId technique_from_name(const std::string& name) {
    for (TechniqueId t :
         {TechniqueId::B1, TechniqueId::B2, TechniqueId::B3, TechniqueId::B4,
          TechniqueId::B5, TechniqueId::B6, TechniqueId::O1, TechniqueId::O2})
        if (name == technique_name(t)) return t;
    throw std::invalid_argument("unknown technique '" + name + "'");
}

/// B1: single-objective planning on the goal objective, ignoring context.
inline GlobalPolicy b1_task_only(const Clmdp& model, double tolerance = 1e-6) {
    int top = model.top_context();
    ActionMask full =
        ActionMask::full(model.base.num_states, model.base.num_actions);
    ValueIterationResult vi = value_iteration(
        model.base, model.rewards_of(top).objective(0), full, tolerance);
    GlobalPolicy g;
    g.actions = std::move(vi.policy);
    g.provenance.assign(model.base.num_states, top);
    return g;
}

/// B2: one lexicographic solve assuming the whole state space falls under
/// the highest-priority context in the meta-ordering.
inline GlobalPolicy b2_lmdp_omega(const Clmdp& model, double slack = 0.0,
                                  double tolerance = 1e-6) {
    int top = model.top_context();
    ActionMask full =
        ActionMask::full(model.base.num_states, model.base.num_actions);
    GlobalPolicy g;
    g.actions = lvi(model.base, model.rewards_of(top), model.ordering_of(top),
                    full, slack, tolerance)
                    .policy;
    g.provenance.assign(model.base.num_states, top);
    return g;
}

/// B3: weighted-sum scalarization of the top context's reward vector. The
/// weight vector is indexed by priority rank and reordered onto objectives
/// per that context's ordering; default (100, 10, 1, ...).
inline GlobalPolicy b3_scalarization(const Clmdp& model,
                                     std::vector<double> weights = {},
                                     double tolerance = 1e-6) {
    int top = model.top_context();
    const ObjectiveOrdering& ordering = model.ordering_of(top);
    const int n = model.num_objectives;
    if (weights.empty()) {
        weights.resize(n);
        double w = 1.0;
        for (int k = n - 1; k >= 0; --k, w *= 10.0) weights[k] = w;
    }
    detail::require(static_cast<int>(weights.size()) == n,
                    "b3_scalarization: one weight per objective required");

    RewardTable scalarized(model.base.num_states, model.base.num_actions);
    const RewardVectorTable& rv = model.rewards_of(top);
    for (int k = 0; k < n; ++k) {
        const RewardTable& r = rv.objective(ordering.order[k]);
        for (size_t i = 0; i < scalarized.values.size(); ++i)
            scalarized.values[i] += weights[k] * r.values[i];
    }
    ActionMask full =
        ActionMask::full(model.base.num_states, model.base.num_actions);
    ValueIterationResult vi =
        value_iteration(model.base, scalarized, full, tolerance);
    GlobalPolicy g;
    g.actions = std::move(vi.policy);
    g.provenance.assign(model.base.num_states, top);
    return g;
}

/// B4: partition-aware lexicographic planning in descending meta-ordering
/// priority. Each context is solved over the full state space with its own
/// ordering and rewards, but states of already-committed partitions keep
/// their values pinned (their actions are never revisited). No conflict
/// checking or resolution happens.
inline GlobalPolicy b4_lmdp_contexts(const Clmdp& model, double slack = 0.0,
                                     double tolerance = 1e-6) {
    const int n_states = model.base.num_states;
    const int n_obj = model.num_objectives;
    const double keep_width = std::max(slack, tolerance);

    GlobalPolicy g;
    g.actions.assign(n_states, 0);
    g.provenance.assign(n_states, model.top_context());
    std::vector<char> committed(n_states, 0);
    std::vector<ValueFunction> committed_values(
        n_obj, ValueFunction(n_states, 0.0));

    for (int context : model.meta_ordering) {
        const ObjectiveOrdering& ordering = model.ordering_of(context);
        const RewardVectorTable& rewards = model.rewards_of(context);
        ActionMask mask = ActionMask::full(n_states, model.base.num_actions);
        Policy pi;
        std::vector<ValueFunction> values(n_obj);

        for (size_t k = 0; k < ordering.order.size(); ++k) {
            int obj = ordering.order[k];
            ValueIterationResult vi =
                value_iteration(model.base, rewards.objective(obj), mask,
                                tolerance, &committed, &committed_values[obj]);
            values[obj] = std::move(vi.value);
            pi = std::move(vi.policy);
            if (k + 1 < ordering.order.size()) {
                for (int s = 0; s < n_states; ++s) {
                    if (committed[s]) continue;
                    double best = -std::numeric_limits<double>::infinity();
                    for (int a : mask.allowed[s])
                        best = std::max(best, vi.q(s, a));
                    std::vector<int> kept;
                    for (int a : mask.allowed[s])
                        if (vi.q(s, a) >= best - keep_width) kept.push_back(a);
                    mask.allowed[s] = std::move(kept);
                }
            }
        }
        for (int s = 0; s < n_states; ++s) {
            if (model.z[s] != context) continue;
            g.actions[s] = pi[s];
            g.provenance[s] = context;
            committed[s] = 1;
            for (int i = 0; i < n_obj; ++i)
                committed_values[i][s] = values[i][s];
        }
    }
    return g;
}

/// B6: the compiled global policy verbatim, without conflict resolution.
inline GlobalPolicy b6_no_resolver(const Clmdp& model, double slack = 0.0,
                                   double tolerance = 1e-6) {
    return compile_global_policy(model, slack, tolerance).first;
}

} // namespace clmdp
