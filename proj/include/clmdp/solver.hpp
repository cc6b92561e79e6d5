// Contextual lexicographic MDP model, global policy compilation, conflict
// detection via goal-reachability backups, and the iterative conflict
// resolver that re-plans growing low-priority context windows.

#pragma once

#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "clmdp/lexicographic.hpp"
#include "clmdp/mdp.hpp"

namespace clmdp {

struct ContextDescriptor {
    std::string name;
    int ordering_id = 0; // index into Clmdp::orderings
    int rewards_id = 0;  // index into Clmdp::reward_vectors
};

/// CLMDP: a tabular MDP plus contexts, a strict meta-ordering over them,
/// per-context objective orderings and reward vectors, and a total
/// state -> context mapping.
struct Clmdp {
    TabularMdp base;
    int num_objectives = 0;
    std::vector<ContextDescriptor> contexts;
    std::vector<int> meta_ordering; // context indices, highest priority first
    std::vector<ObjectiveOrdering> orderings;
    std::vector<RewardVectorTable> reward_vectors;
    std::vector<int> z; // state -> context index

    int num_contexts() const { return static_cast<int>(contexts.size()); }
    const ObjectiveOrdering& ordering_of(int context) const {
        return orderings[contexts[context].ordering_id];
    }
    const RewardVectorTable& rewards_of(int context) const {
        return reward_vectors[contexts[context].rewards_id];
    }
    /// Position of a context in the meta-ordering; 0 is highest priority.
    int omega_position(int context) const {
        for (size_t i = 0; i < meta_ordering.size(); ++i)
            if (meta_ordering[i] == context) return static_cast<int>(i);
        return -1;
    }
    int top_context() const { return meta_ordering.front(); }
};

inline std::vector<std::string> validate_clmdp(const Clmdp& model) {
    std::vector<std::string> violations = validate_mdp(model.base);
    auto add = [&](const std::string& m) { violations.push_back(m); };

    const int m = model.num_contexts();
    if (m <= 0) add("no contexts");
    if (static_cast<int>(model.z.size()) != model.base.num_states)
        add("z must be total over states");
    for (int c : model.z)
        if (c < 0 || c >= m) add("z maps to context out of range");

    std::vector<char> seen(m, 0);
    bool perm = static_cast<int>(model.meta_ordering.size()) == m;
    for (int c : model.meta_ordering) {
        if (c < 0 || c >= m || seen[c]) perm = false;
        else seen[c] = 1;
    }
    if (!perm) add("meta_ordering must be a permutation of the contexts");

    for (size_t i = 0; i < model.orderings.size(); ++i) {
        if (!model.orderings[i].is_permutation_of(model.num_objectives))
            add("ordering " + std::to_string(i) +
                " is not a permutation of the objectives");
        for (size_t j = i + 1; j < model.orderings.size(); ++j)
            if (model.orderings[i].order == model.orderings[j].order)
                add("orderings " + std::to_string(i) + " and " +
                    std::to_string(j) + " are not distinct");
    }
    for (const ContextDescriptor& c : model.contexts) {
        if (c.ordering_id < 0 ||
            c.ordering_id >= static_cast<int>(model.orderings.size()))
            add("context '" + c.name + "' has an unknown ordering id");
        if (c.rewards_id < 0 ||
            c.rewards_id >= static_cast<int>(model.reward_vectors.size()))
            add("context '" + c.name + "' has an unknown reward id");
    }
    for (const RewardVectorTable& rv : model.reward_vectors) {
        if (rv.num_objectives() != model.num_objectives)
            add("reward vector with wrong objective count");
        for (const RewardTable& t : rv.per_objective)
            if (t.num_states != model.base.num_states ||
                t.num_actions != model.base.num_actions)
                add("reward table shape mismatch");
    }
    return violations;
}

/// Stitched context-aware policy; provenance records which context's policy
/// supplied each state's action.
struct GlobalPolicy {
    Policy actions;
    std::vector<int> provenance;
};

struct ConflictReport {
    bool has_conflict = false;
    std::vector<int> conflict_states; // sorted
    ValueFunction reachability;       // V_r
};

/// Compiles the global policy: solve each context in isolation over the
/// full state space, then pick each state's action from its own context.
inline std::pair<GlobalPolicy, std::vector<Policy>> compile_global_policy(
    const Clmdp& model, double slack = 0.0, double tolerance = 1e-6) {
    const int m = model.num_contexts();
    ActionMask full = ActionMask::full(model.base.num_states,
                                       model.base.num_actions);
    std::vector<Policy> per_context(m);
    for (int c = 0; c < m; ++c)
        per_context[c] = lvi(model.base, model.rewards_of(c),
                             model.ordering_of(c), full, slack, tolerance)
                             .policy;

    GlobalPolicy g;
    g.actions.resize(model.base.num_states);
    g.provenance.resize(model.base.num_states);
    for (int s = 0; s < model.base.num_states; ++s) {
        g.actions[s] = per_context[model.z[s]][s];
        g.provenance[s] = model.z[s];
    }
    return {std::move(g), std::move(per_context)};
}

/// Goal-reachability analysis of a fixed policy. Runs Bellman backups under
/// the indicator reward (1 at the goal, 0 elsewhere), marking states solved
/// once they individually converge. States with V_r exactly 0 cannot reach
/// the goal. With `log_space` the accumulation runs in the log domain so
/// long low-probability chains cannot underflow to a false zero.
inline ConflictReport conflict_checker(const Policy& policy,
                                       const TabularMdp& mdp,
                                       bool log_space = false,
                                       double epsilon = 1e-6) {
    detail::require(static_cast<int>(policy.size()) == mdp.num_states,
                    "conflict_checker: policy must be total over states");
    const int n = mdp.num_states;
    const int goal = mdp.goal_state;
    const double log_gamma = std::log(mdp.discount);
    const double neg_inf = -std::numeric_limits<double>::infinity();

    // Plain mode stores V_r directly; log mode stores log V_r with -inf
    // standing for exact zero. The goal is pinned at V_r = 1.
    std::vector<double> v(n, log_space ? neg_inf : 0.0);
    v[goal] = log_space ? 0.0 : 1.0;

    std::vector<char> solved(n, 0);
    solved[goal] = 1;
    int num_unsolved = n - 1;
    std::vector<double> scratch;

    while (num_unsolved > 0) {
        double sweep_delta = 0.0;
        std::vector<int> check;
        for (int s = 0; s < n; ++s) {
            if (solved[s]) continue;
            double old = v[s];
            bool leads_to_solved = false;
            if (!log_space) {
                double acc = 0.0;
                for (const Successor& e : mdp.next(s, policy[s])) {
                    acc += mdp.discount * e.prob * v[e.state];
                    if (solved[e.state]) leads_to_solved = true;
                }
                v[s] = acc;
            } else {
                scratch.clear();
                for (const Successor& e : mdp.next(s, policy[s])) {
                    if (v[e.state] != neg_inf)
                        scratch.push_back(log_gamma + std::log(e.prob) +
                                          v[e.state]);
                    if (solved[e.state]) leads_to_solved = true;
                }
                if (scratch.empty()) {
                    v[s] = neg_inf;
                } else {
                    double mx = *std::max_element(scratch.begin(), scratch.end());
                    double sum = 0.0;
                    for (double t : scratch) sum += std::exp(t - mx);
                    v[s] = mx + std::log(sum);
                }
            }
            double change;
            if (!log_space) {
                change = std::abs(v[s] - old);
            } else if (old == neg_inf && v[s] == neg_inf) {
                change = 0.0;
            } else if (old == neg_inf || v[s] == neg_inf) {
                change = std::numeric_limits<double>::infinity();
            } else {
                change = std::abs(std::exp(v[s]) - std::exp(old));
                if (!std::isfinite(change))
                    change = std::abs(v[s] - old);
            }
            sweep_delta = std::max(sweep_delta, change);
            if (leads_to_solved && change < epsilon) check.push_back(s);
        }
        for (int s : check) {
            solved[s] = 1;
            --num_unsolved;
        }
        if (sweep_delta < epsilon) break;
    }

    ConflictReport report;
    report.reachability.resize(n);
    for (int s = 0; s < n; ++s) {
        bool zero = log_space ? (v[s] == neg_inf) : (v[s] == 0.0);
        if (log_space)
            report.reachability[s] =
                zero ? 0.0
                     : std::max(std::exp(v[s]),
                                std::numeric_limits<double>::min());
        else
            report.reachability[s] = v[s];
        if (zero && s != goal) report.conflict_states.push_back(s);
    }
    report.has_conflict = !report.conflict_states.empty();
    return report;
}

struct ResolveResult {
    GlobalPolicy policy;
    bool resolved = false;
    int iterations_used = 0;
    // Omega position of the top of the final update window; num_contexts()
    // when the resolver never ran an iteration.
    int final_window_top = 0;
};

/// Conflict resolver: starting from the lowest-priority context involved in
/// the conflict, re-plan a growing window of low-priority contexts while
/// actions of contexts above the window stay fixed. Returns resolved=false
/// only when even the all-contexts window still conflicts, which is possible
/// only if no conflict-free policy exists under the meta-ordering.
inline ResolveResult conflict_resolver(const Clmdp& model,
                                       const GlobalPolicy& policy,
                                       const ConflictReport& report,
                                       double slack = 0.0,
                                       double tolerance = 1e-6) {
    ResolveResult out;
    out.policy = policy;
    out.final_window_top = model.num_contexts();
    if (!report.has_conflict) {
        out.resolved = true;
        return out;
    }

    const int m = model.num_contexts();
    const int n = model.base.num_states;

    // Lowest-priority context (largest Omega position) among conflict states.
    int star_pos = -1;
    for (int s : report.conflict_states)
        star_pos = std::max(star_pos, model.omega_position(model.z[s]));

    for (int top = star_pos; top >= 0; --top) {
        ++out.iterations_used;
        // C_update = contexts at Omega positions top..m-1.
        std::vector<char> in_window(m, 0);
        for (int p = top; p < m; ++p) in_window[model.meta_ordering[p]] = 1;

        ActionMask mask = ActionMask::full(n, model.base.num_actions);
        for (int s = 0; s < n; ++s)
            if (!in_window[model.z[s]]) mask.fix(s, out.policy.actions[s]);

        for (int p = top; p < m; ++p) {
            int c = model.meta_ordering[p];
            Policy pi = lvi(model.base, model.rewards_of(c),
                            model.ordering_of(c), mask, slack, tolerance)
                            .policy;
            for (int s = 0; s < n; ++s) {
                if (model.z[s] != c) continue;
                mask.fix(s, pi[s]);
                out.policy.actions[s] = pi[s];
                out.policy.provenance[s] = c;
            }
        }

        ConflictReport check = conflict_checker(out.policy.actions, model.base);
        if (!check.has_conflict) {
            out.resolved = true;
            out.final_window_top = top;
            return out;
        }
    }
    out.final_window_top = 0;
    return out;
}

struct SolveDiagnostics {
    int conflicts_after_compile = 0;
    int resolver_iterations = 0;
    bool resolved = true;
    double compile_ms = 0.0;
    double check_ms = 0.0;
    double resolve_ms = 0.0;
};

/// Full pipeline: compile per-context policies, detect conflicts, resolve.
inline std::pair<GlobalPolicy, SolveDiagnostics> solve(const Clmdp& model,
                                                       double slack = 0.0,
                                                       double tolerance = 1e-6) {
    using clock = std::chrono::steady_clock;
    SolveDiagnostics diag;

    auto t0 = clock::now();
    auto [policy, per_context] = compile_global_policy(model, slack, tolerance);
    auto t1 = clock::now();
    ConflictReport report = conflict_checker(policy.actions, model.base);
    auto t2 = clock::now();
    diag.conflicts_after_compile =
        static_cast<int>(report.conflict_states.size());

    ResolveResult rr = conflict_resolver(model, policy, report, slack, tolerance);
    auto t3 = clock::now();

    diag.resolver_iterations = rr.iterations_used;
    diag.resolved = rr.resolved;
    auto ms = [](auto a, auto b) {
        return std::chrono::duration<double, std::milli>(b - a).count();
    };
    diag.compile_ms = ms(t0, t1);
    diag.check_ms = ms(t1, t2);
    diag.resolve_ms = ms(t2, t3);
    return {std::move(rr.policy), diag};
}

} // namespace clmdp
