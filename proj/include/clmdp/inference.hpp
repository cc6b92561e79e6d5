// Bayesian inference of the state -> context mapping from limited expert
// trajectories, plus the expert simulator that generates that data.

#pragma once

#include <map>
#include <random>
#include <stdexcept>
#include <vector>

#include "clmdp/solver.hpp"

namespace clmdp {

struct TrajectoryStep {
    int state = 0;
    int action = 0;
    std::vector<double> observed_rewards; // length n
};

struct TrajectoryDataset {
    std::vector<std::vector<TrajectoryStep>> trajectories;
    unsigned long long rng_seed = 0;
};

/// Contexts whose single-context optimal policy agrees with the expert
/// action, for each (state, action) pair seen in the data.
struct PossibleContextsMap {
    std::map<std::pair<int, int>, std::vector<int>> contexts;
};

struct PosteriorTable {
    std::vector<std::vector<double>> probs; // [state][context]
    std::vector<char> zero_evidence;        // no context explained the data
};

struct InferenceResult {
    std::vector<int> z;
    PosteriorTable posterior;
    std::vector<Policy> context_policies;
};

/// Rolls out the conflict-free global policy from uniformly sampled start
/// states. Trajectories that hit the step cap before the goal are discarded
/// and re-sampled; each recorded step carries the true context's reward
/// vector at (s,a). The terminal step at the goal is recorded with zero
/// rewards so every trajectory ends at the goal state.
inline TrajectoryDataset simulate_expert(const Clmdp& model,
                                         int num_trajectories, int max_steps,
                                         unsigned long long seed,
                                         double slack = 0.0,
                                         double tolerance = 1e-6) {
    auto [policy, diag] = solve(model, slack, tolerance);
    if (!diag.resolved)
        throw std::runtime_error(
            "simulate_expert: model has no conflict-free policy");

    TrajectoryDataset data;
    data.rng_seed = seed;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<size_t> pick_start(
        0, model.base.start_states.size() - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const int n = model.num_objectives;
    const int retry_budget = 100;

    auto step_rewards = [&](int s, int a) {
        std::vector<double> r(n);
        const RewardVectorTable& rv = model.rewards_of(model.z[s]);
        for (int i = 0; i < n; ++i) r[i] = rv.objective(i)(s, a);
        return r;
    };

    for (int t = 0; t < num_trajectories; ++t) {
        bool done = false;
        for (int attempt = 0; attempt < retry_budget && !done; ++attempt) {
            std::vector<TrajectoryStep> traj;
            int s = model.base.start_states[pick_start(rng)];
            for (int step = 0; step < max_steps && s != model.base.goal_state;
                 ++step) {
                int a = policy.actions[s];
                traj.push_back({s, a, step_rewards(s, a)});
                double u = unit(rng);
                double acc = 0.0;
                int next = s;
                for (const Successor& e : model.base.next(s, a)) {
                    acc += e.prob;
                    if (u <= acc) {
                        next = e.state;
                        break;
                    }
                }
                s = next;
            }
            if (s == model.base.goal_state) {
                traj.push_back({s, policy.actions[s],
                                std::vector<double>(n, 0.0)});
                data.trajectories.push_back(std::move(traj));
                done = true;
            }
        }
        if (!done)
            throw std::runtime_error(
                "simulate_expert: could not produce a goal-reaching "
                "trajectory within the retry budget");
    }
    return data;
}

namespace detail {

inline bool rewards_match(const RewardVectorTable& rv, int s, int a,
                          const std::vector<double>& observed,
                          double tol = 1e-9) {
    if (static_cast<int>(observed.size()) != rv.num_objectives()) return false;
    for (int i = 0; i < rv.num_objectives(); ++i)
        if (std::abs(rv.objective(i)(s, a) - observed[i]) > tol) return false;
    return true;
}

} // namespace detail

/// Infers the state -> context mapping from expert data.
///
/// Per-context policies are computed as if each context covered the whole
/// state space. For states in the data, the posterior combines a 0/1 reward
/// likelihood, a 0/1 expert-action term gated on the possible-contexts set,
/// and an informed prior (frequency of the context in that set). States
/// outside the data fall back to the context's own policy action, its own
/// reward vector and a uniform prior. Ties, including the no-evidence case,
/// break toward the higher meta-ordering priority. The model's own `z` field
/// is never read.
inline InferenceResult infer_z(const Clmdp& model,
                               const TrajectoryDataset& dataset,
                               double slack = 0.0, double tolerance = 1e-6) {
    const int m = model.num_contexts();
    const int n_states = model.base.num_states;

    InferenceResult out;
    out.context_policies.resize(m);
    ActionMask full = ActionMask::full(n_states, model.base.num_actions);
    for (int c = 0; c < m; ++c)
        out.context_policies[c] = lvi(model.base, model.rewards_of(c),
                                      model.ordering_of(c), full, slack,
                                      tolerance)
                                      .policy;

    // Dataset occurrences grouped by state, and the possible-contexts sets.
    std::vector<std::vector<const TrajectoryStep*>> by_state(n_states);
    PossibleContextsMap possible;
    for (const auto& traj : dataset.trajectories) {
        for (const TrajectoryStep& step : traj) {
            by_state[step.state].push_back(&step);
            auto key = std::make_pair(step.state, step.action);
            if (!possible.contexts.count(key)) {
                std::vector<int> cs;
                for (int c = 0; c < m; ++c)
                    if (out.context_policies[c][step.state] == step.action)
                        cs.push_back(c);
                possible.contexts[key] = std::move(cs);
            }
        }
    }

    out.posterior.probs.assign(n_states, std::vector<double>(m, 0.0));
    out.posterior.zero_evidence.assign(n_states, 0);
    out.z.assign(n_states, -1);

    for (int s = 0; s < n_states; ++s) {
        std::vector<double>& post = out.posterior.probs[s];

        bool in_data = false;
        for (const TrajectoryStep* step : by_state[s]) {
            const auto& ps = possible.contexts.at({s, step->action});
            if (ps.empty()) continue; // no context explains this pair
            in_data = true;
            double prior_unit = 1.0 / static_cast<double>(ps.size());
            for (int c : ps)
                if (detail::rewards_match(model.rewards_of(c), s, step->action,
                                          step->observed_rewards))
                    post[c] += prior_unit;
        }

        if (!in_data) {
            // Uniform prior; the context's policy action with its own reward
            // vector makes both 0/1 terms equal to one.
            for (int c = 0; c < m; ++c) post[c] = 1.0 / m;
        }

        double total = 0.0;
        for (double p : post) total += p;
        if (total <= 0.0) {
            out.posterior.zero_evidence[s] = 1;
            for (int c = 0; c < m; ++c) post[c] = 1.0 / m;
            total = 1.0;
        }
        for (double& p : post) p /= total;

        // Argmax with ties broken by meta-ordering priority: scan contexts
        // in Omega order and keep the first strict maximum.
        int best = model.meta_ordering.front();
        for (int p = 0; p < m; ++p) {
            int c = model.meta_ordering[p];
            if (post[c] > post[best] + 1e-12) best = c;
        }
        out.z[s] = best;
    }
    return out;
}

struct ZAccuracy {
    double overall = 0.0;
    std::vector<std::vector<int>> confusion; // [true][inferred]
};

inline ZAccuracy z_accuracy(const std::vector<int>& true_z,
                            const std::vector<int>& inferred_z,
                            int num_contexts) {
    detail::require(true_z.size() == inferred_z.size(),
                    "z_accuracy: mappings must cover the same states");
    ZAccuracy out;
    out.confusion.assign(num_contexts, std::vector<int>(num_contexts, 0));
    int agree = 0;
    for (size_t s = 0; s < true_z.size(); ++s) {
        out.confusion[true_z[s]][inferred_z[s]] += 1;
        if (true_z[s] == inferred_z[s]) ++agree;
    }
    out.overall = true_z.empty()
                      ? 1.0
                      : static_cast<double>(agree) / true_z.size();
    return out;
}

} // namespace clmdp
