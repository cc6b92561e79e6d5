// Tabular goal-oriented MDP: model types, validation, policy evaluation
// and masked value iteration. Everything else in the library builds on
// these primitives.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace clmdp {

/// One sparse successor entry of T(s,a,.).
struct Successor {
    int state;
    double prob;

    bool operator==(const Successor&) const = default;
};

/// Goal-oriented tabular MDP with sparse transitions. The goal state is
/// absorbing; states and actions are dense 0-based indices.
struct TabularMdp {
    int num_states = 0;
    int num_actions = 0;
    // transitions[s][a] -> sparse successor distribution
    std::vector<std::vector<std::vector<Successor>>> transitions;
    int goal_state = 0;
    std::vector<int> start_states;
    double discount = 0.95;

    const std::vector<Successor>& next(int s, int a) const {
        return transitions[s][a];
    }
};

/// Dense (state, action) -> reward. Rewards at the absorbing goal are zero.
struct RewardTable {
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> values; // row-major [s * num_actions + a]

    RewardTable() = default;
    RewardTable(int ns, int na, double fill = 0.0)
        : num_states(ns), num_actions(na),
          values(static_cast<size_t>(ns) * na, fill) {}

    double operator()(int s, int a) const {
        return values[static_cast<size_t>(s) * num_actions + a];
    }
    double& at(int s, int a) {
        return values[static_cast<size_t>(s) * num_actions + a];
    }
};

using ValueFunction = std::vector<double>;
using Policy = std::vector<int>;

/// Per-state allowed action subsets. A singleton set encodes a fixed action.
struct ActionMask {
    std::vector<std::vector<int>> allowed; // sorted action indices per state

    static ActionMask full(int num_states, int num_actions) {
        ActionMask m;
        std::vector<int> all(num_actions);
        for (int a = 0; a < num_actions; ++a) all[a] = a;
        m.allowed.assign(num_states, all);
        return m;
    }
    void fix(int s, int a) { allowed[s] = {a}; }
};

/// Dense Q-values; entries outside the mask are -inf.
struct QTable {
    int num_states = 0;
    int num_actions = 0;
    std::vector<double> values;

    QTable() = default;
    QTable(int ns, int na)
        : num_states(ns), num_actions(na),
          values(static_cast<size_t>(ns) * na,
                 -std::numeric_limits<double>::infinity()) {}

    double operator()(int s, int a) const {
        return values[static_cast<size_t>(s) * num_actions + a];
    }
    double& at(int s, int a) {
        return values[static_cast<size_t>(s) * num_actions + a];
    }
};

/// Checks all TabularMdp invariants. Returns an empty list iff the model is
/// well formed; each violation names the offending state/action pair.
inline std::vector<std::string> validate_mdp(const TabularMdp& mdp) {
    std::vector<std::string> violations;
    auto add = [&](const std::string& msg) { violations.push_back(msg); };

    if (mdp.num_states <= 0) add("num_states must be positive");
    if (mdp.num_actions <= 0) add("num_actions must be positive");
    if (!(mdp.discount > 0.0 && mdp.discount < 1.0))
        add("discount must lie in (0,1)");
    if (mdp.goal_state < 0 || mdp.goal_state >= mdp.num_states)
        add("goal_state out of range");
    if (mdp.start_states.empty()) add("start_states must be non-empty");
    for (int s : mdp.start_states)
        if (s < 0 || s >= mdp.num_states)
            add("start state " + std::to_string(s) + " out of range");
    if (static_cast<int>(mdp.transitions.size()) != mdp.num_states) {
        add("transitions not defined for every state");
        return violations;
    }

    for (int s = 0; s < mdp.num_states; ++s) {
        if (static_cast<int>(mdp.transitions[s].size()) != mdp.num_actions) {
            add("transitions not defined for every action at state " +
                std::to_string(s));
            continue;
        }
        for (int a = 0; a < mdp.num_actions; ++a) {
            double total = 0.0;
            for (const Successor& e : mdp.transitions[s][a]) {
                if (e.state < 0 || e.state >= mdp.num_states)
                    add("successor index out of range at (" +
                        std::to_string(s) + "," + std::to_string(a) + ")");
                if (e.prob <= 0.0 || e.prob > 1.0)
                    add("successor probability outside (0,1] at (" +
                        std::to_string(s) + "," + std::to_string(a) + ")");
                total += e.prob;
            }
            if (std::abs(total - 1.0) > 1e-9)
                add("probabilities sum to " + std::to_string(total) +
                    " at (" + std::to_string(s) + "," + std::to_string(a) +
                    ")");
        }
    }

    if (mdp.goal_state >= 0 && mdp.goal_state < mdp.num_states &&
        static_cast<int>(mdp.transitions.size()) == mdp.num_states) {
        const auto& rows = mdp.transitions[mdp.goal_state];
        for (int a = 0; a < static_cast<int>(rows.size()); ++a) {
            bool absorbing = rows[a].size() == 1 &&
                             rows[a][0].state == mdp.goal_state &&
                             std::abs(rows[a][0].prob - 1.0) <= 1e-9;
            if (!absorbing)
                add("goal not absorbing under action " + std::to_string(a));
        }
    }
    return violations;
}

namespace detail {

inline void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

// Stopping threshold that bounds the distance to the true fixed point by
// `tolerance`: sup-norm error after a sweep with delta d is d*g/(1-g).
inline double sweep_threshold(double tolerance, double discount) {
    return tolerance * (1.0 - discount) / discount;
}

} // namespace detail

/// Iterative evaluation of a fixed policy. The returned V satisfies the
/// Bellman fixed point for (policy, reward) within `tolerance` in sup-norm.
inline ValueFunction policy_evaluation(const TabularMdp& mdp,
                                       const Policy& policy,
                                       const RewardTable& reward,
                                       double tolerance = 1e-6) {
    detail::require(tolerance > 0.0, "policy_evaluation: tolerance must be > 0");
    detail::require(mdp.discount > 0.0 && mdp.discount < 1.0,
                    "policy_evaluation: discount must lie in (0,1)");
    detail::require(static_cast<int>(policy.size()) == mdp.num_states,
                    "policy_evaluation: policy must be total over states");

    ValueFunction v(mdp.num_states, 0.0);
    ValueFunction next(mdp.num_states, 0.0);
    const double threshold = detail::sweep_threshold(tolerance, mdp.discount);
    while (true) {
        double delta = 0.0;
        for (int s = 0; s < mdp.num_states; ++s) {
            int a = policy[s];
            double acc = reward(s, a);
            for (const Successor& e : mdp.next(s, a))
                acc += mdp.discount * e.prob * v[e.state];
            next[s] = acc;
            delta = std::max(delta, std::abs(acc - v[s]));
        }
        v.swap(next);
        if (delta < threshold) break;
    }
    return v;
}

struct ValueIterationResult {
    ValueFunction value;
    Policy policy;
    QTable q;
};

/// Value iteration restricted to mask-allowed actions. Greedy tie-breaking
/// is deterministic: the lowest allowed action index attaining the max.
/// States flagged in `pinned` keep their initial value from `v_init` and are
/// never backed up (used by the committed-partition baseline).
inline ValueIterationResult value_iteration(
    const TabularMdp& mdp, const RewardTable& reward, const ActionMask& mask,
    double tolerance = 1e-6, const std::vector<char>* pinned = nullptr,
    const ValueFunction* v_init = nullptr) {
    detail::require(tolerance > 0.0, "value_iteration: tolerance must be > 0");
    detail::require(mdp.discount > 0.0 && mdp.discount < 1.0,
                    "value_iteration: discount must lie in (0,1)");
    detail::require(static_cast<int>(mask.allowed.size()) == mdp.num_states,
                    "value_iteration: mask must be total over states");
    for (int s = 0; s < mdp.num_states; ++s)
        detail::require(!mask.allowed[s].empty(),
                        "value_iteration: empty mask at some state");

    ValueFunction v(mdp.num_states, 0.0);
    if (v_init) v = *v_init;
    ValueFunction next(mdp.num_states, 0.0);
    const double threshold = detail::sweep_threshold(tolerance, mdp.discount);

    while (true) {
        double delta = 0.0;
        for (int s = 0; s < mdp.num_states; ++s) {
            if (pinned && (*pinned)[s]) {
                next[s] = v[s];
                continue;
            }
            double best = -std::numeric_limits<double>::infinity();
            for (int a : mask.allowed[s]) {
                double acc = reward(s, a);
                for (const Successor& e : mdp.next(s, a))
                    acc += mdp.discount * e.prob * v[e.state];
                if (acc > best) best = acc;
            }
            next[s] = best;
            delta = std::max(delta, std::abs(best - v[s]));
        }
        v.swap(next);
        if (delta < threshold) break;
    }

    ValueIterationResult out;
    out.value = v;
    out.policy.assign(mdp.num_states, -1);
    out.q = QTable(mdp.num_states, mdp.num_actions);
    for (int s = 0; s < mdp.num_states; ++s) {
        double best = -std::numeric_limits<double>::infinity();
        int best_a = mask.allowed[s].front();
        for (int a : mask.allowed[s]) {
            double acc = reward(s, a);
            for (const Successor& e : mdp.next(s, a))
                acc += mdp.discount * e.prob * v[e.state];
            out.q.at(s, a) = acc;
            if (acc > best) {
                best = acc;
                best_a = a;
            }
        }
        out.policy[s] = best_a;
    }
    return out;
}

} // namespace clmdp
