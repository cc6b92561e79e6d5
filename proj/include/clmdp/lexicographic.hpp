// Lexicographic value iteration: solve objectives in priority order,
// restricting each state's allowed actions to the near-optimal set after
// each objective pass.

#pragma once

#include <numeric>
#include <vector>

#include "clmdp/mdp.hpp"

namespace clmdp {

/// Permutation of objective indices, highest priority first.
struct ObjectiveOrdering {
    std::vector<int> order;

    bool is_permutation_of(int n) const {
        if (static_cast<int>(order.size()) != n) return false;
        std::vector<char> seen(n, 0);
        for (int i : order) {
            if (i < 0 || i >= n || seen[i]) return false;
            seen[i] = 1;
        }
        return true;
    }
};

/// One RewardTable per objective, all sharing the same (|S|,|A|) shape.
struct RewardVectorTable {
    std::vector<RewardTable> per_objective;

    int num_objectives() const {
        return static_cast<int>(per_objective.size());
    }
    const RewardTable& objective(int i) const { return per_objective[i]; }
};

struct LviResult {
    Policy policy;
    std::vector<ValueFunction> values; // per objective, priority order
    ActionMask final_mask;             // mask after the last shrink pass
};

/// Lexicographic value iteration under an externally supplied mask.
///
/// For each objective in priority order: value-iterate under the current
/// mask, then shrink each state's allowed set to actions whose Q is within
/// `slack` of the per-state max (with slack 0 the filter keeps the
/// tolerance-width argmax set). Singleton masks are honored throughout, so
/// actions fixed by the caller survive every pass.
inline LviResult lvi(const TabularMdp& mdp, const RewardVectorTable& rewards,
                     const ObjectiveOrdering& ordering, const ActionMask& mask,
                     double slack = 0.0, double tolerance = 1e-6) {
    detail::require(slack >= 0.0, "lvi: slack must be >= 0");
    detail::require(
        ordering.is_permutation_of(rewards.num_objectives()),
        "lvi: ordering must be a permutation of the objective indices");

    const double keep_width = std::max(slack, tolerance);
    ActionMask current = mask;
    LviResult out;
    out.values.reserve(ordering.order.size());

    for (size_t k = 0; k < ordering.order.size(); ++k) {
        const RewardTable& reward = rewards.objective(ordering.order[k]);
        ValueIterationResult vi = value_iteration(mdp, reward, current, tolerance);
        out.values.push_back(std::move(vi.value));
        out.policy = std::move(vi.policy);

        if (k + 1 < ordering.order.size()) {
            for (int s = 0; s < mdp.num_states; ++s) {
                double best = -std::numeric_limits<double>::infinity();
                for (int a : current.allowed[s]) best = std::max(best, vi.q(s, a));
                std::vector<int> kept;
                for (int a : current.allowed[s])
                    if (vi.q(s, a) >= best - keep_width) kept.push_back(a);
                current.allowed[s] = std::move(kept);
            }
        }
    }
    out.final_mask = std::move(current);
    return out;
}

} // namespace clmdp
