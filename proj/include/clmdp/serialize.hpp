// JSON (de)serialization for models, policies, trajectories, conflict
// reports and domain configs. Document layouts are stable so identical
// inputs serialize byte-identically.

#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "clmdp/domains.hpp"
#include "clmdp/inference.hpp"
#include "clmdp/solver.hpp"

namespace clmdp {

using json = nlohmann::ordered_json;

inline json to_json(const TabularMdp& mdp) {
    json doc;
    doc["num_states"] = mdp.num_states;
    doc["num_actions"] = mdp.num_actions;
    doc["goal_state"] = mdp.goal_state;
    doc["start_states"] = mdp.start_states;
    doc["discount"] = mdp.discount;
    json rows = json::array();
    for (int s = 0; s < mdp.num_states; ++s)
        for (int a = 0; a < mdp.num_actions; ++a) {
            json next = json::array();
            for (const Successor& e : mdp.next(s, a))
                next.push_back({{"sp", e.state}, {"p", e.prob}});
            rows.push_back({{"s", s}, {"a", a}, {"next", std::move(next)}});
        }
    doc["transitions"] = std::move(rows);
    return doc;
}

inline TabularMdp mdp_from_json(const json& doc) {
    TabularMdp mdp;
    mdp.num_states = doc.at("num_states").get<int>();
    mdp.num_actions = doc.at("num_actions").get<int>();
    mdp.goal_state = doc.at("goal_state").get<int>();
    mdp.start_states = doc.at("start_states").get<std::vector<int>>();
    mdp.discount = doc.at("discount").get<double>();
    mdp.transitions.assign(
        mdp.num_states, std::vector<std::vector<Successor>>(mdp.num_actions));
    for (const json& row : doc.at("transitions")) {
        int s = row.at("s").get<int>();
        int a = row.at("a").get<int>();
        for (const json& e : row.at("next"))
            mdp.transitions.at(s).at(a).push_back(
                {e.at("sp").get<int>(), e.at("p").get<double>()});
    }
    return mdp;
}

inline json to_json(const Clmdp& model) {
    json doc = to_json(model.base);
    doc["num_objectives"] = model.num_objectives;
    json contexts = json::array();
    for (const ContextDescriptor& c : model.contexts)
        contexts.push_back({{"name", c.name},
                            {"ordering", c.ordering_id},
                            {"rewards", c.rewards_id}});
    doc["contexts"] = std::move(contexts);
    doc["meta_ordering"] = model.meta_ordering;
    json orderings = json::array();
    for (const ObjectiveOrdering& o : model.orderings)
        orderings.push_back(o.order);
    doc["orderings"] = std::move(orderings);
    json rvs = json::array();
    for (const RewardVectorTable& rv : model.reward_vectors) {
        json tables = json::array();
        for (const RewardTable& t : rv.per_objective) tables.push_back(t.values);
        rvs.push_back(std::move(tables));
    }
    doc["reward_vectors"] = std::move(rvs);
    doc["z"] = model.z;
    return doc;
}

inline Clmdp clmdp_from_json(const json& doc) {
    Clmdp model;
    model.base = mdp_from_json(doc);
    model.num_objectives = doc.at("num_objectives").get<int>();
    for (const json& c : doc.at("contexts"))
        model.contexts.push_back({c.at("name").get<std::string>(),
                                  c.at("ordering").get<int>(),
                                  c.at("rewards").get<int>()});
    model.meta_ordering = doc.at("meta_ordering").get<std::vector<int>>();
    for (const json& o : doc.at("orderings"))
        model.orderings.push_back({o.get<std::vector<int>>()});
    for (const json& rv : doc.at("reward_vectors")) {
        RewardVectorTable table;
        for (const json& t : rv) {
            RewardTable r(model.base.num_states, model.base.num_actions);
            r.values = t.get<std::vector<double>>();
            table.per_objective.push_back(std::move(r));
        }
        model.reward_vectors.push_back(std::move(table));
    }
    // z may be absent when the mapping is to be inferred.
    if (doc.contains("z") && !doc.at("z").is_null())
        model.z = doc.at("z").get<std::vector<int>>();
    else
        model.z.assign(model.base.num_states, model.meta_ordering.front());
    return model;
}

inline json to_json(const GlobalPolicy& policy) {
    json entries = json::array();
    for (size_t s = 0; s < policy.actions.size(); ++s)
        entries.push_back({{"state", static_cast<int>(s)},
                           {"action", policy.actions[s]},
                           {"provenance", policy.provenance[s]}});
    return json{{"policy", std::move(entries)}};
}

inline GlobalPolicy policy_from_json(const json& doc) {
    const json& entries = doc.at("policy");
    GlobalPolicy g;
    g.actions.resize(entries.size());
    g.provenance.resize(entries.size());
    for (const json& e : entries) {
        int s = e.at("state").get<int>();
        g.actions.at(s) = e.at("action").get<int>();
        g.provenance.at(s) = e.at("provenance").get<int>();
    }
    return g;
}

inline json to_json(const ConflictReport& report) {
    return json{{"has_conflict", report.has_conflict},
                {"conflict_states", report.conflict_states},
                {"reachability", report.reachability}};
}

inline json to_json(const TrajectoryDataset& data) {
    json trajectories = json::array();
    for (const auto& traj : data.trajectories) {
        json steps = json::array();
        for (const TrajectoryStep& step : traj)
            steps.push_back({{"state", step.state},
                             {"action", step.action},
                             {"rewards", step.observed_rewards}});
        trajectories.push_back(std::move(steps));
    }
    return json{{"seed", data.rng_seed},
                {"trajectories", std::move(trajectories)}};
}

inline TrajectoryDataset dataset_from_json(const json& doc) {
    TrajectoryDataset data;
    data.rng_seed = doc.at("seed").get<unsigned long long>();
    for (const json& traj : doc.at("trajectories")) {
        std::vector<TrajectoryStep> steps;
        for (const json& step : traj)
            steps.push_back({step.at("state").get<int>(),
                             step.at("action").get<int>(),
                             step.at("rewards").get<std::vector<double>>()});
        data.trajectories.push_back(std::move(steps));
    }
    return data;
}

inline json to_json(const InferenceResult& result) {
    return json{{"z", result.z},
                {"posterior", result.posterior.probs},
                {"zero_evidence", result.posterior.zero_evidence}};
}

/// Domain generation config: domain name, GridSpec fields or densities for
/// procedural sampling, reward-magnitude overrides.
struct DomainConfig {
    Domain domain = Domain::Salp;
    unsigned long long seed = 0;
    int width = 8;
    int height = 8;
    double slip_probability = 0.1;
    DomainRewards rewards;
    FeatureDensities densities;
    bool custom_densities = false;
};

inline DomainConfig domain_config_from_json(const json& doc) {
    DomainConfig cfg;
    cfg.domain = domain_from_name(doc.at("domain").get<std::string>());
    cfg.densities = default_densities(cfg.domain);
    if (doc.contains("seed")) cfg.seed = doc.at("seed").get<unsigned long long>();
    if (doc.contains("width")) cfg.width = doc.at("width").get<int>();
    if (doc.contains("height")) cfg.height = doc.at("height").get<int>();
    if (doc.contains("slip_probability"))
        cfg.slip_probability = doc.at("slip_probability").get<double>();
    if (doc.contains("goal_reward"))
        cfg.rewards.goal_reward = doc.at("goal_reward").get<double>();
    if (doc.contains("step_cost"))
        cfg.rewards.step_cost = doc.at("step_cost").get<double>();
    if (doc.contains("primary_penalty"))
        cfg.rewards.primary_penalty = doc.at("primary_penalty").get<double>();
    if (doc.contains("secondary_penalty"))
        cfg.rewards.secondary_penalty =
            doc.at("secondary_penalty").get<double>();
    if (doc.contains("primary_density")) {
        cfg.densities.primary = doc.at("primary_density").get<double>();
        cfg.custom_densities = true;
    }
    if (doc.contains("secondary_density")) {
        cfg.densities.secondary = doc.at("secondary_density").get<double>();
        cfg.custom_densities = true;
    }
    return cfg;
}

inline DomainInstance instance_from_config(const DomainConfig& cfg) {
    return random_instance(cfg.domain, cfg.seed, cfg.width, cfg.height,
                           cfg.slip_probability, cfg.densities, cfg.rewards,
                           !cfg.custom_densities);
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    json doc;
    in >> doc;
    return doc;
}

inline void save_json_file(const std::string& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << doc.dump(2) << '\n';
}

} // namespace clmdp
