// Benchmark harness: build domain instances, run every technique, execute
// seeded rollouts, compute the benchmark metrics and emit machine-readable
// reports (CSV + JSON with heatmap and min-objective data).

#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "clmdp/baselines.hpp"
#include "clmdp/domains.hpp"
#include "clmdp/inference.hpp"
#include "clmdp/serialize.hpp"
#include "clmdp/solver.hpp"

namespace clmdp {

struct ExperimentConfig {
    // Either a procedurally generated domain across instance seeds, or one
    // pre-built model.
    std::optional<Domain> domain;
    std::vector<unsigned long long> instance_seeds = {1, 2, 3, 4, 5};
    std::optional<Clmdp> model; // used when domain is not set

    std::vector<TechniqueId> techniques;
    int trials = 100;
    int max_steps = -1; // <0: defaults to 50 * |S|
    unsigned long long rollout_seed = 9001;
    double slack = 0.0;
    double tolerance = 1e-6;
    std::optional<double> gamma_override;
    std::vector<double> b3_weights; // empty: default geometric
    int expert_trajectories = 10;
    std::string out_dir = "reports";
    std::string format = "csv"; // csv | json (json always written)
    DomainRewards rewards;
};

struct InstanceMetrics {
    TechniqueId technique = TechniqueId::O1;
    unsigned long long instance_seed = 0;
    bool implemented = true;
    bool static_conflict = false;
    int static_conflict_states = 0;
    double percent_conflicts = 0.0;   // dynamic: trials that never reached goal
    double percent_goal_reached = 0.0;
    std::vector<double> normalized;   // per objective, clamped to [0,1]
    double min_objective = 0.0;
    std::vector<double> mean_return;  // undiscounted, per objective
    std::vector<double> mean_return_discounted;
    std::vector<double> best_value;   // normalization oracle cache
    std::vector<double> worst_value;
    double z_accuracy = -1.0;         // O2 only
};

struct ExperimentReport {
    std::vector<InstanceMetrics> rows;
    int num_objectives = 0;
};

namespace detail {

inline unsigned long long mix_seed(unsigned long long a, unsigned long long b,
                                   unsigned long long c) {
    unsigned long long x = a * 0x9E3779B97F4A7C15ULL + b;
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x += c;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
}

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace detail

/// Environment reward for objective i at (s,a): the true context's reward
/// vector evaluated there. All techniques are scored against this table.
inline RewardTable environment_reward(const Clmdp& model, int objective) {
    RewardTable r(model.base.num_states, model.base.num_actions);
    for (int s = 0; s < model.base.num_states; ++s) {
        const RewardTable& src = model.rewards_of(model.z[s]).objective(objective);
        for (int a = 0; a < model.base.num_actions; ++a)
            r.at(s, a) = src(s, a);
    }
    return r;
}

/// Builds the policy for a technique. Returns nullopt for B5 (reserved but
/// not implemented). For O2, fills z_accuracy_out.
inline std::optional<GlobalPolicy> technique_policy(
    const Clmdp& model, TechniqueId technique, const ExperimentConfig& cfg,
    unsigned long long instance_seed, double* z_accuracy_out = nullptr) {
    switch (technique) {
    case TechniqueId::B1: return b1_task_only(model, cfg.tolerance);
    case TechniqueId::B2: return b2_lmdp_omega(model, cfg.slack, cfg.tolerance);
    case TechniqueId::B3:
        return b3_scalarization(model, cfg.b3_weights, cfg.tolerance);
    case TechniqueId::B4: return b4_lmdp_contexts(model, cfg.slack, cfg.tolerance);
    case TechniqueId::B5: return std::nullopt;
    case TechniqueId::B6: return b6_no_resolver(model, cfg.slack, cfg.tolerance);
    case TechniqueId::O1:
        return solve(model, cfg.slack, cfg.tolerance).first;
    case TechniqueId::O2: {
        int max_steps = cfg.max_steps > 0 ? cfg.max_steps
                                          : 50 * model.base.num_states;
        TrajectoryDataset data = simulate_expert(
            model, cfg.expert_trajectories, max_steps,
            detail::mix_seed(cfg.rollout_seed, instance_seed, 0xE0ull),
            cfg.slack, cfg.tolerance);
        InferenceResult inferred = infer_z(model, data, cfg.slack, cfg.tolerance);
        if (z_accuracy_out)
            *z_accuracy_out =
                z_accuracy(model.z, inferred.z, model.num_contexts()).overall;
        Clmdp spliced = model;
        spliced.z = inferred.z;
        return solve(spliced, cfg.slack, cfg.tolerance).first;
    }
    }
    return std::nullopt;
}

/// Runs seeded rollouts of a policy on the true model and fills all metrics.
inline InstanceMetrics evaluate_policy(const Clmdp& model,
                                       const GlobalPolicy& policy,
                                       const ExperimentConfig& cfg,
                                       unsigned long long instance_seed) {
    const int n = model.num_objectives;
    const int max_steps =
        cfg.max_steps > 0 ? cfg.max_steps : 50 * model.base.num_states;

    InstanceMetrics m;
    m.instance_seed = instance_seed;
    ConflictReport static_report = conflict_checker(policy.actions, model.base);
    m.static_conflict = static_report.has_conflict;
    m.static_conflict_states =
        static_cast<int>(static_report.conflict_states.size());

    std::vector<RewardTable> env;
    for (int i = 0; i < n; ++i) env.push_back(environment_reward(model, i));

    int reached = 0;
    std::vector<double> sum_return(n, 0.0), sum_disc(n, 0.0);
    for (int trial = 0; trial < cfg.trials; ++trial) {
        std::mt19937_64 rng(
            detail::mix_seed(cfg.rollout_seed, instance_seed, trial));
        std::uniform_int_distribution<size_t> pick(
            0, model.base.start_states.size() - 1);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        int s = model.base.start_states[pick(rng)];
        double disc = 1.0;
        std::vector<double> ret(n, 0.0), dret(n, 0.0);
        for (int step = 0; step < max_steps && s != model.base.goal_state;
             ++step) {
            int a = policy.actions[s];
            for (int i = 0; i < n; ++i) {
                ret[i] += env[i](s, a);
                dret[i] += disc * env[i](s, a);
            }
            disc *= model.base.discount;
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
        if (s == model.base.goal_state) ++reached;
        for (int i = 0; i < n; ++i) {
            sum_return[i] += ret[i];
            sum_disc[i] += dret[i];
        }
    }

    m.percent_goal_reached = 100.0 * reached / cfg.trials;
    m.percent_conflicts = 100.0 * (cfg.trials - reached) / cfg.trials;
    m.mean_return.resize(n);
    m.mean_return_discounted.resize(n);
    for (int i = 0; i < n; ++i) {
        m.mean_return[i] = sum_return[i] / cfg.trials;
        m.mean_return_discounted[i] = sum_disc[i] / cfg.trials;
    }

    // Normalization oracle: per-objective best/worst mean undiscounted
    // return, measured by rolling out the objective's own greedy max-/min-
    // policy with the same seeded episode machinery used above.
    ActionMask full =
        ActionMask::full(model.base.num_states, model.base.num_actions);
    auto rollout_mean = [&](const Policy& pi, const RewardTable& r,
                            unsigned long long salt) {
        double total = 0.0;
        for (int trial = 0; trial < cfg.trials; ++trial) {
            std::mt19937_64 rng(detail::mix_seed(cfg.rollout_seed ^ salt,
                                                 instance_seed, trial));
            std::uniform_int_distribution<size_t> pick(
                0, model.base.start_states.size() - 1);
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            int s = model.base.start_states[pick(rng)];
            for (int step = 0; step < max_steps && s != model.base.goal_state;
                 ++step) {
                int a = pi[s];
                total += r(s, a);
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
        }
        return total / cfg.trials;
    };
    m.best_value.resize(n);
    m.worst_value.resize(n);
    m.normalized.resize(n);
    for (int i = 0; i < n; ++i) {
        Policy pi_max =
            value_iteration(model.base, env[i], full, cfg.tolerance).policy;
        RewardTable neg = env[i];
        for (double& v : neg.values) v = -v;
        Policy pi_min =
            value_iteration(model.base, neg, full, cfg.tolerance).policy;
        double best = rollout_mean(pi_max, env[i], 0xBE57ull * (i + 1));
        double worst = rollout_mean(pi_min, env[i], 0x1077ull * (i + 1));
        m.best_value[i] = best;
        m.worst_value[i] = worst;
        double denom = best - worst;
        double norm = denom > 1e-12 ? (m.mean_return[i] - worst) / denom : 1.0;
        m.normalized[i] = std::min(1.0, std::max(0.0, norm));
    }
    m.min_objective = *std::min_element(m.normalized.begin(), m.normalized.end());
    return m;
}

inline Clmdp build_instance(const ExperimentConfig& cfg,
                            unsigned long long seed) {
    Clmdp model;
    if (cfg.domain) {
        model = random_instance(*cfg.domain, seed, 8, 8, 0.1, {}, cfg.rewards)
                    .model;
    } else if (cfg.model) {
        model = *cfg.model;
    } else {
        throw std::invalid_argument("experiment config names no model or domain");
    }
    if (cfg.gamma_override) model.base.discount = *cfg.gamma_override;
    return model;
}

inline ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    detail::require(cfg.trials >= 1, "run_experiment: trials must be >= 1");
    detail::require(!cfg.techniques.empty(),
                    "run_experiment: techniques must be non-empty");
    ExperimentReport report;
    std::vector<unsigned long long> seeds =
        cfg.domain ? cfg.instance_seeds
                   : std::vector<unsigned long long>{cfg.instance_seeds.empty()
                                                         ? 0
                                                         : cfg.instance_seeds[0]};
    for (unsigned long long seed : seeds) {
        Clmdp model = build_instance(cfg, seed);
        report.num_objectives = model.num_objectives;
        for (TechniqueId technique : cfg.techniques) {
            double z_acc = -1.0;
            std::optional<GlobalPolicy> policy =
                technique_policy(model, technique, cfg, seed, &z_acc);
            InstanceMetrics m;
            if (!policy) {
                m.technique = technique;
                m.instance_seed = seed;
                m.implemented = false;
                m.normalized.assign(model.num_objectives, 0.0);
            } else {
                m = evaluate_policy(model, *policy, cfg, seed);
                m.technique = technique;
                m.z_accuracy = z_acc;
            }
            report.rows.push_back(std::move(m));
        }
    }
    return report;
}

/// O2-focused run: infer the mapping, solve, evaluate, report z accuracy.
inline ExperimentReport run_inference_experiment(ExperimentConfig cfg) {
    cfg.techniques = {TechniqueId::O2};
    return run_experiment(cfg);
}

inline std::string report_csv(const ExperimentReport& report) {
    std::ostringstream out;
    out << "technique,instance_seed,metric,value\n";
    for (const InstanceMetrics& m : report.rows) {
        auto row = [&](const std::string& metric, double value) {
            out << technique_name(m.technique) << ',' << m.instance_seed << ','
                << metric << ',' << detail::fmt_double(value) << '\n';
        };
        if (!m.implemented) {
            out << technique_name(m.technique) << ',' << m.instance_seed
                << ",implemented,0\n";
            continue;
        }
        row("static_conflict", m.static_conflict ? 1.0 : 0.0);
        row("static_conflict_states", m.static_conflict_states);
        row("percent_conflicts", m.percent_conflicts);
        row("percent_goal_reached", m.percent_goal_reached);
        for (size_t i = 0; i < m.normalized.size(); ++i)
            row("normalized_o" + std::to_string(i + 1), m.normalized[i]);
        for (size_t i = 0; i < m.mean_return.size(); ++i)
            row("mean_return_o" + std::to_string(i + 1), m.mean_return[i]);
        row("min_objective", m.min_objective);
        if (m.z_accuracy >= 0.0) row("z_accuracy", m.z_accuracy);
    }
    return out.str();
}

namespace detail {

struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0;
};

inline Aggregate aggregate(const std::vector<double>& xs) {
    Aggregate a;
    if (xs.empty()) return a;
    for (double x : xs) a.mean += x;
    a.mean /= xs.size();
    for (double x : xs) a.stddev += (x - a.mean) * (x - a.mean);
    a.stddev = std::sqrt(a.stddev / xs.size());
    return a;
}

} // namespace detail

inline json report_json(const ExperimentReport& report) {
    json doc;
    json rows = json::array();
    std::map<std::string, std::vector<const InstanceMetrics*>> by_technique;
    for (const InstanceMetrics& m : report.rows) {
        std::string name = technique_name(m.technique);
        by_technique[name].push_back(&m);
        json row;
        row["technique"] = name;
        row["instance_seed"] = m.instance_seed;
        row["implemented"] = m.implemented;
        if (m.implemented) {
            row["static_conflict"] = m.static_conflict;
            row["static_conflict_states"] = m.static_conflict_states;
            row["percent_conflicts"] = m.percent_conflicts;
            row["percent_goal_reached"] = m.percent_goal_reached;
            row["normalized"] = m.normalized;
            row["mean_return"] = m.mean_return;
            row["mean_return_discounted"] = m.mean_return_discounted;
            row["min_objective"] = m.min_objective;
            row["normalizer"] = {{"best", m.best_value}, {"worst", m.worst_value}};
            if (m.z_accuracy >= 0.0) row["z_accuracy"] = m.z_accuracy;
        }
        rows.push_back(std::move(row));
    }
    doc["instances"] = std::move(rows);

    json aggregates = json::object();
    json heatmap = json::object();
    json min_bars = json::object();
    for (const auto& [name, ms] : by_technique) {
        std::vector<double> conflicts, goal, min_obj;
        std::vector<std::vector<double>> norm(report.num_objectives);
        bool implemented = true;
        for (const InstanceMetrics* m : ms) {
            if (!m->implemented) {
                implemented = false;
                continue;
            }
            conflicts.push_back(m->percent_conflicts);
            goal.push_back(m->percent_goal_reached);
            min_obj.push_back(m->min_objective);
            for (int i = 0; i < report.num_objectives; ++i)
                norm[i].push_back(m->normalized[i]);
        }
        if (!implemented) {
            aggregates[name] = {{"implemented", false}};
            continue;
        }
        auto pack = [](detail::Aggregate a) {
            return json{{"mean", a.mean}, {"std", a.stddev}};
        };
        aggregates[name] = {
            {"percent_conflicts", pack(detail::aggregate(conflicts))},
            {"percent_goal_reached", pack(detail::aggregate(goal))},
            {"min_objective", pack(detail::aggregate(min_obj))}};
        json per_obj = json::array();
        for (int i = 0; i < report.num_objectives; ++i)
            per_obj.push_back(detail::aggregate(norm[i]).mean);
        heatmap[name] = std::move(per_obj);
        min_bars[name] = detail::aggregate(min_obj).mean;
    }
    doc["aggregates"] = std::move(aggregates);
    doc["heatmap"] = std::move(heatmap);        // technique -> per-objective mean
    doc["min_objective"] = std::move(min_bars); // technique -> mean min value
    return doc;
}

/// Writes report.csv, report.json, heatmap.csv and min_objective.csv under
/// out_dir. Fails before writing anything when the report is empty.
inline void emit_report(const ExperimentReport& report,
                        const std::string& out_dir) {
    if (report.rows.empty())
        throw std::invalid_argument("emit_report: empty report");
    std::filesystem::create_directories(out_dir);
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream out(std::filesystem::path(out_dir) / name,
                          std::ios::binary);
        if (!out) throw std::runtime_error("emit_report: cannot write " + name);
        out << text;
    };
    write("report.csv", report_csv(report));
    json doc = report_json(report);
    write("report.json", doc.dump(2) + "\n");

    std::ostringstream heat;
    heat << "technique";
    for (int i = 0; i < report.num_objectives; ++i) heat << ",o" << (i + 1);
    heat << '\n';
    for (auto& [name, values] : doc["heatmap"].items()) {
        heat << name;
        for (const json& v : values)
            heat << ',' << detail::fmt_double(v.get<double>());
        heat << '\n';
    }
    write("heatmap.csv", heat.str());

    std::ostringstream bars;
    bars << "technique,min_objective\n";
    for (auto& [name, v] : doc["min_objective"].items())
        bars << name << ',' << detail::fmt_double(v.get<double>()) << '\n';
    write("min_objective.csv", bars.str());
}

} // namespace clmdp
