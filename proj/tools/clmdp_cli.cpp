// Command-line experiment runner for contextual lexicographic planning:
// generate benchmark domains, solve them with any technique, check and
// resolve conflicts, infer state-context mappings, and run the full
// benchmark suite.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "clmdp/baselines.hpp"
#include "clmdp/domains.hpp"
#include "clmdp/experiment.hpp"
#include "clmdp/inference.hpp"
#include "clmdp/serialize.hpp"
#include "clmdp/solver.hpp"

using namespace clmdp;

int main(int argc, char** argv) {
    CLI::App app{"Contextual lexicographic MDP planner and benchmark harness"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate",
                                   "Generate a benchmark domain model file");
    std::string gen_domain = "salp", gen_config, gen_out = "model.json";
    unsigned long long gen_seed = 1;
    int gen_width = 8, gen_height = 8;
    double gen_slip = 0.1;
    gen->add_option("--domain", gen_domain, "salp | taxi | warehouse");
    gen->add_option("--config", gen_config, "domain config JSON file");
    gen->add_option("--seed", gen_seed, "layout seed");
    gen->add_option("--width", gen_width);
    gen->add_option("--height", gen_height);
    gen->add_option("--slip", gen_slip, "slip probability");
    gen->add_option("--out", gen_out, "output model file");

    // solve
    auto* sol = app.add_subcommand("solve",
                                   "Solve a model with a technique and write "
                                   "the policy");
    std::string sol_model, sol_technique = "O1", sol_out = "policy.json";
    double sol_slack = 0.0, sol_tolerance = 1e-6;
    double sol_gamma = -1.0;
    sol->add_option("--model", sol_model)->required();
    sol->add_option("--technique", sol_technique, "B1..B4, B6, O1, O2");
    sol->add_option("--slack", sol_slack);
    sol->add_option("--gamma", sol_gamma, "override model discount");
    sol->add_option("--out", sol_out);

    // check
    auto* chk = app.add_subcommand("check",
                                   "Run the conflict checker on a policy");
    std::string chk_model, chk_policy, chk_out;
    bool chk_log_space = false;
    chk->add_option("--model", chk_model)->required();
    chk->add_option("--policy", chk_policy)->required();
    chk->add_flag("--log-space", chk_log_space,
                  "accumulate reachability in log space");
    chk->add_option("--out", chk_out, "write report JSON here (else stdout)");

    // simulate-expert
    auto* sim = app.add_subcommand("simulate-expert",
                                   "Sample expert trajectories from a model");
    std::string sim_model, sim_out = "trajectories.json";
    int sim_trajectories = 10;
    unsigned long long sim_seed = 1;
    int sim_max_steps = -1;
    sim->add_option("--model", sim_model)->required();
    sim->add_option("--trajectories", sim_trajectories);
    sim->add_option("--seed", sim_seed);
    sim->add_option("--max-steps", sim_max_steps);
    sim->add_option("--out", sim_out);

    // infer
    auto* inf = app.add_subcommand("infer",
                                   "Infer the state-context mapping from "
                                   "expert trajectories");
    std::string inf_model, inf_trajectories, inf_out = "inferred_z.json";
    inf->add_option("--model", inf_model)->required();
    inf->add_option("--trajectories", inf_trajectories)->required();
    inf->add_option("--out", inf_out);

    // bench
    auto* ben = app.add_subcommand("bench", "Run the benchmark suite");
    std::string ben_config, ben_out, ben_format, ben_technique;
    long long ben_trials = -1;
    long long ben_seed = -1;
    double ben_gamma = -1.0, ben_slack = -1.0;
    ben->add_option("--config", ben_config, "experiment config JSON")
        ->required();
    ben->add_option("--out", ben_out, "output directory override");
    ben->add_option("--trials", ben_trials);
    ben->add_option("--seed", ben_seed, "rollout seed override");
    ben->add_option("--gamma", ben_gamma);
    ben->add_option("--slack", ben_slack);
    ben->add_option("--technique", ben_technique,
                    "run only this technique");
    ben->add_option("--format", ben_format, "csv | json");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            DomainConfig cfg;
            if (!gen_config.empty()) {
                cfg = domain_config_from_json(load_json_file(gen_config));
            } else {
                cfg.domain = domain_from_name(gen_domain);
                cfg.densities = default_densities(cfg.domain);
                cfg.seed = gen_seed;
                cfg.width = gen_width;
                cfg.height = gen_height;
                cfg.slip_probability = gen_slip;
            }
            DomainInstance inst = instance_from_config(cfg);
            save_json_file(gen_out, to_json(inst.model));
            std::cout << "wrote " << gen_out << " (" << inst.model.base.num_states
                      << " states, " << inst.model.num_contexts()
                      << " contexts)\n";
        } else if (sol->parsed()) {
            Clmdp model = clmdp_from_json(load_json_file(sol_model));
            if (sol_gamma > 0.0) model.base.discount = sol_gamma;
            TechniqueId technique = technique_from_name(sol_technique);
            ExperimentConfig cfg;
            cfg.slack = sol_slack;
            cfg.tolerance = sol_tolerance;
            double z_acc = -1.0;
            auto policy = technique_policy(model, technique, cfg, 0, &z_acc);
            if (!policy) throw std::runtime_error("technique not implemented");
            if (technique == TechniqueId::O1) {
                auto [p, diag] = solve(model, sol_slack, sol_tolerance);
                std::cout << "conflicts_after_compile="
                          << diag.conflicts_after_compile
                          << " resolver_iterations=" << diag.resolver_iterations
                          << " resolved=" << (diag.resolved ? "true" : "false")
                          << "\n";
            }
            save_json_file(sol_out, to_json(*policy));
            std::cout << "wrote " << sol_out << "\n";
        } else if (chk->parsed()) {
            Clmdp model = clmdp_from_json(load_json_file(chk_model));
            GlobalPolicy policy = policy_from_json(load_json_file(chk_policy));
            ConflictReport report =
                conflict_checker(policy.actions, model.base, chk_log_space);
            json doc = to_json(report);
            if (chk_out.empty())
                std::cout << doc.dump(2) << "\n";
            else
                save_json_file(chk_out, doc);
        } else if (sim->parsed()) {
            Clmdp model = clmdp_from_json(load_json_file(sim_model));
            int max_steps = sim_max_steps > 0 ? sim_max_steps
                                              : 50 * model.base.num_states;
            TrajectoryDataset data =
                simulate_expert(model, sim_trajectories, max_steps, sim_seed);
            save_json_file(sim_out, to_json(data));
            std::cout << "wrote " << sim_out << " ("
                      << data.trajectories.size() << " trajectories)\n";
        } else if (inf->parsed()) {
            Clmdp model = clmdp_from_json(load_json_file(inf_model));
            TrajectoryDataset data =
                dataset_from_json(load_json_file(inf_trajectories));
            InferenceResult result = infer_z(model, data);
            save_json_file(inf_out, to_json(result));
            std::cout << "wrote " << inf_out << "\n";
        } else if (ben->parsed()) {
            json doc = load_json_file(ben_config);
            ExperimentConfig cfg;
            if (doc.contains("domain"))
                cfg.domain = domain_from_name(doc.at("domain").get<std::string>());
            if (doc.contains("model_file"))
                cfg.model = clmdp_from_json(
                    load_json_file(doc.at("model_file").get<std::string>()));
            if (doc.contains("instance_seeds"))
                cfg.instance_seeds =
                    doc.at("instance_seeds")
                        .get<std::vector<unsigned long long>>();
            for (const json& t : doc.at("techniques"))
                cfg.techniques.push_back(
                    technique_from_name(t.get<std::string>()));
            if (doc.contains("trials")) cfg.trials = doc.at("trials").get<int>();
            if (doc.contains("max_steps"))
                cfg.max_steps = doc.at("max_steps").get<int>();
            if (doc.contains("rollout_seed"))
                cfg.rollout_seed =
                    doc.at("rollout_seed").get<unsigned long long>();
            if (doc.contains("slack")) cfg.slack = doc.at("slack").get<double>();
            if (doc.contains("tolerance"))
                cfg.tolerance = doc.at("tolerance").get<double>();
            if (doc.contains("gamma"))
                cfg.gamma_override = doc.at("gamma").get<double>();
            if (doc.contains("b3_weights"))
                cfg.b3_weights =
                    doc.at("b3_weights").get<std::vector<double>>();
            if (doc.contains("expert_trajectories"))
                cfg.expert_trajectories =
                    doc.at("expert_trajectories").get<int>();
            if (doc.contains("out_dir"))
                cfg.out_dir = doc.at("out_dir").get<std::string>();
            if (doc.contains("format"))
                cfg.format = doc.at("format").get<std::string>();

            if (ben_trials > 0) cfg.trials = static_cast<int>(ben_trials);
            if (ben_seed >= 0)
                cfg.rollout_seed = static_cast<unsigned long long>(ben_seed);
            if (ben_gamma > 0.0) cfg.gamma_override = ben_gamma;
            if (ben_slack >= 0.0) cfg.slack = ben_slack;
            if (!ben_out.empty()) cfg.out_dir = ben_out;
            if (!ben_format.empty()) cfg.format = ben_format;
            if (!ben_technique.empty())
                cfg.techniques = {technique_from_name(ben_technique)};

            ExperimentReport report = run_experiment(cfg);
            emit_report(report, cfg.out_dir);
            std::cout << "wrote " << cfg.out_dir << "/report.csv and "
                      << cfg.out_dir << "/report.json\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
