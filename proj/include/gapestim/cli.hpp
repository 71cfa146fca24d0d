#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gapestim/chain_json.hpp"
#include "gapestim/doubling.hpp"
#include "gapestim/experiment.hpp"
#include "gapestim/hks.hpp"
#include "gapestim/selfcheck.hpp"
#include "gapestim/trajectory.hpp"

namespace gapestim {

namespace cli_detail {

struct ChainOptions {
    ChainSpec spec;

    void attach(CLI::App* cmd) {
        cmd->add_option("--family", spec.family,
                        "two-state | lazy-cycle | complete | random-reversible");
        cmd->add_option("--p", spec.p, "two-state: 0 -> 1 transition probability");
        cmd->add_option("--q", spec.q, "two-state: 1 -> 0 transition probability");
        cmd->add_option("--n", spec.n, "state count for the n-parameterized families");
        cmd->add_option("--chain-seed", spec.seed, "random-reversible weight seed");
        cmd->add_option("--laziness", spec.laziness, "random-reversible holding probability");
        cmd->add_option("--chain-file", spec.path, "load the chain from a JSON file instead");
    }

    MarkovChain make() const {
        ChainSpec s = spec;
        if (!s.path.empty()) s.family = "file";
        if (s.family.empty())
            throw InvalidParameterError("specify --family or --chain-file");
        return s.make();
    }
};

inline void emit(const nlohmann::json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot open " + out_path + " for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError("write failed for " + out_path);
}

inline std::optional<std::int32_t> parse_start(const std::string& text) {
    if (text == "stationary") return std::nullopt;
    std::int32_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw InvalidParameterError("--start must be 'stationary' or a state index");
    return value;
}

inline nlohmann::json gap_estimate_to_json(const GapEstimate& est) {
    return {{"gamma_hat", est.gamma_hat},
            {"t_used", est.t_used},
            {"skip", est.skip},
            {"clamped", est.clamped},
            {"unvisited_states", est.unvisited_states}};
}

inline nlohmann::json doubling_result_to_json(const DoublingResult& res) {
    nlohmann::json levels = nlohmann::json::array();
    for (const LevelEstimate& lv : res.per_level)
        levels.push_back({{"k", lv.k},
                          {"a", lv.a},
                          {"steps_used", lv.steps_used},
                          {"gamma_hat_a", lv.gamma_hat}});
    nlohmann::json j{{"A", res.A},
                     {"per_level", levels},
                     {"terminated_normally", res.terminated_normally}};
    if (res.gamma_tilde) j["gamma_tilde"] = *res.gamma_tilde;
    if (!res.warning.empty()) j["warning"] = res.warning;
    return j;
}

} // namespace cli_detail

// Entry point shared by the binary and the tests. Exit codes: 0 success,
// 1 runtime failure, 2 usage error, 3 invalid input data.
inline int cli_main(std::vector<std::string> args) {
    CLI::App app{"spectral gap estimation for reversible Markov chains from a single trajectory",
                 "gapestim"};
    app.require_subcommand(1);

    // --- simulate ---------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "sample a trajectory and write it to a file");
    cli_detail::ChainOptions sim_chain;
    sim_chain.attach(sim);
    std::int64_t sim_t = 1000;
    std::uint64_t sim_seed = 1;
    std::string sim_start = "stationary";
    std::string sim_out;
    sim->add_option("--t", sim_t, "number of transitions")->required();
    sim->add_option("--seed", sim_seed, "generator seed");
    sim->add_option("--start", sim_start, "'stationary' or a fixed start state");
    sim->add_option("--out", sim_out, "output trajectory file")->required();

    // --- estimate ---------------------------------------------------------
    auto* est = app.add_subcommand("estimate", "plug-in gap estimate from a trajectory file");
    std::string est_traj;
    int est_n = 0;
    std::string est_out;
    est->add_option("--traj", est_traj, "trajectory file")->required();
    est->add_option("--n", est_n, "state-space size (default: from the file header)");
    est->add_option("--out", est_out, "write the JSON result here instead of stdout");

    // --- doubling ---------------------------------------------------------
    auto* dbl = app.add_subcommand("doubling", "skip-doubling gap estimate from a trajectory file");
    std::string dbl_traj;
    int dbl_n = 0;
    std::string dbl_out;
    DoublingConfig dbl_cfg;
    dbl->add_option("--traj", dbl_traj, "trajectory file")->required();
    dbl->add_option("--n", dbl_n, "state-space size (default: from the file header)");
    dbl->add_option("--epsilon", dbl_cfg.epsilon, "target relative error");
    dbl->add_option("--delta", dbl_cfg.delta, "failure probability budget");
    dbl->add_option("--C", dbl_cfg.C, "deviation-bound constant");
    dbl->add_option("--threshold-stop", dbl_cfg.threshold_stop, "stop once an estimate exceeds this");
    dbl->add_option("--max-k", dbl_cfg.max_k, "hard cap on doubling levels");
    dbl->add_option("--min-skipped-length", dbl_cfg.min_skipped_length,
                    "minimum skipped observations per level");
    dbl->add_option("--out", dbl_out, "write the JSON result here instead of stdout");

    // --- oracle -----------------------------------------------------------
    auto* ora = app.add_subcommand("oracle", "exact gap and sample-size formulas for a known chain");
    cli_detail::ChainOptions ora_chain;
    ora_chain.attach(ora);
    double ora_eps = 0.1, ora_delta = 0.1, ora_C = 1.0;
    std::int64_t ora_t = 0;
    std::string ora_out, ora_export;
    ora->add_option("--epsilon", ora_eps, "target relative error");
    ora->add_option("--delta", ora_delta, "failure probability budget");
    ora->add_option("--C", ora_C, "deviation-bound constant");
    ora->add_option("--t", ora_t, "planned trajectory length, checked against t0");
    ora->add_option("--export-chain", ora_export, "also write the chain JSON here");
    ora->add_option("--out", ora_out, "write the JSON result here instead of stdout");

    // --- experiment -------------------------------------------------------
    auto* exp = app.add_subcommand("experiment", "Monte Carlo sweep from a JSON spec file");
    std::string exp_spec;
    std::string exp_out;
    int exp_threads = 0;
    exp->add_option("--spec", exp_spec, "experiment spec JSON file")->required();
    exp->add_option("--out", exp_out, "output stem (overrides the spec's 'output')");
    exp->add_option("--threads", exp_threads,
                    "worker threads (default: GAPESTIM_THREADS or all cores)");

    // --- selfcheck --------------------------------------------------------
    auto* chk = app.add_subcommand("selfcheck", "run the built-in inequality and identity suites");

    try {
        std::reverse(args.begin(), args.end()); // CLI11 consumes the vector back to front
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sim->parsed()) {
            const MarkovChain chain = sim_chain.make();
            const Trajectory tr = simulate(chain, sim_t, sim_seed, cli_detail::parse_start(sim_start));
            save_trajectory(tr, sim_out);
            std::cout << nlohmann::json{{"written", sim_out},
                                        {"states", tr.length()},
                                        {"chain", tr.chain_id}}
                             .dump(2)
                      << "\n";
        } else if (est->parsed()) {
            const Trajectory tr = load_trajectory(est_traj);
            const int n = est_n > 0 ? est_n : tr.n;
            cli_detail::emit(cli_detail::gap_estimate_to_json(estimate_gap(tr, n)), est_out);
        } else if (dbl->parsed()) {
            const Trajectory tr = load_trajectory(dbl_traj);
            const int n = dbl_n > 0 ? dbl_n : tr.n;
            cli_detail::emit(cli_detail::doubling_result_to_json(estimate_gamma(tr, n, dbl_cfg)),
                             dbl_out);
        } else if (ora->parsed()) {
            const MarkovChain chain = ora_chain.make();
            const double gamma = exact_gap(chain).gamma;
            nlohmann::json j{{"label", chain.label()},
                             {"n", chain.n()},
                             {"gamma", gamma},
                             {"pi", chain.pi()},
                             {"pi_star", chain.pi_star()},
                             {"epsilon", ora_eps},
                             {"delta", ora_delta},
                             {"C", ora_C}};
            std::vector<std::string> warnings;
            if (gamma > 0.0) {
                const std::int64_t t0 =
                    t0_steps(ora_eps, ora_delta, gamma, chain.pi_star(), chain.n(), ora_C);
                j["delta_gamma"] = delta_split(ora_delta, gamma);
                j["t0"] = t0;
                j["t1"] = t1_steps(
                    HksParams{ora_C, ora_delta, chain.n(), chain.pi_star(), gamma, ora_eps});
                if (ora_t > 0) {
                    j["t"] = ora_t;
                    j["t_at_least_t0"] = ora_t >= t0;
                    if (ora_t < t0)
                        warnings.push_back("t < t0: the estimate carries no accuracy guarantee");
                }
            } else {
                warnings.push_back("chain has zero spectral gap; sample-size formulas are undefined");
            }
            if (ora_eps >= 0.22)
                warnings.push_back("epsilon >= 0.22 is outside the multiplicative guarantee regime");
            if (!warnings.empty()) j["warnings"] = warnings;
            if (!ora_export.empty()) save_chain(chain, ora_export);
            cli_detail::emit(j, ora_out);
        } else if (exp->parsed()) {
            std::ifstream in(exp_spec, std::ios::binary);
            if (!in) throw IoError("cannot open " + exp_spec + " for reading");
            nlohmann::json j;
            try {
                in >> j;
            } catch (const nlohmann::json::exception& e) {
                throw FormatError(exp_spec + ": invalid JSON: " + e.what());
            }
            ExperimentSpec spec = ExperimentSpec::from_json(j);
            if (!exp_out.empty()) spec.output = exp_out;
            if (spec.output.empty())
                throw InvalidParameterError("no output stem: set 'output' in the spec or pass --out");
            const ExperimentReport report = run_experiment(spec, exp_threads);
            write_report_files(report, spec.output);
            std::cout << nlohmann::json{{"csv", spec.output + ".csv"},
                                        {"json", spec.output + ".json"},
                                        {"rows", report.rows.size()}}
                             .dump(2)
                      << "\n";
        } else if (chk->parsed()) {
            const std::vector<SuiteResult> results = run_selfchecks();
            bool all_passed = true;
            for (const SuiteResult& r : results) {
                std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
                if (!r.passed) all_passed = false;
            }
            std::cout << (all_passed ? "selfcheck: all suites passed\n"
                                     : "selfcheck: FAILURES detected\n");
            if (!all_passed) return 1;
        }
    } catch (const Error& e) {
        std::cerr << nlohmann::json{{"error", e.kind()}, {"message", e.what()}}.dump() << "\n";
        return e.category() == ErrorCategory::validation ? 3 : 1;
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", "Internal"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }
    return 0;
}

} // namespace gapestim
