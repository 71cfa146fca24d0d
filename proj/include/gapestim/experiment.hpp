#pragma once

#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gapestim/chain.hpp"
#include "gapestim/chain_json.hpp"
#include "gapestim/doubling.hpp"
#include "gapestim/hks.hpp"
#include "gapestim/trajectory.hpp"

namespace gapestim {

// ---------------------------------------------------------------------------
// chain families usable from spec files and the CLI

struct ChainSpec {
    std::string family; // two-state | lazy-cycle | complete | random-reversible | file
    double p = 0.25;
    double q = 0.25;
    int n = 2;
    std::uint64_t seed = 1;
    double laziness = 0.75;
    std::string path; // family == file

    MarkovChain make() const {
        if (family == "two-state") return make_two_state(p, q);
        if (family == "lazy-cycle") return make_lazy_cycle(n);
        if (family == "complete") return make_complete_graph(n);
        if (family == "random-reversible") return make_random_reversible(n, seed, laziness);
        if (family == "file") return load_chain(path);
        throw InvalidParameterError("unknown chain family '" + family + "'");
    }

    static ChainSpec from_json(const nlohmann::json& j) {
        if (!j.is_object() || !j.contains("family"))
            throw ValidationError("chain spec must contain \"family\"");
        ChainSpec s;
        s.family = j.at("family").get<std::string>();
        if (j.contains("p")) s.p = j.at("p").get<double>();
        if (j.contains("q")) s.q = j.at("q").get<double>();
        if (j.contains("n")) s.n = j.at("n").get<int>();
        if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("laziness")) s.laziness = j.at("laziness").get<double>();
        if (j.contains("path")) s.path = j.at("path").get<std::string>();
        return s;
    }

    nlohmann::json to_json() const {
        nlohmann::json j{{"family", family}};
        if (family == "two-state") {
            j["p"] = p;
            j["q"] = q;
        } else if (family == "file") {
            j["path"] = path;
        } else {
            j["n"] = n;
            if (family == "random-reversible") {
                j["seed"] = seed;
                j["laziness"] = laziness;
            }
        }
        return j;
    }
};

// ---------------------------------------------------------------------------
// experiment specification (JSON, versioned)

struct ExperimentSpec {
    int version = 1;
    ChainSpec chain;
    std::vector<std::int64_t> lengths;
    int replicas = 1;
    std::uint64_t base_seed = 1;
    std::string estimator = "doubling"; // or "hks"
    DoublingConfig cfg;
    std::string output; // path stem for <stem>.csv / <stem>.json

    void validate() const {
        if (version != 1) throw ValidationError("unsupported experiment spec version");
        if (lengths.empty()) throw InvalidParameterError("lengths must be non-empty");
        std::int64_t prev = 0;
        for (std::int64_t t : lengths) {
            if (t < 1) throw InvalidParameterError("lengths must be positive");
            if (t <= prev && prev != 0)
                throw InvalidParameterError("lengths must be strictly ascending");
            prev = t;
        }
        if (replicas < 1) throw InvalidParameterError("replicas must be >= 1");
        if (estimator != "hks" && estimator != "doubling")
            throw InvalidParameterError("estimator must be \"hks\" or \"doubling\"");
        cfg.validate();
    }

    static ExperimentSpec from_json(const nlohmann::json& j) {
        if (!j.is_object()) throw ValidationError("experiment spec must be a JSON object");
        ExperimentSpec s;
        s.version = j.value("version", 1);
        if (!j.contains("chain")) throw ValidationError("experiment spec must contain \"chain\"");
        s.chain = ChainSpec::from_json(j.at("chain"));
        s.lengths = j.value("lengths", std::vector<std::int64_t>{});
        s.replicas = j.value("replicas", 1);
        s.base_seed = j.value("base_seed", std::uint64_t{1});
        s.estimator = j.value("estimator", std::string("doubling"));
        if (j.contains("config")) {
            const auto& c = j.at("config");
            s.cfg.epsilon = c.value("epsilon", s.cfg.epsilon);
            s.cfg.delta = c.value("delta", s.cfg.delta);
            s.cfg.C = c.value("C", s.cfg.C);
            s.cfg.threshold_stop = c.value("threshold_stop", s.cfg.threshold_stop);
            s.cfg.band_low = c.value("band_low", s.cfg.band_low);
            s.cfg.band_high = c.value("band_high", s.cfg.band_high);
            s.cfg.max_k = c.value("max_k", s.cfg.max_k);
            s.cfg.min_skipped_length = c.value("min_skipped_length", s.cfg.min_skipped_length);
        }
        s.output = j.value("output", std::string());
        s.validate();
        return s;
    }

    nlohmann::json to_json() const {
        return nlohmann::json{{"version", version},
                              {"chain", chain.to_json()},
                              {"lengths", lengths},
                              {"replicas", replicas},
                              {"base_seed", base_seed},
                              {"estimator", estimator},
                              {"config",
                               {{"epsilon", cfg.epsilon},
                                {"delta", cfg.delta},
                                {"C", cfg.C},
                                {"threshold_stop", cfg.threshold_stop},
                                {"band_low", cfg.band_low},
                                {"band_high", cfg.band_high},
                                {"max_k", cfg.max_k},
                                {"min_skipped_length", cfg.min_skipped_length}}},
                              {"output", output}};
    }
};

// ---------------------------------------------------------------------------
// results

struct ReplicaOutcome {
    bool failed = false;
    double estimate = 0.0;
    double rel_error = 0.0;
    std::uint64_t A = 1;
    std::string error;
};

struct ReportRow {
    std::int64_t t = 0;
    int replicas = 0;
    double success_rate = 0.0;
    double err_median = 0.0;
    double err_p90 = 0.0;
    double mean_A = 0.0;
    int failed = 0;
    double wall_ms = 0.0; // informational; kept out of the CSV
};

struct ExperimentReport {
    ExperimentSpec spec;
    std::string chain_label;
    int n = 0;
    double gamma = 0.0;
    double pi_star = 0.0;
    std::int64_t t0 = 0;
    std::int64_t t1 = 0;
    std::vector<ReportRow> rows;
};

inline int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("GAPESTIM_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace detail {

template <typename Body>
void parallel_for(int count, int threads, Body&& body) {
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int w = 0; w < threads; ++w) {
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

// Deterministic linear-interpolation quantile of an ascending vector.
inline double quantile(const std::vector<double>& sorted, double p) {
    if (sorted.empty()) return std::nan("");
    if (sorted.size() == 1) return sorted[0];
    const double pos = p * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

inline std::string format_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace detail

// Runs the configured estimator over replicas x lengths. Replica r of any
// length uses seed base_seed + r, so both estimators can be compared on
// identical trajectories and reruns are byte-reproducible. Replicas execute
// in parallel; aggregation is by replica index, so the thread count does not
// affect the report.
inline ExperimentReport run_experiment(const ExperimentSpec& spec, int threads = 0) {
    spec.validate();
    const MarkovChain chain = spec.chain.make();
    const double gamma = exact_gap(chain).gamma;
    if (!(gamma > 0.0))
        throw InvalidParameterError("experiment chain has zero spectral gap; nothing to estimate");

    ExperimentReport report;
    report.spec = spec;
    report.chain_label = chain.label();
    report.n = chain.n();
    report.gamma = gamma;
    report.pi_star = chain.pi_star();
    report.t0 = t0_steps(spec.cfg.epsilon, spec.cfg.delta, gamma, chain.pi_star(), chain.n(),
                         spec.cfg.C);
    report.t1 = t1_steps(
        HksParams{spec.cfg.C, spec.cfg.delta, chain.n(), chain.pi_star(), gamma, spec.cfg.epsilon});

    const int nthreads = resolve_thread_count(threads);
    for (const std::int64_t t : spec.lengths) {
        std::vector<ReplicaOutcome> outcomes(spec.replicas);
        const auto t_start = std::chrono::steady_clock::now();
        detail::parallel_for(spec.replicas, nthreads, [&](int r) {
            ReplicaOutcome& out = outcomes[r];
            try {
                const Trajectory tr = simulate(chain, t, spec.base_seed + static_cast<std::uint64_t>(r));
                if (spec.estimator == "hks") {
                    out.estimate = estimate_gap(tr, chain.n()).gamma_hat;
                    out.A = 1;
                } else {
                    const DoublingResult res = estimate_gamma(tr, chain.n(), spec.cfg);
                    out.estimate = *res.gamma_tilde;
                    out.A = res.A;
                }
                out.rel_error = std::abs(out.estimate / gamma - 1.0);
            } catch (const Error& e) {
                out.failed = true;
                out.error = e.what();
            } catch (const std::exception& e) {
                out.failed = true;
                out.error = e.what();
            }
        });
        const auto t_end = std::chrono::steady_clock::now();

        ReportRow row;
        row.t = t;
        row.replicas = spec.replicas;
        row.wall_ms = std::chrono::duration<double, std::milli>(t_end - t_start).count();
        std::vector<double> errors;
        errors.reserve(spec.replicas);
        double a_sum = 0.0;
        int successes = 0;
        for (const ReplicaOutcome& out : outcomes) {
            if (out.failed) {
                ++row.failed;
                continue;
            }
            errors.push_back(out.rel_error);
            a_sum += static_cast<double>(out.A);
            if (out.rel_error < spec.cfg.epsilon) ++successes;
        }
        std::sort(errors.begin(), errors.end());
        row.success_rate = static_cast<double>(successes) / spec.replicas;
        row.err_median = detail::quantile(errors, 0.5);
        row.err_p90 = detail::quantile(errors, 0.9);
        row.mean_A = errors.empty() ? std::nan("") : a_sum / static_cast<double>(errors.size());
        report.rows.push_back(row);
    }
    return report;
}

// One CSV row per trajectory length; floats at 12 significant digits so that
// identical specs reproduce the file byte for byte.
inline std::string report_to_csv(const ExperimentReport& report) {
    std::string csv = "family,n,t,replicas,estimator,gamma,pi_star,t0,t1,"
                      "success_rate,err_median,err_p90,mean_A,failed\n";
    for (const ReportRow& row : report.rows) {
        csv += report.spec.chain.family + "," + std::to_string(report.n) + "," +
               std::to_string(row.t) + "," + std::to_string(row.replicas) + "," +
               report.spec.estimator + "," + detail::format_g12(report.gamma) + "," +
               detail::format_g12(report.pi_star) + "," + std::to_string(report.t0) + "," +
               std::to_string(report.t1) + "," + detail::format_g12(row.success_rate) + "," +
               detail::format_g12(row.err_median) + "," + detail::format_g12(row.err_p90) + "," +
               detail::format_g12(row.mean_A) + "," + std::to_string(row.failed) + "\n";
    }
    return csv;
}

inline nlohmann::json report_to_json(const ExperimentReport& report) {
    nlohmann::json rows = nlohmann::json::array();
    for (const ReportRow& row : report.rows) {
        rows.push_back({{"t", row.t},
                        {"replicas", row.replicas},
                        {"success_rate", row.success_rate},
                        {"err_median", row.err_median},
                        {"err_p90", row.err_p90},
                        {"mean_A", row.mean_A},
                        {"failed", row.failed},
                        {"wall_ms", row.wall_ms}});
    }
    return nlohmann::json{{"spec", report.spec.to_json()},
                          {"chain",
                           {{"label", report.chain_label},
                            {"n", report.n},
                            {"gamma", report.gamma},
                            {"pi_star", report.pi_star},
                            {"t0", report.t0},
                            {"t1", report.t1}}},
                          {"rows", rows}};
}

inline void write_report_files(const ExperimentReport& report, const std::string& stem) {
    {
        std::ofstream csv(stem + ".csv", std::ios::binary);
        if (!csv) throw IoError("cannot open " + stem + ".csv for writing");
        csv << report_to_csv(report);
        if (!csv) throw IoError("write failed for " + stem + ".csv");
    }
    {
        std::ofstream js(stem + ".json", std::ios::binary);
        if (!js) throw IoError("cannot open " + stem + ".json for writing");
        js << report_to_json(report).dump(2) << "\n";
        if (!js) throw IoError("write failed for " + stem + ".json");
    }
}

} // namespace gapestim
