#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gapestim/chain.hpp"

namespace gapestim {

// Wire format: {"n": int, "P": [[...], ...], "pi": [...] (optional),
// "label": string (optional)}.
inline nlohmann::json chain_to_json(const MarkovChain& c) {
    nlohmann::json j;
    j["n"] = c.n();
    auto rows = nlohmann::json::array();
    for (int i = 0; i < c.n(); ++i) {
        auto row = nlohmann::json::array();
        for (int k = 0; k < c.n(); ++k) row.push_back(c.kernel()(i, k));
        rows.push_back(std::move(row));
    }
    j["P"] = std::move(rows);
    j["pi"] = c.pi();
    if (!c.label().empty()) j["label"] = c.label();
    return j;
}

// Parse and validate an externally supplied chain. Rows must be stochastic,
// the chain irreducible and reversible (detailed-balance residual <= 1e-8
// against the stationary distribution), and the symmetrized kernel free of
// eigenvalues below -1e-10; anything else is rejected.
inline MarkovChain chain_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("P"))
        throw ValidationError("chain JSON must contain \"n\" and \"P\"");
    const int n = j.at("n").get<int>();
    if (n < 2) throw ValidationError("chain JSON needs n >= 2");
    const auto& rows = j.at("P");
    if (!rows.is_array() || static_cast<int>(rows.size()) != n)
        throw ValidationError("\"P\" must be an n-row matrix");

    DenseMatrix P(n);
    for (int i = 0; i < n; ++i) {
        const auto& row = rows.at(i);
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw ValidationError("row " + std::to_string(i) + " of \"P\" must have length n");
        for (int k = 0; k < n; ++k) {
            const double v = row.at(k).get<double>();
            if (!std::isfinite(v) || v < 0.0)
                throw ValidationError("kernel entries must be finite and nonnegative");
            P(i, k) = v;
        }
    }
    try {
        detail::check_row_stochastic(P, 1e-8);
    } catch (const NotStochasticError& e) {
        throw ValidationError(std::string("chain JSON rejected: ") + e.what());
    }

    std::vector<double> pi;
    if (j.contains("pi")) {
        pi = j.at("pi").get<std::vector<double>>();
        if (static_cast<int>(pi.size()) != n)
            throw ValidationError("\"pi\" must have length n");
        double sum = 0.0;
        for (double v : pi) {
            if (!(v > 0.0)) throw ValidationError("\"pi\" entries must be positive");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-8) throw ValidationError("\"pi\" must sum to 1");
        for (double& v : pi) v /= sum;
    } else {
        try {
            pi = stationary_distribution(P, 1e-10);
        } catch (const Error& e) {
            throw ValidationError(std::string("chain JSON rejected: ") + e.what());
        }
    }

    const std::string label = j.value("label", std::string("external"));
    try {
        return MarkovChain::create(std::move(P), std::move(pi), label, 1e-8, 1e-8);
    } catch (const Error& e) {
        throw ValidationError(std::string("chain JSON rejected: ") + e.what());
    }
}

inline void save_chain(const MarkovChain& c, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << chain_to_json(c).dump(2) << "\n";
    if (!out) throw IoError("write failed for " + path);
}

inline MarkovChain load_chain(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for reading");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path + ": invalid JSON: " + e.what());
    }
    return chain_from_json(j);
}

} // namespace gapestim
