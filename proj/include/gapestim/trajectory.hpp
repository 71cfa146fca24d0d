#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gapestim/chain.hpp"
#include "gapestim/rng.hpp"

namespace gapestim {

// Observed path X_0 ... X_t of a chain on {0, ..., n-1}; t = transitions().
// start_state is nullopt when X_0 was drawn from the stationary distribution.
struct Trajectory {
    std::vector<std::int32_t> states;
    int n = 0;
    std::string chain_id;
    std::uint64_t seed = 0;
    std::optional<std::int32_t> start_state; // nullopt = stationary start

    std::int64_t length() const { return static_cast<std::int64_t>(states.size()); }
    std::int64_t transitions() const { return length() - 1; }
};

// Simulate t transitions. X_0 comes from pi unless a fixed start is given;
// each step samples row X_s of the kernel. Bit-reproducible for a given
// (chain, t, seed, start): one xoshiro256++ draw per sampled state.
inline Trajectory simulate(const MarkovChain& c, std::int64_t t, std::uint64_t seed,
                           std::optional<std::int32_t> start = std::nullopt) {
    if (t < 1) throw InvalidParameterError("trajectory length must be >= 1 transition");
    const int n = c.n();
    if (start && (*start < 0 || *start >= n))
        throw InvalidParameterError("start state out of range");

    Xoshiro256PlusPlus rng(seed);
    std::vector<CategoricalSampler> rows;
    rows.reserve(n);
    std::vector<double> row(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) row[j] = c.kernel()(i, j);
        rows.emplace_back(std::span<const double>(row));
    }

    Trajectory tr;
    tr.n = n;
    tr.chain_id = c.label();
    tr.seed = seed;
    tr.start_state = start;
    tr.states.reserve(static_cast<std::size_t>(t) + 1);

    std::int32_t x;
    if (start) {
        x = *start;
    } else {
        CategoricalSampler initial{std::span<const double>(c.pi())};
        x = static_cast<std::int32_t>(initial.sample(rng));
    }
    tr.states.push_back(x);
    for (std::int64_t s = 0; s < t; ++s) {
        x = static_cast<std::int32_t>(rows[x].sample(rng));
        tr.states.push_back(x);
    }
    return tr;
}

// Subsample every a-th state: (X_0, X_a, ..., X_{a*floor(t/a)}), which is a
// path of the chain with kernel P^a.
inline Trajectory skip(const Trajectory& tr, std::uint64_t a) {
    if (a < 1) throw InvalidParameterError("skip factor must be >= 1");
    if (tr.length() < static_cast<std::int64_t>(a) + 1)
        throw TooShortError("trajectory has " + std::to_string(tr.length()) +
                            " states; need at least " + std::to_string(a + 1));
    if (a == 1) return tr;

    Trajectory out;
    out.n = tr.n;
    out.chain_id = tr.chain_id;
    out.seed = tr.seed;
    out.start_state = tr.start_state;
    const std::int64_t t = tr.transitions();
    const std::int64_t m = t / static_cast<std::int64_t>(a);
    out.states.reserve(static_cast<std::size_t>(m) + 1);
    for (std::int64_t s = 0; s <= m; ++s)
        out.states.push_back(tr.states[static_cast<std::size_t>(s * a)]);
    return out;
}

// Text format: one header line
//   gapestim-traj v1 n=<n> seed=<seed> len=<len> start=<stationary|index> [chain=<label>]
// followed by one decimal state index per line. chain=, when present, runs to
// the end of the header line.
inline void save_trajectory(const Trajectory& tr, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << "gapestim-traj v1 n=" << tr.n << " seed=" << tr.seed << " len=" << tr.states.size()
        << " start=" << (tr.start_state ? std::to_string(*tr.start_state) : std::string("stationary"));
    if (!tr.chain_id.empty()) out << " chain=" << tr.chain_id;
    out << "\n";
    for (std::int32_t s : tr.states) out << s << "\n";
    if (!out) throw IoError("write failed for " + path);
}

namespace detail {

inline std::string expect_token(std::istringstream& in, const std::string& key,
                                const std::string& path) {
    std::string tok;
    if (!(in >> tok) || tok.rfind(key, 0) != 0)
        throw FormatError(path + ": malformed header, expected " + key + "<value>");
    return tok.substr(key.size());
}

inline std::int64_t parse_int(const std::string& text, const std::string& what,
                              const std::string& path) {
    std::int64_t value = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw FormatError(path + ": cannot parse " + what + " '" + text + "'");
    return value;
}

} // namespace detail

inline Trajectory load_trajectory(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for reading");

    std::string header;
    if (!std::getline(in, header)) throw FormatError(path + ": empty file");
    std::istringstream hs(header);
    std::string magic, version;
    hs >> magic >> version;
    if (magic != "gapestim-traj") throw FormatError(path + ": not a gapestim trajectory file");
    if (version != "v1") throw FormatError(path + ": unsupported format version '" + version + "'");

    Trajectory tr;
    tr.n = static_cast<int>(detail::parse_int(detail::expect_token(hs, "n=", path), "n", path));
    tr.seed = static_cast<std::uint64_t>(
        detail::parse_int(detail::expect_token(hs, "seed=", path), "seed", path));
    const std::int64_t len = detail::parse_int(detail::expect_token(hs, "len=", path), "len", path);
    const std::string start = detail::expect_token(hs, "start=", path);
    if (start == "stationary")
        tr.start_state = std::nullopt;
    else
        tr.start_state = static_cast<std::int32_t>(detail::parse_int(start, "start", path));

    std::string rest;
    std::getline(hs, rest);
    if (!rest.empty()) {
        const auto pos = rest.find("chain=");
        if (pos == std::string::npos) throw FormatError(path + ": unexpected trailing header text");
        tr.chain_id = rest.substr(pos + 6);
    }

    if (tr.n < 1) throw FormatError(path + ": invalid state-space size");
    if (len < 1) throw FormatError(path + ": invalid length");

    // reserve from the header, but do not trust a corrupt length blindly
    tr.states.reserve(static_cast<std::size_t>(std::min<std::int64_t>(len, 1 << 20)));
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::int64_t v = detail::parse_int(line, "state index", path);
        if (v < 0 || v >= tr.n)
            throw ValidationError(path + ": state index " + std::to_string(v) +
                                  " outside [0, " + std::to_string(tr.n) + ")");
        tr.states.push_back(static_cast<std::int32_t>(v));
    }
    if (static_cast<std::int64_t>(tr.states.size()) != len)
        throw FormatError(path + ": expected " + std::to_string(len) + " states, found " +
                          std::to_string(tr.states.size()));
    return tr;
}

} // namespace gapestim
