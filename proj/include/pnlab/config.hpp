#pragma once

// Plain-text experiment configuration: one `key = value` per line, `#`
// comments. Lines starting with `#@` are settings too, which is how every
// output file echoes its effective configuration: an output file can be fed
// back with --config to reproduce it.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pnlab/channel.hpp"
#include "pnlab/error.hpp"
#include "pnlab/grid.hpp"
#include "pnlab/stochastics.hpp"

namespace pnlab {

namespace detail {

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

/// Shortest round-trip decimal form.
inline std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace detail

/// Everything one subcommand run needs. Field names match config keys.
struct ExperimentConfig {
    // channel
    double S = 4.0;
    double T = 1.0;
    std::int64_t l = 4096;
    std::string phase = "gaussian";  // gaussian | uniform | none
    double sigma2 = 1.0;
    double es = 1.0;
    double snr_db = 10.0;            // Es/N0; inf means N0 = 0
    std::string constellation = "qpsk";
    std::uint64_t seed = 1;
    // Monte Carlo
    std::size_t trials = 10000;
    unsigned threads = 0;            // 0 = hardware concurrency; never changes results
    // lemma
    std::int64_t k = 0;
    std::int64_t n = 0;
    std::int64_t m = 0;
    std::int64_t ladder_min = 8;     // log2 of the coarsest level
    std::int64_t ladder_max = 16;
    // spectra
    std::size_t segment = 512;
    double overlap = 0.0;
    // receiver bank
    std::int64_t n_max = 8;

    std::map<std::string, int> source_lines;  // key -> line it was last set on

    double n0() const { return std::isinf(snr_db) && snr_db > 0 ? 0.0 : es / std::pow(10.0, snr_db / 10.0); }

    PhaseNoiseModel phase_model() const {
        if (phase == "gaussian") return PhaseNoiseModel::wrapped_gaussian(sigma2);
        if (phase == "uniform") return PhaseNoiseModel::uniform_circle();
        return PhaseNoiseModel::none();
    }

    std::vector<std::int64_t> ladder() const {
        std::vector<std::int64_t> out;
        for (auto e = ladder_min; e <= ladder_max; ++e) out.push_back(std::int64_t{1} << e);
        return out;
    }

    TimeGrid grid() const {
        try {
            return make_grid(S, l, T);
        } catch (const ConfigError& e) {
            int line = 0;
            for (const char* key : {"S", "T", "l"})
                if (auto it = source_lines.find(key); it != source_lines.end()) line = std::max(line, it->second);
            throw ConfigError(e.what(), line);
        }
    }

    ChannelConfig channel() const {
        ChannelConfig c;
        c.es = es;
        c.noise = NoiseLevel{n0()};
        c.phase = phase_model();
        c.grid = grid();
        c.seed = seed;
        return c;
    }

    /// Sets one key from its text form; `line` (0 = command line) tags errors.
    void set(const std::string& key, const std::string& value, int line = 0) {
        auto real = [&](double& dst) { dst = parse_double(key, value, line); };
        auto integer = [&](std::int64_t& dst) { dst = parse_int(key, value, line); };
        auto count = [&](std::size_t& dst) {
            const auto v = parse_int(key, value, line);
            if (v < 0) throw ConfigError("key '" + key + "' must be >= 0, got " + value, line);
            dst = static_cast<std::size_t>(v);
        };
        if (key == "S") real(S);
        else if (key == "T") real(T);
        else if (key == "l") integer(l);
        else if (key == "phase") {
            if (value != "gaussian" && value != "uniform" && value != "none")
                throw ConfigError("key 'phase' expects gaussian|uniform|none, got '" + value + "'", line);
            phase = value;
        } else if (key == "sigma2") {
            real(sigma2);
            if (!(sigma2 >= 0.0)) throw ConfigError("key 'sigma2' must be >= 0", line);
        } else if (key == "es") real(es);
        else if (key == "snr_db") real(snr_db);
        else if (key == "constellation") {
            if (value.empty()) throw ConfigError("key 'constellation' needs a value", line);
            constellation = value;
        } else if (key == "seed") {
            const auto v = parse_int(key, value, line);
            seed = static_cast<std::uint64_t>(v);
        } else if (key == "trials") count(trials);
        else if (key == "threads") {
            std::size_t t = 0;
            count(t);
            threads = static_cast<unsigned>(t);
        } else if (key == "k") integer(k);
        else if (key == "n") integer(n);
        else if (key == "m") integer(m);
        else if (key == "ladder") parse_ladder(value, line);
        else if (key == "segment") count(segment);
        else if (key == "overlap") real(overlap);
        else if (key == "n_max") integer(n_max);
        else throw ConfigError("unknown key '" + key + "'", line);
        source_lines[key] = line;
    }

    /// Effective configuration as `#@ key = value` lines. `threads` is left
    /// out on purpose: it never changes results.
    std::string echo() const {
        std::ostringstream os;
        auto put = [&](const char* key, const std::string& v) { os << "#@ " << key << " = " << v << '\n'; };
        put("S", detail::format_double(S));
        put("T", detail::format_double(T));
        put("l", std::to_string(l));
        put("phase", phase);
        put("sigma2", detail::format_double(sigma2));
        put("es", detail::format_double(es));
        put("snr_db", detail::format_double(snr_db));
        put("constellation", constellation);
        put("seed", std::to_string(seed));
        put("trials", std::to_string(trials));
        put("k", std::to_string(k));
        put("n", std::to_string(n));
        put("m", std::to_string(m));
        put("ladder", std::to_string(ladder_min) + ":" + std::to_string(ladder_max));
        put("segment", std::to_string(segment));
        put("overlap", detail::format_double(overlap));
        put("n_max", std::to_string(n_max));
        return os.str();
    }

private:
    static double parse_double(const std::string& key, const std::string& v, int line) {
        if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
        if (v == "-inf") return -std::numeric_limits<double>::infinity();
        double out = 0.0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size() || !std::isfinite(out))
            throw ConfigError("key '" + key + "' expects a number, got '" + v + "'", line);
        return out;
    }

    static std::int64_t parse_int(const std::string& key, const std::string& v, int line) {
        std::int64_t out = 0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
        if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
            throw ConfigError("key '" + key + "' expects an integer, got '" + v + "'", line);
        return out;
    }

    void parse_ladder(const std::string& v, int line) {
        const auto colon = v.find(':');
        if (colon == std::string::npos)
            throw ConfigError("key 'ladder' expects 'min:max' (log2 levels), got '" + v + "'", line);
        const auto lo = parse_int("ladder", trim_copy(v.substr(0, colon)), line);
        const auto hi = parse_int("ladder", trim_copy(v.substr(colon + 1)), line);
        if (lo < 0 || hi < lo || hi > 40)
            throw ConfigError("key 'ladder' needs 0 <= min <= max <= 40, got '" + v + "'", line);
        ladder_min = lo;
        ladder_max = hi;
    }

    static std::string trim_copy(const std::string& s) { return detail::trim(s); }
};

/// Applies every setting of a config (or echoed output) file on top of `cfg`.
inline void load_config_stream(std::istream& in, ExperimentConfig& cfg) {
    std::string raw;
    int lineno = 0;
    bool echoed = false;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = detail::trim(raw);
        if (line.rfind("#@", 0) == 0) {
            echoed = true;
            line = detail::trim(std::string_view(line).substr(2));
        } else if (line.empty() || line.front() == '#') {
            continue;
        } else if (echoed) {
            break;  // data section of an output file
        } else if (auto hash = line.find('#'); hash != std::string::npos) {
            line = detail::trim(std::string_view(line).substr(0, hash));
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + line + "'", lineno);
        const auto key = detail::trim(std::string_view(line).substr(0, eq));
        const auto value = detail::trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key before '='", lineno);
        cfg.set(key, value, lineno);
    }
}

inline ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    load_config_stream(in, base);
    base.grid();  // nonconforming grids fail here, tagged with the offending line
    return base;
}

}  // namespace pnlab
