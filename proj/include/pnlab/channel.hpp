#pragma once

// Symbol sources, linear modulation, the continuous-time phase-noise channel
// on a grid, and its discrete-time equivalent.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "pnlab/error.hpp"
#include "pnlab/grid.hpp"
#include "pnlab/random.hpp"
#include "pnlab/stochastics.hpp"

namespace pnlab {

/// Law of the iid symbols A_k, normalized to unit average energy.
/// A Gaussian constellation is the continuous CN(0, 1) input.
class Constellation {
public:
    static Constellation finite(std::vector<cplx> points, std::vector<double> probabilities,
                                std::string name = "custom") {
        if (points.empty()) throw ConfigError("constellation needs at least one point");
        if (points.size() != probabilities.size())
            throw ConfigError("constellation points and probabilities differ in length");
        double total = 0.0;
        for (double p : probabilities) {
            if (!(p >= 0.0) || !std::isfinite(p)) throw ConfigError("constellation probability must be >= 0");
            total += p;
        }
        if (std::abs(total - 1.0) > 1e-6)
            throw ConfigError("constellation probabilities sum to " + std::to_string(total) + ", expected 1");
        for (double& p : probabilities) p /= total;
        double energy = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) energy += probabilities[i] * std::norm(points[i]);
        if (!(energy > 0.0)) throw ConfigError("constellation has zero average energy");
        const double scale = 1.0 / std::sqrt(energy);
        for (auto& x : points) x *= scale;

        Constellation c;
        c.name_ = std::move(name);
        c.points_ = std::move(points);
        c.probabilities_ = std::move(probabilities);
        c.cdf_.resize(c.probabilities_.size());
        std::partial_sum(c.probabilities_.begin(), c.probabilities_.end(), c.cdf_.begin());
        c.cdf_.back() = 1.0;
        return c;
    }

    static Constellation gaussian() {
        Constellation c;
        c.name_ = "gaussian";
        c.gaussian_ = true;
        return c;
    }

    static Constellation uniform(std::vector<cplx> points, std::string name) {
        std::vector<double> p(points.size(), 1.0 / static_cast<double>(points.size()));
        return finite(std::move(points), std::move(p), std::move(name));
    }

    static Constellation bpsk() { return uniform({{1, 0}, {-1, 0}}, "bpsk"); }
    static Constellation qpsk() { return uniform({{1, 1}, {-1, 1}, {-1, -1}, {1, -1}}, "qpsk"); }
    static Constellation qam16() {
        std::vector<cplx> pts;
        for (int re : {-3, -1, 1, 3})
            for (int im : {-3, -1, 1, 3}) pts.emplace_back(re, im);
        return uniform(std::move(pts), "qam16");
    }

    /// Built-in by name (bpsk, qpsk, qam16, gaussian) or a file of "re im prob" rows.
    static Constellation by_name(const std::string& name) {
        if (name == "bpsk") return bpsk();
        if (name == "qpsk") return qpsk();
        if (name == "qam16" || name == "16qam") return qam16();
        if (name == "gaussian") return gaussian();
        return load(name);
    }

    static Constellation load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("unknown constellation '" + path + "' (not a built-in and not a readable file)");
        std::vector<cplx> pts;
        std::vector<double> probs;
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            std::istringstream row(line);
            double re, im, p;
            std::string extra;
            if (!(row >> re >> im >> p) || (row >> extra))
                throw ConfigError("constellation row must be 're im prob' in " + path, lineno);
            pts.emplace_back(re, im);
            probs.push_back(p);
        }
        return finite(std::move(pts), std::move(probs), path);
    }

    bool is_gaussian() const noexcept { return gaussian_; }
    const std::string& name() const noexcept { return name_; }
    const std::vector<cplx>& points() const noexcept { return points_; }
    const std::vector<double>& probabilities() const noexcept { return probabilities_; }
    std::size_t size() const noexcept { return points_.size(); }

    /// Index of the point selected by a uniform draw u in (0,1).
    std::size_t index_for(double u) const {
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        return std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
    }

    /// Unit-energy symbol number `index` of `stream`.
    cplx draw(const RandomStream& stream, std::uint64_t index) const {
        if (gaussian_) return stream.complex_normal(index);
        return points_[index_for(stream.uniform(index))];
    }

    /// Entropy of the point distribution in bits.
    double entropy_bits() const {
        double h = 0.0;
        for (double p : probabilities_)
            if (p > 0.0) h -= p * std::log2(p);
        return h;
    }

private:
    std::string name_;
    bool gaussian_ = false;
    std::vector<cplx> points_;
    std::vector<double> probabilities_;
    std::vector<double> cdf_;
};

/// Symbols A_m for consecutive slots m = first_slot, first_slot + 1, ...
struct SymbolFrame {
    std::int64_t first_slot = 0;
    std::vector<cplx> symbols;

    std::int64_t last_slot() const { return first_slot + static_cast<std::int64_t>(symbols.size()) - 1; }
    const cplx& at_slot(std::int64_t m) const { return symbols[static_cast<std::size_t>(m - first_slot)]; }
};

/// 2M+1 iid symbols for slots -M..M, scaled to average energy Es.
inline SymbolFrame draw_symbols(const Constellation& c, double es, std::int64_t half_count,
                                const RandomStream& stream) {
    if (half_count < 0) throw DomainError("symbol half-count M must be >= 0");
    if (!(es >= 0.0)) throw DomainError("symbol energy Es must be >= 0");
    SymbolFrame f;
    f.first_slot = -half_count;
    f.symbols.resize(static_cast<std::size_t>(2 * half_count + 1));
    const double amp = std::sqrt(es);
    for (std::size_t i = 0; i < f.symbols.size(); ++i) f.symbols[i] = amp * c.draw(stream, i);
    return f;
}

/// One symbol per slot of the grid, so the frame tiles the window exactly.
inline SymbolFrame draw_frame(const Constellation& c, double es, const TimeGrid& grid, const RandomStream& stream) {
    if (!(es >= 0.0)) throw DomainError("symbol energy Es must be >= 0");
    SymbolFrame f;
    f.first_slot = grid.first_slot();
    f.symbols.resize(static_cast<std::size_t>(grid.num_slots()));
    const double amp = std::sqrt(es);
    for (std::size_t i = 0; i < f.symbols.size(); ++i) f.symbols[i] = amp * c.draw(stream, i);
    return f;
}

/// X(t_i) = sum_m A_m g(t_i - mT).
inline Waveform modulate(const SymbolFrame& frame, const PulseShape& pulse, const TimeGrid& grid) {
    if (frame.symbols.empty()) return Waveform(grid);
    if (!grid.contains_slot(frame.first_slot) || !grid.contains_slot(frame.last_slot())) {
        std::ostringstream os;
        os << "frame slots [" << frame.first_slot << ", " << frame.last_slot() << "] exceed window ["
           << grid.first_slot() << ", " << grid.first_slot() + grid.num_slots() - 1 << "]";
        throw DomainError(os.str());
    }
    Waveform x(grid);
    const auto g = pulse_slot_samples(pulse, grid);
    for (std::int64_t m = frame.first_slot; m <= frame.last_slot(); ++m) {
        const cplx a = frame.at_slot(m);
        auto out = x.samples.begin() + static_cast<std::ptrdiff_t>(grid.slot_offset(m));
        for (const auto& gs : g) *out++ = a * gs;
    }
    return x;
}

/// Full description of one continuous-time channel experiment.
struct ChannelConfig {
    double es = 1.0;
    NoiseLevel noise{0.0};
    PhaseNoiseModel phase{};
    PulseShape pulse{};
    TimeGrid grid = make_grid(1.0, 4, 1.0);
    std::uint64_t seed = 1;

    RandomStream master() const { return RandomStream(seed, 0); }
    double snr() const { return noise.n0 > 0.0 ? es / noise.n0 : INFINITY; }
};

/// Y(t_i) = X(t_i) exp(j Theta(t_i)) + W(t_i). Phase and noise come from the
/// Phase and Noise children of `trial`.
inline Waveform apply_channel(const Waveform& x, const ChannelConfig& cfg, const RandomStream& trial) {
    detail::require_same_grid(x.grid, cfg.grid);
    Waveform y = sample_awgn(cfg.noise, cfg.grid, trial.child(StreamPurpose::Noise));
    if (cfg.phase.kind == PhaseKind::None) {
        for (std::size_t i = 0; i < y.samples.size(); ++i) y.samples[i] += x.samples[i];
        return y;
    }
    const auto theta = sample_phase(cfg.phase, cfg.grid, trial.child(StreamPurpose::Phase));
    for (std::size_t i = 0; i < y.samples.size(); ++i) y.samples[i] += x.samples[i] * std::polar(1.0, theta[i]);
    return y;
}

/// Discrete-time oracle: mu * A_k + CN(0, N0), independent per symbol.
inline std::vector<cplx> equivalent_channel(const SymbolFrame& frame, const MuTheta& mu, const NoiseLevel& level,
                                            const RandomStream& stream) {
    if (!(level.n0 >= 0.0)) throw DomainError("noise level N0 must be >= 0");
    std::vector<cplx> out(frame.symbols.size());
    const double sd = std::sqrt(level.n0);
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = mu.value * frame.symbols[k] + (sd > 0.0 ? sd * stream.complex_normal(k) : cplx{});
    return out;
}

}  // namespace pnlab
