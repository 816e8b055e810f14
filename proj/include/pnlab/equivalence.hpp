#pragma once

// Distributional comparison of the waveform pipeline's matched-filter output
// with the discrete-time equivalent channel, per transmitted point.

#include <cmath>
#include <complex>
#include <vector>

#include "pnlab/channel.hpp"
#include "pnlab/information.hpp"
#include "pnlab/stats.hpp"

namespace pnlab {

struct EquivalenceRow {
    cplx point{};              // transmitted symbol, Es-scaled
    ComplexSummary pipeline;   // matched-filter outputs given this symbol
    ComplexSummary oracle;     // equivalent_channel outputs given this symbol
    double residual = 0.0;     // (1 - |mu|^2) |A|^2 dt/T, self-noise left at finite dt
};

/// Both sides see the same symbol sequence; the oracle draws its own noise.
/// The residual assumes the rectangular pulse.
inline std::vector<EquivalenceRow> compare_equivalent_channel(const ChannelConfig& cfg, const Constellation& c,
                                                              std::size_t trials, unsigned threads = 0) {
    const auto pipeline = run_pipeline(cfg, c, trials, cfg.master(), 0, threads);
    const double amp = std::sqrt(cfg.es);
    SymbolFrame frame;
    frame.symbols.resize(pipeline.size());
    for (std::size_t i = 0; i < pipeline.size(); ++i) frame.symbols[i] = amp * c.points()[pipeline[i].sent];
    const auto mu = mu_theta(cfg.phase);
    const auto oracle = equivalent_channel(frame, mu, cfg.noise, cfg.master().child(StreamPurpose::Oracle));

    const double dt_over_t = cfg.grid.dt() / cfg.grid.symbol_period();
    std::vector<EquivalenceRow> rows;
    for (std::size_t a = 0; a < c.size(); ++a) {
        std::vector<cplx> ys, os;
        for (std::size_t i = 0; i < pipeline.size(); ++i) {
            if (pipeline[i].sent != a) continue;
            ys.push_back(pipeline[i].branches[0]);
            os.push_back(oracle[i]);
        }
        EquivalenceRow row;
        row.point = amp * c.points()[a];
        row.pipeline = summarize(std::span<const cplx>(ys));
        row.oracle = summarize(std::span<const cplx>(os));
        row.residual = (1.0 - std::norm(mu.value)) * std::norm(row.point) * dt_over_t;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace pnlab
