#pragma once

// Convergence of phase-noise projections under grid refinement.

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "pnlab/error.hpp"
#include "pnlab/grid.hpp"
#include "pnlab/parallel.hpp"
#include "pnlab/receiver.hpp"
#include "pnlab/stats.hpp"
#include "pnlab/stochastics.hpp"

namespace pnlab {

struct LemmaRow {
    std::int64_t level = 0;
    cplx mean{};
    double variance = 0.0;  // E|z - mean|^2
    double stderr_re = 0.0;
    double stderr_im = 0.0;
    cplx nested_path{};     // trial 0, evaluated on the shared fine-grid draws
};

struct LemmaTable {
    cplx limit{};  // mu * <g_k, phi_{nm}>
    std::vector<LemmaRow> rows;

    /// Slope of log(variance) against log(l); NaN if any variance is zero.
    double variance_slope() const {
        std::vector<double> x, y;
        for (const auto& r : rows) {
            if (!(r.variance > 0.0)) return NAN;
            x.push_back(std::log(static_cast<double>(r.level)));
            y.push_back(std::log(r.variance));
        }
        return regression_slope(x, y);
    }

    bool variance_identically_zero() const {
        for (const auto& r : rows)
            if (r.variance != 0.0) return false;
        return true;
    }
};

/// Monte Carlo statistics of lemma_projection over a ladder of refinement levels.
///
/// All levels of one trial use the same phase draws at shared instants (draw
/// index scaled by l_max / l), so each trial is a nested refinement path. The
/// levels must therefore each divide the largest one.
inline LemmaTable lemma_convergence_table(std::int64_t k, const BasisIndex& idx, const PhaseNoiseModel& model,
                                          const std::vector<std::int64_t>& ladder, double half_width,
                                          double symbol_period, std::size_t trials, const RandomStream& stream,
                                          unsigned threads = 0) {
    if (ladder.empty()) throw DomainError("refinement ladder is empty");
    for (std::size_t i = 1; i < ladder.size(); ++i)
        if (ladder[i] <= ladder[i - 1]) throw DomainError("refinement ladder must be increasing");
    if (trials == 0) throw DomainError("lemma table needs at least one trial");
    const std::int64_t finest = ladder.back();
    std::vector<TimeGrid> grids;
    for (auto l : ladder) {
        if (finest % l != 0)
            throw DomainError("level " + std::to_string(l) + " does not divide finest level " + std::to_string(finest));
        grids.push_back(make_grid(half_width, l, symbol_period));
    }

    LemmaTable table;
    {
        const auto& g = grids.back();
        table.limit = mu_theta(model).value * inner_product(eval_pulse(PulseShape{}, k, g), eval_basis(idx, g));
    }

    const std::size_t levels = ladder.size();
    std::vector<cplx> values(trials * levels);
    // one set of finest-level draws per trial; coarser levels read every
    // (finest / l)-th phasor, which is exactly lemma_projection with stride finest / l
    std::vector<std::vector<cplx>> pulse_slots, basis_slots;
    for (const auto& g : grids) {
        pulse_slots.push_back(pulse_slot_samples(PulseShape{}, g));
        basis_slots.push_back(basis_slot_samples(idx.n, g));
    }
    const bool shared_slot = grids.back().contains_slot(k) && k == idx.m;
    parallel_for(trials, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const auto s = stream.substream(t);
            if (!shared_slot) {
                for (std::size_t li = 0; li < levels; ++li)
                    values[t * levels + li] = lemma_projection(k, idx, model, grids[li], s,
                                                               static_cast<std::uint64_t>(finest / ladder[li]));
                continue;
            }
            const auto phasors = slot_phasors(k, model, grids.back(), s);
            for (std::size_t li = 0; li < levels; ++li)
                values[t * levels + li] =
                    lemma_projection_from_phasors(k, idx, grids[li], pulse_slots[li], basis_slots[li], phasors,
                                                  static_cast<std::size_t>(finest / ladder[li]));
        }
    });

    std::vector<cplx> column(trials);
    for (std::size_t li = 0; li < levels; ++li) {
        for (std::size_t t = 0; t < trials; ++t) column[t] = values[t * levels + li];
        const auto sum = summarize(std::span<const cplx>(column));
        table.rows.push_back({ladder[li], sum.mean, sum.variance, sum.stderr_re, sum.stderr_im, column[0]});
    }
    return table;
}

}  // namespace pnlab
