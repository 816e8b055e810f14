#pragma once

// Projection receivers: the baud-sampled matched filter and the (n, m) basis bank.

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "pnlab/channel.hpp"
#include "pnlab/grid.hpp"
#include "pnlab/stochastics.hpp"

namespace pnlab {

namespace detail {

/// dt * sum over slot m of y(t_i) conj(f(t_i - mT)).
inline cplx correlate_slot(const Waveform& y, std::int64_t m, const std::vector<cplx>& slot_fn) {
    const auto* p = y.samples.data() + y.grid.slot_offset(m);
    cplx acc{};
    for (std::size_t r = 0; r < slot_fn.size(); ++r) acc += p[r] * std::conj(slot_fn[r]);
    return acc * y.grid.dt();
}

}  // namespace detail

/// Entry i is <Y, g_k> for slot k = grid.first_slot() + i.
inline std::vector<cplx> matched_filter_bank(const Waveform& y, const PulseShape& pulse, const TimeGrid& grid) {
    detail::require_same_grid(y.grid, grid);
    const auto g = pulse_slot_samples(pulse, grid);
    std::vector<cplx> out(static_cast<std::size_t>(grid.num_slots()));
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = detail::correlate_slot(y, grid.first_slot() + static_cast<std::int64_t>(i), g);
    return out;
}

inline cplx basis_projection(const Waveform& y, const BasisIndex& idx, const TimeGrid& grid) {
    detail::require_same_grid(y.grid, grid);
    detail::require_slot(grid, idx.m);
    return detail::correlate_slot(y, idx.m, basis_slot_samples(idx.n, grid));
}

/// All projections Y_{nm} for n = 0..n_max over every slot; result[n][i] is slot first_slot + i.
inline std::vector<std::vector<cplx>> projection_bank(const Waveform& y, std::int64_t n_max, const TimeGrid& grid) {
    detail::require_same_grid(y.grid, grid);
    std::vector<std::vector<cplx>> out;
    out.reserve(static_cast<std::size_t>(n_max + 1));
    for (std::int64_t n = 0; n <= n_max; ++n) {
        const auto phi = basis_slot_samples(n, grid);
        std::vector<cplx> row(static_cast<std::size_t>(grid.num_slots()));
        for (std::size_t i = 0; i < row.size(); ++i)
            row[i] = detail::correlate_slot(y, grid.first_slot() + static_cast<std::int64_t>(i), phi);
        out.push_back(std::move(row));
    }
    return out;
}

/// exp(j Theta) for the samples of slot k, drawn as in sample_phase: sample j
/// (storage order) is draw j * stride of `stream`.
inline std::vector<cplx> slot_phasors(std::int64_t k, const PhaseNoiseModel& model, const TimeGrid& grid,
                                      const RandomStream& stream, std::uint64_t stride = 1) {
    detail::require_slot(grid, k);
    const auto sps = static_cast<std::size_t>(grid.samples_per_symbol());
    const std::size_t base = grid.slot_offset(k);
    std::vector<cplx> out(sps, cplx{1.0, 0.0});
    if (model.kind == PhaseKind::None) return out;
    std::size_t r = 0;
    if (model.kind == PhaseKind::WrappedGaussian && stride == 1 && base % 2 == 0) {
        const double sd = std::sqrt(model.sigma2);
        for (; r + 1 < sps; r += 2) {
            const auto z = stream.normal_pair((base + r) >> 1);
            out[r] = std::polar(1.0, sd * z.real());
            out[r + 1] = std::polar(1.0, sd * z.imag());
        }
    }
    for (; r < sps; ++r) out[r] = std::polar(1.0, phase_sample(model, stream, (base + r) * stride));
    return out;
}

/// <g_k exp(j Theta), phi_{nm}> from the phasors of slot k sampled on a grid
/// `decimation` times finer than `grid` (phasors[r * decimation] belongs to sample r).
/// `pulse_slot` and `basis_slot` are the slot samples of g and phi_n on `grid`.
inline cplx lemma_projection_from_phasors(std::int64_t k, const BasisIndex& idx, const TimeGrid& grid,
                                          std::span<const cplx> pulse_slot, std::span<const cplx> basis_slot,
                                          std::span<const cplx> phasors, std::size_t decimation = 1) {
    detail::require_slot(grid, k);
    detail::require_slot(grid, idx.m);
    const auto sps = static_cast<std::size_t>(grid.samples_per_symbol());
    if (pulse_slot.size() != sps || basis_slot.size() != sps || phasors.size() != sps * decimation)
        throw DomainError("slot sample counts do not match the grid");
    // rectangular g_k and phi_{nm} have disjoint supports unless k == m
    if (k != idx.m) return {0.0, 0.0};
    cplx acc{};
    for (std::size_t r = 0; r < sps; ++r) acc += pulse_slot[r] * phasors[r * decimation] * std::conj(basis_slot[r]);
    return acc * grid.dt();
}

/// One realization of <g_k exp(j Theta), phi_{nm}> at the grid's refinement.
///
/// Phase sample j (storage order) is draw j * stride of `stream`. Evaluating a
/// ladder of levels with stride = l_finest / l makes every level see the same
/// phase values at shared instants, i.e. one nested sample path.
inline cplx lemma_projection(std::int64_t k, const BasisIndex& idx, const PhaseNoiseModel& model,
                             const TimeGrid& grid, const RandomStream& stream, std::uint64_t stride = 1) {
    detail::require_slot(grid, k);
    detail::require_slot(grid, idx.m);
    if (idx.n < 0) throw DomainError("basis frequency index must be >= 0");
    if (k != idx.m) return {0.0, 0.0};
    const auto phasors = slot_phasors(k, model, grid, stream, stride);
    return lemma_projection_from_phasors(k, idx, grid, pulse_slot_samples(PulseShape{}, grid),
                                         basis_slot_samples(idx.n, grid), phasors);
}

}  // namespace pnlab
