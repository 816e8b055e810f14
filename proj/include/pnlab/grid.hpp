#pragma once

// Time discretization of [-S, S], pulse and basis evaluation, and Riemann
// inner products.
//
// All projections use the weight dt = S/l so that a discrete inner product
// approximates the integral of a(t) b*(t) over the window.

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include "pnlab/error.hpp"

namespace pnlab {

using cplx = std::complex<double>;

/// Uniform grid t_i = i*dt, i = -l ... l-1, over [-S, S) with dt = S/l.
/// Symbol slots [mT, (m+1)T) tile the window and hold a whole number of samples.
class TimeGrid {
public:
    double half_width() const noexcept { return half_width_; }
    std::int64_t level() const noexcept { return level_; }
    double symbol_period() const noexcept { return symbol_period_; }
    double dt() const noexcept { return half_width_ / static_cast<double>(level_); }

    std::size_t size() const noexcept { return static_cast<std::size_t>(2 * level_); }
    std::int64_t samples_per_symbol() const noexcept { return samples_per_symbol_; }

    /// Slots m satisfy first_slot() <= m < first_slot() + num_slots().
    std::int64_t first_slot() const noexcept { return -slots_per_half_; }
    std::int64_t num_slots() const noexcept { return 2 * slots_per_half_; }
    bool contains_slot(std::int64_t m) const noexcept {
        return m >= -slots_per_half_ && m < slots_per_half_;
    }

    /// Storage offset of the first sample of slot m.
    std::size_t slot_offset(std::int64_t m) const noexcept {
        return static_cast<std::size_t>((m + slots_per_half_) * samples_per_symbol_);
    }

    /// Sample time at storage position j (i = j - l).
    double time(std::size_t j) const noexcept {
        return static_cast<double>(static_cast<std::int64_t>(j) - level_) * dt();
    }

    friend bool operator==(const TimeGrid&, const TimeGrid&) = default;

private:
    friend TimeGrid make_grid(double, std::int64_t, double);

    double half_width_ = 1.0;
    std::int64_t level_ = 1;
    double symbol_period_ = 1.0;
    std::int64_t samples_per_symbol_ = 1;
    std::int64_t slots_per_half_ = 1;
};

namespace detail {

inline bool near_integer(double x, std::int64_t& out) {
    const double r = std::round(x);
    if (std::abs(x - r) > 1e-9 * std::max(1.0, std::abs(x))) return false;
    out = static_cast<std::int64_t>(r);
    return true;
}

}  // namespace detail

/// Builds a conforming grid; throws ConfigError naming the violated divisibility.
inline TimeGrid make_grid(double half_width, std::int64_t level, double symbol_period) {
    if (!(half_width > 0.0) || !std::isfinite(half_width))
        throw ConfigError("window half-width S must be positive, got " + std::to_string(half_width));
    if (level < 1) throw ConfigError("refinement level l must be >= 1, got " + std::to_string(level));
    if (!(symbol_period > 0.0) || !std::isfinite(symbol_period))
        throw ConfigError("symbol period T must be positive, got " + std::to_string(symbol_period));

    std::int64_t slots = 0;
    if (!detail::near_integer(half_width / symbol_period, slots) || slots < 1) {
        std::ostringstream os;
        os << "S/T = " << half_width / symbol_period << " not integral (S=" << half_width
           << ", T=" << symbol_period << ")";
        throw ConfigError(os.str());
    }
    std::int64_t sps = 0;
    const double ratio = symbol_period * static_cast<double>(level) / half_width;
    if (!detail::near_integer(ratio, sps) || sps < 1) {
        std::ostringstream os;
        os << "T/dt = " << ratio << " not integral (T=" << symbol_period << ", dt=" << half_width / level
           << ")";
        throw ConfigError(os.str());
    }
    TimeGrid g;
    g.half_width_ = half_width;
    g.level_ = level;
    g.symbol_period_ = symbol_period;
    g.samples_per_symbol_ = sps;
    g.slots_per_half_ = slots;
    return g;
}

/// Complex samples of a signal on a grid.
struct Waveform {
    TimeGrid grid;
    std::vector<cplx> samples;

    explicit Waveform(const TimeGrid& g) : grid(g), samples(g.size()) {}
    Waveform(const TimeGrid& g, std::vector<cplx> s) : grid(g), samples(std::move(s)) {
        if (samples.size() != grid.size()) throw DomainError("waveform length does not match grid");
    }

    std::size_t size() const noexcept { return samples.size(); }

    /// Riemann energy dt * sum |x|^2.
    double energy() const {
        double acc = 0.0;
        for (const auto& s : samples) acc += std::norm(s);
        return acc * grid.dt();
    }
};

enum class PulseKind { Rectangular };

/// Unit-energy pulse g(t); g_k(t) = g(t - kT).
struct PulseShape {
    PulseKind kind = PulseKind::Rectangular;
};

/// Basis function phi_{nm}(t) = phi_n(t - mT), phi_n(t) = exp(j2pi n t/T)/sqrt(T) on [0, T).
struct BasisIndex {
    std::int64_t n = 0;
    std::int64_t m = 0;

    friend bool operator==(const BasisIndex&, const BasisIndex&) = default;
};

namespace detail {

inline void require_slot(const TimeGrid& grid, std::int64_t m) {
    if (!grid.contains_slot(m)) {
        std::ostringstream os;
        os << "symbol slot " << m << " outside window [" << grid.first_slot() << ", "
           << grid.first_slot() + grid.num_slots() << ")";
        throw DomainError(os.str());
    }
}

inline void require_same_grid(const TimeGrid& a, const TimeGrid& b) {
    if (!(a == b)) throw DomainError("waveforms live on different grids");
}

}  // namespace detail

/// Samples of the pulse restricted to one symbol slot (samples_per_symbol values).
inline std::vector<cplx> pulse_slot_samples(const PulseShape& pulse, const TimeGrid& grid) {
    switch (pulse.kind) {
        case PulseKind::Rectangular:
            return std::vector<cplx>(static_cast<std::size_t>(grid.samples_per_symbol()),
                                     cplx{1.0 / std::sqrt(grid.symbol_period()), 0.0});
    }
    throw DomainError("unknown pulse kind");
}

inline Waveform eval_pulse(const PulseShape& pulse, std::int64_t k, const TimeGrid& grid) {
    detail::require_slot(grid, k);
    Waveform w(grid);
    const auto slot = pulse_slot_samples(pulse, grid);
    std::copy(slot.begin(), slot.end(), w.samples.begin() + static_cast<std::ptrdiff_t>(grid.slot_offset(k)));
    return w;
}

/// phi_n evaluated at the samples of one slot: exp(j2pi n r / sps)/sqrt(T), r = 0..sps-1.
inline std::vector<cplx> basis_slot_samples(std::int64_t n, const TimeGrid& grid) {
    if (n < 0) throw DomainError("basis frequency index must be >= 0, got " + std::to_string(n));
    const auto sps = grid.samples_per_symbol();
    const double amp = 1.0 / std::sqrt(grid.symbol_period());
    std::vector<cplx> out(static_cast<std::size_t>(sps));
    for (std::int64_t r = 0; r < sps; ++r) {
        // reduce n*r mod sps first so the angle stays exact for large indices
        const auto q = (n % sps) * r % sps;
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(q) / static_cast<double>(sps);
        out[static_cast<std::size_t>(r)] = std::polar(amp, angle);
    }
    return out;
}

inline Waveform eval_basis(const BasisIndex& idx, const TimeGrid& grid) {
    detail::require_slot(grid, idx.m);
    if (idx.n == 0) return eval_pulse(PulseShape{PulseKind::Rectangular}, idx.m, grid);
    Waveform w(grid);
    const auto slot = basis_slot_samples(idx.n, grid);
    std::copy(slot.begin(), slot.end(), w.samples.begin() + static_cast<std::ptrdiff_t>(grid.slot_offset(idx.m)));
    return w;
}

/// dt * sum a_i conj(b_i).
inline cplx inner_product(const Waveform& a, const Waveform& b) {
    detail::require_same_grid(a.grid, b.grid);
    cplx acc{0.0, 0.0};
    for (std::size_t i = 0; i < a.samples.size(); ++i) acc += a.samples[i] * std::conj(b.samples[i]);
    return acc * a.grid.dt();
}

/// Dense row-major complex matrix; just enough for Gram matrices.
class ComplexMatrix {
public:
    ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    /// max |A - I| over all entries.
    double distance_from_identity() const {
        double worst = 0.0;
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                worst = std::max(worst, std::abs((*this)(r, c) - cplx{r == c ? 1.0 : 0.0, 0.0}));
        return worst;
    }

private:
    std::size_t rows_, cols_;
    std::vector<cplx> data_;
};

inline ComplexMatrix gram_matrix(std::span<const BasisIndex> indices, const TimeGrid& grid) {
    std::vector<Waveform> basis;
    basis.reserve(indices.size());
    for (const auto& idx : indices) basis.push_back(eval_basis(idx, grid));
    ComplexMatrix g(indices.size(), indices.size());
    for (std::size_t a = 0; a < basis.size(); ++a)
        for (std::size_t b = 0; b < basis.size(); ++b) g(a, b) = inner_product(basis[a], basis[b]);
    return g;
}

}  // namespace pnlab
