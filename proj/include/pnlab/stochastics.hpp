#pragma once

// White phase noise, its circular mean, and complex AWGN on a grid.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "pnlab/error.hpp"
#include "pnlab/grid.hpp"
#include "pnlab/random.hpp"
#include "pnlab/stats.hpp"

namespace pnlab {

enum class PhaseKind { None, WrappedGaussian, UniformCircle };

/// Law of the iid phase samples Theta(t_i).
struct PhaseNoiseModel {
    PhaseKind kind = PhaseKind::None;
    double sigma2 = 0.0;  // radians^2, WrappedGaussian only

    static PhaseNoiseModel none() { return {}; }
    static PhaseNoiseModel wrapped_gaussian(double sigma2) {
        if (!(sigma2 >= 0.0) || !std::isfinite(sigma2))
            throw ConfigError("phase variance sigma2 must be finite and >= 0");
        return {sigma2 == 0.0 ? PhaseKind::None : PhaseKind::WrappedGaussian, sigma2};
    }
    static PhaseNoiseModel uniform_circle() { return {PhaseKind::UniformCircle, 0.0}; }

    std::string describe() const {
        switch (kind) {
            case PhaseKind::None: return "none";
            case PhaseKind::WrappedGaussian: return "gaussian(" + std::to_string(sigma2) + ")";
            case PhaseKind::UniformCircle: return "uniform";
        }
        return "?";
    }
};

/// E[exp(j Theta)].
struct MuTheta {
    std::complex<double> value{1.0, 0.0};
};

inline MuTheta mu_theta(const PhaseNoiseModel& model) {
    switch (model.kind) {
        case PhaseKind::None: return {{1.0, 0.0}};
        case PhaseKind::WrappedGaussian: return {{std::exp(-0.5 * model.sigma2), 0.0}};
        case PhaseKind::UniformCircle: return {{0.0, 0.0}};
    }
    return {};
}

/// Theta for draw number `index` of `stream`. Gaussian draws are left unwrapped.
inline double phase_sample(const PhaseNoiseModel& model, const RandomStream& stream, std::uint64_t index) {
    switch (model.kind) {
        case PhaseKind::None: return 0.0;
        case PhaseKind::WrappedGaussian: return std::sqrt(model.sigma2) * stream.normal(index);
        case PhaseKind::UniformCircle: return std::numbers::pi * (2.0 * stream.uniform(index) - 1.0);
    }
    return 0.0;
}

/// 2l iid phase samples; sample j (storage order) is draw j * stride of the stream.
/// A stride > 1 lets a coarse grid reuse the draws of a finer one at shared instants.
inline std::vector<double> sample_phase(const PhaseNoiseModel& model, const TimeGrid& grid,
                                        const RandomStream& stream, std::uint64_t stride = 1) {
    std::vector<double> out(grid.size(), 0.0);
    if (model.kind == PhaseKind::None) return out;
    if (model.kind == PhaseKind::WrappedGaussian && stride == 1) {
        const double sd = std::sqrt(model.sigma2);
        for (std::size_t j = 0; j + 1 < out.size(); j += 2) {
            const auto z = stream.normal_pair(j >> 1);
            out[j] = sd * z.real();
            out[j + 1] = sd * z.imag();
        }
        if (out.size() % 2) out.back() = phase_sample(model, stream, out.size() - 1);
        return out;
    }
    for (std::size_t j = 0; j < out.size(); ++j) out[j] = phase_sample(model, stream, j * stride);
    return out;
}

/// Complex AWGN level: every unit-norm projection of the noise is CN(0, N0).
struct NoiseLevel {
    double n0 = 0.0;
};

/// iid CN(0, N0/dt) samples, so that inner_product(W, phi) ~ CN(0, N0) for unit-norm phi.
inline Waveform sample_awgn(const NoiseLevel& level, const TimeGrid& grid, const RandomStream& stream) {
    if (!(level.n0 >= 0.0)) throw DomainError("noise level N0 must be >= 0");
    Waveform w(grid);
    if (level.n0 == 0.0) return w;
    const double scale = std::sqrt(level.n0 / grid.dt());
    for (std::size_t j = 0; j < w.samples.size(); ++j) w.samples[j] = scale * stream.complex_normal(j);
    return w;
}

/// Sample autocorrelation R(tau) = mean of exp(j Theta_i) exp(-j Theta_{i+tau}), tau = 0..lags.
inline std::vector<std::complex<double>> autocorrelation_estimate(std::span<const double> phase,
                                                                  std::size_t lags) {
    if (lags >= phase.size())
        throw DomainError("requested " + std::to_string(lags) + " lags from a sequence of length " +
                          std::to_string(phase.size()));
    std::vector<std::complex<double>> z(phase.size());
    for (std::size_t i = 0; i < phase.size(); ++i) z[i] = std::polar(1.0, phase[i]);
    std::vector<std::complex<double>> r(lags + 1);
    r[0] = {1.0, 0.0};
    for (std::size_t tau = 1; tau <= lags; ++tau) {
        std::complex<double> acc{};
        const std::size_t n = z.size() - tau;
        for (std::size_t i = 0; i < n; ++i) acc += z[i] * std::conj(z[i + tau]);
        r[tau] = acc / static_cast<double>(n);
    }
    return r;
}

/// Batch-means standard error (per component) of the lag-tau estimate. The lag
/// products of neighbouring indices share a phase sample, so a plain iid stderr
/// would be biased.
inline ComplexSummary autocorrelation_batch_stats(std::span<const double> phase, std::size_t tau,
                                                  std::size_t batches = 1000) {
    if (tau >= phase.size()) throw DomainError("lag exceeds sequence length");
    const std::size_t n = phase.size() - tau;
    batches = std::min(batches, n);
    const std::size_t per = n / batches;
    std::vector<std::complex<double>> means(batches);
    for (std::size_t b = 0; b < batches; ++b) {
        std::complex<double> acc{};
        for (std::size_t i = b * per; i < (b + 1) * per; ++i)
            acc += std::polar(1.0, phase[i] - phase[i + tau]);
        means[b] = acc / static_cast<double>(per);
    }
    return summarize(std::span<const std::complex<double>>(means));
}

}  // namespace pnlab
