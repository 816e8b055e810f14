#pragma once

// Welch power spectral density and the spectral-loss measurement.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "pnlab/channel.hpp"
#include "pnlab/error.hpp"
#include "pnlab/grid.hpp"
#include "pnlab/parallel.hpp"

namespace pnlab {

/// Two-sided PSD on frequencies ascending from -fs/2, density in energy/Hz.
struct PsdEstimate {
    std::vector<double> frequencies;
    std::vector<double> density;
    std::size_t segment_length = 0;
    double overlap = 0.0;
    std::size_t segments = 0;
    std::string window = "hann";

    double bin_width() const {
        return frequencies.size() > 1 ? frequencies[1] - frequencies[0] : 0.0;
    }

    /// Integral of the density; equals the mean power of the input (Parseval).
    double total_power() const {
        double acc = 0.0;
        for (double d : density) acc += d;
        return acc * bin_width();
    }
};

namespace detail {

// FFTW's planner is not re-entrant; plan creation and destruction are serialized.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

class FftPlan {
public:
    explicit FftPlan(std::size_t n)
        : n_(n),
          in_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))),
          out_(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n))) {
        std::lock_guard lock(fftw_planner_mutex());
        plan_ = fftw_plan_dft_1d(static_cast<int>(n), in_, out_, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    ~FftPlan() {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(plan_);
        fftw_free(in_);
        fftw_free(out_);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    std::complex<double>* input() { return reinterpret_cast<std::complex<double>*>(in_); }
    const std::complex<double>* output() const { return reinterpret_cast<const std::complex<double>*>(out_); }
    void execute() { fftw_execute(plan_); }
    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    fftw_complex* in_;
    fftw_complex* out_;
    fftw_plan plan_;
};

inline std::vector<double> hann_window(std::size_t n) {
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
    return w;
}

}  // namespace detail

/// Averaged Hann-windowed periodogram.
inline PsdEstimate psd_welch(const Waveform& y, std::size_t segment, double overlap = 0.5) {
    if (segment < 2) throw DomainError("Welch segment must hold at least 2 samples");
    if (segment > y.size())
        throw DomainError("Welch segment of " + std::to_string(segment) + " samples exceeds signal length " +
                          std::to_string(y.size()));
    if (!(overlap >= 0.0 && overlap < 1.0)) throw DomainError("Welch overlap must be in [0, 1)");

    const std::size_t hop = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(
                                                         static_cast<double>(segment) * (1.0 - overlap))));
    const auto w = detail::hann_window(segment);
    double wsum2 = 0.0;
    for (double v : w) wsum2 += v * v;

    const double dt = y.grid.dt();
    PsdEstimate est;
    est.segment_length = segment;
    est.overlap = overlap;
    est.density.assign(segment, 0.0);
    est.frequencies.resize(segment);

    detail::FftPlan fft(segment);
    std::vector<double> acc(segment, 0.0);
    for (std::size_t start = 0; start + segment <= y.size(); start += hop) {
        auto* in = fft.input();
        for (std::size_t i = 0; i < segment; ++i) in[i] = y.samples[start + i] * w[i];
        fft.execute();
        const auto* out = fft.output();
        for (std::size_t k = 0; k < segment; ++k) acc[k] += std::norm(out[k]);
        ++est.segments;
    }
    // reorder to ascending frequency: bin k maps to (k - segment/2)
    const std::size_t half = segment / 2;
    const double df = 1.0 / (static_cast<double>(segment) * dt);
    const double scale = dt / (wsum2 * static_cast<double>(est.segments));
    for (std::size_t i = 0; i < segment; ++i) {
        const std::size_t k = (i + segment - half) % segment;
        est.frequencies[i] = (static_cast<double>(i) - static_cast<double>(half)) * df;
        est.density[i] = acc[k] * scale;
    }
    return est;
}

/// Element-wise mean of PSD estimates that share frequencies.
inline PsdEstimate average_psd(const std::vector<PsdEstimate>& parts) {
    if (parts.empty()) throw DomainError("nothing to average");
    PsdEstimate out = parts.front();
    for (std::size_t p = 1; p < parts.size(); ++p) {
        for (std::size_t i = 0; i < out.density.size(); ++i) out.density[i] += parts[p].density[i];
        out.segments += parts[p].segments;
    }
    for (double& d : out.density) d /= static_cast<double>(parts.size());
    return out;
}

struct SpectralLoss {
    double gain = 0.0;        // in-band attenuation of the signal PSD
    double floor = 0.0;       // flat density of the spread power (plus AWGN)
    std::size_t in_band_bins = 0;
    std::size_t floor_bins = 0;
    std::size_t segments = 0;
    PsdEstimate noisy;
    PsdEstimate clean;
};

struct SpectralLossOptions {
    std::size_t segment = 512;
    double overlap = 0.0;
    double band_multiple_floor = 3.0;   // floor bins sit >= this many signal bandwidths away
    std::size_t min_floor_bins = 8;
    std::size_t min_segments = 16;
    unsigned threads = 0;
    std::string constellation = "qpsk";
};

/// In-band PSD gain of the phase-noisy signal relative to the clean one.
///
/// Model: S_y(f) = gain * S_x(f) + floor. The floor is read from bins at least
/// `band_multiple_floor` signal bandwidths (1/T) away, after removing the
/// attenuated clean-signal leakage there; gain then follows from the in-band
/// bins (|f| <= 1/T). The two conditions are solved jointly.
inline SpectralLoss spectral_loss_estimate(const ChannelConfig& cfg, std::size_t trials,
                                           const SpectralLossOptions& opt = {}) {
    if (trials == 0) throw DomainError("spectral loss needs at least one trial");
    const auto c = Constellation::by_name(opt.constellation);
    std::vector<PsdEstimate> noisy(trials), clean(trials);
    parallel_for(trials, opt.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const auto trial = cfg.master().substream(t);
            const auto frame = draw_frame(c, cfg.es, cfg.grid, trial.child(StreamPurpose::Symbols));
            const auto x = modulate(frame, cfg.pulse, cfg.grid);
            const auto y = apply_channel(x, cfg, trial);
            clean[t] = psd_welch(x, opt.segment, opt.overlap);
            noisy[t] = psd_welch(y, opt.segment, opt.overlap);
        }
    });

    SpectralLoss out;
    out.noisy = average_psd(noisy);
    out.clean = average_psd(clean);
    out.segments = out.noisy.segments;
    if (out.segments < opt.min_segments)
        throw DomainError("only " + std::to_string(out.segments) + " Welch segments; need at least " +
                          std::to_string(opt.min_segments) + " for a stable floor");

    const double bandwidth = 1.0 / cfg.grid.symbol_period();
    double in_clean = 0.0, in_noisy = 0.0, far_clean = 0.0, far_noisy = 0.0;
    for (std::size_t i = 0; i < out.noisy.frequencies.size(); ++i) {
        const double f = std::abs(out.noisy.frequencies[i]);
        if (f <= bandwidth) {
            in_clean += out.clean.density[i];
            in_noisy += out.noisy.density[i];
            ++out.in_band_bins;
        } else if (f >= opt.band_multiple_floor * bandwidth) {
            far_clean += out.clean.density[i];
            far_noisy += out.noisy.density[i];
            ++out.floor_bins;
        }
    }
    if (out.floor_bins < opt.min_floor_bins)
        throw DomainError("only " + std::to_string(out.floor_bins) +
                          " out-of-band bins for the floor estimate; raise the sampling rate or segment length");
    if (out.in_band_bins == 0 || !(in_clean > 0.0)) throw DomainError("clean signal has no in-band power");

    const double nin = static_cast<double>(out.in_band_bins);
    const double far_clean_mean = far_clean / static_cast<double>(out.floor_bins);
    const double far_noisy_mean = far_noisy / static_cast<double>(out.floor_bins);
    out.gain = (in_noisy - nin * far_noisy_mean) / (in_clean - nin * far_clean_mean);
    out.floor = far_noisy_mean - out.gain * far_clean_mean;
    return out;
}

}  // namespace pnlab
