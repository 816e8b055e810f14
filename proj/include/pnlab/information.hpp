#pragma once

// Mutual information: closed form for Gaussian inputs, Monte Carlo for finite
// constellations (equivalent channel, full waveform pipeline, projection bank),
// and the SNR penalty of phase noise.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pnlab/channel.hpp"
#include "pnlab/error.hpp"
#include "pnlab/parallel.hpp"
#include "pnlab/receiver.hpp"
#include "pnlab/stats.hpp"
#include "pnlab/stochastics.hpp"

namespace pnlab {

enum class MiMethod { ClosedForm, MonteCarlo };

struct MIEstimate {
    double value = 0.0;    // bits per symbol
    double stderr_ = 0.0;  // bits
    std::size_t trials = 0;
    MiMethod method = MiMethod::MonteCarlo;
};

inline MIEstimate mi_from_densities(std::span<const double> info_bits) {
    const auto s = summarize(info_bits);
    return {s.mean, s.stderr_, s.count, MiMethod::MonteCarlo};
}

/// log2(1 + |mu|^2 Es/N0): AWGN capacity at the penalized SNR.
inline MIEstimate mi_gaussian_closed_form(double es, double n0, const MuTheta& mu) {
    if (!(n0 > 0.0)) throw DomainError("closed-form MI needs N0 > 0");
    if (!(es >= 0.0)) throw DomainError("symbol energy Es must be >= 0");
    return {std::log2(1.0 + std::norm(mu.value) * es / n0), 0.0, 0, MiMethod::ClosedForm};
}

/// Gaussian likelihood metric over one or more linear branches:
/// log p(y | a) = -sum_b |y_b - gain_b a|^2 / var_b.
class LinearGaussianMetric {
public:
    LinearGaussianMetric(std::vector<cplx> gains, std::vector<double> variances)
        : gains_(std::move(gains)), variances_(std::move(variances)) {
        for (double v : variances_)
            if (!(v > 0.0)) throw DomainError("metric noise variance must be > 0");
    }

    /// Single-branch metric y = gain * a + CN(0, n0).
    static LinearGaussianMetric scalar(cplx gain, double n0) { return {{gain}, {n0}}; }

    std::size_t branches() const { return gains_.size(); }

    /// Information density log2 p(y|a_sent) / sum_a P(a) p(y|a), in bits.
    /// `points` are the transmitted-scale symbol alphabet.
    double information_density(std::span<const cplx> y, std::size_t sent, std::span<const cplx> points,
                               std::span<const double> probs) const {
        double ll_sent = 0.0;
        double max_ll = -std::numeric_limits<double>::infinity();
        thread_local std::vector<double> ll;
        ll.resize(points.size());
        for (std::size_t a = 0; a < points.size(); ++a) {
            double d = 0.0;
            for (std::size_t b = 0; b < gains_.size(); ++b) d += std::norm(y[b] - gains_[b] * points[a]) / variances_[b];
            ll[a] = -d;
            max_ll = std::max(max_ll, ll[a]);
        }
        ll_sent = ll[sent];
        double denom = 0.0;
        for (std::size_t a = 0; a < points.size(); ++a) denom += probs[a] * std::exp(ll[a] - max_ll);
        return (ll_sent - max_ll - std::log(denom)) / std::numbers::ln2;
    }

private:
    std::vector<cplx> gains_;
    std::vector<double> variances_;
};

namespace detail {

inline void require_finite(const Constellation& c) {
    if (c.is_gaussian())
        throw DomainError("Monte Carlo MI needs a finite constellation; use the closed form for Gaussian inputs");
}

inline std::vector<cplx> scaled_points(const Constellation& c, double es) {
    std::vector<cplx> pts = c.points();
    for (auto& p : pts) p *= std::sqrt(es);
    return pts;
}

}  // namespace detail

/// Monte Carlo I(A; mu A + W) with W ~ CN(0, N0).
inline MIEstimate mi_monte_carlo(const Constellation& c, const MuTheta& mu, double es, double n0,
                                 std::size_t trials, const RandomStream& stream, unsigned threads = 0) {
    detail::require_finite(c);
    if (trials == 0) throw DomainError("Monte Carlo MI needs at least one trial");
    if (!(n0 >= 0.0)) throw DomainError("noise level N0 must be >= 0");
    if (n0 == 0.0) {
        // noiseless: the output reveals the symbol unless mu = 0
        const double h = (std::abs(mu.value) > 0.0 && es > 0.0) ? c.entropy_bits() : 0.0;
        return {h, 0.0, trials, MiMethod::ClosedForm};
    }
    const auto pts = detail::scaled_points(c, es);
    const auto metric = LinearGaussianMetric::scalar(mu.value, n0);
    const auto sym = stream.child(StreamPurpose::Symbols);
    const auto noise = stream.child(StreamPurpose::Noise);
    const double sd = std::sqrt(n0);
    std::vector<double> info(trials);
    parallel_for(trials, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const std::size_t a = c.index_for(sym.uniform(t));
            const cplx y = mu.value * pts[a] + sd * noise.complex_normal(t);
            info[t] = metric.information_density(std::span(&y, 1), a, pts, c.probabilities());
        }
    });
    return mi_from_densities(info);
}

/// Matched-filter outputs with the transmitted symbol index, one entry per symbol.
struct PipelineSample {
    std::size_t sent = 0;
    std::vector<cplx> branches;  // Y_{0m}, Y_{1m}, ... for the symbol's slot
};

/// Runs modulate -> apply_channel -> projection bank (n = 0..n_max) for enough
/// frames to yield `symbols` outputs. Frame f uses stream.substream(f).
inline std::vector<PipelineSample> run_pipeline(const ChannelConfig& cfg, const Constellation& c,
                                                std::size_t symbols, const RandomStream& stream,
                                                std::int64_t n_max = 0, unsigned threads = 0) {
    detail::require_finite(c);
    const auto per_frame = static_cast<std::size_t>(cfg.grid.num_slots());
    const std::size_t frames = (symbols + per_frame - 1) / per_frame;
    const double amp = std::sqrt(cfg.es);
    std::vector<PipelineSample> out(frames * per_frame);
    parallel_for(frames, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t f = begin; f < end; ++f) {
            const auto trial = stream.substream(f);
            const auto sym = trial.child(StreamPurpose::Symbols);
            SymbolFrame frame;
            frame.first_slot = cfg.grid.first_slot();
            frame.symbols.resize(per_frame);
            for (std::size_t i = 0; i < per_frame; ++i) {
                const std::size_t a = c.index_for(sym.uniform(i));
                out[f * per_frame + i].sent = a;
                frame.symbols[i] = amp * c.points()[a];
            }
            const auto y = apply_channel(modulate(frame, cfg.pulse, cfg.grid), cfg, trial);
            if (n_max == 0) {
                const auto mf = matched_filter_bank(y, cfg.pulse, cfg.grid);
                for (std::size_t i = 0; i < per_frame; ++i) out[f * per_frame + i].branches = {mf[i]};
            } else {
                const auto bank = projection_bank(y, n_max, cfg.grid);
                for (std::size_t i = 0; i < per_frame; ++i) {
                    auto& br = out[f * per_frame + i].branches;
                    br.resize(bank.size());
                    for (std::size_t n = 0; n < bank.size(); ++n) br[n] = bank[n][i];
                }
            }
        }
    });
    out.resize(symbols);
    return out;
}

/// MI of the full waveform pipeline, decoded with the equivalent-channel metric
/// y = mu A + CN(0, N0). At finite dt the self-noise makes this a mismatched
/// (lower) bound that converges to mi_monte_carlo as l grows.
inline MIEstimate mi_end_to_end(const ChannelConfig& cfg, const Constellation& c, std::size_t trials,
                                unsigned threads = 0) {
    detail::require_finite(c);
    if (trials == 0) throw DomainError("Monte Carlo MI needs at least one trial");
    if (!(cfg.noise.n0 > 0.0)) throw DomainError("end-to-end MI needs N0 > 0 for the equivalent-channel metric");
    const auto mu = mu_theta(cfg.phase);
    const auto samples = run_pipeline(cfg, c, trials, cfg.master(), 0, threads);
    const auto pts = detail::scaled_points(c, cfg.es);
    const auto metric = LinearGaussianMetric::scalar(mu.value, cfg.noise.n0);
    std::vector<double> info(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i)
        info[i] = metric.information_density(samples[i].branches, samples[i].sent, pts, c.probabilities());
    return mi_from_densities(info);
}

/// Comparison of the matched filter alone against the projection bank n = 0..n_max.
struct BankInformation {
    MIEstimate matched_filter;
    MIEstimate bank;
    std::vector<cplx> fitted_gains;            // per branch, from the training set
    std::vector<double> fitted_variances;
    std::vector<ComplexSummary> signal_correlation;  // per branch: Y_{nm} conj(A_m)/|A_m|
};

/// Each estimate uses its own independent symbols, and a third independent
/// training set fits a per-branch linear Gaussian metric (gain, noise variance).
/// Any signal the n > 0 branches carried would show up as a bank MI above the
/// matched-filter MI.
inline BankInformation mi_projection_bank(const ChannelConfig& cfg, const Constellation& c, std::int64_t n_max,
                                          std::size_t trials, unsigned threads = 0) {
    detail::require_finite(c);
    if (trials < 2) throw DomainError("bank MI needs at least two trials");
    if (n_max < 1) throw DomainError("bank MI needs n_max >= 1");
    const auto root = cfg.master();
    const auto train = run_pipeline(cfg, c, trials, root.child(StreamPurpose::Training), n_max, threads);
    const auto eval_mf = run_pipeline(cfg, c, trials, root.substream(1), n_max, threads);
    const auto eval_bank = run_pipeline(cfg, c, trials, root.substream(2), n_max, threads);
    const auto pts = detail::scaled_points(c, cfg.es);
    const auto branches = static_cast<std::size_t>(n_max + 1);

    BankInformation out;
    out.fitted_gains.assign(branches, {});
    out.fitted_variances.assign(branches, 0.0);
    double energy = 0.0;
    for (const auto& s : train) {
        energy += std::norm(pts[s.sent]);
        for (std::size_t b = 0; b < branches; ++b) out.fitted_gains[b] += s.branches[b] * std::conj(pts[s.sent]);
    }
    for (auto& g : out.fitted_gains) g /= energy;
    for (const auto& s : train)
        for (std::size_t b = 0; b < branches; ++b)
            out.fitted_variances[b] += std::norm(s.branches[b] - out.fitted_gains[b] * pts[s.sent]);
    for (auto& v : out.fitted_variances) v /= static_cast<double>(train.size());

    const LinearGaussianMetric mf({out.fitted_gains[0]}, {out.fitted_variances[0]});
    const LinearGaussianMetric full(out.fitted_gains, out.fitted_variances);
    std::vector<double> info_mf(trials), info_bank(trials);
    for (std::size_t i = 0; i < trials; ++i) {
        info_mf[i] = mf.information_density(std::span(eval_mf[i].branches).first(1), eval_mf[i].sent, pts,
                                            c.probabilities());
        info_bank[i] = full.information_density(eval_bank[i].branches, eval_bank[i].sent, pts, c.probabilities());
    }
    out.matched_filter = mi_from_densities(info_mf);
    out.bank = mi_from_densities(info_bank);

    for (std::size_t b = 0; b < branches; ++b) {
        std::vector<cplx> corr;
        corr.reserve(trials);
        for (const auto& s : eval_bank) {
            const double mag = std::abs(pts[s.sent]);
            if (mag > 0.0) corr.push_back(s.branches[b] * std::conj(pts[s.sent]) / mag);
        }
        out.signal_correlation.push_back(summarize(std::span<const cplx>(corr)));
    }
    return out;
}

/// SNR penalty -10 log10 |mu|^2 in dB; nullopt signals an infinite penalty (mu = 0).
inline std::optional<double> snr_penalty_db(const PhaseNoiseModel& model) {
    const double gain = std::norm(mu_theta(model).value);
    if (!(gain > 0.0)) return std::nullopt;
    return -10.0 * std::log10(gain);
}

}  // namespace pnlab
