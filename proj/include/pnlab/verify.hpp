#pragma once

// Acceptance suite. Each criterion is a set of checks of the form
// |measured - target| <= tolerance, with tolerances pinned here.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "pnlab/channel.hpp"
#include "pnlab/config.hpp"
#include "pnlab/equivalence.hpp"
#include "pnlab/grid.hpp"
#include "pnlab/information.hpp"
#include "pnlab/lemma.hpp"
#include "pnlab/psd.hpp"
#include "pnlab/receiver.hpp"
#include "pnlab/stats.hpp"
#include "pnlab/stochastics.hpp"

namespace pnlab::verify {

struct Check {
    std::string name;
    double measured = 0.0;
    double target = 0.0;
    double tolerance = 0.0;

    bool pass() const { return std::abs(measured - target) <= tolerance; }
    /// |measured - target| / tolerance; > 1 means failure.
    double load() const {
        const double d = std::abs(measured - target);
        if (tolerance > 0.0) return d / tolerance;
        return d == 0.0 ? 0.0 : INFINITY;
    }
};

struct CriterionResult {
    std::string name;
    std::vector<Check> checks;
    double seconds = 0.0;
    double time_limit = 0.0;  // 0 = not enforced
    std::string error;        // set if the criterion threw

    bool within_time() const { return time_limit <= 0.0 || seconds <= time_limit; }
    bool pass() const {
        if (!error.empty() || checks.empty() || !within_time()) return false;
        for (const auto& c : checks)
            if (!c.pass()) return false;
        return true;
    }
    const Check& worst() const {
        const Check* w = &checks.front();
        for (const auto& c : checks)
            if (c.load() > w->load()) w = &c;
        return *w;
    }
};

struct SuiteOptions {
    bool full = false;          // x10 trials, runtime limits not enforced
    std::uint64_t seed = 20240601;
    unsigned threads = 0;

    std::size_t scale(std::size_t quick) const { return full ? 10 * quick : quick; }
};

namespace detail {

inline void add_complex_mean_checks(std::vector<Check>& out, const std::string& name, const ComplexSummary& s,
                                    cplx target, double k) {
    out.push_back({name + "_re", s.mean.real(), target.real(), k * s.stderr_re});
    out.push_back({name + "_im", s.mean.imag(), target.imag(), k * s.stderr_im});
}

inline std::string tag(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

}  // namespace detail

/// 1. Lag-tau autocorrelation of exp(j Theta) equals exp(-sigma2) for tau != 0.
inline CriterionResult autocorrelation(const SuiteOptions& opt) {
    CriterionResult r{"autocorrelation", {}, 0.0, 5.0, {}};
    const std::int64_t half = static_cast<std::int64_t>(opt.scale(1'000'000) / 2);
    const auto grid = make_grid(1.0, half, 1.0);
    for (double s2 : {0.1, 0.5, 1.0}) {
        const auto model = PhaseNoiseModel::wrapped_gaussian(s2);
        const auto theta = sample_phase(model, grid, RandomStream(opt.seed, 100).substream(static_cast<std::uint64_t>(s2 * 1000)));
        const auto acf = autocorrelation_estimate(theta, 5);
        const std::string base = "sigma2=" + detail::tag(s2);
        r.checks.push_back({base + "_lag0", acf[0].real(), 1.0, 0.0});
        for (std::size_t tau = 1; tau <= 5; ++tau) {
            auto stats = autocorrelation_batch_stats(theta, tau);
            stats.mean = acf[tau];
            detail::add_complex_mean_checks(r.checks, base + "_lag" + std::to_string(tau), stats,
                                            {std::exp(-s2), 0.0}, 3.0);
        }
    }
    return r;
}

/// 2. In-band PSD gain of the phase-noisy signal equals exp(-sigma2).
inline CriterionResult spectral_loss(const SuiteOptions& opt) {
    CriterionResult r{"spectral_loss", {}, 0.0, 20.0, {}};
    for (double s2 : {0.1, 0.5, 1.0}) {
        ChannelConfig cfg;
        cfg.grid = make_grid(64.0, 1 << 14, 1.0);
        cfg.phase = PhaseNoiseModel::wrapped_gaussian(s2);
        cfg.noise = NoiseLevel{0.0};
        cfg.seed = opt.seed + 200;
        SpectralLossOptions so;
        so.segment = 512;  // 2l / 512 = 64 segments per realization
        so.overlap = 0.0;
        so.threads = opt.threads;
        const auto est = spectral_loss_estimate(cfg, opt.scale(1), so);
        const double target = std::exp(-s2);
        r.checks.push_back({"sigma2=" + detail::tag(s2) + "_gain", est.gain, target, 0.05 * target});
        r.checks.push_back({"sigma2=" + detail::tag(s2) + "_parseval", est.noisy.total_power(),
                            cfg.es / cfg.grid.symbol_period(), 0.02 * cfg.es / cfg.grid.symbol_period()});
    }
    return r;
}

/// 3. Phase-noise projections converge to mu * <g_k, phi_nm> with variance ~ 1/l.
inline CriterionResult lemma_convergence(const SuiteOptions& opt) {
    CriterionResult r{"lemma_convergence", {}, 0.0, 30.0, {}};
    const auto model = PhaseNoiseModel::wrapped_gaussian(1.0);
    std::vector<std::int64_t> ladder;
    for (int e = 8; e <= 16; ++e) ladder.push_back(std::int64_t{1} << e);
    const struct {
        std::int64_t k;
        BasisIndex idx;
    } cases[] = {{0, {0, 0}}, {0, {1, 0}}, {0, {0, 1}}};
    for (const auto& c : cases) {
        const std::string base = "kmn=" + std::to_string(c.k) + std::to_string(c.idx.n) + std::to_string(c.idx.m);
        const auto table = lemma_convergence_table(c.k, c.idx, model, ladder, 2.0, 1.0, opt.scale(1000),
                                                   RandomStream(opt.seed, 300), opt.threads);
        const auto& last = table.rows.back();
        ComplexSummary s;
        s.mean = last.mean;
        s.stderr_re = last.stderr_re;
        s.stderr_im = last.stderr_im;
        if (table.variance_identically_zero()) {
            // disjoint supports: the projection is exactly zero at every level
            r.checks.push_back({base + "_mean_re", last.mean.real(), table.limit.real(), 0.0});
            r.checks.push_back({base + "_mean_im", last.mean.imag(), table.limit.imag(), 0.0});
            r.checks.push_back({base + "_variance_identically_zero", last.variance, 0.0, 0.0});
        } else {
            detail::add_complex_mean_checks(r.checks, base + "_mean", s, table.limit, 3.0);
            r.checks.push_back({base + "_variance_slope", table.variance_slope(), -1.0, 0.1});
        }
        r.checks.push_back({base + "_nested_path", std::abs(last.nested_path - table.limit), 0.0, 0.02});
    }
    return r;
}

/// 4. Matched-filter outputs follow the equivalent channel mu A + CN(0, N0).
inline CriterionResult equivalent_channel_match(const SuiteOptions& opt) {
    CriterionResult r{"equivalent_channel", {}, 0.0, 15.0, {}};
    ChannelConfig cfg;
    cfg.grid = make_grid(4.0, 1 << 8, 1.0);
    cfg.phase = PhaseNoiseModel::wrapped_gaussian(1.0);
    cfg.es = 1.0;
    cfg.noise = NoiseLevel{cfg.es / std::pow(10.0, 0.5)};
    cfg.seed = opt.seed + 400;
    const auto rows = compare_equivalent_channel(cfg, Constellation::qpsk(), opt.scale(100'000), opt.threads);
    for (std::size_t a = 0; a < rows.size(); ++a) {
        const auto& row = rows[a];
        const auto& sp = row.pipeline;
        const auto& so = row.oracle;
        const std::string base = "point" + std::to_string(a);
        r.checks.push_back({base + "_mean_re", sp.mean.real(), so.mean.real(),
                            3.0 * std::hypot(sp.stderr_re, so.stderr_re)});
        r.checks.push_back({base + "_mean_im", sp.mean.imag(), so.mean.imag(),
                            3.0 * std::hypot(sp.stderr_im, so.stderr_im)});
        r.checks.push_back({base + "_variance", sp.variance - row.residual, so.variance,
                            3.0 * std::hypot(sp.variance_stderr, so.variance_stderr)});
    }
    return r;
}

/// 5. Branches n > 0 carry no signal and add no information.
inline CriterionResult pure_noise_branches(const SuiteOptions& opt) {
    CriterionResult r{"pure_noise_branches", {}, 0.0, 30.0, {}};
    ChannelConfig cfg;
    cfg.grid = make_grid(4.0, 1 << 10, 1.0);
    cfg.phase = PhaseNoiseModel::wrapped_gaussian(1.0);
    cfg.es = 1.0;
    cfg.noise = NoiseLevel{cfg.es / std::pow(10.0, 0.5)};
    cfg.seed = opt.seed + 500;
    const auto info = mi_projection_bank(cfg, Constellation::qpsk(), 4, opt.scale(20'000), opt.threads);
    for (std::size_t n = 1; n < info.signal_correlation.size(); ++n)
        detail::add_complex_mean_checks(r.checks, "n=" + std::to_string(n) + "_signal_mean",
                                        info.signal_correlation[n], {0.0, 0.0}, 3.0);
    r.checks.push_back({"bank_minus_mf_mi", info.bank.value - info.matched_filter.value, 0.0,
                        2.0 * std::hypot(info.bank.stderr_, info.matched_filter.stderr_)});
    return r;
}

/// 6. Pipeline MI under phase noise equals AWGN MI at SNR - penalty.
inline CriterionResult penalized_snr(const SuiteOptions& opt) {
    CriterionResult r{"penalized_snr", {}, 0.0, 60.0, {}};
    const std::size_t trials = opt.scale(8'000);
    std::uint64_t case_id = 0;
    for (const auto* name : {"qpsk", "qam16"}) {
        const auto c = Constellation::by_name(name);
        for (double snr_db : {0.0, 5.0, 10.0}) {
            for (double s2 : {0.25, 1.0}) {
                ++case_id;
                ChannelConfig cfg;
                cfg.grid = make_grid(4.0, 1 << 12, 1.0);
                cfg.phase = PhaseNoiseModel::wrapped_gaussian(s2);
                cfg.es = 1.0;
                cfg.noise = NoiseLevel{cfg.es / std::pow(10.0, snr_db / 10.0)};
                cfg.seed = opt.seed + 600 + case_id;
                const auto e2e = mi_end_to_end(cfg, c, trials, opt.threads);
                const double penalty = *snr_penalty_db(cfg.phase);
                const double n0_pen = cfg.es / std::pow(10.0, (snr_db - penalty) / 10.0);
                const auto ref = mi_monte_carlo(c, MuTheta{}, cfg.es, n0_pen, trials,
                                                RandomStream(cfg.seed, 1), opt.threads);
                r.checks.push_back({std::string(name) + "_snr=" + detail::tag(snr_db) + "_sigma2=" + detail::tag(s2),
                                    e2e.value, ref.value,
                                    2.0 * std::hypot(e2e.stderr_, ref.stderr_) + 0.02});
            }
        }
    }
    return r;
}

/// 7. sigma2 = 0 is the textbook AWGN channel; a uniform phase carries nothing.
inline CriterionResult degenerate_limits(const SuiteOptions& opt) {
    CriterionResult r{"degenerate_limits", {}, 0.0, 10.0, {}};
    for (double snr_db : {-5.0, 0.0, 10.0, 20.0}) {
        const double snr = std::pow(10.0, snr_db / 10.0);
        const auto cf = mi_gaussian_closed_form(1.0, 1.0 / snr, mu_theta(PhaseNoiseModel::wrapped_gaussian(0.0)));
        r.checks.push_back({"closed_form_snr=" + detail::tag(snr_db), cf.value, std::log2(1.0 + snr), 0.0});
    }
    const std::size_t trials = opt.scale(10'000);
    ChannelConfig cfg;
    cfg.grid = make_grid(4.0, 1 << 8, 1.0);
    cfg.es = 1.0;
    cfg.noise = NoiseLevel{cfg.es / std::pow(10.0, 0.5)};
    cfg.seed = opt.seed + 700;
    const auto c = Constellation::qpsk();

    cfg.phase = PhaseNoiseModel::none();
    const auto clean = mi_end_to_end(cfg, c, trials, opt.threads);
    const auto awgn = mi_monte_carlo(c, MuTheta{}, cfg.es, cfg.noise.n0, trials, RandomStream(cfg.seed, 1), opt.threads);
    r.checks.push_back({"no_phase_pipeline_vs_awgn", clean.value, awgn.value,
                        2.0 * std::hypot(clean.stderr_, awgn.stderr_)});

    cfg.phase = PhaseNoiseModel::uniform_circle();
    const auto uni = mi_end_to_end(cfg, c, trials, opt.threads);
    r.checks.push_back({"uniform_phase_pipeline", uni.value, 0.0, uni.stderr_});
    const auto uni_eq = mi_monte_carlo(c, mu_theta(cfg.phase), cfg.es, cfg.noise.n0, trials,
                                       RandomStream(cfg.seed, 2), opt.threads);
    r.checks.push_back({"uniform_phase_equivalent", uni_eq.value, 0.0, uni_eq.stderr_});
    return r;
}

using CriterionFn = std::function<CriterionResult(const SuiteOptions&)>;

inline std::vector<CriterionFn> criteria() {
    return {autocorrelation, spectral_loss,      lemma_convergence, equivalent_channel_match,
            pure_noise_branches, penalized_snr, degenerate_limits};
}

inline CriterionResult run_timed(const CriterionFn& fn, const SuiteOptions& opt) {
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
        r = fn(opt);
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (opt.full) r.time_limit = 0.0;
    return r;
}

/// CSV of one criterion's checks (no timings, so reruns are byte-identical).
inline std::string criterion_csv(const CriterionResult& r, const SuiteOptions& opt) {
    std::ostringstream os;
    os << "# pnlab verify " << (opt.full ? "--full" : "--quick") << " criterion " << r.name << '\n';
    os << "#@ seed = " << opt.seed << '\n';
    os << "check,measured,target,tolerance,pass\n";
    for (const auto& c : r.checks)
        os << c.name << ',' << pnlab::detail::format_double(c.measured) << ','
           << pnlab::detail::format_double(c.target) << ',' << pnlab::detail::format_double(c.tolerance) << ','
           << (c.pass() ? "PASS" : "FAIL") << '\n';
    if (!r.error.empty()) os << "# error: " << r.error << '\n';
    return os.str();
}

/// `name PASS|FAIL measured target tolerance`, reporting the worst check.
inline std::string summary_line(const CriterionResult& r) {
    std::ostringstream os;
    os << r.name << ' ' << (r.pass() ? "PASS" : "FAIL") << ' ';
    if (r.checks.empty()) {
        os << "nan nan nan";
    } else {
        const auto& w = r.worst();
        os << pnlab::detail::format_double(w.measured) << ' ' << pnlab::detail::format_double(w.target) << ' '
           << pnlab::detail::format_double(w.tolerance);
    }
    return os.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + p.string() + "'");
    out << text;
}

/// Files in `a` and `b` with identical names and bytes; returns mismatching names.
inline std::vector<std::string> compare_csv_dirs(const std::filesystem::path& a, const std::filesystem::path& b) {
    std::vector<std::string> bad;
    auto slurp = [](const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream os;
        os << in.rdbuf();
        return os.str();
    };
    for (const auto& entry : std::filesystem::directory_iterator(a)) {
        if (entry.path().extension() != ".csv") continue;
        const auto other = b / entry.path().filename();
        if (!std::filesystem::exists(other) || slurp(entry.path()) != slurp(other))
            bad.push_back(entry.path().filename().string());
    }
    return bad;
}

}  // namespace pnlab::verify
