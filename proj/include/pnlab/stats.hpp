#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace pnlab {

/// Mean, unbiased variance and standard error of a real sample.
struct SampleSummary {
    double mean = 0.0;
    double variance = 0.0;
    double stderr_ = 0.0;
    std::size_t count = 0;
};

inline SampleSummary summarize(std::span<const double> xs) {
    SampleSummary s;
    s.count = xs.size();
    if (xs.empty()) return s;
    double sum = 0.0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() < 2) return s;
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.variance = ss / static_cast<double>(xs.size() - 1);
    s.stderr_ = std::sqrt(s.variance / static_cast<double>(xs.size()));
    return s;
}

/// Moments of a complex sample. `variance` is E|z - mean|^2 (both components);
/// `variance_stderr` is the delta-method standard error of that estimate.
struct ComplexSummary {
    std::complex<double> mean{};
    double stderr_re = 0.0;
    double stderr_im = 0.0;
    double variance = 0.0;
    double variance_stderr = 0.0;
    std::size_t count = 0;

    /// Both components of `mean - target` within `k` standard errors.
    bool mean_within(std::complex<double> target, double k) const {
        return std::abs(mean.real() - target.real()) <= k * stderr_re &&
               std::abs(mean.imag() - target.imag()) <= k * stderr_im;
    }
};

inline ComplexSummary summarize(std::span<const std::complex<double>> zs) {
    ComplexSummary s;
    s.count = zs.size();
    if (zs.empty()) return s;
    const double n = static_cast<double>(zs.size());
    std::complex<double> sum{};
    for (auto z : zs) sum += z;
    s.mean = sum / n;
    if (zs.size() < 2) return s;
    double vr = 0.0, vi = 0.0, m4 = 0.0;
    for (auto z : zs) {
        const auto d = z - s.mean;
        vr += d.real() * d.real();
        vi += d.imag() * d.imag();
        m4 += std::norm(d) * std::norm(d);
    }
    s.stderr_re = std::sqrt(vr / (n - 1.0) / n);
    s.stderr_im = std::sqrt(vi / (n - 1.0) / n);
    s.variance = (vr + vi) / (n - 1.0);
    const double m2 = (vr + vi) / n;
    s.variance_stderr = std::sqrt(std::max(0.0, m4 / n - m2 * m2) / n);
    return s;
}

/// Least-squares slope of y on x.
inline double regression_slope(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    return sxy / sxx;
}

}  // namespace pnlab
