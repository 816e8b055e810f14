#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "pnlab/receiver.hpp"
#include "pnlab/stats.hpp"
#include "pnlab/stochastics.hpp"

using namespace pnlab;

namespace {

// E[cos Theta] for Theta ~ N(0, s2) by composite Simpson quadrature.
double quadrature_mean_cos(double s2) {
    const int n = 4000;
    const double lim = 12.0 * std::sqrt(s2), h = 2.0 * lim / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = -lim + i * h;
        const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += w * std::cos(x) * std::exp(-x * x / (2 * s2)) / std::sqrt(2 * std::numbers::pi * s2);
    }
    return acc * h / 3.0;
}

}  // namespace

TEST(PhaseNoise, MuThetaMatchesQuadrature) {
    for (double s2 : {0.1, 0.5, 1.0, 2.0}) {
        const auto mu = mu_theta(PhaseNoiseModel::wrapped_gaussian(s2));
        EXPECT_NEAR(mu.value.real(), quadrature_mean_cos(s2), 1e-10);
        EXPECT_EQ(mu.value.imag(), 0.0);
    }
    EXPECT_NEAR(mu_theta(PhaseNoiseModel::wrapped_gaussian(1.0)).value.real(), 0.60653066, 1e-8);
    EXPECT_EQ(mu_theta(PhaseNoiseModel::none()).value, cplx(1.0, 0.0));
    EXPECT_EQ(mu_theta(PhaseNoiseModel::uniform_circle()).value, cplx(0.0, 0.0));
    EXPECT_EQ(PhaseNoiseModel::wrapped_gaussian(0.0).kind, PhaseKind::None);
}

TEST(PhaseNoise, MuThetaMagnitudeDecreasesWithVariance) {
    double prev = 1.0;
    for (double s2 = 0.05; s2 < 5.0; s2 += 0.05) {
        const double m = std::abs(mu_theta(PhaseNoiseModel::wrapped_gaussian(s2)).value);
        EXPECT_LT(m, prev);
        prev = m;
    }
}

TEST(PhaseNoise, EmpiricalMeanPhasorMatchesMu) {
    const auto g = make_grid(8.0, 65536, 1.0);
    for (auto model : {PhaseNoiseModel::wrapped_gaussian(0.5), PhaseNoiseModel::uniform_circle()}) {
        const auto theta = sample_phase(model, g, RandomStream(2, 0));
        std::vector<cplx> z(theta.size());
        for (std::size_t i = 0; i < z.size(); ++i) z[i] = std::polar(1.0, theta[i]);
        const auto s = summarize(std::span<const cplx>(z));
        EXPECT_TRUE(s.mean_within(mu_theta(model).value, 4.0)) << model.describe() << " mean " << s.mean;
    }
}

TEST(PhaseNoise, StridedSamplingReusesFineDraws) {
    const auto model = PhaseNoiseModel::wrapped_gaussian(1.0);
    const RandomStream s(6, 2);
    const auto fine = sample_phase(model, make_grid(1.0, 64, 1.0), s);
    const auto coarse = sample_phase(model, make_grid(1.0, 16, 1.0), s, 4);
    for (std::size_t j = 0; j < coarse.size(); ++j) EXPECT_EQ(coarse[j], fine[4 * j]);
}

TEST(PhaseNoise, AutocorrelationOfIidSamples) {
    const auto model = PhaseNoiseModel::wrapped_gaussian(1.0);
    const auto theta = sample_phase(model, make_grid(16.0, 100000, 1.0), RandomStream(3, 3));
    const auto r = autocorrelation_estimate(theta, 3);
    ASSERT_EQ(r.size(), 4u);
    EXPECT_EQ(r[0], cplx(1.0, 0.0));
    const double target = std::exp(-1.0);
    for (std::size_t tau = 1; tau <= 3; ++tau) {
        const auto s = autocorrelation_batch_stats(theta, tau);
        EXPECT_TRUE(s.mean_within(target, 4.0)) << "lag " << tau << ": " << s.mean;
        EXPECT_NEAR(std::abs(r[tau] - s.mean), 0.0, 1e-3);
    }
}

TEST(PhaseNoise, AutocorrelationEdgeCases) {
    const std::vector<double> zeros(10, 0.0);
    for (const auto& v : autocorrelation_estimate(zeros, 5)) EXPECT_EQ(v, cplx(1.0, 0.0));
    EXPECT_THROW(autocorrelation_estimate(zeros, 10), DomainError);
    EXPECT_THROW(autocorrelation_batch_stats(zeros, 10), DomainError);
}

TEST(Awgn, ProjectionVarianceIsN0AtEveryLevel) {
    const NoiseLevel n0{0.3};
    for (std::int64_t l : {64, 1024}) {
        const auto g = make_grid(4.0, l, 1.0);
        const auto phi0 = eval_basis({0, 0}, g);
        const auto phi1 = eval_basis({1, 1}, g);
        std::vector<cplx> p0, p1;
        double cross = 0.0;
        for (std::uint64_t t = 0; t < 10000; ++t) {
            const auto w = sample_awgn(n0, g, RandomStream(9, t));
            p0.push_back(inner_product(w, phi0));
            p1.push_back(inner_product(w, phi1));
            cross += std::abs(p0.back() * std::conj(p1.back()));
        }
        const auto s0 = summarize(std::span<const cplx>(p0));
        const auto s1 = summarize(std::span<const cplx>(p1));
        EXPECT_NEAR(s0.variance, 0.3, 4 * s0.variance_stderr) << "l = " << l;
        EXPECT_NEAR(s1.variance, 0.3, 4 * s1.variance_stderr) << "l = " << l;
        EXPECT_TRUE(s0.mean_within(0.0, 4.0));
        // orthogonal projections of white noise are uncorrelated
        cplx corr{};
        for (std::size_t i = 0; i < p0.size(); ++i) corr += p0[i] * std::conj(p1[i]);
        corr /= static_cast<double>(p0.size());
        EXPECT_LT(std::abs(corr), 4.0 * 0.3 / std::sqrt(static_cast<double>(p0.size())));
    }
}

TEST(Awgn, ZeroLevelGivesZeroNoise) {
    const auto g = make_grid(1.0, 8, 1.0);
    for (const auto& v : sample_awgn(NoiseLevel{0.0}, g, RandomStream(1, 1)).samples) EXPECT_EQ(v, cplx{});
    EXPECT_THROW(sample_awgn(NoiseLevel{-1.0}, g, RandomStream(1, 1)), DomainError);
}
