#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <vector>

#include "pnlab/random.hpp"
#include "pnlab/stats.hpp"

using namespace pnlab;

TEST(Philox, MatchesPublishedKnownAnswers) {
    EXPECT_EQ(philox4x32_10({0, 0, 0, 0}, {0, 0}),
              (PhiloxBlock{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
    EXPECT_EQ(philox4x32_10({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}),
              (PhiloxBlock{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
    EXPECT_EQ(philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
              (PhiloxBlock{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(RandomStream, SameSeedAndIdGiveSameDraws) {
    const RandomStream a(42, 7), b(42, 7);
    for (std::uint64_t i = 0; i < 100; ++i) {
        EXPECT_EQ(a.uniform(i), b.uniform(i));
        EXPECT_EQ(a.normal(i), b.normal(i));
    }
}

TEST(RandomStream, DrawsAreRandomAccess) {
    const RandomStream s(3, 9);
    std::vector<double> forward;
    for (std::uint64_t i = 0; i < 50; ++i) forward.push_back(s.uniform(i));
    for (std::uint64_t i = 50; i-- > 0;) EXPECT_EQ(s.uniform(i), forward[i]);
}

TEST(RandomStream, SubstreamsAndChildrenAreDistinct) {
    const RandomStream root(1, 0);
    std::set<std::uint64_t> ids{root.stream_id()};
    for (std::uint64_t i = 0; i < 1000; ++i) ids.insert(root.substream(i).stream_id());
    for (auto p : {StreamPurpose::Symbols, StreamPurpose::Phase, StreamPurpose::Noise, StreamPurpose::Oracle,
                   StreamPurpose::Training})
        ids.insert(root.child(p).stream_id());
    EXPECT_EQ(ids.size(), 1006u);
    EXPECT_NE(RandomStream(1, 0).uniform(0), RandomStream(2, 0).uniform(0));
}

TEST(RandomStream, UniformMomentsAndRange) {
    const RandomStream s(11, 0);
    std::vector<double> u(200000);
    for (std::size_t i = 0; i < u.size(); ++i) {
        u[i] = s.uniform(i);
        ASSERT_GT(u[i], 0.0);
        ASSERT_LT(u[i], 1.0);
    }
    const auto sum = summarize(u);
    EXPECT_NEAR(sum.mean, 0.5, 4 * sum.stderr_);
    EXPECT_NEAR(sum.variance, 1.0 / 12.0, 2e-3);
}

TEST(RandomStream, NormalAndComplexNormalMoments) {
    const RandomStream s(5, 1);
    std::vector<double> x(200000);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = s.normal(i);
    const auto sx = summarize(x);
    EXPECT_NEAR(sx.mean, 0.0, 4 * sx.stderr_);
    EXPECT_NEAR(sx.variance, 1.0, 0.02);

    std::vector<std::complex<double>> z(100000);
    for (std::size_t i = 0; i < z.size(); ++i) z[i] = s.complex_normal(i);
    const auto sz = summarize(std::span<const std::complex<double>>(z));
    EXPECT_NEAR(sz.variance, 1.0, 0.02);
    double cross = 0.0;
    for (const auto& v : z) cross += v.real() * v.imag();
    EXPECT_NEAR(cross / static_cast<double>(z.size()), 0.0, 0.01);
}

TEST(RandomStream, SubstreamsAreUncorrelated) {
    const RandomStream root(8, 0);
    const auto a = root.substream(0), b = root.substream(1);
    double acc = 0.0;
    const std::size_t n = 100000;
    for (std::size_t i = 0; i < n; ++i) acc += a.normal(i) * b.normal(i);
    EXPECT_NEAR(acc / n, 0.0, 4.0 / std::sqrt(static_cast<double>(n)));
}
