#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <string>

#include "pnlab/channel.hpp"
#include "pnlab/receiver.hpp"
#include "pnlab/stats.hpp"

using namespace pnlab;

namespace {

std::string data_file(const char* name) {
    const char* dir = std::getenv("PNLAB_TEST_DATA");
    return std::string(dir ? dir : "tests/data") + "/" + name;
}

}  // namespace

TEST(Constellation, BuiltinsHaveUnitEnergy) {
    for (const auto& c : {Constellation::bpsk(), Constellation::qpsk(), Constellation::qam16()}) {
        double e = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) e += c.probabilities()[i] * std::norm(c.points()[i]);
        EXPECT_NEAR(e, 1.0, 1e-12) << c.name();
    }
    EXPECT_DOUBLE_EQ(Constellation::qam16().entropy_bits(), 4.0);
    EXPECT_TRUE(Constellation::by_name("gaussian").is_gaussian());
    EXPECT_EQ(Constellation::by_name("16qam").size(), 16u);
}

TEST(Constellation, LoadsWeightedFileAndRescales) {
    const auto c = Constellation::load(data_file("skewed.const"));
    ASSERT_EQ(c.size(), 3u);
    EXPECT_NEAR(std::abs(c.points()[0] - cplx(1.0, 0.0)), 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(c.entropy_bits(), 1.5);
    EXPECT_EQ(c.index_for(0.49), 0u);
    EXPECT_EQ(c.index_for(0.6), 1u);
    EXPECT_EQ(c.index_for(0.9), 2u);
}

TEST(Constellation, FileErrorsCarryLineNumbers) {
    try {
        Constellation::load(data_file("bad_row.const"));
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
    EXPECT_THROW(Constellation::by_name("no-such-constellation"), ConfigError);
    EXPECT_THROW(Constellation::finite({{1, 0}, {-1, 0}}, {0.5, 0.6}, "bad"), ConfigError);
}

TEST(Symbols, SingletonConstellationScalesBySqrtEs) {
    const auto c = Constellation::uniform({{1.0, 0.0}}, "one");
    const auto f = draw_symbols(c, 4.0, 1, RandomStream(1, 0));
    EXPECT_EQ(f.first_slot, -1);
    ASSERT_EQ(f.symbols.size(), 3u);
    for (const auto& a : f.symbols) EXPECT_EQ(a, cplx(2.0, 0.0));
    EXPECT_THROW(draw_symbols(c, 1.0, -1, RandomStream(1, 0)), DomainError);
}

TEST(Symbols, QpskAverageEnergy) {
    const auto f = draw_symbols(Constellation::qpsk(), 2.0, 5000, RandomStream(2, 0));
    double e = 0.0;
    for (const auto& a : f.symbols) e += std::norm(a);
    EXPECT_NEAR(e / static_cast<double>(f.symbols.size()), 2.0, 1e-12);
}

TEST(Modulate, MatchedFilterRecoversSymbols) {
    const auto g = make_grid(4.0, 64, 1.0);
    const auto f = draw_frame(Constellation::qam16(), 3.0, g, RandomStream(5, 0));
    const auto x = modulate(f, PulseShape{}, g);
    const auto mf = matched_filter_bank(x, PulseShape{}, g);
    ASSERT_EQ(mf.size(), f.symbols.size());
    for (std::size_t i = 0; i < mf.size(); ++i) EXPECT_NEAR(std::abs(mf[i] - f.symbols[i]), 0.0, 1e-12);
}

TEST(Modulate, EnergyOfTwoSymbolFrame) {
    const auto g = make_grid(1.0, 16, 1.0);
    SymbolFrame f{-1, {{1.0, 0.0}, {0.0, 1.0}}};
    EXPECT_NEAR(modulate(f, PulseShape{}, g).energy(), 2.0, 1e-12);
    SymbolFrame wide{-2, {1.0, 1.0, 1.0}};
    EXPECT_THROW(modulate(wide, PulseShape{}, g), DomainError);
}

TEST(Channel, NoiselessPhaseFreeChannelIsIdentity) {
    ChannelConfig cfg;
    cfg.grid = make_grid(2.0, 32, 1.0);
    const auto f = draw_frame(Constellation::qpsk(), 1.0, cfg.grid, RandomStream(1, 1));
    const auto x = modulate(f, cfg.pulse, cfg.grid);
    const auto y = apply_channel(x, cfg, cfg.master());
    EXPECT_EQ(y.samples, x.samples);
}

TEST(Channel, UniformPhasePreservesMagnitude) {
    ChannelConfig cfg;
    cfg.grid = make_grid(2.0, 32, 1.0);
    cfg.phase = PhaseNoiseModel::uniform_circle();
    const auto x = modulate(draw_frame(Constellation::qpsk(), 1.0, cfg.grid, RandomStream(1, 1)), cfg.pulse, cfg.grid);
    const auto y = apply_channel(x, cfg, cfg.master());
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(std::abs(y.samples[i]), std::abs(x.samples[i]), 1e-12);
}

TEST(Channel, MeanOutputIsAttenuatedInput) {
    ChannelConfig cfg;
    cfg.grid = make_grid(1.0, 8, 1.0);
    cfg.phase = PhaseNoiseModel::wrapped_gaussian(1.0);
    cfg.noise = NoiseLevel{0.5};
    Waveform x(cfg.grid);
    for (auto& v : x.samples) v = {0.6, -0.8};
    const std::size_t trials = 20000;
    std::vector<cplx> y0;
    for (std::size_t t = 0; t < trials; ++t) y0.push_back(apply_channel(x, cfg, cfg.master().substream(t)).samples[3]);
    const auto s = summarize(std::span<const cplx>(y0));
    EXPECT_TRUE(s.mean_within(mu_theta(cfg.phase).value * cplx(0.6, -0.8), 4.0)) << s.mean;
}

TEST(EquivalentChannel, NoiselessOutputs) {
    const SymbolFrame f{0, {{1.0, 0.0}, {0.0, 2.0}}};
    const auto y = equivalent_channel(f, mu_theta(PhaseNoiseModel::wrapped_gaussian(1.0)), NoiseLevel{0.0},
                                      RandomStream(1, 0));
    EXPECT_NEAR(y[0].real(), 0.60653066, 1e-8);
    EXPECT_NEAR(y[1].imag(), 2 * 0.60653066, 1e-8);
    const auto u = equivalent_channel(f, mu_theta(PhaseNoiseModel::uniform_circle()), NoiseLevel{0.0},
                                      RandomStream(1, 0));
    for (const auto& v : u) EXPECT_EQ(v, cplx{});
}

TEST(EquivalentChannel, NoiseMoments) {
    SymbolFrame f{0, std::vector<cplx>(100000, cplx(1.0, 1.0))};
    const auto y = equivalent_channel(f, MuTheta{{0.5, 0.0}}, NoiseLevel{0.25}, RandomStream(3, 0));
    const auto s = summarize(std::span<const cplx>(y));
    EXPECT_TRUE(s.mean_within({0.5, 0.5}, 4.0));
    EXPECT_NEAR(s.variance, 0.25, 4 * s.variance_stderr);
}
