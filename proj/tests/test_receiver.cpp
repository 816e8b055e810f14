#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "pnlab/channel.hpp"
#include "pnlab/lemma.hpp"
#include "pnlab/receiver.hpp"
#include "pnlab/stats.hpp"

using namespace pnlab;

TEST(MatchedFilter, PulseAtSlotZeroIsUnitVector) {
    const auto g = make_grid(2.0, 16, 1.0);
    const auto mf = matched_filter_bank(eval_pulse(PulseShape{}, 0, g), PulseShape{}, g);
    for (std::size_t i = 0; i < mf.size(); ++i)
        EXPECT_NEAR(std::abs(mf[i] - (g.first_slot() + static_cast<std::int64_t>(i) == 0 ? 1.0 : 0.0)), 0.0, 1e-12);
}

TEST(MatchedFilter, IsLinear) {
    const auto g = make_grid(2.0, 32, 1.0);
    const RandomStream s(1, 2);
    Waveform a(g), b(g), mix(g);
    const cplx alpha{-0.7, 2.0};
    for (std::size_t j = 0; j < g.size(); ++j) {
        a.samples[j] = s.complex_normal(j);
        b.samples[j] = s.complex_normal(g.size() + j);
        mix.samples[j] = alpha * a.samples[j] + b.samples[j];
    }
    const auto ma = matched_filter_bank(a, PulseShape{}, g), mb = matched_filter_bank(b, PulseShape{}, g);
    const auto mm = matched_filter_bank(mix, PulseShape{}, g);
    for (std::size_t i = 0; i < mm.size(); ++i) EXPECT_NEAR(std::abs(mm[i] - (alpha * ma[i] + mb[i])), 0.0, 1e-12);
}

TEST(BasisProjection, ZeroFrequencyEqualsMatchedFilter) {
    const auto g = make_grid(2.0, 32, 1.0);
    const auto y = sample_awgn(NoiseLevel{1.0}, g, RandomStream(2, 2));
    const auto mf = matched_filter_bank(y, PulseShape{}, g);
    const auto bank = projection_bank(y, 3, g);
    for (std::int64_t m = g.first_slot(); m < g.first_slot() + g.num_slots(); ++m) {
        const auto i = static_cast<std::size_t>(m - g.first_slot());
        EXPECT_NEAR(std::abs(basis_projection(y, {0, m}, g) - mf[i]), 0.0, 1e-12);
        EXPECT_NEAR(std::abs(basis_projection(y, {2, m}, g) - bank[2][i]), 0.0, 1e-12);
    }
}

TEST(BasisProjection, HigherBranchesSeeOnlyNoiseWithoutPhase) {
    ChannelConfig cfg;
    cfg.grid = make_grid(2.0, 64, 1.0);
    const auto f = draw_frame(Constellation::qpsk(), 1.0, cfg.grid, RandomStream(3, 0));
    const auto x = modulate(f, cfg.pulse, cfg.grid);
    for (std::int64_t n = 1; n <= 4; ++n)
        for (std::int64_t m = -2; m < 2; ++m) EXPECT_NEAR(std::abs(basis_projection(x, {n, m}, cfg.grid)), 0.0, 1e-12);
}

TEST(LemmaProjection, WithoutPhaseNoiseIsInnerProduct) {
    const auto g = make_grid(2.0, 64, 1.0);
    const RandomStream s(1, 0);
    EXPECT_NEAR(std::abs(lemma_projection(0, {0, 0}, PhaseNoiseModel::none(), g, s) - 1.0), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(lemma_projection(0, {1, 0}, PhaseNoiseModel::none(), g, s)), 0.0, 1e-12);
    EXPECT_EQ(lemma_projection(0, {0, 1}, PhaseNoiseModel::wrapped_gaussian(1.0), g, s), cplx{});
    EXPECT_THROW(lemma_projection(0, {-1, 0}, PhaseNoiseModel::none(), g, s), DomainError);
}

TEST(LemmaProjection, VarianceShrinksLikeDtOverT) {
    const auto model = PhaseNoiseModel::wrapped_gaussian(1.0);
    const double target = std::exp(-0.5);
    for (std::int64_t l : {64, 256}) {
        const auto g = make_grid(2.0, l, 1.0);
        std::vector<cplx> z;
        for (std::uint64_t t = 0; t < 4000; ++t) z.push_back(lemma_projection(0, {0, 0}, model, g, RandomStream(7, t)));
        const auto s = summarize(std::span<const cplx>(z));
        EXPECT_TRUE(s.mean_within(target, 4.0)) << "l = " << l;
        const double expect_var = (1.0 - std::exp(-1.0)) * g.dt() / g.symbol_period();
        EXPECT_NEAR(s.variance, expect_var, 4 * s.variance_stderr) << "l = " << l;
    }
}

TEST(LemmaTable, NestedPathsMatchDirectEvaluation) {
    const auto model = PhaseNoiseModel::wrapped_gaussian(0.5);
    const std::vector<std::int64_t> ladder{16, 32, 64};
    const RandomStream root(11, 300);
    const auto table = lemma_convergence_table(0, {1, 0}, model, ladder, 2.0, 1.0, 50, root, 2);
    ASSERT_EQ(table.rows.size(), 3u);
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const auto g = make_grid(2.0, ladder[i], 1.0);
        const auto direct = lemma_projection(0, {1, 0}, model, g, root.substream(0),
                                             static_cast<std::uint64_t>(64 / ladder[i]));
        EXPECT_EQ(table.rows[i].nested_path, direct) << "level " << ladder[i];
    }
    EXPECT_THROW(lemma_convergence_table(0, {0, 0}, model, {16, 24}, 2.0, 1.0, 5, root), DomainError);
}

TEST(LemmaTable, NoPhaseNoiseHasZeroVariance) {
    const auto table = lemma_convergence_table(0, {0, 0}, PhaseNoiseModel::none(), {8, 16, 32}, 2.0, 1.0, 20,
                                               RandomStream(1, 1));
    EXPECT_TRUE(table.variance_identically_zero());
    EXPECT_TRUE(std::isnan(table.variance_slope()));
    for (const auto& r : table.rows) EXPECT_NEAR(std::abs(r.mean - 1.0), 0.0, 1e-12);
}

TEST(LemmaTable, ResultsDoNotDependOnThreads) {
    const auto model = PhaseNoiseModel::wrapped_gaussian(1.0);
    const auto a = lemma_convergence_table(0, {0, 0}, model, {16, 32}, 2.0, 1.0, 200, RandomStream(5, 5), 1);
    const auto b = lemma_convergence_table(0, {0, 0}, model, {16, 32}, 2.0, 1.0, 200, RandomStream(5, 5), 3);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(a.rows[i].mean, b.rows[i].mean);
        EXPECT_EQ(a.rows[i].variance, b.rows[i].variance);
    }
}
