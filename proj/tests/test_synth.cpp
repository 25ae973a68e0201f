#include <set>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sparsefd/synth.hpp"

using namespace sparsefd;

TEST(Synth, ZeroNoiseIsClean) {
    SynthConfig cfg;
    cfg.seed = 4;
    const auto out = generate(cfg);
    EXPECT_EQ(out.dataset, out.clean);
    EXPECT_TRUE(out.noised_cells.empty());
    EXPECT_EQ(out.dataset.rows(), 1000u);
    EXPECT_EQ(out.dataset.cols(), 8u);
}

TEST(Synth, TruthHoldsOnClean) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SynthConfig cfg;
        cfg.seed = seed;
        cfg.n_attributes = 8 + seed % 9;
        cfg.noise_rate = 0.3;
        const auto out = generate(cfg);
        ASSERT_FALSE(out.truth.empty());
        for (const auto& fd : out.truth.fds) {
            EXPECT_TRUE(oracle::fd_holds(out.clean, fd));
            EXPECT_GE(fd.lhs.size(), 1u);
            EXPECT_LE(fd.lhs.size(), 3u);
        }
    }
}

TEST(Synth, GroupsCoverAllAttributes) {
    SynthConfig cfg;
    cfg.n_attributes = 13;
    cfg.seed = 9;
    const auto out = generate(cfg);
    std::size_t next = 0;
    for (std::size_t g = 0; g < out.groups.size(); ++g) {
        const auto& grp = out.groups[g];
        EXPECT_EQ(grp.first, next);
        EXPECT_EQ(grp.is_fd, g % 2 == 0);
        EXPECT_GE(grp.card_requested, 64u);
        EXPECT_LE(grp.card_requested, 216u);
        next = grp.first + grp.lhs_size + 1;
    }
    EXPECT_EQ(next, 13u);
}

TEST(Synth, Reproducible) {
    SynthConfig cfg;
    cfg.seed = 77;
    cfg.noise_rate = 0.01;
    const auto a = generate(cfg), b = generate(cfg);
    EXPECT_EQ(a.dataset, b.dataset);
    EXPECT_EQ(a.truth.fds, b.truth.fds);
    EXPECT_EQ(a.noised_cells, b.noised_cells);
    cfg.seed = 78;
    EXPECT_NE(generate(cfg).dataset, a.dataset);
}

TEST(Synth, RejectsBadConfig) {
    SynthConfig cfg;
    cfg.noise_rate = 1.5;
    EXPECT_THROW(generate(cfg), UsageError);
    cfg = {};
    cfg.n_attributes = 1;
    EXPECT_THROW(generate(cfg), UsageError);
    cfg = {};
    cfg.n_attributes = 3;
    cfg.fd_lhs_size_range = {3, 3};
    EXPECT_THROW(generate(cfg), UsageError);
}

TEST(FactorDomain, NearEqualFactors) {
    EXPECT_EQ(detail::factor_domain(216, 3), (std::vector<std::size_t>{6, 6, 6}));
    EXPECT_EQ(detail::factor_domain(100, 2), (std::vector<std::size_t>{10, 10}));
    EXPECT_EQ(detail::factor_domain(4, 2), (std::vector<std::size_t>{2, 2}));
    for (std::size_t v = 8; v < 300; v += 7)
        for (std::size_t k = 1; k <= 3; ++k) {
            const auto f = detail::factor_domain(v, k);
            const auto [lo, hi] = std::minmax_element(f.begin(), f.end());
            EXPECT_LE(*hi - *lo, 1u);
            EXPECT_GE(*lo, 2u);
        }
}

TEST(InjectNoise, ZeroRate) {
    Dataset d({"A"}, {{1, 2, 1, 2}});
    const auto [out, cells] = inject_noise(d, 0.0, {0}, 1);
    EXPECT_EQ(out, d);
    EXPECT_TRUE(cells.empty());
}

TEST(InjectNoise, FullRateOnBinaryAttribute) {
    Dataset d({"A", "B"}, {{1, 2, 1, 2, 2}, {"x", "y", "x", "x", "y"}});
    const auto [out, cells] = inject_noise(d, 1.0, {1}, 5);
    EXPECT_EQ(cells.size(), 5u);
    for (std::size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(out.at(i, 0), d.at(i, 0));
        EXPECT_NE(out.at(i, 1), d.at(i, 1));
    }
}

TEST(InjectNoise, ExactCount) {
    SynthConfig cfg;
    cfg.n_attributes = 6;
    cfg.seed = 2;
    const auto clean = generate(cfg).clean;
    const std::vector<std::size_t> attrs{0, 1, 3, 5};
    const auto [out, cells] = inject_noise(clean, 0.3, attrs, 8);
    EXPECT_EQ(cells.size(), 1200u);
    std::set<CellRef> unique(cells.begin(), cells.end());
    EXPECT_EQ(unique.size(), 1200u);
    std::size_t diff = 0;
    for (std::size_t r = 0; r < clean.rows(); ++r)
        for (std::size_t c = 0; c < clean.cols(); ++c) diff += !(out.at(r, c) == clean.at(r, c));
    EXPECT_EQ(diff, 1200u);
    for (const auto& cell : cells) {
        EXPECT_NE(out.at(cell.row, cell.col), clean.at(cell.row, cell.col));
        EXPECT_TRUE(std::find(attrs.begin(), attrs.end(), cell.col) != attrs.end());
    }
}

TEST(Settings, ParseAndEnumerate) {
    const auto s = parse_setting("Low/s/l/s");
    EXPECT_EQ(s.noise_rate, 0.01);
    EXPECT_EQ(s.n_tuples(), 1000u);
    EXPECT_EQ(s.attr_range(), (Range<std::size_t>{40, 80}));
    EXPECT_EQ(s.card_range(), (Range<std::size_t>{64, 216}));
    EXPECT_EQ(parse_setting("High-l-s-l").name(), "High/l/s/l");
    EXPECT_EQ(parse_setting("High-l-s-l").dir_name(), "High-l-s-l");
    EXPECT_THROW(parse_setting("Mid/s/s/s"), UsageError);
    EXPECT_THROW(parse_setting("Low/s/s"), UsageError);
    EXPECT_THROW(parse_setting("Low/s/x/s"), UsageError);

    const auto all = all_settings();
    EXPECT_EQ(all.size(), 24u);
    std::set<std::string> names;
    for (const auto& a : all) names.insert(a.name());
    EXPECT_EQ(names.size(), 24u);
}

TEST(Settings, MakeConfig) {
    const auto s = parse_setting("Zero/s/s/s");
    std::set<std::uint64_t> seeds;
    for (std::size_t i = 0; i < 5; ++i) {
        const auto cfg = make_config(s, i, 0);
        EXPECT_GE(cfg.n_attributes, 8u);
        EXPECT_LE(cfg.n_attributes, 16u);
        EXPECT_EQ(cfg.n_tuples, 1000u);
        seeds.insert(cfg.seed);
        EXPECT_EQ(make_config(s, i, 0).seed, cfg.seed);
    }
    EXPECT_EQ(seeds.size(), 5u);
    EXPECT_NE(make_config(parse_setting("Low/s/s/s"), 0, 0).seed, make_config(s, 0, 0).seed);
}
