#include <gtest/gtest.h>

#include <random>

#include "qfpnet/optics.hpp"

using namespace qfpnet;

static PulsePattern pattern(std::vector<double> signs, std::vector<double> amps) {
    PulsePattern p;
    for (double s : signs) p.phases.emplace_back(s, 0.0);
    p.amplitude_scale = std::move(amps);
    return p;
}

TEST(TreeTransfer, AllInPhaseGoesToFirstDetector) {
    const double a = 0.37;
    const auto out = tree_transfer(pattern({1, 1, 1, 1}, {a, a, a, a}));
    EXPECT_NEAR(out.intensity[0], 4 * a * a, 1e-15);
    for (int d = 1; d < 4; ++d) EXPECT_NEAR(out.intensity[static_cast<std::size_t>(d)], 0.0, 1e-15);
}

TEST(TreeTransfer, PairSplitGoesToMiddleDetector) {
    const double a = 0.5;
    const auto out = tree_transfer(pattern({1, 1, -1, -1}, {a, a, a, a}));
    EXPECT_NEAR(out.intensity[2], 4 * a * a, 1e-15);
    EXPECT_NEAR(out.intensity[0] + out.intensity[1] + out.intensity[3], 0.0, 1e-15);
}

TEST(TreeTransfer, TwoPortsOppositePhase) {
    const double a1 = 0.3 * 85, a2 = 0.4 * 78;
    const auto out = tree_transfer(pattern({1, -1}, {a1, a2}));
    EXPECT_NEAR(out.intensity[1], (a1 + a2) * (a1 + a2) / 2, 1e-9);
    EXPECT_NEAR(out.intensity[0], (a1 - a2) * (a1 - a2) / 2, 1e-9);
    EXPECT_NEAR(out.complement[1], out.intensity[0], 1e-12);
}

TEST(TreeTransfer, EnergyConservedForRandomInputs) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 2.0), ph(0.0, 6.283185307179586);
    for (int n : {2, 4, 8}) {
        for (int trial = 0; trial < 50; ++trial) {
            PulsePattern p;
            double in = 0.0;
            for (int k = 0; k < n; ++k) {
                p.phases.push_back(std::polar(1.0, ph(rng)));
                p.amplitude_scale.push_back(u(rng));
                in += p.amplitude_scale.back() * p.amplitude_scale.back();
            }
            double out = 0.0;
            for (double x : tree_transfer(p).intensity) out += x;
            EXPECT_NEAR(out, in, 1e-12 * (1 + in));
        }
    }
}

TEST(TreeTransfer, RejectsBadInput) {
    EXPECT_THROW(tree_transfer(pattern({1, 1, 1}, {1, 1, 1})), DomainError);
    EXPECT_THROW(tree_transfer(pattern({1, 1}, {1})), DomainError);
    EXPECT_THROW(tree_transfer(pattern({1, 1}, {1, -1})), DomainError);
    EXPECT_THROW(transfer_matrix(6), DomainError);
}

TEST(TransferMatrix, OrthogonalAndConsistentWithTree) {
    for (int n : {2, 4, 8, 16}) {
        const auto t = transfer_matrix(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                double dot = 0.0;
                for (int k = 0; k < n; ++k) dot += t[i][k] * t[j][k];
                EXPECT_NEAR(dot, i == j ? 1.0 : 0.0, 1e-12);
            }
        // Real inputs: intensity = (T x)^2.
        std::vector<double> x(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) x[k] = 0.1 * (k + 1) * ((k % 3) ? 1 : -1);
        PulsePattern p;
        for (double v : x) {
            p.phases.emplace_back(v < 0 ? -1.0 : 1.0, 0.0);
            p.amplitude_scale.push_back(std::abs(v));
        }
        const auto out = tree_transfer(p);
        for (int d = 0; d < n; ++d) {
            double f = 0.0;
            for (int k = 0; k < n; ++k) f += t[d][k] * x[k];
            EXPECT_NEAR(out.intensity[d], f * f, 1e-12);
        }
    }
}

TEST(DetectorComparisons, FourPortLayout) {
    const auto c = detector_comparisons(4);
    ASSERT_EQ(c.size(), 4u);
    EXPECT_EQ(c[1].left, (std::vector<int>{0}));
    EXPECT_EQ(c[1].right, (std::vector<int>{1}));
    EXPECT_EQ(c[2].left, (std::vector<int>{0, 1}));
    EXPECT_EQ(c[2].right, (std::vector<int>{2, 3}));
    EXPECT_EQ(c[3].left, (std::vector<int>{2}));
    EXPECT_EQ(c[3].right, (std::vector<int>{3}));
    for (int d = 0; d < 4; ++d) EXPECT_EQ(c[d].detector, d + 1);
}

TEST(ClickProbability, Basics) {
    EXPECT_EQ(click_probability(0.0, 0.0, 1.0, 0.0), 0.0);
    const double i = 4 * 0.1 * 4961 / 2e12;
    EXPECT_NEAR(click_probability(i, 1e-11, 1.0, 0.0), -std::expm1(-i) + 1e-11, 1e-22);
    const double im = std::pow(0.3 * 88 - 0.4 * 77, 2) / (2 * 6e11);
    const double ip = std::pow(0.3 * 88 + 0.4 * 77, 2) / (2 * 6e11);
    EXPECT_NEAR(click_probability(im, 1e-10, 0.99, ip),
                0.99 * (-std::expm1(-im)) + 0.01 * (-std::expm1(-ip)) + 1e-10, 1e-20);
    EXPECT_THROW(click_probability(-1.0, 0.0, 1.0, 0.0), DomainError);
    EXPECT_THROW(click_probability(1.0, 0.0, 0.0, 0.0), DomainError);
    // Monotone in intensity and dark count.
    double prev = -1;
    for (double x = 0; x < 5; x += 0.25) {
        const double p = click_probability(x, 1e-3, 1.0, 0.0);
        EXPECT_GT(p, prev);
        prev = p;
    }
    EXPECT_LE(click_probability(50.0, 0.5, 1.0, 0.0), 1.0);
}

TEST(OracleProfile, AllEqualOnlyFirstDetectorLit) {
    const auto pp = ProtocolParams::with_codeword_length(1000, 0.2, 0.22, 1e-3, 4);
    const auto ch = ChannelModel::symmetric_channel(4, 0.1, 1e-6);
    const double a = 40.0;
    const RunConfig rc{{a, a, a, a}, identity_pairing(4), {}, EncodingScheme::make(Encoding::SingleBit, pp.m)};
    const auto prof = oracle_click_profile(Relationship::parse("AAAA"), rc, ch, pp);
    EXPECT_NEAR(prof.at(1), -std::expm1(-4 * 0.1 * a * a / 1000) + 1e-6, 1e-14);
    for (int d = 2; d <= 4; ++d) EXPECT_NEAR(prof.at(d), 1e-6, 1e-16);
}
