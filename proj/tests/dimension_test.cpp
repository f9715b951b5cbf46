#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "ifsarc/dimension.hpp"
#include "ifsarc/systems.hpp"

using namespace ifsarc;
namespace sys = ifsarc::systems;

TEST(SimilarityDimension, KnownValues) {
    EXPECT_DOUBLE_EQ(similarity_dimension(sys::interval()).s, 1.0);
    EXPECT_NEAR(similarity_dimension(sys::koch()).s, std::log(4.0) / std::log(3.0), 1e-12);
    EXPECT_NEAR(similarity_dimension(sys::carpet()).s, 2.0, 1e-12);
    EXPECT_NEAR(similarity_dimension(sys::twisted_koch()).s, std::log(4.0) / std::log(3.0), 1e-12);
    // Members of the two-parameter family chosen with the Koch curve's dimension.
    EXPECT_NEAR(similarity_dimension(sys::sab_quarter()).s, std::log(4.0) / std::log(3.0), 1e-12);
    EXPECT_NEAR(similarity_dimension(sys::sab_two_fifths()).s, std::log(4.0) / std::log(3.0), 1e-12);
}

TEST(SimilarityDimension, UnequalRatiosSolveMoranEquation) {
    auto d = similarity_dimension(std::vector<double>{0.25, 0.375, 0.375, 0.25});
    double sum = 2 * std::pow(0.25, d.s) + 2 * std::pow(0.375, d.s);
    EXPECT_NEAR(sum, 1.0, 1e-13);
    EXPECT_LE(d.residual, 1e-13);
    EXPECT_LE(d.iterations, 200);
}

TEST(SimilarityDimension, EqualRatiosMatchClosedForm) {
    for (double r : {0.5, 1.0 / 3, 0.25, 0.2})
        for (int n = 2; n <= 64; ++n) {
            if (n * r > 64) continue;
            auto d = similarity_dimension(std::vector<double>(static_cast<std::size_t>(n), r));
            EXPECT_NEAR(d.s, std::log(n) / std::log(1 / r), 1e-12);
        }
}

TEST(SimilarityDimension, MonotoneInEachRatio) {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(0.05, 0.9);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> r(2 + trial % 6);
        for (double& x : r) x = u(rng);
        auto base = similarity_dimension(r);
        EXPECT_LE(base.residual, 1e-13);
        r[trial % r.size()] = std::min(0.95, r[trial % r.size()] + 0.01);
        EXPECT_GT(similarity_dimension(r).s, base.s);
    }
}

TEST(SimilarityDimension, RejectsInvalidRatios) {
    EXPECT_THROW(similarity_dimension(std::vector<double>{0.5}), InvalidInput);
    EXPECT_THROW(similarity_dimension(std::vector<double>{0.5, 1.0}), InvalidInput);
}

TEST(SimilarityDimension, Fast) {
    auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < 100; ++i) similarity_dimension(sys::koch());
    EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 0.1);
}

TEST(BoxCount, HorizontalSegmentOracle) {
    Polyline p(2);
    p.push(std::vector<double>{0.05, 0.05});
    p.push(std::vector<double>{0.95, 0.05});
    EXPECT_EQ(box_count(p, 0.1), 10u);
    Polyline d(2);
    d.push(std::vector<double>{0.05, 0.05});
    d.push(std::vector<double>{0.95, 0.95});
    // A diagonal through cell centres meets only the diagonal cells.
    EXPECT_EQ(box_count(d, 0.1), 10u);
}

TEST(BoxDimension, StraightSegment) {
    auto c = iterate(sys::interval(), 12);
    std::vector<double> scales;
    for (int j = 0; j <= 8; ++j) scales.push_back(std::pow(10.0, -2.0 - j * 0.25));
    EXPECT_NEAR(box_dimension_estimate(c, scales), 1.0, 0.02);
}

TEST(BoxDimension, Koch) {
    auto c = iterate(sys::koch(), 9);
    std::vector<double> scales;
    for (int j = 2; j <= 7; ++j) scales.push_back(std::pow(3.0, -j));
    EXPECT_NEAR(box_dimension_estimate(c, scales), std::log(4.0) / std::log(3.0), 0.05);
}

TEST(BoxDimension, RejectsUnreliableScales) {
    auto c = iterate(sys::koch(), 3);
    EXPECT_THROW(box_dimension_estimate(c, {0.1, 0.01, 0.001}), InvalidInput);
    EXPECT_THROW(box_dimension_estimate(c, {0.5, 0.1}), InvalidInput);
    EXPECT_THROW(box_dimension_estimate(iterate(sys::koch(), 8), {0.5, 0.2, 0.1}), InvalidInput);
}
