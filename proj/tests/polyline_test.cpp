#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ifsarc/polyline.hpp"

using namespace ifsarc;

namespace {

Polyline random_walk(std::mt19937& rng, std::size_t n, double step) {
    std::normal_distribution<double> g(0, step);
    Polyline p(2);
    double x = 0, y = 0;
    for (std::size_t i = 0; i < n; ++i) {
        p.push(std::vector<double>{x, y});
        x += g(rng);
        y += g(rng);
    }
    return p;
}

double brute_point_distance(std::span<const double> x, const Polyline& p) {
    double best = 1e300;
    for (std::size_t s = 0; s < p.segments(); ++s) best = std::min(best, point_segment_distance(x, p.point(s), p.point(s + 1)));
    return best;
}

}  // namespace

TEST(Segments, PointSegmentDistance) {
    std::vector<double> a{0, 0}, b{1, 0}, x{0.5, 2}, y{-3, 4};
    EXPECT_DOUBLE_EQ(point_segment_distance(x, a, b), 2.0);
    EXPECT_DOUBLE_EQ(point_segment_distance(y, a, b), 5.0);
    EXPECT_DOUBLE_EQ(point_segment_distance(y, a, a), 5.0);
}

TEST(Segments, SegmentDistanceMatchesSampling) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 300; ++trial) {
        const int n = trial % 2 ? 2 : 3;
        std::vector<double> p1(n), q1(n), p2(n), q2(n);
        for (int i = 0; i < n; ++i) p1[i] = u(rng), q1[i] = u(rng), p2[i] = u(rng), q2[i] = u(rng);
        double d = segment_segment_distance(p1, q1, p2, q2);
        double brute = 1e300;
        std::vector<double> x(n);
        for (int s = 0; s <= 400; ++s) {
            for (int i = 0; i < n; ++i) x[i] = p1[i] + (q1[i] - p1[i]) * s / 400.0;
            brute = std::min(brute, point_segment_distance(x, p2, q2));
        }
        EXPECT_LE(d, brute + 1e-12);
        EXPECT_GE(d, brute - 0.01);
    }
}

TEST(Segments, CrossingSegmentsHaveZeroDistance) {
    std::vector<double> a{0, 0}, b{1, 1}, c{0, 1}, d{1, 0};
    EXPECT_NEAR(segment_segment_distance(a, b, c, d), 0.0, 1e-15);
    std::vector<double> e{2, 0}, f{3, 0}, g{0, 0}, h{1, 0};
    EXPECT_DOUBLE_EQ(segment_segment_distance(e, f, g, h), 1.0);
}

TEST(SegmentGrid, NearestMatchesBruteForce) {
    std::mt19937 rng(5);
    Polyline p = random_walk(rng, 3000, 0.01);
    SegmentGrid grid(p);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 500; ++i) {
        std::vector<double> x{u(rng), u(rng)};
        EXPECT_DOUBLE_EQ(grid.distance(x), brute_point_distance(x, p));
    }
}

TEST(Hausdorff, ParallelSegments) {
    Polyline a(2), b(2);
    a.push(std::vector<double>{0, 0});
    a.push(std::vector<double>{1, 0});
    b.push(std::vector<double>{0, 0.25});
    b.push(std::vector<double>{2, 0.25});
    EXPECT_NEAR(directed_hausdorff(a, b, 1e-3), 0.25, 1e-15);
    EXPECT_NEAR(directed_hausdorff(b, a, 1e-3), std::hypot(1.0, 0.25), 1e-12);
    EXPECT_NEAR(hausdorff(a, b), std::hypot(1.0, 0.25), 1e-12);
}

TEST(Hausdorff, InteriorMaximumIsRefined) {
    // Distance from the middle of [0,1]x{0} to the tent is maximal at an interior point between samples.
    Polyline a(2), b(2);
    a.push(std::vector<double>{0, 0});
    a.push(std::vector<double>{1, 0});
    b.push(std::vector<double>{0, 0});
    b.push(std::vector<double>{0.5, 0.5});
    b.push(std::vector<double>{1, 0});
    const double exact = 0.5 / std::sqrt(2.0);
    EXPECT_NEAR(directed_hausdorff(a, b, 0.3), exact, 1e-12);
}

TEST(Hausdorff, SymmetricAndMatchesDenseOracle) {
    std::mt19937 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        Polyline a = random_walk(rng, 40, 0.1), b = random_walk(rng, 50, 0.1);
        const double h = hausdorff(a, b);
        EXPECT_DOUBLE_EQ(h, hausdorff(b, a));
        double oracle = 0;
        for (const auto* pair : {&a, &b}) {
            const Polyline& from = *pair;
            const Polyline& to = pair == &a ? b : a;
            for (std::size_t s = 0; s < from.segments(); ++s)
                for (int k = 0; k <= 2000; ++k) {
                    std::vector<double> x{from.point(s)[0] + (from.point(s + 1)[0] - from.point(s)[0]) * k / 2000.0,
                                          from.point(s)[1] + (from.point(s + 1)[1] - from.point(s)[1]) * k / 2000.0};
                    oracle = std::max(oracle, brute_point_distance(x, to));
                }
        }
        EXPECT_GE(h, oracle - 1e-12);
        EXPECT_LE(h, oracle + 1e-4);
    }
}
