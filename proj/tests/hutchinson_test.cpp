#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ifsarc/hutchinson.hpp"
#include "ifsarc/systems.hpp"

using namespace ifsarc;

TEST(Partition, IntervalHalves) {
    const Partition p = build_partition(systems::interval()).partition;
    ASSERT_TRUE(p.is_exact());
    EXPECT_EQ(*p.exact_t, (std::vector<Rational>{0, Rational(1, 2), 1}));
    EXPECT_NEAR(p.s, 1.0, 1e-12);
}

TEST(Partition, KochQuarters) {
    const Partition p = build_partition(systems::koch()).partition;
    ASSERT_TRUE(p.is_exact());
    EXPECT_EQ(*p.exact_t, (std::vector<Rational>{0, Rational(1, 4), Rational(1, 2), Rational(3, 4), 1}));
}

TEST(Partition, UnequalRatiosSumToOne) {
    const Partition p = build_partition(systems::sab_quarter()).partition;
    EXPECT_FALSE(p.is_exact());
    double sum = 0;
    for (double l : p.lengths) sum += l;
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_EQ(p.t.front(), 0.0);
    EXPECT_EQ(p.t.back(), 1.0);
    for (std::size_t i = 0; i + 1 < p.t.size(); ++i) EXPECT_LT(p.t[i], p.t[i + 1]);
}

TEST(Partition, CompanionIsOneDimensionalPath) {
    const auto h = build_partition(systems::sab_two_fifths());
    EXPECT_EQ(h.companion.dim(), 1);
    EXPECT_EQ(validate_path(h.companion).verdict, Verdict::Pass);
}

TEST(Address, IntervalExample) {
    const Partition p = build_partition(systems::interval()).partition;
    EXPECT_EQ(address_of(0.3, 2, p), (Word{{1, 2}}));
    EXPECT_EQ(address_of(Rational(3, 10), 2, p), (Word{{1, 2}}));
}

TEST(Address, EndpointsAndTies) {
    const Partition p = build_partition(systems::koch()).partition;
    EXPECT_EQ(address_of(0.0, 3, p), (Word{{1, 1, 1}}));
    EXPECT_EQ(address_of(1.0, 3, p), (Word{{4, 4, 4}}));
    EXPECT_EQ(address_of(Rational(1, 2), 2, p), (Word{{2, 4}}));
}

TEST(Address, ContainsParameter) {
    const auto h = build_partition(systems::sab_quarter());
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 200; ++i) {
        const double t = u(rng);
        const Word w = address_of(t, 6, h.partition);
        const double lo = companion_image(h.partition, w, 0.0), hi = companion_image(h.partition, w, 1.0);
        EXPECT_LE(lo, t + 1e-12);
        EXPECT_GE(hi, t - 1e-12);
    }
}

TEST(EvalPhi, KochMidpoint) {
    const ParamPoint p = eval_phi(systems::koch(), 0.5, 1e-12);
    EXPECT_TRUE(p.at_vertex);
    EXPECT_NEAR(p.value[0], 0.5, 1e-14);
    EXPECT_NEAR(p.value[1], std::sqrt(3.0) / 6.0, 1e-14);
}

TEST(EvalPhi, IntervalIsIdentity) {
    const Parameterization phi(systems::interval_thirds());
    for (double t : {0.0, 0.1, 0.37, 0.5, 0.9, 1.0}) {
        const ParamPoint p = phi.eval(t, 1e-12);
        EXPECT_NEAR(p.value[0], t, 1e-12);
        EXPECT_NEAR(p.value[1], 0.0, 1e-15);
        EXPECT_LE(p.error, 1e-12);
    }
}

TEST(EvalPhi, MatchesPolylineVertices) {
    for (const IfsPath& path : {systems::koch(), systems::sab_quarter(), systems::gasket()}) {
        const Parameterization phi(path);
        const Polyline v = iterate(path, 4).polyline;
        const Polyline u = iterate(build_partition(path).companion, 4).polyline;
        for (std::size_t j = 0; j < v.size(); j += 7) {
            const ParamPoint p = phi.eval(u.point(j)[0], 1e-10);
            EXPECT_LE(dist(p.value, v.point(j)), 1e-9) << j;
        }
    }
}

TEST(EvalPhi, ErrorCertificate) {
    const IfsPath path = systems::twisted_koch();
    const Parameterization phi(path);
    const ParamPoint coarse = phi.eval(0.3141, 1e-3), fine = phi.eval(0.3141, 1e-13);
    EXPECT_LE(coarse.error, 1e-3);
    EXPECT_LE(dist(coarse.value, fine.value), coarse.error + fine.error);
}

TEST(EvalPhi, Budget) {
    const Parameterization phi(systems::koch(), 10);
    EXPECT_THROW(phi.eval(Rational(1, 3), 1e-12), BudgetError);
    EXPECT_NO_THROW(phi.eval(Rational(1, 3), 1e-4));
}

TEST(EvalPhi, OutOfRange) { EXPECT_THROW(eval_phi(systems::koch(), 1.5, 1e-6), InvalidInput); }

TEST(StructuralIdentity, Gallery) {
    for (const IfsPath& path : {systems::koch(), systems::twisted_koch(), systems::sab_quarter(), systems::sab_two_fifths(),
                                systems::gasket(), systems::carpet(), systems::interval()}) {
        const Parameterization phi(path);
        std::mt19937_64 rng(11);
        for (int w = 0; w < 5; ++w) {
            Word word;
            const int len = 1 + static_cast<int>(rng() % 4);
            for (int i = 0; i < len; ++i) word.letters.push_back(1 + static_cast<int>(rng() % path.size()));
            EXPECT_LE(check_structural_identity(phi, path, word, 50, 1e-10, rng()), 3e-10) << word.to_string();
        }
    }
}

TEST(Holder, KochRatiosBounded) {
    const HolderProfile h = holder_profile(systems::koch(), 4);
    EXPECT_EQ(h.pairs, 257u * 256u / 2u);
    EXPECT_GT(h.inf_ratio, 0.0);
    EXPECT_LT(h.sup_ratio, 10.0);
    // Endpoints: d(0, e1) / 1 = 1.
    EXPECT_LE(h.inf_ratio, 1.0);
    EXPECT_GE(h.sup_ratio, 1.0);
}

TEST(Holder, IntervalIsIsometric) {
    const HolderProfile h = holder_profile(systems::interval(), 6);
    EXPECT_NEAR(h.sup_ratio, 1.0, 1e-12);
    EXPECT_NEAR(h.inf_ratio, 1.0, 1e-12);
}

TEST(Arclength, KochExact) {
    const Partition p = build_partition(systems::koch()).partition;
    const ArclengthResult r = arclength_identity(p, Rational(0), Rational(1, 2), 6);
    ASSERT_TRUE(r.lhs_exact && r.rhs_exact);
    EXPECT_EQ(*r.lhs_exact, *r.rhs_exact);
    EXPECT_EQ(*r.rhs_exact, Rational(1, 2));
    EXPECT_EQ(r.intervals, 2u);
}

TEST(Arclength, RandomIntervalsExact) {
    const Partition p = build_partition(systems::koch()).partition;
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        Rational u(static_cast<long long>(rng() >> 34), 1LL << 30), v(static_cast<long long>(rng() >> 34), 1LL << 30);
        if (u == v) continue;
        if (u > v) std::swap(u, v);
        const ArclengthResult r = arclength_identity(p, u, v, 10);
        EXPECT_EQ(*r.lhs_exact, *r.rhs_exact);
        EXPECT_LE(rational_to_double(v - u - *r.rhs_exact), 2.0 * std::pow(4.0, -10));
        EXPECT_GE(rational_to_double(v - u - *r.rhs_exact), 0.0);
    }
}

TEST(Arclength, InexactPartition) {
    const Partition p = build_partition(systems::sab_two_fifths()).partition;
    const ArclengthResult r = arclength_identity(p, 0.123, 0.789, 10);
    EXPECT_NEAR(r.lhs, r.rhs, 1e-12);
    EXPECT_LE(0.789 - 0.123 - r.rhs, 2.0 * std::pow(p.lengths.empty() ? 0 : *std::max_element(p.lengths.begin(), p.lengths.end()), 10) + 1e-12);
}

TEST(Arclength, InvalidInterval) {
    const Partition p = build_partition(systems::koch()).partition;
    EXPECT_THROW(arclength_identity(p, 0.5, 0.25, 3), InvalidInput);
}
