#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <tuple>

#include "ifsarc/cone.hpp"
#include "ifsarc/quasiarc.hpp"
#include "ifsarc/systems.hpp"
#include "ifsarc/theorem14.hpp"

using namespace ifsarc;
namespace sys = ifsarc::systems;

TEST(EndMapConditions, RatioSearchFindsSmallestPowers) {
    const auto e = commensurable_ratios(sys::q(1, 4), sys::q(1, 2), 64);
    EXPECT_EQ(e.verdict, Verdict::Pass);
    EXPECT_EQ(e.provenance, Provenance::Exact);
    ASSERT_TRUE(e.witness);
    EXPECT_EQ(*e.witness, (std::pair<std::int64_t, std::int64_t>{1, 2}));
    const auto f = commensurable_ratios(sys::q(8, 27), sys::q(4, 9), 64);
    ASSERT_TRUE(f.witness);
    EXPECT_EQ(*f.witness, (std::pair<std::int64_t, std::int64_t>{2, 3}));
}

TEST(EndMapConditions, CoprimeRatiosFailWithinBound) {
    const auto e = commensurable_ratios(sys::q(1, 2), sys::q(1, 3), 64);
    EXPECT_EQ(e.verdict, Verdict::Fail);
    EXPECT_FALSE(e.witness);
}

TEST(EndMapConditions, ApproximateRatiosNeverFail) {
    const auto e = commensurable_ratios(sys::approx(0.5), sys::approx(1.0 / 3.0), 16);
    EXPECT_EQ(e.verdict, Verdict::Undecided);
    const auto f = commensurable_ratios(sys::approx(0.25), sys::approx(0.5), 16);
    EXPECT_EQ(f.verdict, Verdict::Pass);
    EXPECT_EQ(f.provenance, Provenance::Numeric);
}

TEST(EndMapConditions, RotationPowers) {
    const OrthogonalPart a = PlanarOrthogonal{Rotation2::turns(1, 6), false};
    const OrthogonalPart b = PlanarOrthogonal{Rotation2::turns(1, 4), false};
    const auto e = commensurable_orthogonal(a, b, 64);
    EXPECT_EQ(e.verdict, Verdict::Pass);
    ASSERT_TRUE(e.witness);
    EXPECT_EQ(*e.witness, (std::pair<std::int64_t, std::int64_t>{3, 2}));
}

TEST(EndMapConditions, IrrationalTokenCannotMatchRationalTurn) {
    const OrthogonalPart a = PlanarOrthogonal{Rotation2::opaque("1rad", 1.0, true), false};
    const OrthogonalPart b = PlanarOrthogonal{Rotation2::turns(0, 1), false};
    EXPECT_EQ(commensurable_orthogonal(a, b, 32).verdict, Verdict::Fail);
    const OrthogonalPart c = PlanarOrthogonal{Rotation2::opaque("1rad", 1.0, false), false};
    EXPECT_EQ(commensurable_orthogonal(c, b, 32).verdict, Verdict::Undecided);
}

TEST(EndMapConditions, GalleryQuasiarcsPassWithWitnesses) {
    for (const auto& path : {sys::koch(), sys::sab_quarter(), sys::sab_two_fifths(), sys::twisted_koch()}) {
        const auto r = check_theorem14(path);
        EXPECT_EQ(r.verdict(), Verdict::Pass);
        ASSERT_TRUE(r.m.has_value());
        EXPECT_GE(*r.m, 1);
        EXPECT_EQ(r.report().children.size(), 2u);
    }
}

TEST(EndMapConditions, PlanarCases) {
    const auto koch = check_theorem14(sys::koch()).planar_cases;
    EXPECT_NE(std::find(koch.begin(), koch.end(), 1), koch.end());
    // S_1 and S_4 of the twisted curve share the opaque angle, so only the equal-maps case applies.
    const auto tw = check_theorem14(sys::twisted_koch()).planar_cases;
    EXPECT_EQ(tw, std::vector<int>{4});
}

TEST(EndMapConditions, HairpinViolatesRatioCondition) {
    const auto r = check_theorem14(sys::hairpin());
    EXPECT_EQ(r.cond_a.verdict, Verdict::Fail);
    EXPECT_EQ(r.verdict(), Verdict::Fail);
}

TEST(Cone, GalleryVerdicts) {
    for (const auto& path : {sys::koch(), sys::sab_quarter(), sys::sab_two_fifths(), sys::gasket()}) {
        const auto r = check_cone_containment(path);
        EXPECT_EQ(r.verdict, Verdict::Pass);
        for (const auto& j : r.children) {
            EXPECT_GT(j.real("left_half_angle"), 0);
            EXPECT_LT(j.real("left_half_angle") + j.real("right_half_angle"), std::numbers::pi);
        }
    }
}

TEST(Cone, TwistedCurveFailsCertified) {
    const auto r = check_cone_containment(sys::twisted_koch());
    EXPECT_EQ(r.verdict, Verdict::Fail);
    EXPECT_TRUE(r.flag("certified"));
}

TEST(Cone, CarpetApexIsDegenerate) { EXPECT_THROW(check_cone_containment(sys::carpet()), DegenerateError); }

TEST(Cone, PassIsStableUnderRefinement) {
    for (int g = 4; g <= 7; ++g) EXPECT_EQ(check_cone_containment(sys::koch(), g).verdict, Verdict::Pass) << g;
}

TEST(SeparationConstant, IntervalIsOneHalf) {
    for (int g = 1; g <= 6; ++g) {
        const auto d = compute_DS(sys::interval(), g);
        // The lower bound gives away twice the certified error, which only carries sampling slack here.
        EXPECT_LE(d.lower, 0.5) << g;
        EXPECT_GT(d.lower, 0.5 - 1e-4) << g;
        EXPECT_NEAR(d.estimate, 0.5, 1e-15) << g;
    }
}

TEST(SeparationConstant, LowerBoundGrowsAndStaysBelowEstimate) {
    EXPECT_THROW(compute_DS(sys::koch(), 1), DegenerateError);
    double prev = -1;
    for (int g = 2; g <= 7; ++g) {
        const auto d = compute_DS(sys::koch(), g);
        EXPECT_GE(d.lower, prev) << g;
        EXPECT_LE(d.lower, d.estimate + 1e-15) << g;
        prev = d.lower;
    }
    EXPECT_GT(prev, 0);
}

TEST(SeparationConstant, RefusesNonArcs) { EXPECT_THROW(compute_DS(sys::gasket(), 4), InvalidInput); }

TEST(CaseTriples, MatchBruteForceOnKoch) {
    const int g = 3;
    const std::size_t n = 4, total = 64;
    auto gen_of = [&](std::size_t v) {
        int m = 0;
        std::size_t step = total;
        while (v % step != 0) step /= n, ++m;
        return m;
    };
    std::set<std::tuple<std::size_t, std::size_t, std::size_t, int, int, int>> brute;
    for (std::size_t x = 0; x <= total; ++x)
        for (std::size_t y = x + 2; y <= total; ++y) {
            int coarsest = g + 1, count = 0;
            std::size_t z = 0;
            for (std::size_t v = x + 1; v < y; ++v) {
                const int gv = gen_of(v);
                if (gv < coarsest) coarsest = gv, count = 1, z = v;
                else if (gv == coarsest) ++count;
            }
            if (count != 1 || coarsest < 1 || coarsest > g - 1 || gen_of(x) <= coarsest || gen_of(y) <= coarsest) continue;
            const std::size_t step = static_cast<std::size_t>(std::pow(4.0, g - coarsest));
            int k = 0, l = 0;
            for (std::size_t size = step / n; size >= 1 && z - x <= size; size /= n) ++k;
            for (std::size_t size = step / n; size >= 1 && y - z <= size; size /= n) ++l;
            brute.insert({x, z, y, coarsest, k, l});
        }
    std::set<std::tuple<std::size_t, std::size_t, std::size_t, int, int, int>> got;
    for (const auto& t : enumerate_case2_triples(sys::koch(), g)) got.insert({t.x, t.z, t.y, t.m, t.k, t.l});
    EXPECT_EQ(got, brute);
}

TEST(CaseTriples, IntervalExamples) {
    // Generation 3 of the interval: vertex j is the point j/8.
    const auto ts = enumerate_case2_triples(sys::interval(), 3);
    auto find = [&](std::size_t x, std::size_t z, std::size_t y) {
        return std::find_if(ts.begin(), ts.end(), [&](const CaseTriple& t) { return t.x == x && t.z == z && t.y == y; });
    };
    const auto a = find(1, 4, 6);
    ASSERT_NE(a, ts.end());
    EXPECT_EQ(a->m, 1);
    EXPECT_EQ(a->sigma_m, 1);
    EXPECT_EQ(a->k, 0);
    const auto b = find(2, 4, 6);
    ASSERT_NE(b, ts.end());
    EXPECT_EQ(b->k, 1);
    EXPECT_EQ(find(0, 4, 6), ts.end());  // 0 is itself a generation-1 vertex
}

TEST(BoundedTurning, IntervalConstant) {
    const auto r = bt_constant(sys::interval(), 5);
    EXPECT_DOUBLE_EQ(r.c_triple, 1.0);
    EXPECT_NEAR(r.c_bt, 4.0, 1e-4);
    EXPECT_GE(r.c_bt, 4.0);
    EXPECT_EQ(r.verdict, Verdict::Pass);
}

TEST(BoundedTurning, StableOnQuasiarcs) {
    for (const auto& path : {sys::koch(), sys::sab_quarter(), sys::sab_two_fifths(), sys::twisted_koch()}) {
        const auto a = bt_constant(path, 7), b = bt_constant(path, 8);
        EXPECT_EQ(b.verdict, Verdict::Pass);
        EXPECT_LT(std::abs(b.c_triple - a.c_triple) / a.c_triple, 0.05);
        EXPECT_EQ(b.converse_violations, 0u);
    }
}

TEST(BoundedTurning, HairpinConstantJumps) {
    const auto a = triple_constant(iterate(sys::hairpin(), 7).polyline, 5);
    const auto b = triple_constant(iterate(sys::hairpin(), 8).polyline, 5);
    EXPECT_GT(b, 1.2 * a);
}

TEST(BoundedTurning, ConstantAtLeastOne) {
    for (int g = 1; g <= 6; ++g) EXPECT_GE(triple_constant(iterate(sys::koch(), g).polyline, 4), 1.0);
}
