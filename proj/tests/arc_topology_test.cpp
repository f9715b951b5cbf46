#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ifsarc/arc_topology.hpp"
#include "ifsarc/non_arc.hpp"
#include "ifsarc/systems.hpp"

using namespace ifsarc;
namespace sys = ifsarc::systems;

namespace {

double curve_diameter(const LevelCurve& c) {
    double d = 0;
    for (std::size_t a = 0; a < c.polyline.size(); ++a)
        for (std::size_t b = a + 1; b < c.polyline.size(); ++b) d = std::max(d, distance(c.polyline.point(a), c.polyline.point(b)));
    return d;
}

IfsPath spiral_with_reflected_end() {
    const auto base = sys::irrational_spiral();
    auto maps = base.maps();
    maps.back() = sys::planar(sys::q(7, 20), sys::turns(0, 1), true, sys::q(13, 20), 0);
    return IfsPath(maps, true);
}

}  // namespace

TEST(CertifyArc, GalleryVerdicts) {
    struct Case {
        const char* name;
        IfsPath path;
        Verdict expected;
    };
    const std::vector<Case> cases{{"interval", sys::interval(), Verdict::CertifiedArc},
                                  {"interval_thirds", sys::interval_thirds(), Verdict::CertifiedArc},
                                  {"koch", sys::koch(), Verdict::CertifiedArc},
                                  {"twisted_koch", sys::twisted_koch(), Verdict::CertifiedArc},
                                  {"sab_quarter", sys::sab_quarter(), Verdict::CertifiedArc},
                                  {"sab_two_fifths", sys::sab_two_fifths(), Verdict::CertifiedArc},
                                  {"gasket", sys::gasket(), Verdict::NonArcWitness},
                                  {"carpet", sys::carpet(), Verdict::NonArcWitness}};
    for (const auto& c : cases) {
        const auto cert = certify_arc(c.path);
        EXPECT_EQ(cert.verdict, c.expected) << c.name;
        if (c.expected == Verdict::CertifiedArc) EXPECT_LE(cert.generation, 10) << c.name;
    }
    EXPECT_EQ(certify_arc(sys::interval()).generation, 1);
}

TEST(CertifyArc, GasketWitnessIsAForbiddenCoincidence) {
    const auto cert = certify_arc(sys::gasket());
    ASSERT_TRUE(cert.coincidence.has_value());
    const auto& w = *cert.coincidence;
    EXPECT_GE(w.copy_j, w.copy_i + 2);
    EXPECT_LE(w.distance, 1e-12);
    // Recompute both points from their addresses.
    const auto numeric = sys::gasket().numeric();
    auto fixed = [&](const Word& addr, const Word& period) {
        const AffineMap per = word_affine(sys::gasket(), numeric, period);
        std::vector<double> x{0.0, 0.0};
        for (int k = 0; k < 200; ++k) x = per(x);
        return word_affine(sys::gasket(), numeric, addr)(x);
    };
    EXPECT_LE(distance(fixed(w.address_i, w.period_i), fixed(w.address_j, w.period_j)), 1e-12);
}

TEST(CertifyArc, SoundAgainstAllPairsOneLevelDeeper) {
    for (const auto& path : {sys::interval_thirds(), sys::koch(), sys::twisted_koch(), sys::sab_quarter(), sys::sab_two_fifths()}) {
        const auto cert = certify_arc(path);
        ASSERT_EQ(cert.verdict, Verdict::CertifiedArc);
        const auto c = level_curve(path, cert.generation + 1);
        ASSERT_LE(c.polyline.size(), 40000u);
        for (const auto& pair : cert.pairs) {
            if (pair.generation == 0) continue;
            const std::size_t i = pair.i - 1, j = pair.j - 1;
            const auto apex = c.polyline.point(c.copy_start[j]);
            double worst = std::numeric_limits<double>::infinity();
            for (std::size_t a = c.copy_start[i]; a <= c.copy_start[i + 1]; ++a)
                for (std::size_t b = c.copy_start[j]; b <= c.copy_start[j + 1]; ++b) {
                    if (pair.adjacent && (distance(c.polyline.point(a), apex) < pair.junction_radius ||
                                          distance(c.polyline.point(b), apex) < pair.junction_radius))
                        continue;
                    worst = std::min(worst, distance(c.polyline.point(a), c.polyline.point(b)));
                }
            EXPECT_GE(worst, pair.margin) << "copies " << pair.i << "," << pair.j;
        }
    }
}

TEST(CertifyArc, HairpinNeedsDeepLevelsButCertifies) {
    const auto cert = certify_arc(sys::hairpin());
    EXPECT_EQ(cert.verdict, Verdict::CertifiedArc);
    EXPECT_GT(cert.generation, 10);
}

TEST(CertifyArc, ReportListsEveryPair) {
    const auto r = certify_arc(sys::koch()).report();
    EXPECT_EQ(r.verdict, Verdict::CertifiedArc);
    EXPECT_EQ(r.children.size(), 6u);
    EXPECT_GT(r.real("min_margin"), 0);
}

TEST(NonArcCriteria, KochFailsOnRationalAngles) {
    const auto r = check_thm18_conditions(sys::koch());
    EXPECT_EQ(r.verdict, Verdict::Fail);
    EXPECT_EQ(r.text("note"), "criteria not met");
    EXPECT_EQ(r.children.front().verdict, Verdict::Fail);
}

TEST(NonArcCriteria, SpiralMeetsCriteria) {
    const auto r = check_thm18_conditions(sys::irrational_spiral());
    EXPECT_EQ(r.verdict, Verdict::Pass);
    EXPECT_EQ(r.text("rule"), "main");
    const auto& c2 = r.children.front();
    EXPECT_EQ(c2.name, "condition2");
    EXPECT_EQ(c2.verdict, Verdict::Pass);
    EXPECT_EQ(c2.real("t"), 1);
    EXPECT_EQ(c2.real("s"), 1);
}

TEST(NonArcCriteria, UnmarkedOpaqueAngleIsUndecided) {
    // Same geometry but the end angle is not asserted irrational.
    const auto base = sys::irrational_spiral();
    auto maps = base.maps();
    maps.front() = sys::planar(sys::q(7, 20), Rotation2::opaque("1rad", 1.0, false), false, 0, 0);
    const auto r = check_thm18_conditions(IfsPath(maps, true));
    EXPECT_EQ(r.verdict, Verdict::Undecided);
    EXPECT_TRUE(r.children.front().flag("irrationality_unknown"));
}

TEST(NonArcCriteria, ReflectingLastMapUsesVariantRule) {
    const auto r = check_thm18_conditions(spiral_with_reflected_end());
    EXPECT_EQ(r.text("rule"), "variant");
    const auto& v = r.children.front();
    EXPECT_EQ(v.name, "variant");
    EXPECT_EQ(v.real("t"), 2);
    EXPECT_EQ(v.verdict, Verdict::Pass);
}

TEST(NonArcCriteria, ReflectingFirstMapHasNoRule) {
    const auto base = sys::irrational_spiral();
    auto maps = base.maps();
    maps.front() = sys::planar(sys::q(7, 20), Rotation2::opaque("1rad", 1.0, true), true, 0, 0);
    const auto r = check_thm18_conditions(IfsPath(maps, true));
    EXPECT_EQ(r.text("rule"), "none");
    EXPECT_EQ(r.verdict, Verdict::Fail);
}

TEST(RotationObstruction, DifferentMaximalRadiiPassRadially) {
    const auto r = rotation_obstruction(sys::irrational_spiral(), 1);
    ASSERT_EQ(r.children.size(), 2u);
    // The second copy reaches farther from the apex than the first ever does.
    EXPECT_EQ(r.children[1].verdict, Verdict::Pass);
    EXPECT_EQ(r.children[1].text("method"), "radial");
    EXPECT_EQ(r.verdict, Verdict::Pass);
}

TEST(RotationObstruction, MirrorCopiesAreUndecided) {
    // [0, 1/2] and [1/2, 1] are half-turns of each other about 1/2.
    const auto r = rotation_obstruction(sys::interval(), 1, 4);
    EXPECT_EQ(r.verdict, Verdict::Undecided);
    for (const auto& d : r.children) {
        EXPECT_EQ(d.verdict, Verdict::Undecided);
        EXPECT_NEAR(std::abs(std::remainder(d.real("suspect_angle"), 2 * std::numbers::pi)), std::numbers::pi, 1e-5);
    }
}

TEST(RotationObstruction, StableUnderRefinement) {
    for (int g = 7; g <= 10; ++g) EXPECT_EQ(rotation_obstruction(sys::irrational_spiral(), 1, g).verdict, Verdict::Pass) << g;
}

TEST(RotationObstruction, AgreesWithDenseAngleSampling) {
    const auto path = sys::sab_quarter();
    const int g = 6;
    const auto c = level_curve(path, g);
    for (std::size_t i = 1; i < path.size(); ++i) {
        const auto r = rotation_obstruction(path, i, g);
        const auto jp = detail::junction_pair(c, i);
        for (int side = 0; side < 2; ++side) {
            // A sampled angle is possible when every exact point lands within the error of the other copy.
            int possible = 0;
            std::vector<double> y(2);
            for (int k = 0; k < 10000; ++k) {
                const double th = 2 * std::numbers::pi * k / 10000.0;
                const double cs = std::cos(th), sn = std::sin(th);
                bool inside = true;
                for (const auto& x : jp.points[side]) {
                    detail::rotate_about(x, jp.apex, cs, sn, y);
                    if (distance_to(jp.segments[1 - side], y) > jp.error) {
                        inside = false;
                        break;
                    }
                }
                possible += inside;
            }
            if (r.children[static_cast<std::size_t>(side)].verdict == Verdict::Pass) EXPECT_EQ(possible, 0) << "junction " << i << " side " << side;
        }
    }
}

TEST(RotationObstruction, RejectsBadJunction) {
    EXPECT_THROW(rotation_obstruction(sys::koch(), 0), InvalidInput);
    EXPECT_THROW(rotation_obstruction(sys::koch(), 4), InvalidInput);
}

TEST(LoopWitness, SpiralClosesALoop) {
    const auto path = sys::irrational_spiral();
    const auto w = find_loop_witness(path);
    ASSERT_TRUE(w.has_value());
    const auto c = level_curve(path, 8);
    const double diam = curve_diameter(c);
    EXPECT_LE(w->gap, 1e-9 * diam);
    EXPECT_GT(w->apex_distance, 1e-3 * diam);

    const auto numeric = path.numeric();
    const std::vector<double> zero{0.0, 0.0}, e1{1.0, 0.0};
    const auto z = c.polyline.point(c.copy_start[w->junction]);
    // Both renormalized copies end at the apex.
    EXPECT_LE(distance(word_affine(path, numeric, w->word_a)(e1), z), 1e-12);
    EXPECT_LE(distance(word_affine(path, numeric, w->word_b)(zero), z), 1e-12);

    // Rebuild the two points in the renormalized frame from the words alone.
    const std::size_t la = w->word_a.letters.size(), lb = w->word_b.letters.size();
    Word ua{{static_cast<int>(w->junction)}}, ub{{static_cast<int>(w->junction + 1)}};
    ua.letters.insert(ua.letters.end(), w->point_a.letters.begin() + static_cast<std::ptrdiff_t>(la), w->point_a.letters.end());
    ub.letters.insert(ub.letters.end(), w->point_b.letters.begin() + static_cast<std::ptrdiff_t>(lb), w->point_b.letters.end());
    const auto pa = word_affine(path, numeric, ua)(zero);
    const auto pb = word_affine(path, numeric, ub)(zero);
    std::vector<double> ra(2);
    detail::rotate_about(pa, z, std::cos(w->angle), std::sin(w->angle), ra);
    EXPECT_LE(distance(ra, pb), 1e-9 * diam);
    EXPECT_GT(distance(pb, z), 1e-3 * diam);

    // In γ itself the two points sit in adjacent copies, a scaled copy of the same picture.
    const double rho = std::pow(7.0 / 20.0, static_cast<double>(w->m * w->s));
    const auto ga = word_affine(path, numeric, w->point_a)(zero);
    const auto gb = word_affine(path, numeric, w->point_b)(zero);
    EXPECT_LE(distance(ga, gb), 1e-9 * diam * rho);
    EXPECT_NEAR(distance(gb, z), rho * w->apex_distance, 1e-12);
    EXPECT_EQ(w->point_a.letters.front(), static_cast<int>(w->junction));
    EXPECT_EQ(w->point_b.letters.front(), static_cast<int>(w->junction + 1));
}

TEST(LoopWitness, NoneOnArcs) {
    EXPECT_FALSE(find_loop_witness(sys::koch()).has_value());
    EXPECT_FALSE(find_loop_witness(sys::interval()).has_value());
}

TEST(LoopWitness, VariantInstanceAlsoLoops) {
    const auto w = find_loop_witness(spiral_with_reflected_end());
    ASSERT_TRUE(w.has_value());
    EXPECT_EQ(w->s % 2, 0);
}
