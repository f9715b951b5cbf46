#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ifsarc/ifs_path.hpp"
#include "ifsarc/successive.hpp"
#include "ifsarc/systems.hpp"

using namespace ifsarc;
namespace sys = ifsarc::systems;

namespace {

// Conjugates a planar path by z ↦ w·z + t (complex notation) with exact w, t; reflections pick up
// twice the argument of w, carried as a named angle.
IfsPath conjugate(const IfsPath& p, Rational wx, Rational wy, Rational tx, Rational ty) {
    std::vector<Similarity> out;
    const Rotation2 beta = Rotation2::opaque("arg(" + rational_to_string(wx) + "," + rational_to_string(wy) + ")",
                                             std::atan2(wy.convert_to<double>(), wx.convert_to<double>()), true);
    for (const auto& s : p.maps()) {
        const auto& po = std::get<PlanarOrthogonal>(s.orthogonal());
        Rotation2 rot = po.reflect ? po.rotation + beta.times(2) : po.rotation;
        if (wx != 0 && wy == 0 && wx > 0) rot = po.rotation;
        // New translation Ψ(S(Ψ⁻¹(0))) computed in doubles (exact inputs are only needed for the endpoints).
        const double ax = wx.convert_to<double>(), ay = wy.convert_to<double>();
        const double n2 = ax * ax + ay * ay;
        const double ux = -tx.convert_to<double>(), uy = -ty.convert_to<double>();
        std::vector<double> pre{(ax * ux + ay * uy) / n2, (ax * uy - ay * ux) / n2};
        auto img = s.numeric()(pre);
        const double bx = ax * img[0] - ay * img[1] + tx.convert_to<double>();
        const double by = ax * img[1] + ay * img[0] + ty.convert_to<double>();
        out.push_back(sys::planar(s.ratio(), rot, po.reflect, Scalar::approx(bx), Scalar::approx(by)));
    }
    return IfsPath(out);
}

double max_map_difference(const IfsPath& a, const IfsPath& b) {
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto ma = a.maps()[i].numeric(), mb = b.maps()[i].numeric();
        for (std::size_t j = 0; j < ma.m.size(); ++j) d = std::max(d, std::abs(ma.m[j] - mb.m[j]));
        for (std::size_t j = 0; j < ma.b.size(); ++j) d = std::max(d, std::abs(ma.b[j] - mb.b[j]));
    }
    return d;
}

}  // namespace

TEST(WordMap, RatiosMultiply) {
    auto k = sys::koch();
    auto m = std::get<Similarity>(word_map(k, Word{{1, 4}}));
    ASSERT_TRUE(m.ratio().is_exact());
    EXPECT_EQ(m.ratio().rational(), Rational(1, 9));
    auto sab = sys::sab(Scalar::exact(1, 4), Scalar::exact(3, 8));
    auto m2 = std::get<Similarity>(word_map(sab, Word{{1, 2, 3}}));
    EXPECT_EQ(m2.ratio().rational(), Rational(9, 256));
    EXPECT_TRUE(std::holds_alternative<Identity>(word_map(k, Word{})));
    EXPECT_THROW(word_map(k, Word{{5}}), InvalidInput);
}

TEST(WordMap, AgreesWithSequentialApplication) {
    std::mt19937 rng(11);
    for (const auto& p : {sys::koch(), sys::gasket(), sys::carpet(), sys::twisted_koch()}) {
        std::uniform_int_distribution<int> letter(1, static_cast<int>(p.size()));
        for (int trial = 0; trial < 20; ++trial) {
            Word w;
            for (int i = 0; i < 6; ++i) w.letters.push_back(letter(rng));
            Point x{Scalar::approx(0.37), Scalar::approx(-0.21)};
            Point y = x;
            for (auto it = w.letters.rbegin(); it != w.letters.rend(); ++it) y = image(p.map(*it), y);
            EXPECT_LT(distance(image(word_map(p, w), x), y), 1e-14);
            auto a = word_affine(p, p.numeric(), w)(to_double(x));
            EXPECT_LT(distance(a, to_double(y)), 1e-14);
        }
    }
}

TEST(Validate, GalleryPathsPass) {
    for (const auto& p : {sys::interval(), sys::koch(), sys::gasket(), sys::carpet(), sys::twisted_koch(), sys::sab_quarter()})
        EXPECT_EQ(validate_path(p).verdict, Verdict::Pass) << to_text(validate_path(p));
    auto [a, b] = endpoints(sys::interval());
    EXPECT_EQ(a, origin(2));
    EXPECT_EQ(b, unit_e1(2));
}

TEST(Validate, InjectedDefectReportsResidual) {
    auto p = sys::interval_thirds();
    std::vector<Similarity> maps = p.maps();
    maps[1] = sys::planar(Scalar::exact(1, 3), Rotation2::turns(0, 1), false, Scalar::exact(1, 3) + Scalar::exact(1, 100), 0);
    auto r = validate_path(IfsPath(maps));
    EXPECT_EQ(r.verdict, Verdict::Fail);
    const Field* f = r.find("chain(1,2)_residual");
    ASSERT_NE(f, nullptr);
    EXPECT_EQ(std::get<double>(f->value), 0.01);
    EXPECT_EQ(f->provenance, Provenance::Exact);
}

TEST(Validate, RejectsTooFewMaps) {
    EXPECT_THROW(IfsPath({sys::interval().maps()[0]}), InvalidInput);
}

TEST(Normalize, IdempotentOnNormalizedPaths) {
    for (const auto& p : {sys::koch(), sys::carpet(), sys::gasket()}) {
        auto n = normalize(p);
        EXPECT_TRUE(n.normalized());
        for (std::size_t i = 0; i < p.size(); ++i) {
            EXPECT_EQ(n.maps()[i].translation(), p.maps()[i].translation());
            EXPECT_EQ(n.maps()[i].ratio(), p.maps()[i].ratio());
        }
        auto nn = normalize(n);
        EXPECT_EQ(max_map_difference(n, nn), 0.0);
    }
}

TEST(Normalize, RecoversTranslatedAndScaledInterval) {
    auto p = sys::interval();
    // Ψ(x) = 3x + (5, 7): S'(y) = y/2 + (5,7)/2 + 3c for S(x) = x/2 + c.
    std::vector<Similarity> maps;
    maps.push_back(sys::planar(Scalar::exact(1, 2), Rotation2::turns(0, 1), false, Scalar::exact(5, 2), Scalar::exact(7, 2)));
    maps.push_back(sys::planar(Scalar::exact(1, 2), Rotation2::turns(0, 1), false, Scalar::exact(5, 2) + Scalar::exact(3, 2), Scalar::exact(7, 2)));
    auto n = normalize(IfsPath(maps));
    ASSERT_TRUE(n.is_exact());
    for (std::size_t i = 0; i < p.size(); ++i) EXPECT_EQ(n.maps()[i].translation(), p.maps()[i].translation());
    EXPECT_TRUE(is_normalized(n));
}

TEST(Normalize, RecoversRotatedGasketAndCarpet) {
    for (const auto& p : {sys::gasket(), sys::carpet(), sys::twisted_koch()}) {
        auto moved = conjugate(p, 3, 4, -2, 1);
        EXPECT_FALSE(is_normalized(moved));
        auto n = normalize(moved);
        EXPECT_TRUE(is_normalized(n));
        EXPECT_LT(max_map_difference(n, p), 1e-12);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const auto& a = std::get<PlanarOrthogonal>(n.maps()[i].orthogonal());
            const auto& b = std::get<PlanarOrthogonal>(p.maps()[i].orthogonal());
            EXPECT_EQ(a.reflect, b.reflect);
            EXPECT_NE(a.rotation.equals(b.rotation), Tri::No) << a.rotation.to_string() << " vs " << b.rotation.to_string();
        }
    }
}

TEST(Normalize, ThreeDimensional) {
    std::vector<Scalar> rot{Scalar(0), Scalar(-1), Scalar(0), Scalar(1), Scalar(0), Scalar(0), Scalar(0), Scalar(0), Scalar(1)};
    OrthogonalPart a{make_matrix_orthogonal(3, rot)};
    IfsPath p({Similarity(Scalar::exact(1, 2), a, Point{Scalar(1), Scalar(2), Scalar(3)}),
               Similarity(Scalar::exact(1, 2), identity_orthogonal(3), Point{Scalar(1), Scalar(0), Scalar(2)})});
    auto n = normalize(p);
    EXPECT_TRUE(is_normalized(n));
    auto [na, nb] = endpoints(n);
    EXPECT_LT(distance(na, origin(3)), 1e-12);
    EXPECT_LT(distance(nb, unit_e1(3)), 1e-12);
}

TEST(Normalize, DegenerateEndpoints) {
    IfsPath p({sys::planar(Scalar::exact(1, 2), Rotation2::turns(0, 1), false, 0, 0),
               sys::planar(Scalar::exact(1, 3), Rotation2::turns(1, 2), false, 0, 0)});
    EXPECT_THROW(normalize(p), DegenerateError);
}

TEST(Iterate, BaseCaseAndKochGenerator) {
    auto k = sys::koch();
    auto c0 = iterate(k, 0);
    EXPECT_EQ(c0.polyline, unit_segment(2));
    auto d1 = first_step_distance(k);
    EXPECT_NEAR(d1.estimate, std::sqrt(3.0) / 6.0, 1e-12);
    EXPECT_GE(d1.upper, std::sqrt(3.0) / 6.0);
    EXPECT_DOUBLE_EQ(c0.error_bound, d1.upper / (1 - 1.0 / 3.0));

    auto c1 = iterate(k, 1);
    ASSERT_EQ(c1.polyline.size(), 5u);
    const double expect[5][2] = {{0, 0}, {1.0 / 3, 0}, {0.5, std::sqrt(3.0) / 6}, {2.0 / 3, 0}, {1, 0}};
    for (int i = 0; i < 5; ++i) {
        EXPECT_NEAR(c1.polyline.point(i)[0], expect[i][0], 1e-15);
        EXPECT_NEAR(c1.polyline.point(i)[1], expect[i][1], 1e-15);
    }
    auto c10 = iterate(k, 10);
    EXPECT_LE(c10.error_bound, std::pow(1.0 / 3, 10) * d1.upper * 1.5 * (1 + 1e-15));
}

TEST(Iterate, ConcatenationOfCopies) {
    for (const auto& p : {sys::koch(), sys::gasket(), sys::carpet()}) {
        for (int k = 0; k < 4; ++k) {
            auto a = iterate(p, k), b = iterate(p, k + 1);
            EXPECT_EQ(b.polyline.size(), a.polyline.size() * p.size() - (p.size() - 1));
            EXPECT_EQ(b.polyline, hutchinson_step(p.numeric(), a.polyline));
            EXPECT_LT(b.error_bound, a.error_bound);
        }
    }
}

TEST(Iterate, BudgetEnforced) {
    EXPECT_THROW(iterate(sys::carpet(), 8), BudgetError);
    EXPECT_THROW(iterate(sys::koch(), 5, 100), BudgetError);
    EXPECT_NO_THROW(iterate(sys::koch(), 3, 100));
}

TEST(Vertices, IntervalAndKoch) {
    auto v = vertices(sys::interval(), 1);
    ASSERT_EQ(v.points.size(), 3u);
    EXPECT_EQ(v.points[1].point, (Point{Scalar::exact(1, 2), Scalar(0)}));
    EXPECT_TRUE(is_exact(v.points[1].point));
    auto kv = vertices(sys::koch(), 1);
    ASSERT_EQ(kv.points.size(), 5u);
    EXPECT_NEAR(kv.points[2].point[1].to_double(), std::sqrt(3.0) / 6, 1e-15);
    EXPECT_EQ(kv.points[2].address, Word{{3}});
}

TEST(Vertices, GenerationsAreNested) {
    for (const auto& p : {sys::koch(), sys::gasket(), sys::carpet(), sys::twisted_koch()}) {
        for (int m = 0; m < 3; ++m) {
            auto a = vertices(p, m), b = vertices(p, m + 1);
            for (const auto& v : a.points) {
                double best = 1;
                for (const auto& w : b.points) best = std::min(best, distance(v.point, w.point));
                EXPECT_LT(best, 1e-13);
            }
        }
    }
}

TEST(Vertices, CarpetRevisitsAreMerged) {
    // Two copies fill the same square, so from generation 2 on some vertices coincide.
    EXPECT_EQ(vertices(sys::carpet(), 1).points.size(), 10u);
    EXPECT_LT(vertices(sys::carpet(), 2).points.size(), 82u);
}

TEST(Hausdorff, SuccessiveApproximationsContract) {
    for (const auto& p : {sys::koch(), sys::gasket(), sys::twisted_koch(), sys::sab_quarter(), sys::carpet()}) {
        const double d1 = first_step_distance(p).estimate;
        const double r = p.max_ratio();
        Polyline prev = iterate(p, 0).polyline;
        for (int k = 0; k <= 3; ++k) {
            Polyline next = hutchinson_step(p.numeric(), prev);
            EXPECT_LE(hausdorff(next, prev), std::pow(r, k) * d1 * (1 + 1e-9)) << k;
            prev = std::move(next);
        }
    }
}

TEST(Successive, ConfigurationRecursionMatchesExplicitPolylines) {
    for (const auto& p : {sys::carpet(), sys::interval_thirds()}) {
        for (int k = 0; k <= 4; ++k) {
            auto direct = successive_hausdorff(p, k);
            auto rec = successive_hausdorff_by_configurations(p, k);
            EXPECT_FALSE(direct.by_configurations);
            EXPECT_NEAR(rec.value, direct.value, 1e-12 * std::max(1.0, direct.value)) << k;
        }
    }
}

TEST(Successive, CarpetBeyondBudgetUsesConfigurations) {
    auto p = sys::carpet();
    auto d = successive_hausdorff(p, 8);
    EXPECT_TRUE(d.by_configurations);
    EXPECT_LE(d.value, std::pow(1.0 / 3, 8) * first_step_distance(p).estimate * (1 + 1e-9));
    EXPECT_GT(d.value, 0.0);
    EXPECT_THROW(successive_hausdorff(sys::koch(), 8, 1000), BudgetError);
}

TEST(Successive, StraightSubdivisionIsExactlyZero) {
    for (int k = 0; k <= 8; ++k) EXPECT_EQ(successive_hausdorff(sys::interval_thirds(), k).value, 0.0) << k;
    // Same maps in a different order no longer chain along I.
    const auto& m = sys::interval_thirds().maps();
    EXPECT_GT(successive_hausdorff(IfsPath({m[1], m[0], m[2]}), 0).value, 0.0);
}
