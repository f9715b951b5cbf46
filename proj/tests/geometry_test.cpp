#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ifsarc/similarity.hpp"

using namespace ifsarc;

namespace {

Similarity planar(Rational r, Rational turns, bool reflect, Rational bx, Rational by) {
    return Similarity(Scalar(r), PlanarOrthogonal{Rotation2::turns(turns), reflect}, Point{Scalar(bx), Scalar(by)});
}

}  // namespace

TEST(Scalar, ExactArithmeticStaysExact) {
    Scalar a = Scalar::exact(1, 3);
    Scalar b = Scalar::exact(1, 6);
    Scalar c = a + b;
    ASSERT_TRUE(c.is_exact());
    EXPECT_EQ(c.rational(), Rational(1, 2));
    EXPECT_EQ(c.to_string(), "1/2");
    EXPECT_FALSE((a * Scalar::approx(0.5)).is_exact());
    EXPECT_THROW(a / Scalar(0), InvalidInput);
}

TEST(Scalar, ModOne) {
    EXPECT_EQ(mod_one(Rational(-1, 4)), Rational(3, 4));
    EXPECT_EQ(mod_one(Rational(7, 3)), Rational(1, 3));
    EXPECT_EQ(rational_pow(Rational(2, 3), 3), Rational(8, 27));
}

TEST(Rotation, QuarterTurnsCompose) {
    auto q = Rotation2::turns(1, 4);
    EXPECT_EQ((q + q + q + q).exact_turns(), Rational(0));
    EXPECT_EQ(q.times(-1).exact_turns(), Rational(3, 4));
    EXPECT_EQ(q.equals(Rotation2::turns(5, 4)), Tri::Yes);
    EXPECT_EQ(q.equals(Rotation2::turns(1, 3)), Tri::No);
}

TEST(Rotation, OpaqueTokensCancelFormally) {
    auto t = Rotation2::opaque("acos(3/4)", std::acos(0.75), true);
    auto z = t - t;
    EXPECT_TRUE(z.is_exact());
    EXPECT_EQ(z.equals(Rotation2::turns(0, 1)), Tri::Yes);
    EXPECT_NE(t.equals(Rotation2::turns(0, 1)), Tri::Yes);
}

TEST(Orthogonal, DihedralComposition) {
    OrthogonalPart r{PlanarOrthogonal{Rotation2::turns(1, 4), false}};
    OrthogonalPart f{PlanarOrthogonal{Rotation2::turns(0, 1), true}};
    // R∘I∘R = I, i.e. conjugating a reflection by a rotation flips the angle.
    OrthogonalPart rfr = compose(compose(r, f), r);
    EXPECT_EQ(equals(rfr, f), Tri::Yes);
    EXPECT_EQ(equals(power(f, 2), identity_orthogonal(2)), Tri::Yes);
    EXPECT_EQ(equals(power(r, 4), identity_orthogonal(2)), Tri::Yes);
    EXPECT_EQ(equals(compose(r, inverse(r)), identity_orthogonal(2)), Tri::Yes);
}

TEST(Orthogonal, MatrixAgreesWithComposition) {
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> k(0, 7);
    for (int trial = 0; trial < 50; ++trial) {
        OrthogonalPart a{PlanarOrthogonal{Rotation2::turns(k(rng), 8), k(rng) % 2 == 1}};
        OrthogonalPart b{PlanarOrthogonal{Rotation2::turns(k(rng), 8), k(rng) % 2 == 1}};
        auto ma = matrix_double(a), mb = matrix_double(b), mc = matrix_double(compose(a, b));
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                double s = ma[i * 2] * mb[j] + ma[i * 2 + 1] * mb[2 + j];
                EXPECT_NEAR(mc[i * 2 + j], s, 1e-14);
            }
    }
}

TEST(Orthogonal, RejectsNonOrthogonalMatrix) {
    EXPECT_THROW(make_matrix_orthogonal(2, {Scalar(1), Scalar(1), Scalar(0), Scalar(1)}), InvalidInput);
    auto m = make_matrix_orthogonal(3, {Scalar(0), Scalar(-1), Scalar(0), Scalar(1), Scalar(0), Scalar(0), Scalar(0), Scalar(0), Scalar(1)});
    EXPECT_TRUE(orientation_preserving(OrthogonalPart{m}));
}

TEST(Similarity, RejectsNonContracting) {
    EXPECT_THROW(planar(1, 0, false, 0, 0), InvalidInput);
    EXPECT_THROW(planar(0, 0, false, 0, 0), InvalidInput);
    EXPECT_THROW(Similarity(Scalar(Rational(1, 2)), identity_orthogonal(3), origin(2)), DimensionError);
}

TEST(Similarity, FixedPointExact) {
    auto s = planar(Rational(1, 3), Rational(1, 4), false, 1, 0);
    Point p = fixed_point(s);
    ASSERT_TRUE(is_exact(p));
    EXPECT_EQ(image(s, p), p);
}

TEST(Similarity, FixedPointApproxResidual) {
    Similarity s(Scalar::approx(0.37), PlanarOrthogonal{Rotation2::opaque("t", 1.1, true), false}, Point{Scalar::approx(0.2), Scalar::approx(-0.7)});
    Point p = fixed_point(s);
    EXPECT_LT(distance(image(s, p), p), 1e-15);
}

TEST(Similarity, ComposeAndInverse) {
    auto s = planar(Rational(1, 2), Rational(1, 3), true, 1, 2);
    auto t = planar(Rational(1, 3), Rational(1, 8), false, -1, 0);
    Point x{Scalar(Rational(3, 7)), Scalar(Rational(-2, 5))};
    auto st = compose(s, t);
    EXPECT_LT(distance(image(st, x), image(s, image(t, x))), 1e-14);
    EXPECT_LT(distance(image(compose(s, inverse(s)), x), x), 1e-14);
    auto sq = planar(Rational(1, 2), Rational(1, 4), true, 1, 2);
    EXPECT_EQ(image(compose(inverse(sq), sq), x), x);
}

TEST(AffineMap, MatchesExactMap) {
    auto s = planar(Rational(1, 3), Rational(1, 6), true, 1, 2);
    AffineMap a = s.numeric();
    std::vector<double> x{0.3, -0.4};
    auto y = a(x);
    auto e = to_double(image(s, Point{Scalar::approx(0.3), Scalar::approx(-0.4)}));
    EXPECT_NEAR(y[0], e[0], 1e-15);
    EXPECT_NEAR(y[1], e[1], 1e-15);
    auto back = a.inverse()(y);
    EXPECT_NEAR(back[0], 0.3, 1e-14);
    EXPECT_NEAR(back[1], -0.4, 1e-14);
}
