#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "ifs_path.hpp"

namespace ifsarc::systems {

/// Planar similarity z ↦ r·R(conj?(z)) + (x, y).
inline Similarity planar(Scalar r, Rotation2 rot, bool reflect, Scalar x, Scalar y) {
    return Similarity(std::move(r), PlanarOrthogonal{std::move(rot), reflect}, Point{std::move(x), std::move(y)});
}

inline Scalar q(std::int64_t num, std::int64_t den = 1) { return Scalar::exact(num, den); }
inline Scalar approx(double v) { return Scalar::approx(v); }
inline Rotation2 turns(std::int64_t num, std::int64_t den) { return Rotation2::turns(num, den); }

/// x/2 and x/2 + 1/2 in the plane.
inline IfsPath interval() {
    return IfsPath({planar(q(1, 2), turns(0, 1), false, 0, 0), planar(q(1, 2), turns(0, 1), false, q(1, 2), 0)}, true);
}

/// Three thirds of the unit segment.
inline IfsPath interval_thirds() {
    return IfsPath({planar(q(1, 3), turns(0, 1), false, 0, 0), planar(q(1, 3), turns(0, 1), false, q(1, 3), 0),
                    planar(q(1, 3), turns(0, 1), false, q(2, 3), 0)},
                   true);
}

/// The two-parameter family z ↦ az, b e^{iθ}z + a, b e^{−iθ}z + 1/2 + ih, az + 1 − a with
/// θ = arccos((1/2 − a)/b) and h = sqrt(b² − (1/2 − a)²).
inline IfsPath sab(Scalar a, Scalar b) {
    const double ad = a.to_double(), bd = b.to_double();
    if (!(ad > 0 && ad < 0.5 && bd > 0 && bd < 0.5)) throw InvalidInput("parameters a, b must lie in (0, 1/2)");
    const double c = (0.5 - ad) / bd;
    if (c > 1) throw InvalidInput("b must be at least 1/2 - a");
    Rotation2 theta;
    Scalar hx = q(1, 2), hy;
    if (a.is_exact() && b.is_exact() && a.rational() == Rational(1, 3) && b.rational() == Rational(1, 3)) {
        theta = turns(1, 6);
        hy = approx(std::sqrt(3.0) / 6.0);
    } else {
        theta = Rotation2::opaque("acos((1/2-" + a.to_string() + ")/" + b.to_string() + ")", std::acos(c), false);
        hy = approx(std::sqrt(bd * bd - (0.5 - ad) * (0.5 - ad)));
    }
    return IfsPath({planar(a, turns(0, 1), false, 0, 0), planar(b, theta, false, a, 0), planar(b, -theta, false, hx, hy),
                    planar(a, turns(0, 1), false, Scalar(1) - a, 0)},
                   true);
}

inline IfsPath koch() { return sab(q(1, 3), q(1, 3)); }

/// b solving 2a^s + 2b^s = 1 for s = log 4 / log 3, so the member has the Koch curve's dimension.
inline double sab_partner(double a) {
    const double s = std::log(4.0) / std::log(3.0);
    return std::pow((1.0 - 2.0 * std::pow(a, s)) / 2.0, 1.0 / s);
}

inline IfsPath sab_quarter() { return sab(q(1, 4), approx(sab_partner(0.25))); }
inline IfsPath sab_two_fifths() { return sab(q(2, 5), approx(sab_partner(0.4))); }

/// Four maps of ratio 1/3 rotated by ±arccos(3/4).
inline IfsPath twisted_koch() {
    const double th = std::acos(0.75);
    Rotation2 t = Rotation2::opaque("acos(3/4)", th, false);
    const double s7 = std::sqrt(7.0) / 12.0;
    return IfsPath({planar(q(1, 3), t, false, 0, 0), planar(q(1, 3), -t, false, q(1, 4), approx(s7)),
                    planar(q(1, 3), -t, false, q(1, 2), 0), planar(q(1, 3), t, false, q(3, 4), approx(-s7))},
                   true);
}

/// Sierpinski gasket as a path of three half-size copies.
inline IfsPath gasket() {
    const double h = std::sqrt(3.0) / 4.0;
    return IfsPath({planar(q(1, 2), turns(1, 6), true, 0, 0), planar(q(1, 2), turns(0, 1), false, q(1, 4), approx(h)),
                    planar(q(1, 2), turns(5, 6), true, q(3, 4), approx(h))},
                   true);
}

/// Sierpinski carpet as a path of nine copies of ratio 1/3; the lower-right square is visited twice.
inline IfsPath carpet() {
    const Scalar r = q(1, 3);
    return IfsPath({planar(r, turns(1, 4), true, 0, 0), planar(r, turns(1, 4), true, 0, q(1, 3)),
                    planar(r, turns(0, 1), false, 0, q(2, 3)), planar(r, turns(0, 1), false, q(1, 3), q(2, 3)),
                    planar(r, turns(0, 1), false, q(2, 3), q(2, 3)), planar(r, turns(3, 4), true, 1, q(2, 3)),
                    planar(r, turns(1, 2), false, 1, q(1, 3)), planar(r, turns(3, 4), true, q(2, 3), q(1, 3)),
                    planar(r, turns(0, 1), false, q(2, 3), 0)},
                   true);
}

/// Five maps whose second and third copies run up and back down the line x = 1/5 on opposite sides of it, a
/// hairpin. r_1 = 1/5 and r_5 = 1/6 have no common power, and r_3 / r_2 = 1.01·(5/6)^7, so the end chains of the
/// two hairpin copies nearly line up at depth 7 and the three-point ratio at that junction jumps there.
inline IfsPath hairpin() {
    const double r2 = 0.1, r3 = 1.01 * std::pow(5.0 / 6.0, 7) * r2;
    const double sy = r2 - r3, ex = 5.0 / 6.0 - 0.2;
    Rotation2 down = Rotation2::opaque("atan2(" + format_real(-sy, 17) + "," + format_real(ex, 17) + ")", std::atan2(-sy, ex), false);
    return IfsPath({planar(q(1, 5), turns(0, 1), false, 0, 0), planar(q(1, 10), turns(1, 4), false, q(1, 5), 0),
                    planar(approx(r3), turns(3, 4), false, q(1, 5), q(1, 10)), planar(approx(std::hypot(ex, sy)), down, false, q(1, 5), approx(sy)),
                    planar(q(1, 6), turns(0, 1), false, q(5, 6), 0)},
                   true);
}

/// Three maps S_1 = r·e^{iθ}z, S_2(z) = (1 − r − r·e^{iθ})z + r·e^{iθ}, S_3 = r·z + 1 − r with r = 7/20 and θ = 1 radian, whose
/// turn fraction 1/(2π) is irrational. Equal end ratios and an irrational end-angle difference make a rotated
/// copy of S_1(γ) cross S_2(γ), so γ is not an arc.
inline IfsPath irrational_spiral() {
    const Scalar re = q(7, 20);
    const double r = re.to_double(), theta = 1.0;
    const double cx = 1 - r - r * std::cos(theta), cy = -r * std::sin(theta);
    const Rotation2 spin = Rotation2::opaque("1rad", theta, true);
    const Rotation2 mid = Rotation2::opaque("atan2(" + format_real(cy, 17) + "," + format_real(cx, 17) + ")", std::atan2(cy, cx), false);
    return IfsPath({planar(re, spin, false, 0, 0), planar(approx(std::hypot(cx, cy)), mid, false, approx(r * std::cos(theta)), approx(r * std::sin(theta))),
                    planar(re, turns(0, 1), false, q(13, 20), 0)},
                   true);
}

}  // namespace ifsarc::systems
