#ifndef BILLIARDS_GEOMETRY_HPP
#define BILLIARDS_GEOMETRY_HPP

#include <Eigen/Dense>
#include <cmath>

namespace billiards {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

// z-component of the 3D cross product of planar vectors.
inline double cross2(const Vec2& a, const Vec2& b) {
    return a.x() * b.y() - a.y() * b.x();
}

inline Mat2 rotation(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Mat2 r;
    r << c, -s, s, c;
    return r;
}

inline Mat2 shear(double s) {
    Mat2 a;
    a << 1.0, s, 0.0, 1.0;
    return a;
}

// Reduce an angle to [0, 2*pi).
inline double wrap_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    // fmod can return exactly 2*pi after the correction when theta is a
    // tiny negative number.
    if (t >= kTwoPi) t -= kTwoPi;
    return t;
}

// Reduce an angle difference to (-pi, pi].
inline double wrap_signed(double delta) {
    double d = std::remainder(delta, kTwoPi);
    if (d <= -kPi) d += kTwoPi;
    return d;
}

// Signed rotation carrying direction u onto direction v, in (-pi, pi].
inline double turn_angle(const Vec2& u, const Vec2& v) {
    return std::atan2(cross2(u, v), u.dot(v));
}

// Intersection of the lines {p : p.n1 = h1} and {p : p.n2 = h2} with unit
// normals n1, n2. The caller guards against parallel normals.
inline Vec2 line_intersection(const Vec2& n1, double h1, const Vec2& n2, double h2) {
    const double det = cross2(n1, n2);
    return Vec2(h1 * n2.y() - h2 * n1.y(), h2 * n1.x() - h1 * n2.x()) / det;
}

} // namespace billiards

#endif
