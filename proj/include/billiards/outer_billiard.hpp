#ifndef BILLIARDS_OUTER_BILLIARD_HPP
#define BILLIARDS_OUTER_BILLIARD_HPP

#include <cmath>
#include <cstddef>
#include <string>
#include <tuple>
#include <vector>

#include "billiards/curve.hpp"
#include "billiards/errors.hpp"
#include "billiards/geometry.hpp"

namespace billiards {

// One application of the outer billiard map: x reflects through the forward
// tangency point z to y = 2z - x.
struct OuterStep {
    Vec2 x = Vec2::Zero();
    BoundaryPoint z;
    Vec2 y = Vec2::Zero();
    double r = 0.0; // |x - z|
};

// Closed outer billiard trajectory seen as a polygon. alphas[i] is the
// interior angle at vertex i+1 (between sides x_i x_{i+1} and x_{i+1} x_{i+2});
// thetas[i] is the normal angle of the tangency point on side x_i x_{i+1}.
struct OuterOrbit {
    std::vector<Vec2> vertices;
    std::vector<double> thetas;
    std::vector<double> alphas;
    std::vector<double> betas;
    int winding = 0;
    double closure_residual = 0.0;

    int period() const { return static_cast<int>(vertices.size()); }
    double alpha_sum() const {
        double s = 0.0;
        for (double a : alphas) s += a;
        return s;
    }
};

inline OuterStep outer_map(const CurveModel& curve, const Vec2& x) {
    OuterStep step;
    step.x = x;
    step.z = forward_tangency(curve, x);
    step.y = 2.0 * step.z.position - x;
    step.r = (x - step.z.position).norm();
    return step;
}

inline OuterStep outer_map_inverse(const CurveModel& curve, const Vec2& y) {
    OuterStep step;
    step.z = backward_tangency(curve, y);
    step.x = 2.0 * step.z.position - y;
    step.y = y;
    step.r = (step.x - step.z.position).norm();
    return step;
}

// Differential of the outer billiard map at x, expressed in the orthonormal
// frame (unit vector z -> x, outward normal at z). In that frame
//   dF = [[-1, -2 rho / r], [0, -1]]
// with rho the radius of curvature at the tangency z and r = |x - z|.
struct LocalDifferential {
    Mat2 matrix = Mat2::Identity();
    Vec2 axis_x = Vec2::Zero(); // unit z -> x (= -T(z) for the forward map)
    Vec2 axis_y = Vec2::Zero(); // N(z)
    BoundaryPoint tangency;
    double r = 0.0;

    Mat2 frame() const {
        Mat2 c;
        c.col(0) = axis_x;
        c.col(1) = axis_y;
        return c;
    }
    // The same differential in global coordinates.
    Mat2 global() const { return frame() * matrix * frame().transpose(); }
};

inline LocalDifferential local_differential(const CurveModel& curve, const Vec2& x) {
    LocalDifferential d;
    d.tangency = forward_tangency(curve, x);
    d.r = (x - d.tangency.position).norm();
    d.axis_x = (x - d.tangency.position) / d.r;
    d.axis_y = d.tangency.normal;
    d.matrix << -1.0, -2.0 * d.tangency.rho / d.r, 0.0, -1.0;
    return d;
}

// Interior/exterior angles and winding number of a closed polygon.
// alphas[i] is the interior angle at vertex i+1 (cyclic); beta = pi - alpha.
// The winding number is m = round(sum beta / 2 pi).
inline std::tuple<std::vector<double>, std::vector<double>, int>
orbit_angles(const std::vector<Vec2>& vertices) {
    const std::size_t n = vertices.size();
    if (n < 3)
        throw DegeneratePolygon("need at least 3 vertices, got " + std::to_string(n));
    double scale = 0.0;
    for (const auto& v : vertices) scale = std::max(scale, v.norm());
    for (std::size_t i = 0; i < n; ++i) {
        if ((vertices[(i + 1) % n] - vertices[i]).norm() < 1e-12 * (1.0 + scale))
            throw DegeneratePolygon("repeated vertices at index " + std::to_string(i));
    }
    std::vector<double> alphas(n), betas(n);
    double beta_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2 u = vertices[(i + 1) % n] - vertices[i];
        const Vec2 w = vertices[(i + 2) % n] - vertices[(i + 1) % n];
        const double beta = turn_angle(u, w);
        betas[i] = beta;
        alphas[i] = kPi - beta;
        beta_sum += beta;
    }
    const int m = static_cast<int>(std::lround(beta_sum / kTwoPi));
    return {alphas, betas, m};
}

// Iterates the outer billiard map n times from x1 and assembles the orbit
// polygon together with its angle/winding bookkeeping. The closure residual
// |F^n(x1) - x1| is recorded; callers decide what counts as closed.
inline OuterOrbit trace_orbit(const CurveModel& curve, const Vec2& x1, int n) {
    OuterOrbit orbit;
    orbit.vertices.reserve(n);
    orbit.thetas.reserve(n);
    Vec2 x = x1;
    for (int i = 0; i < n; ++i) {
        const OuterStep step = outer_map(curve, x);
        orbit.vertices.push_back(x);
        orbit.thetas.push_back(step.z.theta);
        x = step.y;
    }
    orbit.closure_residual = (x - x1).norm();
    std::tie(orbit.alphas, orbit.betas, orbit.winding) = orbit_angles(orbit.vertices);
    return orbit;
}

// Shear coefficients s_i = 2 rho_i / r_i of the orbit, with rho_i the radius
// of curvature at tangency z_i and r_i = |x_i - z_i|.
inline std::vector<double> orbit_shears(const CurveModel& curve, const OuterOrbit& orbit) {
    std::vector<double> shears(orbit.thetas.size());
    for (std::size_t i = 0; i < orbit.thetas.size(); ++i) {
        const BoundaryPoint z = curve.evaluate(orbit.thetas[i]);
        const double r = (orbit.vertices[i] - z.position).norm();
        shears[i] = 2.0 * z.rho / r;
    }
    return shears;
}

// Monodromy of the n-periodic orbit in the frame of its first vertex:
//   dF^n = R(alpha_n) A_n ... R(alpha_1) A_1,  A_i = [[1, 2 rho_i / r_i], [0, 1]].
inline Mat2 monodromy_analytic(const CurveModel& curve, const OuterOrbit& orbit) {
    if (!(orbit.closure_residual < 1e-8))
        throw OrbitNotClosed("closure residual " + std::to_string(orbit.closure_residual) +
                             " exceeds 1e-8");
    const std::vector<double> shears = orbit_shears(curve, orbit);
    Mat2 product = Mat2::Identity();
    for (std::size_t i = 0; i < shears.size(); ++i)
        product = (rotation(orbit.alphas[i]) * shear(shears[i]) * product).eval();
    return product;
}

// Central-difference Jacobian of the n-th iterate of the outer billiard map
// in global coordinates. The starting point must be n-periodic to 1e-8.
inline Mat2 monodromy_numeric(const CurveModel& curve, const Vec2& x, int n, double h = 1e-5) {
    auto iterate = [&](Vec2 p) {
        for (int i = 0; i < n; ++i) p = outer_map(curve, p).y;
        return p;
    };
    const double periodicity = (iterate(x) - x).norm();
    if (!(periodicity < 1e-8))
        throw NotPeriodic("point is not " + std::to_string(n) +
                          "-periodic: residual " + std::to_string(periodicity));
    Mat2 jac;
    for (int j = 0; j < 2; ++j) {
        Vec2 dp = Vec2::Zero();
        dp[j] = h;
        jac.col(j) = (iterate(x + dp) - iterate(x - dp)) / (2.0 * h);
    }
    return jac;
}

// Rotation aligning global coordinates with the differential frame at the
// orbit's first vertex; monodromy_numeric ~= frame * monodromy_analytic * frame^T.
inline Mat2 orbit_frame(const CurveModel& curve, const OuterOrbit& orbit) {
    const BoundaryPoint z = curve.evaluate(orbit.thetas.front());
    const Vec2 e1 = (orbit.vertices.front() - z.position).normalized();
    Mat2 c;
    c.col(0) = e1;
    c.col(1) = z.normal;
    return c;
}

} // namespace billiards

#endif
