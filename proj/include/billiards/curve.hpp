#ifndef BILLIARDS_CURVE_HPP
#define BILLIARDS_CURVE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "billiards/errors.hpp"
#include "billiards/geometry.hpp"

namespace billiards {

// A boundary point of a strongly convex curve, parametrized by the outward
// normal angle theta:
//   gamma(theta) = h(theta) * N(theta) + h'(theta) * T(theta)
//   T(theta) = (-sin theta, cos theta),  N(theta) = (cos theta, sin theta)
//   rho(theta) = h(theta) + h''(theta)   (radius of curvature)
struct BoundaryPoint {
    double theta = 0.0;
    Vec2 position = Vec2::Zero();
    Vec2 tangent = Vec2::Zero();
    Vec2 normal = Vec2::Zero();
    double rho = 0.0;
};

enum class CurveKind { Circle, Ellipse, SupportFourier };

struct FourierTerm {
    int harmonic = 2;     // k >= 2; k = 0/1 are handled by a0 and the center
    double cos_coeff = 0.0;
    double sin_coeff = 0.0;
};

// Smooth strongly convex planar curve described by its support function
// h(theta) about the curve's center. Immutable once constructed; construction
// audits positivity of h and of rho = h + h'' on a dense grid and rejects
// data that fails either check.
class CurveModel {
public:
    static CurveModel circle(double radius, const Vec2& center = Vec2::Zero()) {
        CurveModel c;
        c.kind_ = CurveKind::Circle;
        c.a_ = radius;
        c.center_ = center;
        if (!(radius > 0.0))
            throw InvalidCurve("circle radius must be positive, got " + std::to_string(radius));
        c.audit_convexity();
        return c;
    }

    static CurveModel ellipse(double a, double b, const Vec2& center = Vec2::Zero()) {
        CurveModel c;
        c.kind_ = CurveKind::Ellipse;
        c.a_ = a;
        c.b_ = b;
        c.center_ = center;
        if (!(a >= b && b > 0.0))
            throw InvalidCurve("ellipse semi-axes must satisfy a >= b > 0, got a=" +
                               std::to_string(a) + " b=" + std::to_string(b));
        c.audit_convexity();
        return c;
    }

    static CurveModel support_fourier(double a0, std::vector<FourierTerm> terms,
                                      const Vec2& center = Vec2::Zero()) {
        CurveModel c;
        c.kind_ = CurveKind::SupportFourier;
        c.a_ = a0;
        c.terms_ = std::move(terms);
        c.center_ = center;
        for (const auto& t : c.terms_) {
            if (t.harmonic < 2)
                throw InvalidCurve("support Fourier harmonics must have k >= 2, got k=" +
                                   std::to_string(t.harmonic));
        }
        c.audit_convexity();
        return c;
    }

    CurveKind kind() const { return kind_; }
    const Vec2& center() const { return center_; }

    // Circle/ellipse parameter access (meaningful for the matching kind).
    double radius() const { return a_; }
    double semi_major() const { return a_; }
    double semi_minor() const { return b_; }
    double fourier_constant() const { return a_; }
    const std::vector<FourierTerm>& fourier_terms() const { return terms_; }

    // Support function of the curve about the origin and its first two
    // derivatives, all in closed form.
    double support(double theta) const {
        return base_support(theta) + center_.x() * std::cos(theta) + center_.y() * std::sin(theta);
    }
    double support_d1(double theta) const {
        return base_support_d1(theta) - center_.x() * std::sin(theta) + center_.y() * std::cos(theta);
    }
    double support_d2(double theta) const {
        return base_support_d2(theta) - center_.x() * std::cos(theta) - center_.y() * std::sin(theta);
    }

    double radius_of_curvature(double theta) const {
        // The center terms of h and h'' cancel: rho is translation invariant.
        return base_support(theta) + base_support_d2(theta);
    }

    BoundaryPoint evaluate(double theta) const {
        BoundaryPoint p;
        p.theta = theta;
        const double c = std::cos(theta), s = std::sin(theta);
        p.normal = Vec2(c, s);
        p.tangent = Vec2(-s, c);
        p.position = support(theta) * p.normal + support_d1(theta) * p.tangent;
        p.rho = radius_of_curvature(theta);
        return p;
    }

    // Signed support gap of x: max over theta of (x - gamma(theta)).N(theta).
    // Positive iff x lies strictly outside the curve.
    double support_gap(const Vec2& x) const {
        // g(theta) = x.N(theta) - h(theta) is smooth with a single maximum for
        // any x; a coarse scan plus golden-section refinement is robust.
        const int n = kScanGrid;
        double best = -std::numeric_limits<double>::infinity();
        int best_i = 0;
        for (int i = 0; i < n; ++i) {
            const double th = kTwoPi * i / n;
            const double g = x.x() * std::cos(th) + x.y() * std::sin(th) - support(th);
            if (g > best) {
                best = g;
                best_i = i;
            }
        }
        double lo = kTwoPi * (best_i - 1) / n;
        double hi = kTwoPi * (best_i + 1) / n;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = support_residual(x1, x), f2 = support_residual(x2, x);
        for (int it = 0; it < 80; ++it) {
            if (f1 < f2) {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = support_residual(x2, x);
            } else {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = support_residual(x1, x);
            }
        }
        return std::max(f1, f2);
    }

    bool is_strictly_outside(const Vec2& x) const {
        return support_gap(x) > boundary_tolerance(x);
    }

    // Absolute tolerance separating "on the boundary" from outside.
    static double boundary_tolerance(const Vec2& x) {
        return 1e-12 * (1.0 + x.norm());
    }

    double min_radius_of_curvature() const { return min_rho_; }
    double min_rho_theta() const { return min_rho_theta_; }

private:
    CurveModel() = default;

    static constexpr int kAuditGrid = 4096;
    static constexpr int kScanGrid = 256;

    double support_residual(double theta, const Vec2& x) const {
        return x.x() * std::cos(theta) + x.y() * std::sin(theta) - support(theta);
    }

    double base_support(double theta) const {
        switch (kind_) {
        case CurveKind::Circle:
            return a_;
        case CurveKind::Ellipse: {
            const double c = std::cos(theta), s = std::sin(theta);
            return std::sqrt(a_ * a_ * c * c + b_ * b_ * s * s);
        }
        case CurveKind::SupportFourier: {
            double h = a_;
            for (const auto& t : terms_)
                h += t.cos_coeff * std::cos(t.harmonic * theta) +
                     t.sin_coeff * std::sin(t.harmonic * theta);
            return h;
        }
        }
        return 0.0;
    }

    double base_support_d1(double theta) const {
        switch (kind_) {
        case CurveKind::Circle:
            return 0.0;
        case CurveKind::Ellipse: {
            // h = sqrt(w), w = a^2 cos^2 + b^2 sin^2, w' = (b^2 - a^2) sin 2t
            const double w = ellipse_w(theta);
            const double wp = (b_ * b_ - a_ * a_) * std::sin(2.0 * theta);
            return wp / (2.0 * std::sqrt(w));
        }
        case CurveKind::SupportFourier: {
            double d = 0.0;
            for (const auto& t : terms_)
                d += t.harmonic * (-t.cos_coeff * std::sin(t.harmonic * theta) +
                                   t.sin_coeff * std::cos(t.harmonic * theta));
            return d;
        }
        }
        return 0.0;
    }

    double base_support_d2(double theta) const {
        switch (kind_) {
        case CurveKind::Circle:
            return 0.0;
        case CurveKind::Ellipse: {
            // h'' = (2 w w'' - w'^2) / (4 w^{3/2})
            const double w = ellipse_w(theta);
            const double wp = (b_ * b_ - a_ * a_) * std::sin(2.0 * theta);
            const double wpp = 2.0 * (b_ * b_ - a_ * a_) * std::cos(2.0 * theta);
            return (2.0 * w * wpp - wp * wp) / (4.0 * w * std::sqrt(w));
        }
        case CurveKind::SupportFourier: {
            double d = 0.0;
            for (const auto& t : terms_)
                d -= t.harmonic * t.harmonic *
                     (t.cos_coeff * std::cos(t.harmonic * theta) +
                      t.sin_coeff * std::sin(t.harmonic * theta));
            return d;
        }
        }
        return 0.0;
    }

    double ellipse_w(double theta) const {
        const double c = std::cos(theta), s = std::sin(theta);
        return a_ * a_ * c * c + b_ * b_ * s * s;
    }

    void audit_convexity() {
        double min_h = std::numeric_limits<double>::infinity();
        double min_rho = std::numeric_limits<double>::infinity();
        double min_h_theta = 0.0, min_rho_theta = 0.0;
        for (int i = 0; i < kAuditGrid; ++i) {
            const double th = kTwoPi * i / kAuditGrid;
            const double h = support(th);
            const double rho = radius_of_curvature(th);
            if (h < min_h) {
                min_h = h;
                min_h_theta = th;
            }
            if (rho < min_rho) {
                min_rho = rho;
                min_rho_theta = th;
            }
        }
        min_rho_ = min_rho;
        min_rho_theta_ = min_rho_theta;
        if (!(min_h > 0.0)) {
            std::ostringstream os;
            os << "support function must stay positive: min h = " << min_h
               << " at theta = " << min_h_theta;
            throw InvalidCurve(os.str());
        }
        if (!(min_rho > 0.0)) {
            std::ostringstream os;
            os << "curve is not strongly convex: min rho = " << min_rho
               << " at theta = " << min_rho_theta;
            throw InvalidCurve(os.str());
        }
    }

    CurveKind kind_ = CurveKind::Circle;
    double a_ = 1.0; // circle radius / ellipse semi-major / Fourier constant term
    double b_ = 1.0; // ellipse semi-minor
    std::vector<FourierTerm> terms_;
    Vec2 center_ = Vec2::Zero();
    double min_rho_ = 0.0;
    double min_rho_theta_ = 0.0;
};

namespace detail {

// Polishes a root of g(theta) = (x - gamma(theta)).N(theta) inside [lo, hi]
// with Newton steps safeguarded by bisection. g' = (x - gamma).T is available
// in closed form.
inline double polish_tangency(const CurveModel& curve, const Vec2& x, double lo, double hi,
                              double g_lo, double tol) {
    auto g = [&](double th) { return x.x() * std::cos(th) + x.y() * std::sin(th) - curve.support(th); };
    auto gp = [&](double th) {
        return -x.x() * std::sin(th) + x.y() * std::cos(th) - curve.support_d1(th);
    };
    double a = lo, b = hi, ga = g_lo;
    double th = 0.5 * (a + b);
    for (int it = 0; it < 120; ++it) {
        const double gth = g(th);
        if (std::abs(gth) < tol) return th;
        // Maintain the sign-change bracket.
        if ((gth > 0.0) == (ga > 0.0)) {
            a = th;
            ga = gth;
        } else {
            b = th;
        }
        const double d = gp(th);
        double next = th - gth / d;
        if (!(next > std::min(a, b) && next < std::max(a, b)))
            next = 0.5 * (a + b);
        th = next;
    }
    throw NoConvergence("tangency root polish failed; curve invariants may be violated");
}

inline BoundaryPoint find_tangency(const CurveModel& curve, const Vec2& x, bool forward) {
    if (!curve.is_strictly_outside(x))
        throw PointInsideBody("point is inside the body or on its boundary");
    const double tol = CurveModel::boundary_tolerance(x);
    auto g = [&](double th) { return x.x() * std::cos(th) + x.y() * std::sin(th) - curve.support(th); };
    // The phase keeps grid nodes off exact roots in symmetric test setups.
    const int n = 256;
    const double phase = 1.2345678e-2;
    double prev_th = phase;
    double prev_g = g(prev_th);
    for (int i = 1; i <= n; ++i) {
        const double th = phase + kTwoPi * i / n;
        const double gi = g(th);
        // Forward tangency: g crosses from positive to negative (g' < 0 at the
        // root, i.e. (x - z).T(z) < 0). Backward: the opposite crossing.
        const bool hit = forward ? (prev_g > 0.0 && gi <= 0.0) : (prev_g < 0.0 && gi >= 0.0);
        if (hit) {
            const double root = polish_tangency(curve, x, prev_th, th, prev_g, tol);
            return curve.evaluate(wrap_angle(root));
        }
        prev_th = th;
        prev_g = gi;
    }
    throw NoConvergence("no tangency bracket found for exterior point");
}

} // namespace detail

// The tangency point z on the curve such that the line through x touches the
// curve at z and the outer billiard image y = 2z - x advances in the positive
// boundary orientation: (x - z).T(z) < 0.
inline BoundaryPoint forward_tangency(const CurveModel& curve, const Vec2& x) {
    return detail::find_tangency(curve, x, true);
}

// As forward_tangency, but (x - z).T(z) > 0: the tangency used by the inverse
// outer billiard map.
inline BoundaryPoint backward_tangency(const CurveModel& curve, const Vec2& x) {
    return detail::find_tangency(curve, x, false);
}

// Recover the normal-angle parameter of a point lying on the curve, by
// Newton iteration on (p - gamma(theta)).T(theta) = 0 from the best grid
// candidate.
inline double boundary_parameter(const CurveModel& curve, const Vec2& p) {
    const int n = 1024;
    double best_th = 0.0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double th = kTwoPi * i / n;
        const double d = (p - curve.evaluate(th).position).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best_th = th;
        }
    }
    double th = best_th;
    for (int it = 0; it < 60; ++it) {
        const BoundaryPoint bp = curve.evaluate(th);
        const double f = (p - bp.position).dot(bp.tangent);
        // d/dtheta [(p - gamma).T] = -rho - (p - gamma).N, using T' = -N.
        const double fp = -bp.rho - (p - bp.position).dot(bp.normal);
        const double step = f / fp;
        th -= step;
        if (std::abs(step) < 1e-14) break;
    }
    return wrap_angle(th);
}

} // namespace billiards

#endif
