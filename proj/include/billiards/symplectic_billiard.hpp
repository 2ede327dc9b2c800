#ifndef BILLIARDS_SYMPLECTIC_BILLIARD_HPP
#define BILLIARDS_SYMPLECTIC_BILLIARD_HPP

#include <Eigen/Dense>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "billiards/curve.hpp"
#include "billiards/errors.hpp"
#include "billiards/geometry.hpp"
#include "billiards/outer_billiard.hpp"

namespace billiards {

// Phase point of the planar symplectic billiard: an oriented chord given by
// two boundary parameters. Admissible states have positively oriented,
// non-parallel tangents: cross(T(t_prev), T(t_cur)) = sin(t_cur - t_prev) > 0.
struct ChordState {
    double t_prev = 0.0;
    double t_cur = 0.0;

    double orientation() const { return std::sin(t_cur - t_prev); }
    bool admissible() const { return orientation() > 0.0; }
};

// One step of the planar symplectic billiard: the chord (t_prev, t_cur) maps
// to (t_cur, t_next) where the chord from gamma(t_prev) to gamma(t_next) is
// parallel to the tangent at t_cur.
inline ChordState symplectic_map(const CurveModel& curve, const ChordState& s) {
    if (!(s.orientation() > 0.0))
        throw InadmissibleChord("state (" + std::to_string(s.t_prev) + ", " +
                                std::to_string(s.t_cur) + ") is not positively oriented");
    if (s.orientation() < 1e-12)
        throw NoAdmissibleImage("tangents at the chord ends are numerically parallel");

    const Vec2 p = curve.evaluate(s.t_prev).position;
    const Vec2 tan_dir = curve.evaluate(s.t_cur).tangent;
    auto f = [&](double t) { return cross2(curve.evaluate(t).position - p, tan_dir); };

    // f vanishes at t_prev and at exactly one other parameter; f'(t_prev) =
    // rho(t_prev) sin(t_cur - t_prev) > 0, so f is positive just after t_prev
    // and the second root is the first +/- crossing of the forward scan. The
    // eps guards catch roots inside the first or last scan cell, which occur
    // when the state is close to the tangential degeneracy.
    const int n = 512;
    const double t0 = s.t_prev;
    const double eps = 1e-9;
    double prev_t = t0 + eps;
    double prev_f = f(prev_t);
    if (prev_f <= 0.0)
        throw NoAdmissibleImage("chord leaves the boundary tangentially at t_prev");
    double lo = 0.0, hi = 0.0;
    bool bracketed = false;
    for (int i = 1; i <= n; ++i) {
        const double t = (i == n) ? t0 + kTwoPi - eps : t0 + kTwoPi * i / n;
        const double ft = f(t);
        if (prev_f > 0.0 && ft <= 0.0) {
            lo = prev_t;
            hi = t;
            bracketed = true;
            break;
        }
        prev_t = t;
        prev_f = ft;
    }
    if (!bracketed)
        throw NoConvergence("no second intersection bracket for the symplectic chord");

    // Bisection with a Newton accelerant; f' = rho(t) cross(T(t), tan_dir).
    double a = lo, b = hi;
    double t = 0.5 * (a + b);
    for (int it = 0; it < 120; ++it) {
        const double ft = f(t);
        if (std::abs(ft) < 1e-14 * (1.0 + p.norm())) break;
        if (ft > 0.0)
            a = t;
        else
            b = t;
        const BoundaryPoint bp = curve.evaluate(t);
        const double fp = bp.rho * cross2(bp.tangent, tan_dir);
        double next = t - ft / fp;
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        t = next;
    }

    ChordState out{s.t_cur, wrap_angle(t)};
    // Keep the parameters in a continuous lift so callers can track winding.
    out.t_cur = s.t_cur + wrap_angle(t - s.t_cur);
    return out;
}

// Pairwise tangent-line intersections realizing the correspondence between a
// 3-periodic symplectic orbit (t1, t2, t3) and an outer billiard 3-orbit: the
// outer orbit's vertices are the tangent intersections and its tangency
// points are exactly gamma(t_i), each the midpoint of the opposite side.
struct ThreePeriodicCorrespondence {
    OuterOrbit outer;                  // closed outer billiard 3-orbit
    std::array<Vec2, 3> tangent_intersections; // A1 (opposite t1), B1, C1
    double midpoint_error = 0.0;       // max |gamma(t_i) - opposite midpoint|
};

inline ThreePeriodicCorrespondence three_periodic_to_outer(const CurveModel& curve, double t1,
                                                           double t2, double t3) {
    const std::array<double, 3> t{t1, t2, t3};
    std::array<BoundaryPoint, 3> bp;
    for (int i = 0; i < 3; ++i) bp[i] = curve.evaluate(t[i]);

    double closure = 0.0;
    for (int i = 0; i < 3; ++i) {
        const Vec2 chord = bp[(i + 2) % 3].position - bp[(i + 1) % 3].position;
        closure = std::max(closure, std::abs(cross2(chord, bp[i].tangent)));
    }
    if (!(closure < 1e-10))
        throw NotClosed("symplectic 3-orbit residual " + std::to_string(closure) +
                        " exceeds 1e-10");

    auto tangent_intersection = [&](int i, int j) {
        if (std::abs(std::sin(t[j] - t[i])) < 1e-12)
            throw ParallelTangents("tangent lines at t" + std::to_string(i + 1) + " and t" +
                                   std::to_string(j + 1) + " are parallel");
        return line_intersection(bp[i].normal, curve.support(t[i]), bp[j].normal,
                                 curve.support(t[j]));
    };

    ThreePeriodicCorrespondence res;
    res.tangent_intersections[0] = tangent_intersection(1, 2); // A1, opposite gamma(t1)
    res.tangent_intersections[1] = tangent_intersection(0, 2); // B1
    res.tangent_intersections[2] = tangent_intersection(0, 1); // C1

    for (int i = 0; i < 3; ++i) {
        const Vec2 mid = 0.5 * (res.tangent_intersections[(i + 1) % 3] +
                                res.tangent_intersections[(i + 2) % 3]);
        res.midpoint_error = std::max(res.midpoint_error, (mid - bp[i].position).norm());
    }

    // Order the vertices so the tangency sequence follows the forward outer
    // billiard map: the forward tangency of the first vertex decides between
    // the two cyclic orientations.
    const Vec2 first = res.tangent_intersections[1]; // B1 lies on tangents at t1, t3
    const BoundaryPoint fwd = forward_tangency(curve, first);
    std::vector<Vec2> order;
    if ((fwd.position - bp[0].position).norm() < (fwd.position - bp[2].position).norm())
        order = {first, res.tangent_intersections[2], res.tangent_intersections[0]};
    else
        order = {first, res.tangent_intersections[0], res.tangent_intersections[2]};

    OuterOrbit orbit;
    orbit.vertices = order;
    Vec2 p = order.front();
    for (int i = 0; i < 3; ++i) {
        const OuterStep step = outer_map(curve, p);
        orbit.thetas.push_back(step.z.theta);
        p = step.y;
    }
    orbit.closure_residual = (p - order.front()).norm();
    std::tie(orbit.alphas, orbit.betas, orbit.winding) = orbit_angles(orbit.vertices);
    res.outer = orbit;
    return res;
}

// The unique 4-periodic symplectic billiard candidate through gamma(t_a):
// t_c is the parameter with opposite tangent direction (t_a + pi in the
// normal-angle parametrization) and t_b, t_d are the two parameters whose
// tangents are parallel to the diagonal chord gamma(t_c) - gamma(t_a).
// The candidate is a genuine orbit iff closure_residual vanishes.
struct FourPeriodicCandidate {
    double t_a = 0.0, t_b = 0.0, t_c = 0.0, t_d = 0.0;
    double closure_residual = 0.0;
};

inline FourPeriodicCandidate four_periodic_through(const CurveModel& curve, double t_a) {
    FourPeriodicCandidate cand;
    cand.t_a = t_a;
    cand.t_c = t_a + kPi;

    const Vec2 a = curve.evaluate(cand.t_a).position;
    const Vec2 c = curve.evaluate(cand.t_c).position;
    const Vec2 diag = c - a;
    if (diag.norm() < 1e-12)
        throw DegenerateChord("gamma(t_a) and gamma(t_a + pi) coincide");

    // T(t) is parallel to diag iff t = angle(diag) -/+ pi/2; exactly one of
    // the two lies in (t_a, t_a + pi), and that one is t_b.
    const double diag_angle = std::atan2(diag.y(), diag.x());
    double tb = diag_angle - kPi / 2.0;
    double offset = wrap_angle(tb - t_a);
    if (offset >= kPi) {
        tb += kPi;
        offset -= kPi;
    }
    cand.t_b = t_a + offset;
    cand.t_d = cand.t_b + kPi;

    const std::array<double, 4> cycle{cand.t_a, cand.t_b, cand.t_c, cand.t_d};
    std::array<BoundaryPoint, 4> bp;
    for (int i = 0; i < 4; ++i) bp[i] = curve.evaluate(cycle[i]);
    double residual = 0.0;
    for (int i = 0; i < 4; ++i) {
        const Vec2 chord = bp[(i + 1) % 4].position - bp[(i + 3) % 4].position;
        residual = std::max(residual, std::abs(cross2(chord, bp[i].tangent)));
    }
    cand.closure_residual = residual;
    return cand;
}

// Centered ellipsoid {x : x.Qx = 1} in the standard symplectic space R^{2n}.
class Ellipsoid2n {
public:
    explicit Ellipsoid2n(Eigen::MatrixXd q) : q_(std::move(q)) {
        const auto rows = q_.rows();
        if (rows < 2 || rows % 2 != 0 || q_.cols() != rows)
            throw InvalidBody("shape matrix must be square with even dimension >= 2");
        if ((q_ - q_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
            throw InvalidBody("shape matrix is not symmetric to 1e-12");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q_);
        if (es.eigenvalues().minCoeff() <= 0.0)
            throw InvalidBody("shape matrix is not positive definite; min eigenvalue " +
                              std::to_string(es.eigenvalues().minCoeff()));
    }

    int dimension() const { return static_cast<int>(q_.rows()); }
    const Eigen::MatrixXd& shape() const { return q_; }

    double quadratic_form(const Eigen::VectorXd& v) const { return v.dot(q_ * v); }

    bool on_boundary(const Eigen::VectorXd& v, double tol = 1e-10) const {
        return std::abs(quadratic_form(v) - 1.0) < tol;
    }

    Eigen::VectorXd normalize_to_boundary(const Eigen::VectorXd& v) const {
        const double q = quadratic_form(v);
        if (!(q > 0.0)) throw InvalidBody("cannot project the zero vector to the boundary");
        return v / std::sqrt(q);
    }

    // J v for J = [[0, I], [-I, 0]] in the (p, q) block splitting.
    Eigen::VectorXd apply_j(const Eigen::VectorXd& v) const {
        const int n = dimension() / 2;
        Eigen::VectorXd out(dimension());
        out.head(n) = v.tail(n);
        out.tail(n) = -v.head(n);
        return out;
    }

    Eigen::VectorXd apply_j_inverse(const Eigen::VectorXd& v) const {
        const int n = dimension() / 2;
        Eigen::VectorXd out(dimension());
        out.head(n) = -v.tail(n);
        out.tail(n) = v.head(n);
        return out;
    }

    // Characteristic direction J N_z with N_z = Q z (up to normalization).
    Eigen::VectorXd characteristic_direction(const Eigen::VectorXd& z) const {
        return apply_j(q_ * z);
    }

private:
    Eigen::MatrixXd q_;
};

// Symplectic billiard step on the ellipsoid: from boundary points x, y the
// next point is the second intersection of the boundary with the line
// through x in the characteristic direction d = J Q y:
//   z = x + t d,  t = -2 (x.Qd) / (d.Qd),
// which satisfies z.Qz = 1 identically.
inline Eigen::VectorXd symplectic_map_2n(const Ellipsoid2n& body, const Eigen::VectorXd& x,
                                         const Eigen::VectorXd& y) {
    if (!body.on_boundary(x) || !body.on_boundary(y))
        throw InvalidBody("phase points must lie on the ellipsoid boundary to 1e-10");
    const Eigen::VectorXd d = body.characteristic_direction(y);
    const Eigen::VectorXd qd = body.shape() * d;
    const double xqd = x.dot(qd);
    const double dqd = d.dot(qd);
    if (std::abs(xqd) < 1e-12)
        throw TangentialChord("characteristic direction is tangent at x (x.Qd = " +
                              std::to_string(xqd) + ")");
    return x - (2.0 * xqd / dqd) * d;
}

// The unique 4-periodic candidate through a boundary point A of a centered
// ellipsoid: C = -A is the point with the opposite characteristic direction,
// and B, D = the boundary multiples of (JQ)^{-1}(C - A) are the only points
// whose characteristic direction is parallel to the diagonal AC. Residuals
// report how far each vertex's reflection condition is from holding.
struct FourPeriodic2nCandidate {
    Eigen::VectorXd a, b, c, d;
    std::array<double, 4> residuals{}; // relative sine of each parallelism test
    double closure_residual = 0.0;     // max of residuals
};

namespace detail {
inline double parallel_residual(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
    const Eigen::VectorXd vn = v.normalized();
    return (u - u.dot(vn) * vn).norm() / u.norm();
}
} // namespace detail

inline FourPeriodic2nCandidate four_periodic_through_2n(const Ellipsoid2n& body,
                                                        const Eigen::VectorXd& a) {
    if (!body.on_boundary(a))
        throw InvalidBody("A must lie on the ellipsoid boundary to 1e-10");
    FourPeriodic2nCandidate cand;
    cand.a = a;
    cand.c = -a;
    const Eigen::VectorXd diag = cand.c - cand.a;
    // J Q b is parallel to diag  <=>  b is a multiple of (J Q)^{-1} diag
    //   = Q^{-1} J^{-1} diag.
    const Eigen::VectorXd dir =
        body.shape().ldlt().solve(body.apply_j_inverse(diag));
    cand.b = body.normalize_to_boundary(dir);
    cand.d = -cand.b;

    const std::array<const Eigen::VectorXd*, 4> cycle{&cand.a, &cand.b, &cand.c, &cand.d};
    for (int i = 0; i < 4; ++i) {
        const Eigen::VectorXd chord = *cycle[(i + 1) % 4] - *cycle[(i + 3) % 4];
        cand.residuals[i] =
            detail::parallel_residual(chord, body.characteristic_direction(*cycle[i]));
        cand.closure_residual = std::max(cand.closure_residual, cand.residuals[i]);
    }
    return cand;
}

} // namespace billiards

#endif
