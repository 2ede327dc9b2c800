#ifndef BILLIARDS_OCTAGON_HPP
#define BILLIARDS_OCTAGON_HPP

#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "billiards/errors.hpp"
#include "billiards/geometry.hpp"

namespace billiards {

// One branch piece of the hyperbola u v = c written in asymptote coordinates:
// a point with coordinates (u, v) sits at origin + u u_dir + v v_dir. The arc
// touches the octagon side at the tangency point (u_z, v_z) and only the
// window |u - u_z| <= halfwidth, |v - v_z| <= halfwidth is kept as curve
// material.
struct HyperbolaArc {
    Vec2 origin = Vec2::Zero();
    Vec2 u_dir = Vec2::UnitX();
    Vec2 v_dir = Vec2::UnitY();
    double c = 1.0;
    double u_z = 1.0; // tangency coordinates, u_z * v_z = c
    double v_z = 1.0;
    Vec2 tangency = Vec2::Zero();
    double halfwidth = 0.1;

    Vec2 point_at(double u) const { return origin + u * u_dir + (c / u) * v_dir; }
    Vec2 derivative_at(double u) const { return u_dir - (c / (u * u)) * v_dir; }
    Vec2 second_derivative_at(double u) const { return (2.0 * c / (u * u * u)) * v_dir; }

    bool in_window(double u) const {
        return u > 0.0 && std::abs(u - u_z) <= halfwidth &&
               std::abs(c / u - v_z) <= halfwidth;
    }

    // Effective u-range of the retained material.
    std::pair<double, double> u_range() const {
        const double lo = std::max(u_z - halfwidth, c / (v_z + halfwidth));
        const double hi = (v_z - halfwidth > 0.0)
                              ? std::min(u_z + halfwidth, c / (v_z - halfwidth))
                              : u_z + halfwidth;
        return {lo, hi};
    }

    // Signed curvature with respect to the counterclockwise traversal of the
    // table boundary (which runs in the direction of decreasing u).
    double curvature_ccw(double u) const {
        const Vec2 d1 = derivative_at(u);
        const Vec2 d2 = second_derivative_at(u);
        return -cross2(d1, d2) / std::pow(d1.norm(), 3);
    }
};

// Regular octagon of circumradius R with a hyperbola arc tangent to each side
// at its midpoint, the asymptotes being the two neighboring side lines.
struct OctagonTable {
    double circumradius = 1.0;
    std::array<Vec2, 8> vertices{};  // x_1 .. x_8, x_k at angle 2 pi (k-1) / 8
    std::array<Vec2, 8> midpoints{}; // z_i = (x_i + x_{i+1}) / 2
    std::array<HyperbolaArc, 8> arcs{};
};

inline OctagonTable build_table(double circumradius, double halfwidth_factor = 0.1) {
    if (!(circumradius > 0.0))
        throw InvalidCurve("octagon circumradius must be positive");
    OctagonTable table;
    table.circumradius = circumradius;
    for (int k = 0; k < 8; ++k) {
        const double angle = kTwoPi * k / 8.0;
        table.vertices[k] = circumradius * Vec2(std::cos(angle), std::sin(angle));
    }
    for (int i = 0; i < 8; ++i)
        table.midpoints[i] = 0.5 * (table.vertices[i] + table.vertices[(i + 1) % 8]);

    for (int i = 0; i < 8; ++i) {
        const Vec2& a = table.vertices[(i + 7) % 8]; // x_{i-1}
        const Vec2& b = table.vertices[i];           // x_i
        const Vec2& c = table.vertices[(i + 1) % 8]; // x_{i+1}
        const Vec2& d = table.vertices[(i + 2) % 8]; // x_{i+2}

        // Intersection of the side lines x_{i-1} x_i and x_{i+1} x_{i+2}.
        const Vec2 dir1 = (b - a).normalized();
        const Vec2 dir2 = (d - c).normalized();
        const double det = cross2(dir1, dir2);
        const Vec2 rhs = c - b;
        const double t1 = cross2(rhs, dir2) / det;
        const Vec2 origin = b + t1 * dir1;

        HyperbolaArc arc;
        arc.origin = origin;
        arc.u_dir = (b - origin).normalized();
        arc.v_dir = (c - origin).normalized();
        arc.u_z = 0.5 * (b - origin).norm();
        arc.v_z = 0.5 * (c - origin).norm();
        arc.c = arc.u_z * arc.v_z;
        arc.tangency = table.midpoints[i];
        arc.halfwidth = halfwidth_factor * circumradius;
        table.arcs[i] = arc;
    }
    return table;
}

// Tangent-line reflection against the hyperbola arc: the tangent segment from
// p = origin + 2 u0 u_dir to q = origin + 2 (c / u0) v_dir touches the
// hyperbola at its midpoint, so p reflects through the tangency point to q.
struct TangentMapResult {
    Vec2 image = Vec2::Zero();
    Vec2 tangency = Vec2::Zero();
    double u = 0.0; // u-coordinate of the tangency point
};

inline TangentMapResult hyperbola_tangent_map(const HyperbolaArc& arc, const Vec2& p) {
    const Vec2 rel = p - arc.origin;
    const double u0 = 0.5 * rel.dot(arc.u_dir);
    if (!(u0 > 0.0))
        throw OutsideWindow("point does not lie on the positive u-asymptote ray");
    if (!arc.in_window(u0)) {
        std::ostringstream os;
        os << "tangency u = " << u0 << " leaves the retained arc window around u_z = "
           << arc.u_z;
        throw OutsideWindow(os.str());
    }
    TangentMapResult res;
    res.u = u0;
    res.image = arc.origin + (2.0 * arc.c / u0) * arc.v_dir;
    res.tangency = arc.origin + u0 * arc.u_dir + (arc.c / u0) * arc.v_dir;
    return res;
}

// Which boundary line of the octagon carries the swept 8-periodic segment.
enum class CycleLine { X1X8, X1X2 };

// The 8-step orbit of a point x_1' near x_1. On the x_1 x_8 line the pattern
// alternates arc reflections and midpoint reflections as
// h_1, z_2, h_3, z_4, h_5, z_6, h_7, z_8; starting on the x_1 x_2 line the
// same alternation enters at z_1 instead: z_1, h_2, z_3, h_4, z_5, h_6, z_7,
// h_8. Positive offsets move from x_1 toward the far octagon vertex of the
// chosen line; the closure residual measures the return to the start.
// The half cycle is conjugate to the second half by the central symmetry of
// the table, which forces |x_1 x_1'| = |x_4 x_4'| on the x_1 x_8 line. On the
// x_1 x_2 line the same argument lands on the mirrored partner x_6, so
// symmetry_distance reports |x_4 x_4'| or |x_6 x_6'| depending on the line.
struct EightCycle {
    std::array<Vec2, 8> points{}; // x_1', x_2', ..., x_8'
    double closure_residual = 0.0;
    double start_distance = 0.0;    // |x_1 x_1'|
    double symmetry_distance = 0.0; // |x_4 x_4'| (X1X8) or |x_6 x_6'| (X1X2)
    double symmetry_gap = 0.0;      // |start_distance - symmetry_distance|
};

inline EightCycle eight_cycle(const OctagonTable& table, double offset,
                              CycleLine line = CycleLine::X1X8) {
    EightCycle cycle;
    Vec2 p;
    if (line == CycleLine::X1X8) {
        // Along the asymptote of h_1: positive offsets move toward x_8.
        p = table.vertices[0] + offset * table.arcs[0].u_dir;
    } else {
        p = table.vertices[0] + offset * (table.vertices[1] - table.vertices[0]).normalized();
    }
    cycle.points[0] = p;
    cycle.start_distance = std::abs(offset);

    if (line == CycleLine::X1X8) {
        for (int k = 0; k < 4; ++k) {
            p = hyperbola_tangent_map(table.arcs[2 * k], p).image;
            cycle.points[2 * k + 1] = p;
            if (2 * k + 2 < 8) {
                p = 2.0 * table.midpoints[2 * k + 1] - p;
                cycle.points[2 * k + 2] = p;
            } else {
                p = 2.0 * table.midpoints[7] - p;
            }
        }
    } else {
        for (int k = 0; k < 4; ++k) {
            p = 2.0 * table.midpoints[2 * k] - p;
            if (2 * k + 1 < 8) cycle.points[2 * k + 1] = p;
            p = hyperbola_tangent_map(table.arcs[2 * k + 1], p).image;
            if (2 * k + 2 < 8)
                cycle.points[2 * k + 2] = p;
        }
    }
    cycle.closure_residual = (p - cycle.points[0]).norm();
    if (line == CycleLine::X1X8)
        cycle.symmetry_distance = (cycle.points[3] - table.vertices[3]).norm();
    else
        cycle.symmetry_distance = (cycle.points[5] - table.vertices[5]).norm();
    cycle.symmetry_gap = std::abs(cycle.start_distance - cycle.symmetry_distance);
    return cycle;
}

// Structural audit of the table: tangency alignment of each arc with its
// octagon side, positive finite curvature across the retained windows, and
// disjoint windows so a smooth strongly convex completion is unobstructed.
struct ArcAuditEntry {
    double u_min = 0.0, u_max = 0.0;
    double curvature_min = 0.0, curvature_max = 0.0;
    double tangent_alignment = 0.0; // |sin(angle to the octagon side)|
    double angular_lo = 0.0, angular_hi = 0.0; // polar extent of the material
};

struct AuditReport {
    bool passed = true;
    std::vector<std::string> violations;
    std::array<ArcAuditEntry, 8> arcs{};
};

inline AuditReport consistency_audit(const OctagonTable& table) {
    AuditReport report;
    for (int i = 0; i < 8; ++i) {
        const HyperbolaArc& arc = table.arcs[i];
        ArcAuditEntry& entry = report.arcs[i];

        const Vec2 side = (table.vertices[(i + 1) % 8] - table.vertices[i]).normalized();
        const Vec2 tangent = arc.derivative_at(arc.u_z).normalized();
        entry.tangent_alignment = std::abs(cross2(tangent, side));
        if (entry.tangent_alignment > 1e-12) {
            report.passed = false;
            report.violations.push_back("arc " + std::to_string(i + 1) +
                                        " tangent deviates from its octagon side");
        }
        if ((arc.tangency - table.midpoints[i]).norm() > 1e-12 * table.circumradius) {
            report.passed = false;
            report.violations.push_back("arc " + std::to_string(i + 1) +
                                        " does not touch at the side midpoint");
        }

        const auto [u_lo, u_hi] = arc.u_range();
        entry.u_min = u_lo;
        entry.u_max = u_hi;
        entry.curvature_min = std::numeric_limits<double>::infinity();
        entry.curvature_max = 0.0;
        const int samples = 64;
        for (int s = 0; s <= samples; ++s) {
            const double u = u_lo + (u_hi - u_lo) * s / samples;
            const double kappa = arc.curvature_ccw(u);
            entry.curvature_min = std::min(entry.curvature_min, kappa);
            entry.curvature_max = std::max(entry.curvature_max, kappa);
        }
        if (!(entry.curvature_min > 0.0 && std::isfinite(entry.curvature_max))) {
            report.passed = false;
            report.violations.push_back("arc " + std::to_string(i + 1) +
                                        " is not strongly convex over its window");
        }

        // Polar extent relative to the arc's center direction. The boundary
        // runs counterclockwise as u decreases, so u_hi is the clockwise end.
        const double center = std::atan2(arc.tangency.y(), arc.tangency.x());
        const Vec2 end_cw = arc.point_at(u_hi);
        const Vec2 end_ccw = arc.point_at(u_lo);
        entry.angular_lo = center + wrap_signed(std::atan2(end_cw.y(), end_cw.x()) - center);
        entry.angular_hi = center + wrap_signed(std::atan2(end_ccw.y(), end_ccw.x()) - center);
    }

    for (int i = 0; i < 8; ++i) {
        const ArcAuditEntry& a = report.arcs[i];
        const ArcAuditEntry& b = report.arcs[(i + 1) % 8];
        const double gap = wrap_signed(b.angular_lo - a.angular_hi);
        if (!(gap > 0.0)) {
            report.passed = false;
            report.violations.push_back("windows of arcs " + std::to_string(i + 1) + " and " +
                                        std::to_string((i + 1) % 8 + 1) + " overlap");
        }
    }
    return report;
}

} // namespace billiards

#endif
