#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "billiards/certificates.hpp"
#include "billiards/octagon.hpp"

using namespace billiards;

namespace {

// Householder reflection across the line through the origin with direction
// angle phi.
Mat2 reflection_across(double phi) {
    Mat2 r;
    r << std::cos(2.0 * phi), std::sin(2.0 * phi), std::sin(2.0 * phi), -std::cos(2.0 * phi);
    return r;
}

// Independent tangency solve on the parametric arc: find u with
// (x - P(u)) parallel to P'(u), i.e. the tangent line from x touches there.
double oracle_arc_tangency(const HyperbolaArc& arc, const Vec2& x) {
    double u = arc.u_z;
    for (int it = 0; it < 60; ++it) {
        const Vec2 d = x - arc.point_at(u);
        const double f = cross2(d, arc.derivative_at(u));
        const double h = 1e-7;
        const double fp = (cross2(x - arc.point_at(u + h), arc.derivative_at(u + h)) -
                           cross2(x - arc.point_at(u - h), arc.derivative_at(u - h))) /
                          (2.0 * h);
        const double step = f / fp;
        u -= step;
        if (std::abs(step) < 1e-15) break;
    }
    return u;
}

} // namespace

TEST_CASE("table construction") {
    const OctagonTable table = build_table(1.0);

    SECTION("midpoints sit at cos(pi/8)") {
        CHECK(table.midpoints[0].norm() == Approx(std::cos(kPi / 8.0)).epsilon(1e-14));
        CHECK(table.vertices[0].x() == Approx(1.0));
        CHECK(table.vertices[0].y() == Approx(0.0).margin(1e-15));
    }

    SECTION("tangency coordinates from an independent change of basis") {
        const HyperbolaArc& arc = table.arcs[0];
        Mat2 basis;
        basis.col(0) = arc.u_dir;
        basis.col(1) = arc.v_dir;
        const Vec2 uv = basis.colPivHouseholderQr().solve(table.midpoints[0] - arc.origin);
        CHECK(uv[0] > 0.0);
        CHECK(uv[1] > 0.0);
        CHECK(uv[0] * uv[1] == Approx(arc.c).epsilon(1e-13));
        CHECK(uv[0] == Approx(arc.u_z).epsilon(1e-13));
    }

    SECTION("eight-fold symmetry") {
        const Mat2 rot = rotation(kPi / 4.0);
        for (int i = 0; i < 8; ++i) {
            const HyperbolaArc& a = table.arcs[i];
            const HyperbolaArc& b = table.arcs[(i + 1) % 8];
            CHECK((rot * a.origin - b.origin).norm() < 1e-12);
            CHECK((rot * a.u_dir - b.u_dir).norm() < 1e-12);
            CHECK((rot * a.v_dir - b.v_dir).norm() < 1e-12);
            CHECK(std::abs(a.c - b.c) < 1e-14);
            CHECK((rot * a.tangency - b.tangency).norm() < 1e-12);
        }
    }

    SECTION("radius validation") {
        CHECK_THROWS_AS(build_table(0.0), InvalidCurve);
        CHECK_THROWS_AS(build_table(-2.0), InvalidCurve);
    }
}

TEST_CASE("hyperbola tangent map") {
    const OctagonTable table = build_table(1.0);
    const HyperbolaArc& arc = table.arcs[0];

    SECTION("the unperturbed edge pair reflects through the midpoint") {
        const auto res = hyperbola_tangent_map(arc, table.vertices[0]);
        CHECK((res.image - table.vertices[1]).norm() < 1e-14);
        CHECK((res.tangency - table.midpoints[0]).norm() < 1e-14);
    }

    SECTION("midpoint bisection identity over random window points") {
        std::mt19937_64 rng(53);
        std::uniform_real_distribution<double> du(-arc.halfwidth * 0.9, arc.halfwidth * 0.9);
        for (int i = 0; i < 1000; ++i) {
            const double u0 = arc.u_z + du(rng);
            if (!arc.in_window(u0)) continue;
            const Vec2 p = arc.origin + 2.0 * u0 * arc.u_dir;
            const auto res = hyperbola_tangent_map(arc, p);
            CHECK((0.5 * (p + res.image) - res.tangency).norm() < 1e-13);
            // tangency on the hyperbola: u v = c
            const Vec2 rel = res.tangency - arc.origin;
            Mat2 basis;
            basis.col(0) = arc.u_dir;
            basis.col(1) = arc.v_dir;
            const Vec2 uv = basis.colPivHouseholderQr().solve(rel);
            CHECK(uv[0] * uv[1] == Approx(arc.c).epsilon(1e-12));
        }
    }

    SECTION("conjugation by the table's mirror symmetry inverts the map") {
        // The axis through the tangency point swaps the two asymptotes.
        const Mat2 mirror = reflection_across(kPi / 8.0);
        const double u0 = arc.u_z + 0.03;
        const Vec2 p = arc.origin + 2.0 * u0 * arc.u_dir;
        const Vec2 q = hyperbola_tangent_map(arc, p).image;
        const Vec2 back = mirror * hyperbola_tangent_map(arc, mirror * q).image;
        CHECK((back - p).norm() < 1e-12);
    }

    SECTION("window enforcement") {
        const double u_big = arc.u_z + 2.0 * arc.halfwidth;
        CHECK_THROWS_AS(hyperbola_tangent_map(arc, arc.origin + 2.0 * u_big * arc.u_dir),
                        OutsideWindow);
        CHECK_THROWS_AS(hyperbola_tangent_map(arc, arc.origin - arc.u_dir), OutsideWindow);
    }
}

TEST_CASE("eight cycle") {
    const OctagonTable table = build_table(1.0);

    SECTION("zero offset reproduces the octagon") {
        const EightCycle cycle = eight_cycle(table, 0.0);
        CHECK(cycle.closure_residual < 1e-14);
        for (int i = 0; i < 8; ++i)
            CHECK((cycle.points[i] - table.vertices[i]).norm() < 1e-14);
    }

    SECTION("small offsets close on both boundary lines") {
        for (const CycleLine line : {CycleLine::X1X8, CycleLine::X1X2}) {
            for (double offset : {1e-2, -1e-2, 4e-2, -4e-2, 1e-4}) {
                const EightCycle cycle = eight_cycle(table, offset, line);
                CHECK(cycle.closure_residual < 1e-10);
                CHECK(cycle.symmetry_gap < 1e-10);
            }
        }
    }

    SECTION("the half cycle is centrally symmetric") {
        for (const CycleLine line : {CycleLine::X1X8, CycleLine::X1X2}) {
            const EightCycle cycle = eight_cycle(table, 2e-2, line);
            CHECK((cycle.points[4] + cycle.points[0]).norm() < 1e-13);
            CHECK((cycle.points[5] + cycle.points[1]).norm() < 1e-13);
        }
    }

    SECTION("offsets beyond the arc windows are rejected") {
        CHECK_THROWS_AS(eight_cycle(table, 0.5), OutsideWindow);
        CHECK_THROWS_AS(eight_cycle(table, -0.5, CycleLine::X1X2), OutsideWindow);
    }

    SECTION("arc steps agree with a generic tangency solve on the arc") {
        const double offset = 1e-3;
        const EightCycle cycle = eight_cycle(table, offset);
        const Vec2 p = cycle.points[0];
        const double u_star = oracle_arc_tangency(table.arcs[0], p);
        const Vec2 tangency = table.arcs[0].point_at(u_star);
        const Vec2 image = 2.0 * tangency - p;
        CHECK((image - cycle.points[1]).norm() < 1e-8);
    }
}

TEST_CASE("the octagon orbit's monodromy word multiplies to the identity") {
    // Shear coefficients of the unperturbed orbit: s = 2 rho / r with rho the
    // arc's radius of curvature at the side midpoint and r the half side.
    const OctagonTable table = build_table(1.0);
    const HyperbolaArc& arc = table.arcs[0];
    const double kappa = arc.curvature_ccw(arc.u_z);
    const double r = (table.vertices[0] - table.midpoints[0]).norm();
    const double s = 2.0 / (kappa * r);
    CHECK(s == Approx(2.0).epsilon(1e-12));

    const ShearRotationWord word(
        std::vector<ShearRotationLetter>(8, {3.0 * kPi / 4.0, s}));
    CHECK((word_product(word) - Mat2::Identity()).cwiseAbs().maxCoeff() < 1e-12);

    // Sum alpha = 6 pi > 2 pi: exactly where the non-identity certificate is
    // silent, as it must be for segments of 8-periodic points to exist.
    const auto cert = certify_not_identity(word);
    CHECK(cert.verdict == CertificateVerdict::Inconclusive);
}

TEST_CASE("consistency audit") {
    SECTION("the default table passes") {
        const AuditReport report = consistency_audit(build_table(1.0));
        CHECK(report.passed);
        CHECK(report.violations.empty());
        for (const auto& entry : report.arcs) {
            CHECK(entry.curvature_min > 0.0);
            CHECK(std::isfinite(entry.curvature_max));
            CHECK(entry.tangent_alignment < 1e-12);
            CHECK(entry.u_min < entry.u_max);
        }
    }

    SECTION("oversized windows overlap and fail with a named violation") {
        const AuditReport report = consistency_audit(build_table(1.0, 1.0));
        CHECK(!report.passed);
        bool overlap = false;
        for (const auto& v : report.violations)
            if (v.find("overlap") != std::string::npos) overlap = true;
        CHECK(overlap);
    }

    SECTION("scaling the radius scales the table") {
        const AuditReport report = consistency_audit(build_table(3.5));
        CHECK(report.passed);
    }
}
