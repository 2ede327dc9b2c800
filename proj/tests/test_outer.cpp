#include <catch2/catch.hpp>

#include <cmath>
#include <random>

#include "billiards/outer_billiard.hpp"
#include "billiards/periodic_search.hpp"

using namespace billiards;

TEST_CASE("outer map on the circle") {
    const auto circle = CurveModel::circle(1.0);
    const OuterStep step = outer_map(circle, Vec2(2.0, 0.0));
    CHECK(step.y.x() == Approx(-1.0).epsilon(1e-12));
    CHECK(step.y.y() == Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK(step.z.position.x() == Approx(0.5).epsilon(1e-12));
    CHECK(step.r == Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK(step.y.norm() == Approx(2.0).epsilon(1e-12)); // |y| = |x| on the circle
}

TEST_CASE("outer step invariants on a generic curve") {
    const auto curve = CurveModel::support_fourier(1.0, {{2, 0.05, 0.0}, {3, 0.0, 0.02}});
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> angle(0.0, kTwoPi);
    std::uniform_real_distribution<double> height(0.3, 3.0);
    for (int i = 0; i < 100; ++i) {
        const BoundaryPoint base = curve.evaluate(angle(rng));
        const Vec2 x = base.position + height(rng) * base.normal;
        const OuterStep step = outer_map(curve, x);
        CHECK((step.z.position - 0.5 * (step.x + step.y)).norm() < 1e-10);
        CHECK((step.y - step.x).dot(step.z.tangent) > 0.0);
        CHECK(step.r > 0.0);
        // inverse composition
        const OuterStep back = outer_map_inverse(curve, step.y);
        CHECK((back.x - x).norm() < 1e-9);
    }
}

TEST_CASE("outer map inverse closed forms") {
    const auto circle = CurveModel::circle(1.0);
    const OuterStep a = outer_map_inverse(circle, Vec2(-1.0, std::sqrt(3.0)));
    CHECK((a.x - Vec2(2.0, 0.0)).norm() < 1e-10);
    const OuterStep b = outer_map_inverse(circle, Vec2(2.0, 0.0));
    CHECK((b.x - Vec2(-1.0, -std::sqrt(3.0))).norm() < 1e-10);
}

TEST_CASE("circle rotation oracle") {
    const auto circle = CurveModel::circle(1.0);

    SECTION("(5,1) orbit at d = 1/cos(pi/5)") {
        const Vec2 start(1.0 / std::cos(kPi / 5.0), 0.0);
        Vec2 p = start;
        for (int i = 0; i < 5; ++i) p = outer_map(circle, p).y;
        CHECK((p - start).norm() < 1e-9);
    }

    SECTION("radius preserved, polar angle advanced by 2 atan(sqrt(d^2-R^2)/R)") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> angle(0.0, kTwoPi);
        std::uniform_real_distribution<double> radius(1.05, 6.0);
        for (int i = 0; i < 10000; ++i) {
            const double d = radius(rng), phi = angle(rng);
            const Vec2 x = d * Vec2(std::cos(phi), std::sin(phi));
            const Vec2 y = outer_map(circle, x).y;
            CHECK(std::abs(y.norm() - d) < 1e-10);
            const double advance = wrap_angle(std::atan2(y.y(), y.x()) - phi);
            const double expected = 2.0 * std::atan(std::sqrt(d * d - 1.0));
            CHECK(std::abs(advance - expected) < 1e-10);
        }
    }
}

TEST_CASE("local differential") {
    const auto circle = CurveModel::circle(1.0);

    SECTION("closed form at (2,0)") {
        const LocalDifferential d = local_differential(circle, Vec2(2.0, 0.0));
        CHECK(d.matrix(0, 0) == -1.0);
        CHECK(d.matrix(1, 1) == -1.0);
        CHECK(d.matrix(1, 0) == 0.0);
        CHECK(d.matrix(0, 1) == Approx(-2.0 / std::sqrt(3.0)).epsilon(1e-12));
        CHECK(d.axis_x.dot(d.axis_y) == Approx(0.0).margin(1e-14));
    }

    SECTION("unit determinant by construction") {
        const auto curve = CurveModel::ellipse(2.0, 1.0);
        std::mt19937_64 rng(9);
        std::uniform_real_distribution<double> angle(0.0, kTwoPi);
        std::uniform_real_distribution<double> height(0.2, 2.0);
        for (int i = 0; i < 50; ++i) {
            const BoundaryPoint base = curve.evaluate(angle(rng));
            const LocalDifferential d =
                local_differential(curve, base.position + height(rng) * base.normal);
            CHECK(d.matrix.determinant() == 1.0);
        }
    }

    SECTION("matches the finite-difference Jacobian in the frame") {
        const auto circle1 = CurveModel::circle(1.0);
        const Vec2 x(2.0, 0.0);
        const LocalDifferential d = local_differential(circle1, x);
        const double h = 1e-5;
        Mat2 jac;
        for (int j = 0; j < 2; ++j) {
            Vec2 dp = Vec2::Zero();
            dp[j] = h;
            jac.col(j) = (outer_map(circle1, x + dp).y - outer_map(circle1, x - dp).y) / (2.0 * h);
        }
        const Mat2 in_frame = d.frame().transpose() * jac * d.frame();
        CHECK((in_frame - d.matrix).cwiseAbs().maxCoeff() < 1e-6);
    }
}

TEST_CASE("orbit angles and winding numbers") {
    SECTION("equilateral triangle") {
        const std::vector<Vec2> tri{{2.0, 0.0},
                                    {-1.0, std::sqrt(3.0)},
                                    {-1.0, -std::sqrt(3.0)}};
        const auto [alphas, betas, m] = orbit_angles(tri);
        for (double a : alphas) CHECK(a == Approx(kPi / 3.0).epsilon(1e-12));
        for (double b : betas) CHECK(b == Approx(2.0 * kPi / 3.0).epsilon(1e-12));
        CHECK(m == 1);
    }

    SECTION("square") {
        const std::vector<Vec2> square{{1.0, 1.0}, {-1.0, 1.0}, {-1.0, -1.0}, {1.0, -1.0}};
        const auto [alphas, betas, m] = orbit_angles(square);
        for (double a : alphas) CHECK(a == Approx(kPi / 2.0).epsilon(1e-12));
        CHECK(m == 1);
    }

    SECTION("pentagram winds twice") {
        std::vector<Vec2> star;
        for (int k = 0; k < 5; ++k) {
            const double th = 2.0 * kTwoPi * k / 5.0;
            star.emplace_back(std::cos(th), std::sin(th));
        }
        const auto [alphas, betas, m] = orbit_angles(star);
        CHECK(m == 2);
        double beta_sum = 0.0;
        for (double b : betas) beta_sum += b;
        CHECK(beta_sum == Approx(2.0 * kTwoPi).epsilon(1e-12));
        (void)alphas;
    }

    SECTION("repeated vertices are degenerate") {
        const std::vector<Vec2> bad{{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
        CHECK_THROWS_AS(orbit_angles(bad), DegeneratePolygon);
        CHECK_THROWS_AS(orbit_angles({{1.0, 0.0}, {0.0, 1.0}}), DegeneratePolygon);
    }
}

TEST_CASE("monodromy of the circle (3,1) orbit") {
    const auto circle = CurveModel::circle(1.0);
    const OuterOrbit orbit = trace_orbit(circle, Vec2(2.0, 0.0), 3);
    CHECK(orbit.closure_residual < 1e-12);
    CHECK(orbit.winding == 1);
    CHECK(winding_sum_check(orbit));

    const Mat2 mono = monodromy_analytic(circle, orbit);
    // (R(pi/3) A)^3 = 3 R(pi/3) A - 2 Id by Cayley-Hamilton on the trace-2 factor.
    Mat2 expected;
    expected << -0.5, -std::sqrt(3.0) / 2.0, 3.0 * std::sqrt(3.0) / 2.0, 2.5;
    CHECK((mono - expected).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(mono.determinant() - 1.0) < 1e-10);

    const Mat2 numeric = monodromy_numeric(circle, Vec2(2.0, 0.0), 3);
    CHECK(std::abs(numeric.determinant() - 1.0) < 1e-4);
    CHECK(std::abs(numeric.trace() - 2.0) < 1e-4); // parabolic twist family
    CHECK((numeric - Mat2::Identity()).cwiseAbs().maxCoeff() > 1.0); // rank(M - I) >= 1

    const Mat2 frame = orbit_frame(circle, orbit);
    CHECK((numeric - frame * mono * frame.transpose()).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("monodromy agreement on an ellipse orbit") {
    const auto ellipse = CurveModel::ellipse(2.0, 1.0);
    const SearchReport report = find_orbits(ellipse, 3, 1, 16);
    REQUIRE(!report.orbits.empty());
    const OuterOrbit& orbit = report.orbits.front();
    const Mat2 mono = monodromy_analytic(ellipse, orbit);
    const Mat2 numeric = monodromy_numeric(ellipse, orbit.vertices.front(), 3);
    const Mat2 frame = orbit_frame(ellipse, orbit);
    CHECK((numeric - frame * mono * frame.transpose()).cwiseAbs().maxCoeff() < 1e-5);
    CHECK(std::abs(mono.determinant() - 1.0) < 1e-10);
}

TEST_CASE("monodromy error paths") {
    const auto circle = CurveModel::circle(1.0);
    CHECK_THROWS_AS(monodromy_numeric(circle, Vec2(2.1, 0.0), 3), NotPeriodic);
    OuterOrbit open_orbit = trace_orbit(circle, Vec2(2.1, 0.0), 3);
    CHECK_THROWS_AS(monodromy_analytic(circle, open_orbit), OrbitNotClosed);
}
