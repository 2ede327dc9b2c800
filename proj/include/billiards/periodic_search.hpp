#ifndef BILLIARDS_PERIODIC_SEARCH_HPP
#define BILLIARDS_PERIODIC_SEARCH_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "billiards/certificates.hpp"
#include "billiards/curve.hpp"
#include "billiards/errors.hpp"
#include "billiards/geometry.hpp"
#include "billiards/outer_billiard.hpp"

namespace billiards {

// Candidate (n, m)-orbit in tangency coordinates: normal angles of the n
// tangency points, lifted so that theta_{i+1} > theta_i and the total sweep
// around the curve is 2 pi m.
struct TangencyVector {
    std::vector<double> thetas;
    int winding = 1;

    int period() const { return static_cast<int>(thetas.size()); }

    // Cyclic gaps, the last one closing up through the m-fold lift.
    std::vector<double> gaps() const {
        const std::size_t n = thetas.size();
        std::vector<double> g(n);
        for (std::size_t i = 0; i + 1 < n; ++i) g[i] = thetas[i + 1] - thetas[i];
        g[n - 1] = thetas.front() + kTwoPi * winding - thetas.back();
        return g;
    }

    // Realizable orbit configurations have every gap strictly inside (0, pi);
    // a gap congruent to 0 mod pi means parallel consecutive tangents.
    bool valid() const {
        if (thetas.size() < 3 || winding < 1) return false;
        for (double g : gaps())
            if (!(g > 1e-10 && g < kPi - 1e-10)) return false;
        return true;
    }
};

// Vertices of the circumscribed polygon: x_i is the intersection of the
// tangent lines at theta_{i-1} and theta_i (cyclically), so that the side
// x_i x_{i+1} lies on the tangent line at theta_i.
inline std::vector<Vec2> circumscribed_vertices(const CurveModel& curve,
                                                const TangencyVector& tv) {
    const int n = tv.period();
    std::vector<Vec2> vertices(n);
    for (int i = 0; i < n; ++i) {
        const double ta = tv.thetas[(i + n - 1) % n];
        const double tb = tv.thetas[i];
        if (std::abs(std::sin(tb - ta)) < 1e-12)
            throw ParallelTangents("tangent lines at theta_" + std::to_string((i + n - 1) % n) +
                                   " and theta_" + std::to_string(i) + " are parallel");
        vertices[i] = line_intersection(Vec2(std::cos(ta), std::sin(ta)), curve.support(ta),
                                        Vec2(std::cos(tb), std::sin(tb)), curve.support(tb));
    }
    return vertices;
}

// Signed distance, along the tangent at theta_i, from the side midpoint
// (x_i + x_{i+1})/2 to the tangency point gamma(theta_i). The zero vector
// characterizes (n, m)-periodic orbits.
inline Eigen::VectorXd midpoint_residual(const CurveModel& curve, const TangencyVector& tv) {
    const int n = tv.period();
    const std::vector<Vec2> x = circumscribed_vertices(curve, tv);
    Eigen::VectorXd res(n);
    for (int i = 0; i < n; ++i) {
        const BoundaryPoint z = curve.evaluate(tv.thetas[i]);
        const Vec2 mid = 0.5 * (x[i] + x[(i + 1) % n]);
        res[i] = (z.position - mid).dot(z.tangent);
    }
    return res;
}

namespace detail {

inline std::optional<Eigen::VectorXd> try_midpoint_residual(const CurveModel& curve,
                                                            const TangencyVector& tv) {
    try {
        return midpoint_residual(curve, tv);
    } catch (const ParallelTangents&) {
        return std::nullopt;
    }
}

struct NewtonOutcome {
    bool converged = false;
    TangencyVector tv;
    double final_residual = 0.0;
    double min_singular_value = 0.0;      // at the solution, when converged
    bool solution_singular = false;       // rank-deficient Jacobian at the solution
    bool singular_jacobian_seen = false;  // at any iterate (handled by damping)
    std::vector<double> residual_history;
};

// Damped Newton on the midpoint residuals over all n tangency angles (or the
// trailing n-1 with theta_1 pinned, when fix_first is set). The linear solve
// is a least-squares step, which degrades gracefully on the rank-deficient
// Jacobians of rotation-symmetric curves.
inline NewtonOutcome newton_iterate(const CurveModel& curve, const TangencyVector& tv0,
                                    int max_iter, double tol, bool fix_first) {
    NewtonOutcome out;
    out.tv = tv0;
    const int n = tv0.period();
    const int unknowns = fix_first ? n - 1 : n;
    const int offset = fix_first ? 1 : 0;
    const double fd_step = 1e-7;

    auto jacobian = [&](const TangencyVector& at) -> std::optional<Eigen::MatrixXd> {
        Eigen::MatrixXd jac(n, unknowns);
        for (int j = 0; j < unknowns; ++j) {
            TangencyVector plus = at, minus = at;
            plus.thetas[offset + j] += fd_step;
            minus.thetas[offset + j] -= fd_step;
            const auto rp = try_midpoint_residual(curve, plus);
            const auto rm = try_midpoint_residual(curve, minus);
            if (!rp || !rm) return std::nullopt;
            jac.col(j) = (*rp - *rm) / (2.0 * fd_step);
        }
        return jac;
    };

    auto residual = try_midpoint_residual(curve, out.tv);
    if (!residual) throw ParallelTangents("initial tangency vector has parallel tangents");
    double res_norm = residual->norm();
    out.final_residual = residual->lpNorm<Eigen::Infinity>();
    out.residual_history.push_back(out.final_residual);

    for (int iter = 0; iter < max_iter; ++iter) {
        if (residual->lpNorm<Eigen::Infinity>() < tol) {
            out.converged = true;
            break;
        }
        const auto jac = jacobian(out.tv);
        if (!jac) return out;
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(*jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.singularValues().minCoeff() < 1e-8 * svd.singularValues().maxCoeff())
            out.singular_jacobian_seen = true;
        svd.setThreshold(1e-12);
        const Eigen::VectorXd step = svd.solve(*residual);

        // Backtrack until the step improves the 2-norm of the residual.
        double damping = 1.0;
        bool improved = false;
        for (int bt = 0; bt < 30; ++bt) {
            TangencyVector trial = out.tv;
            for (int j = 0; j < unknowns; ++j) trial.thetas[offset + j] -= damping * step[j];
            const auto rt = try_midpoint_residual(curve, trial);
            if (rt && rt->norm() < res_norm) {
                out.tv = trial;
                residual = rt;
                res_norm = rt->norm();
                improved = true;
                break;
            }
            damping *= 0.5;
        }
        out.final_residual = residual->lpNorm<Eigen::Infinity>();
        out.residual_history.push_back(out.final_residual);
        if (!improved) return out;
    }
    if (!out.converged && out.final_residual < tol) out.converged = true;
    if (out.converged) {
        // One-parameter families (rotation-symmetric or affine-symmetric
        // curves) show up as a rank-deficient Jacobian at the solution.
        if (const auto jac = jacobian(out.tv)) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(*jac);
            out.min_singular_value = svd.singularValues().minCoeff();
            out.solution_singular =
                out.min_singular_value < 1e-8 * svd.singularValues().maxCoeff();
        }
    }
    return out;
}

// Cyclic-shift distance between two lifted tangency sequences, compared mod
// 2 pi. Used to identify orbits that differ only by the starting vertex.
inline double cyclic_theta_distance(const std::vector<double>& a, const std::vector<double>& b) {
    const std::size_t n = a.size();
    if (b.size() != n) return std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            worst = std::max(worst, std::abs(wrap_signed(b[(i + k) % n] - a[i])));
        best = std::min(best, worst);
    }
    return best;
}

// Rotation class of a parameter cycle: how many times the lifted sequence
// sweeps the curve per period.
inline int cycle_rotation_class(const std::vector<double>& t) {
    double total = 0.0;
    const std::size_t n = t.size();
    for (std::size_t i = 0; i < n; ++i) total += wrap_angle(t[(i + 1) % n] - t[i]);
    return static_cast<int>(std::lround(total / kTwoPi));
}

// True when two tangency parameters coincide mod 2 pi, i.e. the solution is a
// multiple cover visiting the same tangent line twice.
inline bool has_duplicate_tangencies(const TangencyVector& tv) {
    const int n = tv.period();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (std::abs(wrap_signed(tv.thetas[j] - tv.thetas[i])) < 1e-6) return true;
    return false;
}

} // namespace detail

// Builds the orbit polygon of a solved tangency vector and measures closure
// under the actual outer billiard dynamics.
inline OuterOrbit orbit_from_tangencies(const CurveModel& curve, const TangencyVector& tv) {
    OuterOrbit orbit;
    orbit.vertices = circumscribed_vertices(curve, tv);
    orbit.thetas.resize(tv.thetas.size());
    for (std::size_t i = 0; i < tv.thetas.size(); ++i)
        orbit.thetas[i] = wrap_angle(tv.thetas[i]);
    Vec2 p = orbit.vertices.front();
    for (int i = 0; i < tv.period(); ++i) p = outer_map(curve, p).y;
    orbit.closure_residual = (p - orbit.vertices.front()).norm();
    std::tie(orbit.alphas, orbit.betas, orbit.winding) = orbit_angles(orbit.vertices);
    return orbit;
}

// Damped Newton on the midpoint residuals from the starting guess tv0.
// Throws NoConvergence when max_iter damped steps fail to reach the 1e-12
// residual target, and ParallelTangents when tv0 is degenerate.
inline OuterOrbit newton_solve(const CurveModel& curve, const TangencyVector& tv0,
                               int max_iter = 50) {
    const auto outcome = detail::newton_iterate(curve, tv0, max_iter, 1e-12, false);
    if (!outcome.converged)
        throw NoConvergence("Newton stalled at residual " +
                            std::to_string(outcome.final_residual) + " after " +
                            std::to_string(max_iter) + " iterations");
    return orbit_from_tangencies(curve, outcome.tv);
}

struct SearchReport {
    std::vector<OuterOrbit> orbits;
    std::vector<TangencyVector> tangency_vectors;
    std::vector<std::vector<double>> residual_histories; // per reported orbit
    std::vector<std::string> dedup_log;
    std::vector<std::string> warnings;
    int seeds_tried = 0;
    int seeds_converged = 0;
    bool continuum = false;
};

namespace detail {

inline std::vector<TangencyVector> make_seeds(int n, int m, int grid_size, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<TangencyVector> seeds;
    seeds.reserve(grid_size);
    const int structured = std::max(1, grid_size / 2);
    for (int k = 0; k < grid_size; ++k) {
        TangencyVector tv;
        tv.winding = m;
        tv.thetas.resize(n);
        const double base = kTwoPi * k / std::max(1, grid_size);
        if (k < structured) {
            for (int i = 0; i < n; ++i) tv.thetas[i] = base + kTwoPi * m * i / n;
        } else {
            // Random positive gaps rescaled to a total sweep of 2 pi m.
            std::vector<double> gaps(n);
            double total = 0.0;
            bool ok = true;
            for (int attempt = 0; attempt < 64; ++attempt) {
                total = 0.0;
                for (int i = 0; i < n; ++i) {
                    gaps[i] = 0.5 + unit(rng);
                    total += gaps[i];
                }
                ok = true;
                for (int i = 0; i < n; ++i) {
                    gaps[i] *= kTwoPi * m / total;
                    if (gaps[i] >= kPi * 0.98) ok = false;
                }
                if (ok) break;
            }
            if (!ok)
                for (int i = 0; i < n; ++i) gaps[i] = kTwoPi * m / n;
            tv.thetas[0] = kTwoPi * unit(rng);
            for (int i = 1; i < n; ++i) tv.thetas[i] = tv.thetas[i - 1] + gaps[i - 1];
        }
        seeds.push_back(std::move(tv));
    }
    return seeds;
}

} // namespace detail

// Multistart Newton search for (n, m)-periodic outer billiard orbits.
// Orbits are deduplicated up to cyclic shift; on rotation-symmetric curves a
// near-singular Jacobian at a solution marks a one-parameter family and the
// family is reported once, with the continuum flag set.
inline SearchReport find_orbits(const CurveModel& curve, int n, int m, int grid_size,
                                std::uint64_t seed = 0, double tol = 1e-12) {
    if (!(n >= 3 && m >= 1 && 2 * m < n))
        throw InvalidPeriod("(n, m) = (" + std::to_string(n) + ", " + std::to_string(m) +
                            ") violates 0 < 2m < n" +
                            (n == 2 * m ? " (degenerate double cover of a 2-periodic chord)"
                                        : ""));
    SearchReport report;
    if (std::gcd(n, m) != 1) {
        report.warnings.push_back("(n, m) share a factor: primitive orbits of this class are " +
                                  std::to_string(std::gcd(n, m)) + "-fold covers; solutions " +
                                  "that revisit a tangent line are discarded");
    }

    std::vector<bool> solution_singular;
    for (const TangencyVector& tv0 : detail::make_seeds(n, m, grid_size, seed)) {
        ++report.seeds_tried;
        detail::NewtonOutcome outcome;
        try {
            outcome = detail::newton_iterate(curve, tv0, 60, tol, false);
        } catch (const ParallelTangents&) {
            continue;
        }
        if (!outcome.converged || !outcome.tv.valid()) continue;
        if (detail::has_duplicate_tangencies(outcome.tv)) continue;
        ++report.seeds_converged;

        // A rank-deficient Jacobian at the solution marks a one-parameter
        // family (rotation-symmetric and affine-symmetric curves); its
        // members are reported once through a single representative.
        const bool singular = outcome.solution_singular;
        bool duplicate = false;
        for (std::size_t i = 0; i < report.tangency_vectors.size(); ++i) {
            const bool family_match = singular && solution_singular[i];
            const bool exact_match =
                detail::cyclic_theta_distance(report.tangency_vectors[i].thetas,
                                              outcome.tv.thetas) < 1e-6;
            if (family_match || exact_match) {
                duplicate = true;
                std::ostringstream os;
                os << "seed " << report.seeds_tried - 1 << " rejoined orbit " << i
                   << (family_match && !exact_match ? " (same one-parameter family)"
                                                    : " (cyclic shift)");
                report.dedup_log.push_back(os.str());
                break;
            }
        }
        if (duplicate) continue;

        OuterOrbit orbit;
        try {
            orbit = orbit_from_tangencies(curve, outcome.tv);
        } catch (const Error&) {
            continue;
        }
        if (!(orbit.closure_residual < 1e-10) || orbit.winding != m) continue;
        if (!winding_sum_check(orbit)) continue;
        report.orbits.push_back(std::move(orbit));
        report.tangency_vectors.push_back(outcome.tv);
        report.residual_histories.push_back(std::move(outcome.residual_history));
        solution_singular.push_back(singular);
        if (singular) report.continuum = true;
    }
    if (report.orbits.size() < 2 && !report.continuum)
        report.warnings.push_back("fewer than two distinct orbits found; the Birkhoff lower "
                                  "bound suggests the grid is too coarse");
    return report;
}

// Constrained search for orbits whose first tangency point is pinned at
// gamma(theta_fixed). The cyclic closure makes the system overdetermined
// (n residuals, n-1 unknowns); Gauss-Newton least squares finds the exact
// trajectories, and only near-zero residuals are accepted.
inline SearchReport orbits_through_tangency(const CurveModel& curve, double theta_fixed, int n,
                                            int m, int grid_size, std::uint64_t seed = 0,
                                            double accept_tol = 1e-10) {
    if (!(n >= 3 && m >= 1 && 2 * m < n))
        throw InvalidPeriod("(n, m) = (" + std::to_string(n) + ", " + std::to_string(m) +
                            ") violates 0 < 2m < n");
    SearchReport report;
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> jitter(-0.3, 0.3);

    for (int k = 0; k < grid_size; ++k) {
        ++report.seeds_tried;
        TangencyVector tv;
        tv.winding = m;
        tv.thetas.resize(n);
        tv.thetas[0] = theta_fixed;
        const double gap = kTwoPi * m / n;
        for (int i = 1; i < n; ++i) {
            const double j = (k == 0) ? 0.0 : jitter(rng) * gap;
            tv.thetas[i] = theta_fixed + gap * i + j;
        }
        detail::NewtonOutcome outcome;
        try {
            outcome = detail::newton_iterate(curve, tv, 80, std::min(accept_tol, 1e-12), true);
        } catch (const ParallelTangents&) {
            continue;
        }
        if (!(outcome.converged || outcome.final_residual < accept_tol) || !outcome.tv.valid())
            continue;
        if (detail::has_duplicate_tangencies(outcome.tv)) continue;
        ++report.seeds_converged;

        bool duplicate = false;
        for (std::size_t i = 0; i < report.tangency_vectors.size(); ++i) {
            double worst = 0.0;
            for (int j = 0; j < n; ++j)
                worst = std::max(worst, std::abs(wrap_signed(report.tangency_vectors[i].thetas[j] -
                                                             outcome.tv.thetas[j])));
            if (worst < 1e-6) {
                duplicate = true;
                break;
            }
        }
        if (duplicate) continue;

        OuterOrbit orbit;
        try {
            orbit = orbit_from_tangencies(curve, outcome.tv);
        } catch (const Error&) {
            continue;
        }
        if (!(orbit.closure_residual < 1e-8) || orbit.winding != m) continue;
        if (!winding_sum_check(orbit)) continue;
        report.orbits.push_back(std::move(orbit));
        report.tangency_vectors.push_back(outcome.tv);
        report.residual_histories.push_back(std::move(outcome.residual_history));
    }
    return report;
}

// Symplectic billiard periodic orbits as boundary-parameter cycles; the
// residual at vertex i is cross(gamma(t_{i+1}) - gamma(t_{i-1}), T(t_i)).
struct SymplecticOrbitResult {
    std::vector<double> params;
    double residual = 0.0;
};

struct SymplecticSearchReport {
    std::vector<SymplecticOrbitResult> orbits;
    std::vector<std::string> warnings;
    int seeds_tried = 0;
    int seeds_converged = 0;
    bool continuum = false;
};

namespace detail {

inline Eigen::VectorXd symplectic_residual(const CurveModel& curve,
                                           const std::vector<double>& t) {
    const int n = static_cast<int>(t.size());
    Eigen::VectorXd res(n);
    for (int i = 0; i < n; ++i) {
        const Vec2 chord = curve.evaluate(t[(i + 1) % n]).position -
                           curve.evaluate(t[(i + n - 1) % n]).position;
        res[i] = cross2(chord, curve.evaluate(t[i]).tangent);
    }
    return res;
}

} // namespace detail

inline SymplecticSearchReport symplectic_find_orbits(const CurveModel& curve, int n,
                                                     int grid_size, std::uint64_t seed = 0) {
    if (n < 3) throw InvalidPeriod("symplectic orbits need n >= 3, got n=" + std::to_string(n));
    SymplecticSearchReport report;
    std::mt19937_64 rng(seed ^ 0x2545f4914f6cdd1dull);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    std::vector<std::vector<double>> accepted_params;
    std::vector<bool> accepted_singular;
    const int classes = (n - 1) / 2;
    for (int k = 1; k <= classes; ++k) {
        for (int g = 0; g < grid_size; ++g) {
            ++report.seeds_tried;
            std::vector<double> t(n);
            const double base = kTwoPi * g / std::max(1, grid_size);
            for (int i = 0; i < n; ++i) {
                const double j = (g < std::max(1, grid_size / 2)) ? 0.0
                                                                  : 0.2 * (unit(rng) - 0.5);
                t[i] = base + kTwoPi * k * i / n + j;
            }

            // Newton with least-squares steps and backtracking, like the
            // outer-billiard search but on the chord-parallelism residuals.
            const double fd = 1e-7;
            auto jacobian = [&](const std::vector<double>& at) {
                Eigen::MatrixXd jac(n, n);
                for (int j = 0; j < n; ++j) {
                    auto plus = at, minus = at;
                    plus[j] += fd;
                    minus[j] -= fd;
                    jac.col(j) = (detail::symplectic_residual(curve, plus) -
                                  detail::symplectic_residual(curve, minus)) /
                                 (2.0 * fd);
                }
                return jac;
            };
            auto res = detail::symplectic_residual(curve, t);
            double res_norm = res.norm();
            bool converged = false;
            for (int iter = 0; iter < 60 && !converged; ++iter) {
                if (res.lpNorm<Eigen::Infinity>() < 1e-12) {
                    converged = true;
                    break;
                }
                Eigen::JacobiSVD<Eigen::MatrixXd> svd(jacobian(t),
                                                      Eigen::ComputeThinU | Eigen::ComputeThinV);
                svd.setThreshold(1e-12);
                const Eigen::VectorXd step = svd.solve(res);
                double damping = 1.0;
                bool improved = false;
                for (int bt = 0; bt < 30; ++bt) {
                    auto trial = t;
                    for (int j = 0; j < n; ++j) trial[j] -= damping * step[j];
                    const auto rt = detail::symplectic_residual(curve, trial);
                    if (rt.norm() < res_norm) {
                        t = trial;
                        res = rt;
                        res_norm = rt.norm();
                        improved = true;
                        break;
                    }
                    damping *= 0.5;
                }
                if (!improved) break;
            }
            if (!converged && res.lpNorm<Eigen::Infinity>() < 1e-12) converged = true;
            if (!converged) continue;
            Eigen::JacobiSVD<Eigen::MatrixXd> svd_final(jacobian(t));
            const bool singular = svd_final.singularValues().minCoeff() <
                                  1e-8 * svd_final.singularValues().maxCoeff();

            // Validate the inscribed polygon: positively oriented admissible
            // chords all the way around.
            bool admissible = true;
            for (int i = 0; i < n; ++i) {
                const double gap = wrap_angle(t[(i + 1) % n] - t[i]);
                if (!(gap > 1e-8 && gap < kPi - 1e-8)) admissible = false;
            }
            if (!admissible) continue;
            ++report.seeds_converged;

            std::vector<double> params(n);
            for (int i = 0; i < n; ++i) params[i] = wrap_angle(t[i]);
            const int cls = detail::cycle_rotation_class(params);
            bool duplicate = false;
            for (std::size_t i = 0; i < accepted_params.size(); ++i) {
                const bool family_match = singular && accepted_singular[i] &&
                                          detail::cycle_rotation_class(accepted_params[i]) == cls;
                if (family_match ||
                    detail::cyclic_theta_distance(accepted_params[i], params) < 1e-6) {
                    duplicate = true;
                    break;
                }
            }
            if (duplicate) continue;
            accepted_params.push_back(params);
            accepted_singular.push_back(singular);
            if (singular) report.continuum = true;
            report.orbits.push_back({params, res.lpNorm<Eigen::Infinity>()});
        }
    }
    return report;
}

} // namespace billiards

#endif
