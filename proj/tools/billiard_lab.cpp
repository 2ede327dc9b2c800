// Command-line front end: orbits, certificates, periodic-orbit searches, the
// octagon construction, and SVG plots, all driven by JSON spec files.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "billiards/certificates.hpp"
#include "billiards/curve.hpp"
#include "billiards/errors.hpp"
#include "billiards/io.hpp"
#include "billiards/octagon.hpp"
#include "billiards/outer_billiard.hpp"
#include "billiards/periodic_search.hpp"
#include "billiards/symplectic_billiard.hpp"

namespace {

using namespace billiards;

std::uint64_t seed_from_env() {
    const char* s = std::getenv("BILLIARD_SEED");
    if (!s || !*s) return 0;
    return std::strtoull(s, nullptr, 10);
}

Vec2 parse_vec2(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw IoError("expected \"x,y\", got \"" + text + "\"");
    return Vec2(std::strtod(text.substr(0, comma).c_str(), nullptr),
                std::strtod(text.substr(comma + 1).c_str(), nullptr));
}

Eigen::VectorXd parse_vector(const std::string& text) {
    std::vector<double> values;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) values.push_back(std::strtod(item.c_str(), nullptr));
    Eigen::VectorXd v(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) v[i] = values[i];
    return v;
}

std::string matrix_json(const Mat2& m) {
    std::ostringstream os;
    os << "[[" << format_double(m(0, 0)) << "," << format_double(m(0, 1)) << "],["
       << format_double(m(1, 0)) << "," << format_double(m(1, 1)) << "]]";
    return os.str();
}

void emit(const std::string& text, const std::string& path) {
    if (path.empty())
        std::cout << text;
    else
        write_text_file(path, text);
}

// --- outer-orbit -----------------------------------------------------------

struct OuterOrbitArgs {
    std::string curve_path, start, csv_path, svg_path;
    int steps = 1;
};

int run_outer_orbit(const OuterOrbitArgs& args) {
    const CurveModel curve = load_curve(args.curve_path);
    const Vec2 start = parse_vec2(args.start);

    std::vector<Vec2> points{start};
    std::vector<double> thetas;
    for (int i = 0; i < args.steps; ++i) {
        const OuterStep step = outer_map(curve, points.back());
        thetas.push_back(step.z.theta);
        points.push_back(step.y);
    }
    thetas.push_back(forward_tangency(curve, points.back()).theta);
    const double closure = (points.back() - points.front()).norm();

    std::vector<double> alphas(points.size(), 0.0), betas(points.size(), 0.0);
    int winding = 0;
    if (args.steps >= 3) {
        std::vector<Vec2> polygon(points.begin(), points.end() - 1);
        try {
            auto [a, b, m] = orbit_angles(polygon);
            winding = m;
            for (std::size_t i = 0; i < a.size(); ++i) {
                alphas[i] = a[i];
                betas[i] = b[i];
            }
            alphas.back() = a.front();
            betas.back() = b.front();
        } catch (const DegeneratePolygon&) {
            // open trajectory revisiting a vertex; angle columns stay zero
        }
    }

    std::ostringstream csv;
    csv << "index,x,y,theta_tangency,alpha,beta\n";
    for (std::size_t i = 0; i < points.size(); ++i) {
        csv << i << "," << format_double(points[i].x()) << "," << format_double(points[i].y())
            << "," << format_double(thetas[i]) << "," << format_double(alphas[i]) << ","
            << format_double(betas[i]) << "\n";
    }
    csv << "# winding m=" << winding << "\n";
    csv << "# closure_residual=" << format_double(closure) << "\n";
    emit(csv.str(), args.csv_path);
    if (!args.csv_path.empty())
        std::cout << "wrote " << args.csv_path << " (closure_residual="
                  << format_double(closure) << ")\n";

    if (!args.svg_path.empty()) {
        SvgScene scene;
        scene.add_curve(curve);
        scene.add_orbit(std::vector<Vec2>(points.begin(), points.end() - 1));
        for (std::size_t i = 0; i + 1 < thetas.size(); ++i)
            scene.add_point(curve.evaluate(thetas[i]).position);
        scene.write(args.svg_path);
    }
    return 0;
}

// --- symplectic-orbit --------------------------------------------------------

struct SymplecticOrbitArgs {
    std::string curve_path, body_path, x_text, y_text, csv_path, svg_path;
    double t0 = 0.0, t1 = 0.0;
    int steps = 1;
};

int run_symplectic_orbit(const SymplecticOrbitArgs& args) {
    if (args.curve_path.empty() && args.body_path.empty())
        throw IoError("symplectic-orbit needs either --curve (planar) or --body (ellipsoid)");
    if (!args.body_path.empty()) {
        const Ellipsoid2n body = load_ellipsoid(args.body_path);
        Eigen::VectorXd x = parse_vector(args.x_text);
        Eigen::VectorXd y = parse_vector(args.y_text);
        if (x.size() != body.dimension() || y.size() != body.dimension())
            throw InvalidBody("start points must have the body dimension");
        std::vector<Eigen::VectorXd> visited{x, y};
        for (int i = 0; i < args.steps; ++i) {
            Eigen::VectorXd z = symplectic_map_2n(body, visited[visited.size() - 2],
                                                  visited.back());
            visited.push_back(std::move(z));
        }
        std::ostringstream csv;
        csv << "index";
        for (int d = 1; d <= body.dimension(); ++d) csv << ",x" << d;
        csv << "\n";
        for (std::size_t i = 0; i < visited.size(); ++i) {
            csv << i;
            for (int d = 0; d < body.dimension(); ++d)
                csv << "," << format_double(visited[i][d]);
            csv << "\n";
        }
        emit(csv.str(), args.csv_path);
        return 0;
    }

    const CurveModel curve = load_curve(args.curve_path);
    ChordState state{args.t0, args.t1};
    std::vector<double> params{args.t0, args.t1};
    for (int i = 0; i < args.steps; ++i) {
        state = symplectic_map(curve, state);
        params.push_back(state.t_cur);
    }
    std::ostringstream csv;
    csv << "index,t,x,y\n";
    for (std::size_t i = 0; i < params.size(); ++i) {
        const Vec2 p = curve.evaluate(params[i]).position;
        csv << i << "," << format_double(wrap_angle(params[i])) << "," << format_double(p.x())
            << "," << format_double(p.y()) << "\n";
    }
    emit(csv.str(), args.csv_path);
    if (!args.svg_path.empty()) {
        SvgScene scene;
        scene.add_curve(curve);
        std::vector<Vec2> pts;
        for (double t : params) pts.push_back(curve.evaluate(t).position);
        scene.add_orbit(pts, false);
        scene.write(args.svg_path);
    }
    return 0;
}

// --- find-periodic / through-tangency ---------------------------------------

struct SearchArgs {
    std::string curve_path, json_path, csv_prefix, svg_path;
    int n = 3, m = 1, grid = 32;
    double theta = 0.0;
    double tol = 0.0; // 0 keeps the operation's documented default
    bool symplectic = false;
};

std::string search_summary_json(int n, int m, const SearchReport& report) {
    std::ostringstream os;
    os << "{\"n\":" << n << ",\"m\":" << m << ",\"orbits_found\":" << report.orbits.size()
       << ",\"continuum\":" << (report.continuum ? "true" : "false") << "}\n";
    return os.str();
}

int run_find_periodic(const SearchArgs& args) {
    const CurveModel curve = load_curve(args.curve_path);
    if (args.symplectic) {
        const SymplecticSearchReport report =
            symplectic_find_orbits(curve, args.n, args.grid, seed_from_env());
        std::ostringstream os;
        os << "{\"n\":" << args.n << ",\"orbits_found\":" << report.orbits.size()
           << ",\"continuum\":" << (report.continuum ? "true" : "false") << "}\n";
        emit(os.str(), args.json_path);
        if (args.json_path.empty() == false) std::cout << os.str();
        for (std::size_t k = 0; k < report.orbits.size(); ++k) {
            if (args.csv_prefix.empty()) break;
            std::ostringstream csv;
            csv << "index,t,x,y\n";
            for (std::size_t i = 0; i < report.orbits[k].params.size(); ++i) {
                const Vec2 p = curve.evaluate(report.orbits[k].params[i]).position;
                csv << i << "," << format_double(report.orbits[k].params[i]) << ","
                    << format_double(p.x()) << "," << format_double(p.y()) << "\n";
            }
            write_text_file(args.csv_prefix + std::to_string(k) + ".csv", csv.str());
        }
        return 0;
    }

    const SearchReport report = find_orbits(curve, args.n, args.m, args.grid, seed_from_env(),
                                            args.tol > 0.0 ? args.tol : 1e-12);
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
    const std::string summary = search_summary_json(args.n, args.m, report);
    emit(summary, args.json_path);
    if (!args.json_path.empty()) std::cout << summary;
    for (std::size_t k = 0; k < report.orbits.size() && !args.csv_prefix.empty(); ++k)
        write_text_file(args.csv_prefix + std::to_string(k) + ".csv",
                        orbit_to_csv(report.orbits[k]));
    if (!args.svg_path.empty()) {
        SvgScene scene;
        scene.add_curve(curve);
        for (const auto& orbit : report.orbits) scene.add_orbit(orbit.vertices);
        scene.write(args.svg_path);
    }
    return 0;
}

int run_through_tangency(const SearchArgs& args) {
    const CurveModel curve = load_curve(args.curve_path);
    const SearchReport report =
        orbits_through_tangency(curve, args.theta, args.n, args.m, args.grid, seed_from_env(),
                                args.tol > 0.0 ? args.tol : 1e-10);
    std::ostringstream os;
    os << "{\"n\":" << args.n << ",\"m\":" << args.m << ",\"theta\":"
       << format_double(args.theta) << ",\"orbits_found\":" << report.orbits.size()
       << ",\"continuum\":false}\n";
    emit(os.str(), args.json_path);
    if (!args.json_path.empty()) std::cout << os.str();
    for (std::size_t k = 0; k < report.orbits.size() && !args.csv_prefix.empty(); ++k)
        write_text_file(args.csv_prefix + std::to_string(k) + ".csv",
                        orbit_to_csv(report.orbits[k]));
    return 0;
}

// --- monodromy ---------------------------------------------------------------

struct MonodromyArgs {
    std::string curve_path, start, json_path;
    int n = 3;
};

int run_monodromy(const MonodromyArgs& args) {
    const CurveModel curve = load_curve(args.curve_path);
    const Vec2 start = parse_vec2(args.start);
    const OuterOrbit orbit = trace_orbit(curve, start, args.n);
    const Mat2 analytic = monodromy_analytic(curve, orbit);
    const Mat2 numeric = monodromy_numeric(curve, start, args.n);
    const Mat2 frame = orbit_frame(curve, orbit);
    const Mat2 conjugated = frame * analytic * frame.transpose();
    std::ostringstream os;
    os << "{\"n\":" << args.n << ",\"closure_residual\":"
       << format_double(orbit.closure_residual) << ",\"winding\":" << orbit.winding
       << ",\"analytic\":" << matrix_json(analytic) << ",\"numeric\":" << matrix_json(numeric)
       << ",\"frame\":" << matrix_json(frame)
       << ",\"max_difference\":" << format_double((numeric - conjugated).cwiseAbs().maxCoeff())
       << ",\"det_analytic\":" << format_double(analytic.determinant())
       << ",\"det_numeric\":" << format_double(numeric.determinant())
       << ",\"trace\":" << format_double(analytic.trace()) << "}\n";
    emit(os.str(), args.json_path);
    if (!args.json_path.empty()) std::cout << os.str();
    return 0;
}

// --- certify / identity-family ----------------------------------------------

int run_certify(const std::string& word_path, const std::string& report_path) {
    const ShearRotationWord word = load_word(word_path);
    const IdentityCertificate cert = certify_not_identity(word);
    emit(certificate_report(cert), report_path);
    return 0;
}

int run_identity_family(int n, const std::string& out_path) {
    const ShearRotationWord word = identity_family(n);
    std::cout << "n=" << n << " alpha=" << format_double(word.letters().front().alpha)
              << " s=" << format_double(word.letters().front().shear)
              << " |product - Id|_max="
              << format_double(
                     (word_product(word) - Mat2::Identity()).cwiseAbs().maxCoeff())
              << "\n";
    if (!out_path.empty()) write_text_file(out_path, word_to_json(word));
    return 0;
}

// --- octagon ------------------------------------------------------------------

struct OctagonArgs {
    double radius = 1.0;
    double halfwidth_factor = 0.1;
    int offsets = 50;
    double min_offset = 1e-4, max_offset = 5e-2;
    std::string csv_path, svg_path, json_path;
};

int run_octagon(const OctagonArgs& args) {
    const OctagonTable table = build_table(args.radius, args.halfwidth_factor);
    const AuditReport audit = consistency_audit(table);
    for (const auto& v : audit.violations) std::cerr << "audit: " << v << "\n";

    std::ostringstream csv;
    csv << "line,offset,closure_residual,start_distance,symmetry_distance,symmetry_gap\n";
    double max_closure = 0.0, max_symmetry_gap = 0.0;
    const int half = std::max(1, args.offsets / 2);
    for (int line = 0; line < 2; ++line) {
        const CycleLine cl = line == 0 ? CycleLine::X1X8 : CycleLine::X1X2;
        for (int i = 0; i < args.offsets; ++i) {
            const int j = i % half;
            const double magnitude =
                args.min_offset *
                std::pow(args.max_offset / args.min_offset,
                         half > 1 ? static_cast<double>(j) / (half - 1) : 0.0) *
                args.radius;
            const double offset = (i < half) ? magnitude : -magnitude;
            const EightCycle cycle = eight_cycle(table, offset, cl);
            max_closure = std::max(max_closure, cycle.closure_residual);
            max_symmetry_gap = std::max(max_symmetry_gap, cycle.symmetry_gap);
            csv << (line == 0 ? "x1x8" : "x1x2") << "," << format_double(offset) << ","
                << format_double(cycle.closure_residual) << ","
                << format_double(cycle.start_distance) << ","
                << format_double(cycle.symmetry_distance) << ","
                << format_double(cycle.symmetry_gap) << "\n";
        }
    }
    emit(csv.str(), args.csv_path);

    auto vec_json = [](const Vec2& v) {
        return "[" + format_double(v.x()) + "," + format_double(v.y()) + "]";
    };
    std::ostringstream os;
    os << "{\"radius\":" << format_double(args.radius) << ",\"offsets\":" << 2 * args.offsets
       << ",\"max_closure_residual\":" << format_double(max_closure)
       << ",\"max_symmetry_gap\":" << format_double(max_symmetry_gap)
       << ",\"audit_passed\":" << (audit.passed ? "true" : "false") << ",\"table\":{";
    os << "\"vertices\":[";
    for (int i = 0; i < 8; ++i) os << (i ? "," : "") << vec_json(table.vertices[i]);
    os << "],\"midpoints\":[";
    for (int i = 0; i < 8; ++i) os << (i ? "," : "") << vec_json(table.midpoints[i]);
    os << "],\"arcs\":[";
    for (int i = 0; i < 8; ++i) {
        const HyperbolaArc& arc = table.arcs[i];
        os << (i ? "," : "") << "{\"origin\":" << vec_json(arc.origin)
           << ",\"u_dir\":" << vec_json(arc.u_dir) << ",\"v_dir\":" << vec_json(arc.v_dir)
           << ",\"c\":" << format_double(arc.c) << ",\"u_z\":" << format_double(arc.u_z)
           << ",\"halfwidth\":" << format_double(arc.halfwidth) << "}";
    }
    os << "]}}\n";
    if (!args.json_path.empty()) {
        write_text_file(args.json_path, os.str());
        std::cout << os.str();
    } else if (!args.csv_path.empty()) {
        std::cout << os.str();
    }

    if (!args.svg_path.empty()) {
        SvgScene scene;
        std::vector<Vec2> polygon(table.vertices.begin(), table.vertices.end());
        scene.add_orbit(polygon, true, "polygon");
        for (const auto& arc : table.arcs) {
            const auto [lo, hi] = arc.u_range();
            std::vector<Vec2> pts;
            for (int s = 0; s <= 64; ++s) pts.push_back(arc.point_at(lo + (hi - lo) * s / 64));
            scene.add_orbit(pts, false, "arc");
        }
        const double extent = args.max_offset * args.radius;
        const Vec2 x1 = table.vertices[0];
        const Vec2 d18 = table.arcs[0].u_dir;
        const Vec2 d12 = (table.vertices[1] - table.vertices[0]).normalized();
        scene.add_segment(x1 - extent * d18, x1 + extent * d18);
        scene.add_segment(x1 - extent * d12, x1 + extent * d12);
        for (const auto& z : table.midpoints) scene.add_point(z);
        scene.write(args.svg_path);
    }
    return 0;
}

// --- plot ----------------------------------------------------------------------

int run_plot(const std::string& curve_path, const std::string& csv_path,
             const std::string& out_path) {
    const CurveModel curve = load_curve(curve_path);
    const auto rows = parse_orbit_csv(read_text_file(csv_path));
    SvgScene scene;
    scene.add_curve(curve);
    std::vector<Vec2> pts;
    for (const auto& row : rows) pts.emplace_back(row.x, row.y);
    scene.add_orbit(pts);
    for (const auto& row : rows) scene.add_point(curve.evaluate(row.theta).position);
    scene.write(out_path);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Outer and symplectic billiard laboratory"};
    app.require_subcommand(1);

    OuterOrbitArgs outer_args;
    auto* outer = app.add_subcommand("outer-orbit", "Iterate the outer billiard map");
    outer->add_option("--curve", outer_args.curve_path, "curve spec JSON")->required();
    outer->add_option("--start", outer_args.start, "starting point \"x,y\"")->required();
    outer->add_option("--steps", outer_args.steps, "number of map applications")->required();
    outer->add_option("--csv", outer_args.csv_path, "orbit CSV output path");
    outer->add_option("--svg", outer_args.svg_path, "SVG plot output path");

    SymplecticOrbitArgs sympl_args;
    auto* sympl = app.add_subcommand("symplectic-orbit", "Iterate the symplectic billiard map");
    sympl->add_option("--curve", sympl_args.curve_path, "planar curve spec JSON");
    sympl->add_option("--body", sympl_args.body_path, "ellipsoid spec JSON");
    sympl->add_option("--t0", sympl_args.t0, "first boundary parameter (planar)");
    sympl->add_option("--t1", sympl_args.t1, "second boundary parameter (planar)");
    sympl->add_option("--x", sympl_args.x_text, "first boundary point (ellipsoid)");
    sympl->add_option("--y", sympl_args.y_text, "second boundary point (ellipsoid)");
    sympl->add_option("--steps", sympl_args.steps, "number of map applications")->required();
    sympl->add_option("--csv", sympl_args.csv_path, "orbit CSV output path");
    sympl->add_option("--svg", sympl_args.svg_path, "SVG plot output path (planar)");

    SearchArgs find_args;
    auto* find = app.add_subcommand("find-periodic", "Multistart periodic orbit search");
    find->add_option("--curve", find_args.curve_path, "curve spec JSON")->required();
    find->add_option("--n", find_args.n, "period")->required();
    find->add_option("--m", find_args.m, "winding number (outer billiard)");
    find->add_option("--grid", find_args.grid, "number of multistart seeds");
    find->add_option("--tol", find_args.tol, "residual acceptance tolerance override")
        ->check(CLI::Range(1e-14, 1.0));
    find->add_flag("--symplectic", find_args.symplectic, "search symplectic orbits instead");
    find->add_option("--json", find_args.json_path, "summary JSON output path");
    find->add_option("--csv-prefix", find_args.csv_prefix, "write orbit k to <prefix>k.csv");
    find->add_option("--svg", find_args.svg_path, "SVG plot output path");

    SearchArgs through_args;
    auto* through = app.add_subcommand("through-tangency",
                                       "Count periodic trajectories through a tangency point");
    through->add_option("--curve", through_args.curve_path, "curve spec JSON")->required();
    through->add_option("--theta", through_args.theta, "tangency normal angle")->required();
    through->add_option("--n", through_args.n, "period")->required();
    through->add_option("--m", through_args.m, "winding number");
    through->add_option("--grid", through_args.grid, "number of multistart seeds");
    through->add_option("--tol", through_args.tol, "residual acceptance tolerance override")
        ->check(CLI::Range(1e-14, 1.0));
    through->add_option("--json", through_args.json_path, "summary JSON output path");
    through->add_option("--csv-prefix", through_args.csv_prefix, "orbit CSV prefix");

    MonodromyArgs mono_args;
    auto* mono = app.add_subcommand("monodromy", "Analytic vs numeric monodromy of an orbit");
    mono->add_option("--curve", mono_args.curve_path, "curve spec JSON")->required();
    mono->add_option("--start", mono_args.start, "periodic point \"x,y\"")->required();
    mono->add_option("--n", mono_args.n, "period")->required();
    mono->add_option("--json", mono_args.json_path, "JSON output path");

    std::string word_path, report_path;
    auto* certify = app.add_subcommand("certify", "Quasi-direction non-identity certificate");
    certify->add_option("--word", word_path, "shear-rotation word JSON")->required();
    certify->add_option("--report", report_path, "report output path");

    int family_n = 8;
    std::string family_out;
    auto* family = app.add_subcommand("identity-family",
                                      "The constant word whose product is the identity");
    family->add_option("--n", family_n, "period (n >= 5)")->required();
    family->add_option("--out", family_out, "word JSON output path");

    OctagonArgs oct_args;
    auto* oct = app.add_subcommand("octagon", "Octagon/hyperbola table and 8-cycle sweep");
    oct->add_option("--radius", oct_args.radius, "circumradius");
    oct->add_option("--halfwidth-factor", oct_args.halfwidth_factor,
                    "arc window half-width as a fraction of the radius");
    oct->add_option("--offsets", oct_args.offsets, "offsets per boundary line");
    oct->add_option("--min-offset", oct_args.min_offset, "smallest |offset| / radius");
    oct->add_option("--max-offset", oct_args.max_offset, "largest |offset| / radius");
    oct->add_option("--csv", oct_args.csv_path, "sweep CSV output path");
    oct->add_option("--svg", oct_args.svg_path, "SVG output path");
    oct->add_option("--json", oct_args.json_path, "summary JSON output path");

    std::string plot_curve, plot_csv, plot_out;
    auto* plot = app.add_subcommand("plot", "Render a curve and an orbit CSV as SVG");
    plot->add_option("--curve", plot_curve, "curve spec JSON")->required();
    plot->add_option("--orbit-csv", plot_csv, "orbit CSV path")->required();
    plot->add_option("--out", plot_out, "SVG output path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (outer->parsed()) return run_outer_orbit(outer_args);
        if (sympl->parsed()) return run_symplectic_orbit(sympl_args);
        if (find->parsed()) return run_find_periodic(find_args);
        if (through->parsed()) return run_through_tangency(through_args);
        if (mono->parsed()) return run_monodromy(mono_args);
        if (certify->parsed()) return run_certify(word_path, report_path);
        if (family->parsed()) return run_identity_family(family_n, family_out);
        if (oct->parsed()) return run_octagon(oct_args);
        if (plot->parsed()) return run_plot(plot_curve, plot_csv, plot_out);
    } catch (const billiards::Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
