#ifndef BILLIARDS_IO_HPP
#define BILLIARDS_IO_HPP

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "billiards/certificates.hpp"
#include "billiards/curve.hpp"
#include "billiards/errors.hpp"
#include "billiards/geometry.hpp"
#include "billiards/outer_billiard.hpp"
#include "billiards/symplectic_billiard.hpp"

namespace billiards {

// All numeric output uses 17 significant digits so that serialized doubles
// round-trip exactly.
inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path + " for reading");
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << content;
    if (!out) throw IoError("failed writing " + path);
}

// ---------------------------------------------------------------------------
// Spec files (JSON)

inline CurveModel curve_from_json(const nlohmann::json& j) {
    if (!j.contains("type")) throw InvalidCurve("curve spec is missing \"type\"");
    const std::string type = j.at("type").get<std::string>();
    Vec2 center = Vec2::Zero();
    if (j.contains("center")) {
        const auto& c = j.at("center");
        center = Vec2(c.at(0).get<double>(), c.at(1).get<double>());
    }
    if (type == "circle") return CurveModel::circle(j.at("radius").get<double>(), center);
    if (type == "ellipse")
        return CurveModel::ellipse(j.at("a").get<double>(), j.at("b").get<double>(), center);
    if (type == "support_fourier") {
        std::vector<FourierTerm> terms;
        if (j.contains("terms")) {
            for (const auto& t : j.at("terms"))
                terms.push_back({t.at(0).get<int>(), t.at(1).get<double>(),
                                 t.at(2).get<double>()});
        }
        return CurveModel::support_fourier(j.at("a0").get<double>(), std::move(terms), center);
    }
    throw InvalidCurve("unknown curve type \"" + type + "\"");
}

inline CurveModel load_curve(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("cannot parse curve spec " + path + ": " + e.what());
    }
    return curve_from_json(j);
}

inline Ellipsoid2n load_ellipsoid(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("cannot parse body spec " + path + ": " + e.what());
    }
    if (j.value("type", "") != "ellipsoid")
        throw InvalidBody("body spec must have type \"ellipsoid\"");
    const auto& rows = j.at("Q");
    const int dim = static_cast<int>(rows.size());
    Eigen::MatrixXd q(dim, dim);
    for (int r = 0; r < dim; ++r) {
        if (static_cast<int>(rows.at(r).size()) != dim)
            throw InvalidBody("Q must be square");
        for (int c = 0; c < dim; ++c) q(r, c) = rows.at(r).at(c).get<double>();
    }
    return Ellipsoid2n(q);
}

inline ShearRotationWord load_word(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw IoError("cannot parse word file " + path + ": " + e.what());
    }
    std::vector<ShearRotationLetter> letters;
    for (const auto& l : j.at("letters"))
        letters.push_back({l.at(0).get<double>(), l.at(1).get<double>()});
    return ShearRotationWord(std::move(letters));
}

inline std::string word_to_json(const ShearRotationWord& word) {
    std::ostringstream os;
    os << "{\"letters\":[";
    for (std::size_t i = 0; i < word.letters().size(); ++i) {
        if (i) os << ",";
        os << "[" << format_double(word.letters()[i].alpha) << ","
           << format_double(word.letters()[i].shear) << "]";
    }
    os << "]}\n";
    return os.str();
}

// ---------------------------------------------------------------------------
// Orbit CSV

struct OrbitCsvRow {
    int index = 0;
    double x = 0.0, y = 0.0;
    double theta = 0.0;
    double alpha = 0.0, beta = 0.0;
};

inline std::string orbit_to_csv(const OuterOrbit& orbit) {
    std::ostringstream os;
    os << "index,x,y,theta_tangency,alpha,beta\n";
    for (int i = 0; i < orbit.period(); ++i) {
        os << i << "," << format_double(orbit.vertices[i].x()) << ","
           << format_double(orbit.vertices[i].y()) << ","
           << format_double(orbit.thetas[i]) << "," << format_double(orbit.alphas[i]) << ","
           << format_double(orbit.betas[i]) << "\n";
    }
    os << "# winding m=" << orbit.winding << "\n";
    os << "# closure_residual=" << format_double(orbit.closure_residual) << "\n";
    return os.str();
}

inline std::vector<OrbitCsvRow> parse_orbit_csv(const std::string& text) {
    std::vector<OrbitCsvRow> rows;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        OrbitCsvRow row;
        const char* p = line.c_str();
        char* end = nullptr;
        row.index = static_cast<int>(std::strtol(p, &end, 10));
        auto next = [&]() {
            if (*end != ',') throw IoError("malformed orbit CSV row: " + line);
            p = end + 1;
            return std::strtod(p, &end);
        };
        row.x = next();
        row.y = next();
        row.theta = next();
        row.alpha = next();
        row.beta = next();
        rows.push_back(row);
    }
    if (rows.empty()) throw IoError("orbit CSV contains no data rows");
    return rows;
}

// ---------------------------------------------------------------------------
// SVG scenes

// Minimal deterministic SVG emitter: fixed canvas, fixed styles, numbers at
// 17 significant digits. Identical scenes serialize byte-identically.
class SvgScene {
public:
    void add_curve(const CurveModel& curve, int samples = 1024) {
        Polyline poly;
        poly.closed = true;
        poly.css_class = "curve";
        poly.points.reserve(samples);
        for (int i = 0; i < samples; ++i)
            poly.points.push_back(curve.evaluate(kTwoPi * i / samples).position);
        add_polyline(std::move(poly));
    }

    static void require_finite(const Vec2& p) {
        if (!(std::isfinite(p.x()) && std::isfinite(p.y())))
            throw IoError("scene coordinates must be finite");
    }

    void add_orbit(const std::vector<Vec2>& vertices, bool closed = true,
                   std::string css_class = "orbit") {
        Polyline poly;
        poly.closed = closed;
        poly.css_class = std::move(css_class);
        poly.points = vertices;
        add_polyline(std::move(poly));
    }

    void add_segment(const Vec2& a, const Vec2& b, std::string css_class = "segment") {
        Polyline poly;
        poly.closed = false;
        poly.css_class = std::move(css_class);
        poly.points = {a, b};
        add_polyline(std::move(poly));
    }

    void add_point(const Vec2& p, std::string css_class = "point") {
        require_finite(p);
        points_.push_back({p, std::move(css_class)});
    }

    std::string to_string() const {
        // Bounding box over everything, with a 5% margin; y is flipped into
        // the SVG down-is-positive convention.
        double min_x = -1.0, max_x = 1.0, min_y = -1.0, max_y = 1.0;
        bool first = true;
        auto absorb = [&](const Vec2& p) {
            if (first) {
                min_x = max_x = p.x();
                min_y = max_y = p.y();
                first = false;
            } else {
                min_x = std::min(min_x, p.x());
                max_x = std::max(max_x, p.x());
                min_y = std::min(min_y, p.y());
                max_y = std::max(max_y, p.y());
            }
        };
        for (const auto& poly : polylines_)
            for (const auto& p : poly.points) absorb(p);
        for (const auto& pt : points_) absorb(pt.position);

        const double span = std::max(max_x - min_x, max_y - min_y);
        const double margin = 0.05 * (span > 0.0 ? span : 1.0);
        min_x -= margin;
        max_x += margin;
        min_y -= margin;
        max_y += margin;
        const double width = max_x - min_x, height = max_y - min_y;
        const double stroke = 0.004 * std::max(width, height);

        std::ostringstream os;
        os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\""
           << format_double(800.0 * height / width) << "\" viewBox=\""
           << format_double(min_x) << " " << format_double(-max_y) << " "
           << format_double(width) << " " << format_double(height) << "\">\n";
        os << "<style>\n"
           << ".curve{fill:none;stroke:#1a1a1a;stroke-width:" << format_double(stroke) << "}\n"
           << ".orbit{fill:none;stroke:#c0392b;stroke-width:" << format_double(stroke) << "}\n"
           << ".arc{fill:none;stroke:#2c3e50;stroke-width:" << format_double(1.5 * stroke)
           << "}\n"
           << ".segment{fill:none;stroke:#e67e22;stroke-width:" << format_double(2.5 * stroke)
           << "}\n"
           << ".polygon{fill:none;stroke:#95a5a6;stroke-width:" << format_double(0.75 * stroke)
           << ";stroke-dasharray:" << format_double(4.0 * stroke) << "}\n"
           << ".point{fill:#2980b9;stroke:none}\n"
           << "</style>\n";
        for (const auto& poly : polylines_) {
            os << "<path class=\"" << poly.css_class << "\" d=\"";
            for (std::size_t i = 0; i < poly.points.size(); ++i) {
                os << (i == 0 ? "M" : " L") << format_double(poly.points[i].x()) << " "
                   << format_double(-poly.points[i].y());
            }
            if (poly.closed) os << " Z";
            os << "\"/>\n";
        }
        for (const auto& pt : points_) {
            os << "<circle class=\"" << pt.css_class << "\" cx=\""
               << format_double(pt.position.x()) << "\" cy=\"" << format_double(-pt.position.y())
               << "\" r=\"" << format_double(1.5 * stroke) << "\"/>\n";
        }
        os << "</svg>\n";
        return os.str();
    }

    void write(const std::string& path) const { write_text_file(path, to_string()); }

private:
    struct Polyline {
        std::vector<Vec2> points;
        bool closed = false;
        std::string css_class;
    };
    struct Point {
        Vec2 position;
        std::string css_class;
    };

    void add_polyline(Polyline poly) {
        for (const auto& p : poly.points) require_finite(p);
        polylines_.push_back(std::move(poly));
    }

    std::vector<Polyline> polylines_;
    std::vector<Point> points_;
};

// ---------------------------------------------------------------------------
// Certificate report

inline std::string certificate_report(const IdentityCertificate& cert) {
    std::ostringstream os;
    os << "verdict: " << to_string(cert.verdict) << "\n";
    os << "alpha_sum: " << format_double(cert.alpha_sum) << " ("
       << format_double(cert.alpha_sum / kPi) << " pi, "
       << (cert.alpha_sum <= kTwoPi ? "<= 2 pi: certificate applies"
                                    : "> 2 pi: outside the certificate's reach")
       << ")\n";
    os << "product_distance_from_identity: " << format_double(cert.product_distance) << "\n";
    os << "total_rotation: " << format_double(cert.trace.total_rotation) << "\n";
    os << "stage trace (quasi-directions 0=+x 1=upper 2=-x 3=lower):\n";
    for (const auto& s : cert.trace.steps) {
        os << "  " << (s.stage == QuasiDirectionStep::Stage::Shear ? "shear   " : "rotation")
           << " " << s.index << "  q=" << s.quasi << "  angle=" << format_double(s.lifted_angle)
           << "\n";
    }
    return os.str();
}

} // namespace billiards

#endif
