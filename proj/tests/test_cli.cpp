// End-to-end checks of the command-line tool: exit codes, file outputs,
// determinism, and the CSV -> SVG round trip. The binary path arrives via
// the BILLIARD_LAB_BIN environment variable.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "billiards/io.hpp"

namespace fs = std::filesystem;
using namespace billiards;

namespace {

int g_failures = 0;

void check(bool ok, const std::string& label) {
    std::printf("%s  %s\n", ok ? "ok  " : "FAIL", label.c_str());
    if (!ok) ++g_failures;
}

std::string g_bin;
fs::path g_dir;

int run(const std::string& args, const std::string& stdout_path = "") {
    std::string cmd = g_bin + " " + args;
    if (!stdout_path.empty()) cmd += " > " + stdout_path;
    cmd += " 2> " + (g_dir / "stderr.txt").string();
    return std::system(cmd.c_str());
}

int exit_code(int system_status) {
#ifdef WEXITSTATUS
    return WEXITSTATUS(system_status);
#else
    return system_status;
#endif
}

std::string slurp(const fs::path& p) { return read_text_file(p.string()); }

} // namespace

int main() {
    const char* bin = std::getenv("BILLIARD_LAB_BIN");
    if (!bin || !*bin) {
        std::fprintf(stderr, "BILLIARD_LAB_BIN is not set\n");
        return 1;
    }
    g_bin = bin;
    g_dir = fs::temp_directory_path() / "billiard_cli_test";
    fs::create_directories(g_dir);

    const fs::path circle = g_dir / "circle.json";
    write_text_file(circle.string(), "{\"type\":\"circle\",\"radius\":1.0}\n");
    const fs::path ellipse = g_dir / "ellipse.json";
    write_text_file(ellipse.string(), "{\"type\":\"ellipse\",\"a\":2.0,\"b\":1.0}\n");

    // ---- outer-orbit: the (3,1) triangle closes in the CSV -----------------
    {
        const fs::path csv = g_dir / "orbit.csv";
        const int rc = run("outer-orbit --curve " + circle.string() +
                           " --start 2,0 --steps 3 --csv " + csv.string());
        check(exit_code(rc) == 0, "outer-orbit exits 0");
        const auto rows = parse_orbit_csv(slurp(csv));
        check(rows.size() == 4, "outer-orbit CSV has steps+1 rows");
        const double dx = rows.back().x - rows.front().x;
        const double dy = rows.back().y - rows.front().y;
        check(std::sqrt(dx * dx + dy * dy) < 1e-9,
              "outer-orbit last row returns to the first (3-periodic closure)");
        check(slurp(csv).find("# winding m=1") != std::string::npos,
              "outer-orbit CSV carries the winding footer");
    }

    // ---- determinism: identical runs produce byte-identical outputs --------
    {
        const fs::path a = g_dir / "a.csv", b = g_dir / "b.csv";
        run("outer-orbit --curve " + ellipse.string() + " --start 3,0.5 --steps 7 --csv " +
            a.string());
        run("outer-orbit --curve " + ellipse.string() + " --start 3,0.5 --steps 7 --csv " +
            b.string());
        check(slurp(a) == slurp(b), "orbit CSV output is deterministic");

        const fs::path sa = g_dir / "a.svg", sb = g_dir / "b.svg";
        run("outer-orbit --curve " + ellipse.string() + " --start 3,0.5 --steps 7 --svg " +
            sa.string());
        run("outer-orbit --curve " + ellipse.string() + " --start 3,0.5 --steps 7 --svg " +
            sb.string());
        check(slurp(sa) == slurp(sb), "SVG output is deterministic");
    }

    // ---- plot: CSV coordinates reappear verbatim in the SVG ----------------
    {
        const fs::path csv = g_dir / "orbit.csv";
        const fs::path svg = g_dir / "plot.svg";
        const int rc = run("plot --curve " + circle.string() + " --orbit-csv " + csv.string() +
                           " --out " + svg.string());
        check(exit_code(rc) == 0, "plot exits 0");
        const std::string text = slurp(svg);
        const auto rows = parse_orbit_csv(slurp(csv));
        bool all_found = true;
        for (const auto& row : rows) {
            const std::string needle = format_double(row.x) + " " + format_double(-row.y);
            if (text.find(needle) == std::string::npos) all_found = false;
        }
        check(all_found, "plot reproduces the CSV polyline coordinates to full precision");
    }

    // ---- certify: the n = 8 identity word is inconclusive ------------------
    {
        const fs::path word = g_dir / "w8.json";
        int rc = run("identity-family --n 8 --out " + word.string(),
                     (g_dir / "fam.txt").string());
        check(exit_code(rc) == 0, "identity-family exits 0");
        rc = run("certify --word " + word.string(), (g_dir / "cert.txt").string());
        check(exit_code(rc) == 0, "certify exits 0");
        const std::string report = slurp(g_dir / "cert.txt");
        check(report.find("verdict: inconclusive") != std::string::npos,
              "identity-family word is inconclusive");
        check(report.find("product_distance_from_identity") != std::string::npos,
              "certificate reports the product cross-check");
    }

    // ---- identity-family n = 4 fails with the named error ------------------
    {
        const int rc = run("identity-family --n 4");
        check(exit_code(rc) == 1, "identity-family --n 4 exits 1");
        check(slurp(g_dir / "stderr.txt").find("InvalidPeriod") != std::string::npos,
              "InvalidPeriod appears on the diagnostic stream");
    }

    // ---- domain errors exit 1 with the error name ---------------------------
    {
        const int rc = run("outer-orbit --curve " + circle.string() + " --start 0.2,0 --steps 1");
        check(exit_code(rc) == 1, "interior starting point exits 1");
        check(slurp(g_dir / "stderr.txt").find("PointInsideBody") != std::string::npos,
              "PointInsideBody appears on the diagnostic stream");
    }

    // ---- usage errors exit 2 -------------------------------------------------
    {
        int rc = run("outer-orbit --start 2,0");
        check(exit_code(rc) == 2, "missing required flag exits 2");
        rc = run("no-such-subcommand");
        check(exit_code(rc) == 2, "unknown subcommand exits 2");
    }

    // ---- through-tangency emits the summary JSON -----------------------------
    {
        const int rc = run("through-tangency --curve " + ellipse.string() +
                           " --theta 0.3 --n 3 --m 1 --grid 32",
                           (g_dir / "tt.json").string());
        check(exit_code(rc) == 0, "through-tangency exits 0");
        const std::string json = slurp(g_dir / "tt.json");
        check(json.find("\"orbits_found\":1") != std::string::npos,
              "exactly one trajectory through the sampled tangency point");
    }

    // ---- find-periodic summary and orbit CSVs --------------------------------
    {
        const int rc = run("find-periodic --curve " + ellipse.string() +
                           " --n 3 --m 1 --grid 16 --csv-prefix " +
                           (g_dir / "orbit_").string(),
                           (g_dir / "fp.json").string());
        check(exit_code(rc) == 0, "find-periodic exits 0");
        const std::string json = slurp(g_dir / "fp.json");
        check(json.find("\"n\":3") != std::string::npos &&
                  json.find("\"continuum\":true") != std::string::npos,
              "find-periodic reports the ellipse (3,1) family as a continuum");
        check(fs::exists(g_dir / "orbit_0.csv"), "find-periodic writes the orbit CSV");
    }

    // ---- symplectic-orbit: the square is 4-periodic ---------------------------
    {
        const fs::path csv = g_dir / "sympl.csv";
        const int rc = run("symplectic-orbit --curve " + circle.string() +
                           " --t0 0 --t1 1.5707963267948966 --steps 4 --csv " + csv.string());
        check(exit_code(rc) == 0, "symplectic-orbit exits 0");
        std::istringstream in(slurp(csv));
        std::string line;
        std::vector<std::string> lines;
        while (std::getline(in, line)) lines.push_back(line);
        check(lines.size() == 7, "symplectic CSV has steps+2 rows plus header");
        auto t_of = [&](int row) {
            const std::string& l = lines[1 + row];
            const auto comma = l.find(',');
            return std::strtod(l.c_str() + comma + 1, nullptr);
        };
        const double wrapped = std::remainder(t_of(4) - t_of(0), 2.0 * 3.14159265358979323846);
        check(std::abs(wrapped) < 1e-12, "fourth iterate returns to the starting parameter");
    }

    // ---- monodromy of the circle (3,1) orbit ----------------------------------
    {
        const int rc = run("monodromy --curve " + circle.string() + " --start 2,0 --n 3",
                           (g_dir / "mono.json").string());
        check(exit_code(rc) == 0, "monodromy exits 0");
        const std::string json = slurp(g_dir / "mono.json");
        check(json.find("\"analytic\":") != std::string::npos &&
                  json.find("\"numeric\":") != std::string::npos,
              "monodromy reports both matrices");
        check(json.find("\"winding\":1") != std::string::npos, "monodromy reports the winding");
    }

    // ---- symplectic periodic search --------------------------------------------
    {
        const int rc = run("find-periodic --curve " + circle.string() +
                           " --n 3 --grid 8 --symplectic",
                           (g_dir / "sfp.json").string());
        check(exit_code(rc) == 0, "symplectic find-periodic exits 0");
        check(slurp(g_dir / "sfp.json").find("\"continuum\":true") != std::string::npos,
              "circle symplectic triangles form a continuum");
    }

    // ---- octagon summary ------------------------------------------------------
    {
        const fs::path svg = g_dir / "oct.svg";
        const int rc = run("octagon --offsets 10 --svg " + svg.string() + " --json " +
                           (g_dir / "oct.json").string());
        check(exit_code(rc) == 0, "octagon exits 0");
        const std::string json = slurp(g_dir / "oct.json");
        check(json.find("\"audit_passed\":true") != std::string::npos, "octagon audit passes");
        const std::string svg_text = slurp(svg);
        std::size_t arcs = 0, segments = 0, pos = 0;
        while ((pos = svg_text.find("class=\"arc\"", pos)) != std::string::npos) {
            ++arcs;
            pos += 1;
        }
        pos = 0;
        while ((pos = svg_text.find("class=\"segment\"", pos)) != std::string::npos) {
            ++segments;
            pos += 1;
        }
        check(arcs == 8 && segments == 2,
              "octagon SVG shows eight arcs and the two highlighted segments");
    }

    // ---- ellipsoid orbit -------------------------------------------------------
    {
        const fs::path body = g_dir / "body.json";
        write_text_file(body.string(),
                        "{\"type\":\"ellipsoid\",\"Q\":[[1,0,0,0],[0,1,0,0],[0,0,1,0],"
                        "[0,0,0,1]]}\n");
        const fs::path csv = g_dir / "body.csv";
        const int rc = run("symplectic-orbit --body " + body.string() +
                           " --x 1,0,0,0 --y 0,0,1,0 --steps 3 --csv " + csv.string());
        check(exit_code(rc) == 0, "ellipsoid symplectic-orbit exits 0");
        const std::string text = exit_code(rc) == 0 ? slurp(csv) : "";
        check(text.find("index,x1,x2,x3,x4") == 0, "ellipsoid CSV header lists coordinates");

        // tangential characteristic chords are a domain error
        const int rc_tangent = run("symplectic-orbit --body " + body.string() +
                                   " --x 1,0,0,0 --y 0,1,0,0 --steps 1 --csv " + csv.string());
        check(exit_code(rc_tangent) == 1, "tangential chord exits 1");
        check(slurp(g_dir / "stderr.txt").find("TangentialChord") != std::string::npos,
              "TangentialChord appears on the diagnostic stream");
    }

    std::printf("%s\n", g_failures == 0 ? "all CLI checks passed" : "CLI checks FAILED");
    return g_failures == 0 ? 0 : 1;
}
