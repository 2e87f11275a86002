#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "sbiga/builtin.hpp"
#include "sbiga/geometry_io.hpp"

namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
    const fs::path dir = fs::temp_directory_path() / "sbiga_cli_tests";
    fs::create_directories(dir);
    return dir;
}

int run(const std::string& args, const fs::path& log) {
    const std::string cmd = std::string(SBIGA_CLI_PATH) + " " + args + " > " + log.string() +
                            " 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::vector<std::string> lines_of(const fs::path& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) {
            lines.push_back(line);
        }
    }
    return lines;
}

}  // namespace

TEST_CASE("parametrize writes a valid map and reports regularity") {
    const fs::path dir = work_dir();
    const fs::path map_path = dir / "square.sbgeo";
    const fs::path log = dir / "parametrize.log";

    const int code = run("parametrize --boundary square --center 0.5 0.5 --output " +
                             map_path.string(),
                         log);
    CHECK(code == 0);
    const std::string output = slurp(log);
    CHECK(output.find("min_J") != std::string::npos);
    CHECK(output.find("injective_sampling_ok true") != std::string::npos);

    const sbiga::GeometryMap loaded = sbiga::io::read_map(map_path);
    const sbiga::GeometryMap reference = sbiga::builtin::center_scaled_square();
    CHECK((loaded.net_x() - reference.net_x()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded.net_y() - reference.net_y()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("parametrize flags a center outside the kernel") {
    const fs::path dir = work_dir();
    const fs::path log = dir / "parametrize_bad.log";
    const int code = run("parametrize --boundary square --center 2 2 --output " +
                             (dir / "bad.sbgeo").string(),
                         log);
    CHECK(code == 3);
    CHECK(slurp(log).find("sign_changes") != std::string::npos);
}

TEST_CASE("solve emits a field CSV and summary") {
    const fs::path dir = work_dir();
    const fs::path csv = dir / "solve.csv";
    const fs::path log = dir / "solve.log";
    const int code = run("solve --geometry rectangular --problem zero --grid 3 --output " +
                             csv.string(),
                         log);
    CHECK(code == 0);
    const auto rows = lines_of(csv);
    REQUIRE(rows.size() == 10);  // header + 9 samples
    CHECK(rows[0] == "x,y,u_h,u_exact,abs_error");
    CHECK(slurp(log).find("l2_error 0") != std::string::npos);
}

TEST_CASE("solve distinguishes schema failures") {
    const fs::path dir = work_dir();
    const fs::path log = dir / "missing.log";
    CHECK(run("solve --geometry " + (dir / "does_not_exist.sbgeo").string(), log) == 2);

    const fs::path curve_doc = dir / "curve_only.sbgeo";
    sbiga::io::write_curve(curve_doc, sbiga::builtin::square_boundary());
    CHECK(run("solve --geometry " + curve_doc.string(), log) == 2);
}

TEST_CASE("convergence emits the study table") {
    const fs::path dir = work_dir();
    const fs::path csv = dir / "conv.csv";
    const fs::path log = dir / "conv.log";
    const int code = run("convergence --geometry rectangular --problem square-cos --levels 2 "
                         "--output " +
                             csv.string(),
                         log);
    CHECK(code == 0);
    const auto rows = lines_of(csv);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "level,dofs,l2_error,rate");
    CHECK(rows[1].rfind("0,", 0) == 0);
    CHECK(rows[2].rfind("1,", 0) == 0);
}

TEST_CASE("deterministic reruns") {
    const fs::path dir = work_dir();
    const fs::path a = dir / "run_a.csv";
    const fs::path b = dir / "run_b.csv";
    const fs::path log = dir / "rerun.log";
    CHECK(run("convergence --geometry center-scaled --levels 2 --output " + a.string(), log) ==
          0);
    CHECK(run("convergence --geometry center-scaled --levels 2 --output " + b.string(), log) ==
          0);
    CHECK(slurp(a) == slurp(b));
}

TEST_CASE("radial pipeline writes spectrum and samples") {
    const fs::path dir = work_dir();
    const fs::path log = dir / "radial.log";
    const std::string prefix = (dir / "disk").string();
    const int code = run("radial --geometry disk --data constant --value 1 --grid 5 --output " +
                             prefix,
                         log);
    CHECK(code == 0);

    const auto spectrum = lines_of(prefix + "_spectrum.csv");
    REQUIRE(spectrum.size() > 1);
    CHECK(spectrum[0] == "re_lambda,im_lambda,stable");

    const auto field = lines_of(prefix + "_radial.csv");
    REQUIRE(field.size() == 26);  // header + 5 x 5 grid
    CHECK(field[0] == "xi,eta,x,y,u_modal");
    CHECK(slurp(log).find("l2_modal_vs_2d") != std::string::npos);
}
