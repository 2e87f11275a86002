#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "sbiga/builtin.hpp"
#include "sbiga/errors.hpp"
#include "sbiga/geometry_io.hpp"

using namespace sbiga;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "sbiga_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

}  // namespace

TEST_CASE("map round trip is bit exact") {
    for (const char* tag : {"center-scaled", "disk", "bent-disk", "rectangular"}) {
        const GeometryMap original = builtin::map_by_tag(tag);
        const fs::path path = temp_file(std::string("roundtrip_") + tag + ".sbgeo");
        io::write_map(path, original, tag);
        const GeometryMap loaded = io::read_map(path);

        CHECK(loaded.radial_kv() == original.radial_kv());
        CHECK(loaded.circ_kv() == original.circ_kv());
        CHECK(loaded.net_x() == original.net_x());
        CHECK(loaded.net_y() == original.net_y());
        CHECK(loaded.rational() == original.rational());
        if (original.rational()) {
            CHECK(loaded.weights() == original.weights());
        }
        REQUIRE(loaded.scaling_center().has_value() == original.scaling_center().has_value());
        if (original.scaling_center()) {
            CHECK(loaded.scaling_center()->x() == original.scaling_center()->x());
            CHECK(loaded.scaling_center()->y() == original.scaling_center()->y());
        }
        CHECK(loaded.structure().is_scaled_boundary == original.structure().is_scaled_boundary);
        CHECK(loaded.structure().has_straight_rays == original.structure().has_straight_rays);
    }
}

TEST_CASE("curve round trip is bit exact") {
    const CurveGeometry original = builtin::circle_boundary();
    const fs::path path = temp_file("roundtrip_circle.sbgeo");
    io::write_curve(path, original, "circle");
    CHECK(io::peek_type(path) == io::DocumentType::Curve);
    const CurveGeometry loaded = io::read_curve(path);
    CHECK(loaded.knot_vector() == original.knot_vector());
    CHECK(loaded.closed() == original.closed());
    REQUIRE(loaded.num_points() == original.num_points());
    for (int j = 0; j < loaded.num_points(); ++j) {
        CHECK(loaded.control_points()[j].x() == original.control_points()[j].x());
        CHECK(loaded.control_points()[j].y() == original.control_points()[j].y());
        CHECK(loaded.weights()[j] == original.weights()[j]);
    }
}

TEST_CASE("schema errors carry line numbers") {
    SUBCASE("bad number") {
        const fs::path path = temp_file("bad_number.sbgeo");
        write_text(path, "sbgeo 1\ntype curve\ndegree 1\nknots 0 0 oops 1\n"
                         "control_points 2\n0 0\n1 1\n");
        try {
            io::read_curve(path);
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(e.line() == 4);
            CHECK(std::string(e.what()).find("line 4") != std::string::npos);
        }
    }

    SUBCASE("missing field") {
        const fs::path path = temp_file("missing_field.sbgeo");
        write_text(path, "sbgeo 1\ntype curve\nknots 0 0 1 1\ncontrol_points 2\n0 0\n1 1\n");
        CHECK_THROWS_AS(io::read_curve(path), SchemaError);
    }

    SUBCASE("wrong point count") {
        const fs::path path = temp_file("wrong_count.sbgeo");
        write_text(path, "sbgeo 1\ntype curve\ndegree 1\nknots 0 0 1 1\ncontrol_points 3\n"
                         "0 0\n1 1\n");
        CHECK_THROWS_AS(io::read_curve(path), SchemaError);
    }

    SUBCASE("grid mismatch against the knot vectors") {
        const fs::path path = temp_file("grid_mismatch.sbgeo");
        write_text(path,
                   "sbgeo 1\ntype map\ndegree_radial 1\ndegree_circumferential 1\n"
                   "knots_radial 0 0 1 1\nknots_circumferential 0 0 1 1\n"
                   "control_points 3 2\n0 0\n0 1\n1 0\n1 1\n2 0\n2 1\n");
        CHECK_THROWS_AS(io::read_map(path), SchemaError);
    }

    SUBCASE("invalid knot vector") {
        const fs::path path = temp_file("bad_knots.sbgeo");
        write_text(path, "sbgeo 1\ntype curve\ndegree 2\nknots 0 0 0 1 1 1 1\n"
                         "control_points 4\n0 0\n1 0\n1 1\n0 1\n");
        CHECK_THROWS_AS(io::read_curve(path), SchemaError);
    }
}

TEST_CASE("boundary-to-center documents are reindexed on load") {
    const GeometryMap reference = builtin::center_scaled_square();
    // The same net typed with the radial rows running boundary -> center.
    std::string doc = "sbgeo 1\ntype map\norientation boundary-to-center\n"
                      "degree_radial 2\ndegree_circumferential 2\n"
                      "knots_radial 0 0 0 1 1 1\n"
                      "knots_circumferential 0 0 0 0.25 0.25 0.5 0.5 0.75 0.75 1 1 1\n"
                      "scaling_center 0.5 0.5\n"
                      "control_points 3 9\n";
    for (int i = reference.num_radial() - 1; i >= 0; --i) {
        for (int j = 0; j < reference.num_circ(); ++j) {
            doc += std::to_string(reference.net_x()(i, j)) + " " +
                   std::to_string(reference.net_y()(i, j)) + "\n";
        }
    }
    const fs::path path = temp_file("appendix_orientation.sbgeo");
    write_text(path, doc);
    const GeometryMap loaded = io::read_map(path);
    CHECK(loaded.structure().is_scaled_boundary);
    CHECK(loaded.structure().has_straight_rays);
    CHECK((loaded.net_x() - reference.net_x()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((loaded.net_y() - reference.net_y()).cwiseAbs().maxCoeff() == 0.0);
}
